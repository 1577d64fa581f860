#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlt/model/model.hpp"

namespace xlt::eval {

struct EvalReport {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0, accuracy = 0.0;

  static EvalReport from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                                std::int64_t fn);

  std::string csv() const;   // header + one row
  std::string pretty() const;
};

// Harmonic mean of precision and recall; 0 when both are 0.
double f1_from_pr(double precision, double recall);

// Binary evaluation at threshold 0.5 (prediction 1 iff p > 0.5).
EvalReport evaluate(const model::ModelView& view,
                    const std::vector<textpipe::EncodedReview>& test);

// Probabilities of the positive class for a whole dataset, in order,
// computed in inference mode (chunked internally).
std::vector<double> predict_probabilities(const model::ModelView& view,
                                          const std::vector<textpipe::EncodedReview>& test);

}  // namespace xlt::eval
