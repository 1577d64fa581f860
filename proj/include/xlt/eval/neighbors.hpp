#pragma once

#include <string>
#include <vector>

#include "xlt/model/model.hpp"

namespace xlt::eval {

struct Neighbor {
  std::string token;
  double score = 0.0;  // cosine similarity, in [-1, 1]
};

// Top-k target-language tokens by cosine similarity between embedding rows.
// PAD and UNK never appear in the result. Ties order by target id. An
// out-of-vocabulary query is an error naming the token.
std::vector<Neighbor> neighbors(const model::TransferModel& model, const std::string& query,
                                const std::string& source_lang, const std::string& target_lang,
                                int k);

double cosine_similarity(const float* a, const float* b, int dim);

}  // namespace xlt::eval
