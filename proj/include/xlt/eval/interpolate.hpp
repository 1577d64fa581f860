#pragma once

#include <filesystem>
#include <vector>

namespace xlt::eval {

struct InterpolationResult {
  double lambda = 0.0;                 // weight on model A
  double dev_accuracy = 0.0;           // accuracy at lambda on the dev set
  std::vector<double> combined_test;   // lambda*p_a + (1-lambda)*p_b
};

// Grid-searches lambda over {0, 0.01, ..., 1} for the mix
// p = lambda*p_a + (1-lambda)*p_b maximizing dev accuracy at threshold 0.5;
// ties resolve to the smaller lambda. Applies the winner to the test scores.
InterpolationResult interpolate(const std::vector<double>& dev_a,
                                const std::vector<double>& dev_b,
                                const std::vector<int>& dev_labels,
                                const std::vector<double>& test_a,
                                const std::vector<double>& test_b);

// External per-example score files: JSON lines {"id": int, "p_positive": float}.
// Returned in id order; ids must form a consistent set across files.
std::vector<double> read_score_file(const std::filesystem::path& file);
void write_score_file(const std::vector<double>& scores, const std::filesystem::path& file);

}  // namespace xlt::eval
