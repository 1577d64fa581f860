#pragma once

#include <cstdint>

namespace xlt::eval {

// Two-sided Fisher's exact test for the 2x2 table [[a, b], [c, d]], by the
// probability-mass rule: the p-value sums the hypergeometric probabilities
// of every table with the same margins whose probability does not exceed
// the observed table's.
//
// Tables with total count <= 64 are evaluated in exact integer arithmetic;
// larger tables use log-gamma with the conventional 1e-7 relative slack on
// the inclusion threshold.
double fisher_exact(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d);

}  // namespace xlt::eval
