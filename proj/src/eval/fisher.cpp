#include "xlt/eval/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "xlt/errors.hpp"

namespace xlt::eval {

namespace {

// C(n, k) for n <= 64; the result fits in 64 bits (C(64,32) < 2^61).
std::uint64_t binomial_u64(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 c = 1;
  for (std::int64_t i = 1; i <= k; ++i) {
    c = c * static_cast<unsigned __int128>(n - k + i);
    c /= static_cast<unsigned __int128>(i);
  }
  return static_cast<std::uint64_t>(c);
}

double fisher_exact_small(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  const std::int64_t r1 = a + b, r2 = c + d, c1 = a + c, n = r1 + r2;
  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);

  // Numerators share the denominator C(n, c1); exact integer comparisons.
  std::vector<unsigned __int128> weight;
  unsigned __int128 denom = 0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const unsigned __int128 w = static_cast<unsigned __int128>(binomial_u64(r1, x)) *
                                binomial_u64(r2, c1 - x);
    weight.push_back(w);
    denom += w;
  }
  const unsigned __int128 observed = weight[static_cast<std::size_t>(a - lo)];
  unsigned __int128 mass = 0;
  for (const auto w : weight)
    if (w <= observed) mass += w;
  (void)n;
  return static_cast<double>(static_cast<long double>(mass) / static_cast<long double>(denom));
}

double fisher_exact_lgamma(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  const std::int64_t r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d, n = r1 + r2;
  const std::int64_t lo = std::max<std::int64_t>(0, c1 - r2);
  const std::int64_t hi = std::min(r1, c1);

  auto lg = [](std::int64_t v) { return std::lgamma(static_cast<double>(v) + 1.0); };
  const double log_denom = lg(n) - lg(r1) - lg(r2) - lg(c1) - lg(c2);
  auto log_prob = [&](std::int64_t x) {
    return -(lg(x) + lg(r1 - x) + lg(c1 - x) + lg(r2 - c1 + x)) - log_denom;
  };

  const double log_obs = log_prob(a);
  const double threshold = log_obs + std::log1p(1e-7);
  double mass = 0.0, total = 0.0;
  for (std::int64_t x = lo; x <= hi; ++x) {
    const double lp = log_prob(x);
    const double p = std::exp(lp);
    total += p;
    if (lp <= threshold) mass += p;
  }
  return std::min(1.0, mass / total);
}

}  // namespace

double fisher_exact(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  if (a < 0 || b < 0 || c < 0 || d < 0)
    throw data_error("fisher_exact: counts must be non-negative");
  const std::int64_t n = a + b + c + d;
  if (n == 0) throw data_error("fisher_exact: the all-zero table has no p-value");
  if (n <= 64) return fisher_exact_small(a, b, c, d);
  return fisher_exact_lgamma(a, b, c, d);
}

}  // namespace xlt::eval
