#include "xlt/model/predict.hpp"

#include <algorithm>
#include <cmath>

#include "xlt/errors.hpp"

namespace xlt::model {

namespace {

std::vector<double> logits(const numcore::Tensor& repr, const numcore::Tensor& weights,
                           const numcore::Tensor& bias) {
  if (weights.ndim() != 2 || repr.ndim() != 1 || weights.dim(1) != repr.dim(0) ||
      bias.ndim() != 1 || bias.dim(0) != weights.dim(0))
    throw dim_error("prediction layer shapes do not match the representation");
  const int k = weights.dim(0), d = weights.dim(1);
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    double acc = bias[i];
    for (int j = 0; j < d; ++j) acc += static_cast<double>(weights.at(i, j)) * repr[j];
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> predict_k(const numcore::Tensor& repr, const numcore::Tensor& weights,
                              const numcore::Tensor& bias) {
  std::vector<double> z = logits(repr, weights, bias);
  const double zmax = *std::max_element(z.begin(), z.end());
  double denom = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    denom += v;
  }
  for (double& v : z) v /= denom;
  return z;
}

double predict_binary(const numcore::Tensor& repr, const numcore::Tensor& weights,
                      const numcore::Tensor& bias) {
  if (weights.dim(0) != 1) throw dim_error("predict_binary expects a single output neuron");
  const double z = logits(repr, weights, bias)[0];
  return 1.0 / (1.0 + std::exp(-z));
}

}  // namespace xlt::model
