#pragma once

#include <vector>

#include "xlt/numcore/tensor.hpp"

namespace xlt::model {

// Prediction layer on a single task representation r [d^T].
//
// K-way head: pi_k = exp(w_k . r + b_k), normalized by the sum over k, i.e.
// a softmax over the layer's neurons. weights are [K, d^T], bias [K].
std::vector<double> predict_k(const numcore::Tensor& repr, const numcore::Tensor& weights,
                              const numcore::Tensor& bias);

// Binary head (K = 1): sigmoid(w . r + b).
double predict_binary(const numcore::Tensor& repr, const numcore::Tensor& weights,
                      const numcore::Tensor& bias);

}  // namespace xlt::model
