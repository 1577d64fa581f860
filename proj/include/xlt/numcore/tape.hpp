#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "xlt/errors.hpp"
#include "xlt/numcore/rng.hpp"
#include "xlt/numcore/tensor.hpp"

namespace xlt::numcore {

// Handle into a Tape. Only meaningful for the tape that produced it.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Dynamic reverse-mode tape over the op set the model needs: matmul,
// elementwise arithmetic, sigmoid/tanh, row gather (embedding lookup and
// slicing), reductions, dropout and binary cross-entropy. Each op records a
// backward closure; backward() replays them in reverse.
//
// Every op validates shapes (dim_error) and, unless check_finite is cleared,
// aborts on the first non-finite output (numeric_error).
template <typename T>
class Tape {
 public:
  // Clamp for log terms inside the cross-entropy op.
  static constexpr double kProbClamp = 1e-7;

  bool check_finite = true;

  Var input(TensorT<T> value) { return push(std::move(value), false, nullptr); }

  Var leaf(TensorT<T> value, bool needs_grad) {
    return push(std::move(value), needs_grad, nullptr);
  }

  const TensorT<T>& value(Var v) const { return node(v).value; }

  // Zero tensor when nothing flowed into v during backward().
  const TensorT<T>& grad(Var v) const {
    const Node& n = node(v);
    if (n.grad.empty()) {
      zero_like_ = TensorT<T>(n.value.shape());
      return zero_like_;
    }
    return n.grad;
  }

  T scalar(Var v) const {
    const TensorT<T>& t = value(v);
    if (t.size() != 1) throw dim_error("scalar: tensor has " + shape_str(t.shape()));
    return t[0];
  }

  // --- ops ------------------------------------------------------------

  Var matmul(Var a, Var b) {
    const TensorT<T>&av = val(a), &bv = val(b);
    if (av.ndim() != 2 || bv.ndim() != 2 || av.dim(1) != bv.dim(0))
      throw dim_error("matmul: incompatible shapes " + shape_str(av.shape()) + " * " +
                      shape_str(bv.shape()));
    TensorT<T> out({av.dim(0), bv.dim(1)});
    matmul_nn(av, bv, out, false);
    return push(std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, const Node& self) {
                  if (t.needs(a)) matmul_nt(self.grad, t.val(b), t.grad_buf(a), true);
                  if (t.needs(b)) matmul_tn(t.val(a), self.grad, t.grad_buf(b), true);
                },
                "matmul");
  }

  // a[m,k] * b[n,k]^T -> [m,n]
  Var matmul_transposed(Var a, Var b) {
    const TensorT<T>&av = val(a), &bv = val(b);
    if (av.ndim() != 2 || bv.ndim() != 2 || av.dim(1) != bv.dim(1))
      throw dim_error("matmul_transposed: incompatible shapes");
    TensorT<T> out({av.dim(0), bv.dim(0)});
    matmul_nt(av, bv, out, false);
    return push(std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, const Node& self) {
                  // dA += dC * B ; dB += dC^T * A
                  if (t.needs(a)) matmul_nn(self.grad, t.val(b), t.grad_buf(a), true);
                  if (t.needs(b)) matmul_tn(self.grad, t.val(a), t.grad_buf(b), true);
                },
                "matmul_transposed");
  }

  Var add(Var a, Var b) {
    const TensorT<T>&av = val(a), &bv = val(b);
    require_same_shape(av, bv, "add");
    TensorT<T> out = av;
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] += bv[i];
    return push(std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, const Node& self) {
                  t.accumulate(a, self.grad);
                  t.accumulate(b, self.grad);
                },
                "add");
  }

  Var sub(Var a, Var b) {
    const TensorT<T>&av = val(a), &bv = val(b);
    require_same_shape(av, bv, "sub");
    TensorT<T> out = av;
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
    return push(std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, const Node& self) {
                  t.accumulate(a, self.grad);
                  if (t.needs(b)) {
                    TensorT<T>& g = t.grad_buf(b);
                    for (std::int64_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
                  }
                },
                "sub");
  }

  // Elementwise (Hadamard) product.
  Var mul(Var a, Var b) {
    const TensorT<T>&av = val(a), &bv = val(b);
    require_same_shape(av, bv, "mul");
    TensorT<T> out = av;
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
    return push(std::move(out), needs(a) || needs(b),
                [a, b](Tape& t, const Node& self) {
                  if (t.needs(a)) {
                    TensorT<T>& g = t.grad_buf(a);
                    const TensorT<T>& other = t.val(b);
                    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * other[i];
                  }
                  if (t.needs(b)) {
                    TensorT<T>& g = t.grad_buf(b);
                    const TensorT<T>& other = t.val(a);
                    for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * other[i];
                  }
                },
                "mul");
  }

  // scale * a + shift, elementwise.
  Var affine(Var a, T scale, T shift) {
    TensorT<T> out = val(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = scale * out[i] + shift;
    return push(std::move(out), needs(a),
                [a, scale](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  for (std::int64_t i = 0; i < g.size(); ++i) g[i] += scale * self.grad[i];
                },
                "affine");
  }

  // a[m,n] + bias[n], broadcast over rows.
  Var add_rowvec(Var a, Var bias) {
    const TensorT<T>&av = val(a), &bv = val(bias);
    if (av.ndim() != 2 || bv.ndim() != 1 || av.dim(1) != bv.dim(0))
      throw dim_error("add_rowvec: shapes " + shape_str(av.shape()) + " + " +
                      shape_str(bv.shape()));
    TensorT<T> out = av;
    const int m = av.dim(0), n = av.dim(1);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out[static_cast<std::int64_t>(i) * n + j] += bv[j];
    return push(std::move(out), needs(a) || needs(bias),
                [a, bias, m, n](Tape& t, const Node& self) {
                  t.accumulate(a, self.grad);
                  if (t.needs(bias)) {
                    TensorT<T>& g = t.grad_buf(bias);
                    for (int i = 0; i < m; ++i)
                      for (int j = 0; j < n; ++j)
                        g[j] += self.grad[static_cast<std::int64_t>(i) * n + j];
                  }
                },
                "add_rowvec");
  }

  Var sigmoid(Var a) {
    TensorT<T> out = val(a);
    for (std::int64_t i = 0; i < out.size(); ++i)
      out[i] = T{1} / (T{1} + std::exp(-out[i]));
    return push(std::move(out), needs(a),
                [a](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  for (std::int64_t i = 0; i < g.size(); ++i) {
                    const T s = self.value[i];
                    g[i] += self.grad[i] * s * (T{1} - s);
                  }
                },
                "sigmoid");
  }

  Var tanh(Var a) {
    TensorT<T> out = val(a);
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
    return push(std::move(out), needs(a),
                [a](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  for (std::int64_t i = 0; i < g.size(); ++i) {
                    const T y = self.value[i];
                    g[i] += self.grad[i] * (T{1} - y * y);
                  }
                },
                "tanh");
  }

  // Row gather: out[k,:] = a[ids[k],:]. Backward scatter-adds, which makes it
  // double as embedding lookup (ids = token ids) and row slicing.
  Var gather_rows(Var a, std::vector<int> ids) {
    const TensorT<T>& av = val(a);
    if (av.ndim() != 2) throw dim_error("gather_rows: need 2-D source");
    const int n = av.dim(1);
    for (int id : ids)
      if (id < 0 || id >= av.dim(0))
        throw data_error("gather_rows: row id " + std::to_string(id) + " out of range [0," +
                         std::to_string(av.dim(0)) + ")");
    TensorT<T> out({static_cast<int>(ids.size()), n});
    for (std::size_t k = 0; k < ids.size(); ++k)
      for (int j = 0; j < n; ++j)
        out[static_cast<std::int64_t>(k) * n + j] = av[static_cast<std::int64_t>(ids[k]) * n + j];
    return push(std::move(out), needs(a),
                [a, ids = std::move(ids), n](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  for (std::size_t k = 0; k < ids.size(); ++k)
                    for (int j = 0; j < n; ++j)
                      g[static_cast<std::int64_t>(ids[k]) * n + j] +=
                          self.grad[static_cast<std::int64_t>(k) * n + j];
                },
                "gather_rows");
  }

  Var sum(Var a) {
    const TensorT<T>& av = val(a);
    T acc{0};
    for (std::int64_t i = 0; i < av.size(); ++i) acc += av[i];
    TensorT<T> out({1});
    out[0] = acc;
    return push(std::move(out), needs(a),
                [a](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  const T d = self.grad[0];
                  for (std::int64_t i = 0; i < g.size(); ++i) g[i] += d;
                },
                "sum");
  }

  Var mean(Var a) {
    const std::int64_t n = val(a).size();
    return affine(sum(a), T{1} / static_cast<T>(n), T{0});
  }

  // Inverted dropout: surviving entries are scaled by 1/(1-rate) so the
  // expectation matches the input. Identity when training is false.
  Var dropout(Var a, double rate, bool training, Rng* rng) {
    if (rate < 0.0 || rate >= 1.0)
      throw config_error("dropout rate must be in [0,1), got " + std::to_string(rate));
    if (!training || rate == 0.0) return a;
    if (rng == nullptr) throw config_error("dropout in training mode needs an rng");
    const TensorT<T>& av = val(a);
    TensorT<T> mask(av.shape());
    const T keep_scale = T{1} / static_cast<T>(1.0 - rate);
    for (std::int64_t i = 0; i < mask.size(); ++i)
      mask[i] = rng->uniform() < rate ? T{0} : keep_scale;
    TensorT<T> out = av;
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
    return push(std::move(out), needs(a),
                [a, mask = std::move(mask)](Tape& t, const Node& self) {
                  if (!t.needs(a)) return;
                  TensorT<T>& g = t.grad_buf(a);
                  for (std::int64_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * mask[i];
                },
                "dropout");
  }

  // Summed binary cross-entropy of probabilities against fixed targets:
  //   -sum_i [y_i log p_i + (1-y_i) log(1-p_i)]
  // with p clamped to [kProbClamp, 1-kProbClamp] inside the log terms.
  Var bce_sum(Var probs, std::vector<T> targets) {
    const TensorT<T>& pv = val(probs);
    if (pv.size() != static_cast<std::int64_t>(targets.size()))
      throw dim_error("bce_sum: " + std::to_string(targets.size()) + " targets for " +
                      std::to_string(pv.size()) + " probabilities");
    const T lo = static_cast<T>(kProbClamp);
    const T hi = T{1} - static_cast<T>(kProbClamp);
    T acc{0};
    for (std::int64_t i = 0; i < pv.size(); ++i) {
      const T p = std::min(std::max(pv[i], lo), hi);
      const T y = targets[static_cast<std::size_t>(i)];
      acc -= y * std::log(p) + (T{1} - y) * std::log(T{1} - p);
    }
    TensorT<T> out({1});
    out[0] = acc;
    return push(std::move(out), needs(probs),
                [probs, targets = std::move(targets), lo, hi](Tape& t, const Node& self) {
                  if (!t.needs(probs)) return;
                  TensorT<T>& g = t.grad_buf(probs);
                  const TensorT<T>& pv = t.val(probs);
                  const T d = self.grad[0];
                  for (std::int64_t i = 0; i < g.size(); ++i) {
                    const T p = pv[i];
                    if (p < lo || p > hi) continue;  // clamped region, zero slope
                    const T y = targets[static_cast<std::size_t>(i)];
                    g[i] += d * (-(y / p) + (T{1} - y) / (T{1} - p));
                  }
                },
                "bce_sum");
  }

  // --- backward --------------------------------------------------------

  void backward(Var loss) {
    Node& ln = node(loss);
    if (ln.value.size() != 1) throw dim_error("backward: loss must be scalar");
    if (!ln.needs_grad) return;  // nothing trainable feeds the loss
    grad_buf(loss)[0] = T{1};
    for (int id = loss.id; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (n.needs_grad && n.back && !n.grad.empty()) n.back(*this, n);
    }
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;  // allocated lazily, zeros
    bool needs_grad = false;
    std::function<void(Tape&, const Node&)> back;
  };

  std::vector<Node> nodes_;
  mutable TensorT<T> zero_like_;

  Node& node(Var v) { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const Node& node(Var v) const { return nodes_.at(static_cast<std::size_t>(v.id)); }
  const TensorT<T>& val(Var v) const { return node(v).value; }
  bool needs(Var v) const { return node(v).needs_grad; }

  TensorT<T>& grad_buf(Var v) {
    Node& n = node(v);
    if (n.grad.empty()) n.grad = TensorT<T>(n.value.shape());
    return n.grad;
  }

  void accumulate(Var v, const TensorT<T>& g) {
    if (!needs(v)) return;
    TensorT<T>& dst = grad_buf(v);
    for (std::int64_t i = 0; i < dst.size(); ++i) dst[i] += g[i];
  }

  Var push(TensorT<T> value, bool needs_grad, std::function<void(Tape&, const Node&)> back,
           const char* op = nullptr) {
    if (check_finite && op != nullptr) require_finite(value, op);
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }
};

}  // namespace xlt::numcore
