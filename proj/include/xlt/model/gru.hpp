#pragma once

#include <string>
#include <vector>

#include "xlt/numcore/params.hpp"
#include "xlt/numcore/tape.hpp"
#include "xlt/numcore/tensor.hpp"

namespace xlt::model {

using numcore::BoundParams;
using numcore::ParamStore;
using numcore::ParamStoreT;
using numcore::Tape;
using numcore::TensorT;
using numcore::Var;

// One GRU cell, the Cho et al. formulation:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   c = tanh(x Wh + (r . h) Uh + bh)
//   h' = (1 - z) . h + z . c
// W* are [input, hidden], U* are [hidden, hidden], b* are [hidden].

struct GruShape {
  int input = 0;
  int hidden = 0;
};

inline const char* const kGruSuffixes[9] = {"Wz", "Uz", "bz", "Wr", "Ur",
                                            "br", "Wh", "Uh", "bh"};

std::vector<std::string> gru_param_names(const std::string& prefix);

// Registers the nine parameter tensors under "<prefix>.<suffix>".
// Matrices get fan-based uniform init, biases start at zero.
void add_gru_params(ParamStore& store, const std::string& prefix, GruShape shape,
                    numcore::Rng& rng);

template <typename T>
struct GruWeightsT {
  const TensorT<T>*Wz, *Uz, *bz, *Wr, *Ur, *br, *Wh, *Uh, *bh;

  static GruWeightsT from_store(const ParamStoreT<T>& store, const std::string& prefix) {
    return GruWeightsT{&store.at(prefix + ".Wz").value, &store.at(prefix + ".Uz").value,
                       &store.at(prefix + ".bz").value, &store.at(prefix + ".Wr").value,
                       &store.at(prefix + ".Ur").value, &store.at(prefix + ".br").value,
                       &store.at(prefix + ".Wh").value, &store.at(prefix + ".Uh").value,
                       &store.at(prefix + ".bh").value};
  }
};
using GruWeights = GruWeightsT<float>;

// Single step without a tape; x is [batch, input] (or [input]), h_prev is
// [batch, hidden] (or [hidden]). Used directly by tests and oracles.
template <typename T>
TensorT<T> gru_step(const TensorT<T>& x, const TensorT<T>& h_prev, const GruWeightsT<T>& w);

extern template numcore::Tensor gru_step<float>(const numcore::Tensor&, const numcore::Tensor&,
                                                const GruWeightsT<float>&);
extern template numcore::Tensor64 gru_step<double>(const numcore::Tensor64&,
                                                   const numcore::Tensor64&,
                                                   const GruWeightsT<double>&);

// Tape-bound parameter handles for one cell.
template <typename T>
struct GruVars {
  Var Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;

  static GruVars bind(BoundParams<T>& params, const std::string& prefix) {
    return GruVars{params[prefix + ".Wz"], params[prefix + ".Uz"], params[prefix + ".bz"],
                   params[prefix + ".Wr"], params[prefix + ".Ur"], params[prefix + ".br"],
                   params[prefix + ".Wh"], params[prefix + ".Uh"], params[prefix + ".bh"]};
  }
};

template <typename T>
Var gru_step_on_tape(Tape<T>& t, const GruVars<T>& g, Var x, Var h_prev) {
  Var z = t.sigmoid(t.add_rowvec(t.add(t.matmul(x, g.Wz), t.matmul(h_prev, g.Uz)), g.bz));
  Var r = t.sigmoid(t.add_rowvec(t.add(t.matmul(x, g.Wr), t.matmul(h_prev, g.Ur)), g.br));
  Var c = t.tanh(
      t.add_rowvec(t.add(t.matmul(x, g.Wh), t.matmul(t.mul(r, h_prev), g.Uh)), g.bh));
  return t.add(t.mul(t.affine(z, T{-1}, T{1}), h_prev), t.mul(z, c));
}

}  // namespace xlt::model
