#include "xlt/model/gru.hpp"

#include <cmath>

namespace xlt::model {

std::vector<std::string> gru_param_names(const std::string& prefix) {
  std::vector<std::string> names;
  names.reserve(9);
  for (const char* s : kGruSuffixes) names.push_back(prefix + "." + s);
  return names;
}

void add_gru_params(ParamStore& store, const std::string& prefix, GruShape shape,
                    numcore::Rng& rng) {
  using numcore::glorot_tensor;
  using numcore::Tensor;
  const int in = shape.input, hid = shape.hidden;
  for (const char* gate : {"z", "r", "h"}) {
    const std::string g(gate);
    store.add(prefix + ".W" + g, glorot_tensor<float>({in, hid}, in, hid, rng));
    store.add(prefix + ".U" + g, glorot_tensor<float>({hid, hid}, hid, hid, rng));
    store.add(prefix + ".b" + g, Tensor({hid}));
  }
}

namespace {

template <typename T>
TensorT<T> as_matrix(const TensorT<T>& t) {
  if (t.ndim() == 1) return TensorT<T>({1, t.dim(0)}, t.vec());
  return t;
}

}  // namespace

template <typename T>
TensorT<T> gru_step(const TensorT<T>& x_in, const TensorT<T>& h_in, const GruWeightsT<T>& w) {
  using numcore::matmul_nn;
  const bool vector_io = x_in.ndim() == 1;
  const TensorT<T> x = as_matrix(x_in);
  const TensorT<T> h = as_matrix(h_in);
  if (x.dim(0) != h.dim(0)) throw dim_error("gru_step: batch mismatch");
  const int batch = x.dim(0);
  const int hid = w.Uz->dim(0);

  auto gate = [&](const TensorT<T>& xs, const TensorT<T>& hs, const TensorT<T>& W,
                  const TensorT<T>& U, const TensorT<T>& b) {
    TensorT<T> out({batch, hid});
    matmul_nn(xs, W, out, false);
    matmul_nn(hs, U, out, true);
    for (int i = 0; i < batch; ++i)
      for (int j = 0; j < hid; ++j) out.at(i, j) += b[j];
    return out;
  };

  TensorT<T> z = gate(x, h, *w.Wz, *w.Uz, *w.bz);
  TensorT<T> r = gate(x, h, *w.Wr, *w.Ur, *w.br);
  for (std::int64_t i = 0; i < z.size(); ++i) z[i] = T{1} / (T{1} + std::exp(-z[i]));
  for (std::int64_t i = 0; i < r.size(); ++i) r[i] = T{1} / (T{1} + std::exp(-r[i]));

  TensorT<T> rh = h;
  for (std::int64_t i = 0; i < rh.size(); ++i) rh[i] *= r[i];
  TensorT<T> c = gate(x, rh, *w.Wh, *w.Uh, *w.bh);
  for (std::int64_t i = 0; i < c.size(); ++i) c[i] = std::tanh(c[i]);

  TensorT<T> out({batch, hid});
  for (std::int64_t i = 0; i < out.size(); ++i)
    out[i] = (T{1} - z[i]) * h[i] + z[i] * c[i];
  require_finite(out, "gru_step");
  if (vector_io) return TensorT<T>({hid}, out.vec());
  return out;
}

template numcore::Tensor gru_step<float>(const numcore::Tensor&, const numcore::Tensor&,
                                         const GruWeightsT<float>&);
template numcore::Tensor64 gru_step<double>(const numcore::Tensor64&, const numcore::Tensor64&,
                                            const GruWeightsT<double>&);

}  // namespace xlt::model
