#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>

#include "xlt/numcore/gradcheck.hpp"
#include "xlt/numcore/optim.hpp"
#include "xlt/numcore/params.hpp"
#include "xlt/numcore/rng.hpp"
#include "xlt/numcore/tape.hpp"
#include "xlt/numcore/tensor.hpp"

using namespace xlt;
using namespace xlt::numcore;

namespace {

bool bit_identical(const Tensor& a, const Tensor& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data(), b.data(), sizeof(float) * static_cast<std::size_t>(a.size())) == 0;
}

}  // namespace

TEST_CASE("tensor shape validation") {
  CHECK_THROWS_AS(Tensor({2, 0}), dim_error);
  CHECK_THROWS_AS(Tensor({-1}), dim_error);
  CHECK_THROWS_AS(Tensor({2, 2}, std::vector<float>{1.0f}), dim_error);
  Tensor t({2, 3});
  CHECK(t.size() == 6);
  CHECK(t.all_finite());
}

TEST_CASE("forward_backward: sum is linear") {
  ParamStore store;
  store.add("x", Tensor::row({1.0f, 2.0f, 3.0f}));
  const double loss = forward_backward<float>(store, [](Tape<float>& t, BoundParams<float>& p) {
    return t.sum(p["x"]);
  });
  CHECK(loss == doctest::Approx(6.0));
  for (int i = 0; i < 3; ++i) CHECK(store.at("x").grad[i] == doctest::Approx(1.0f));
}

TEST_CASE("forward_backward: mse at its minimum") {
  ParamStore store;
  store.add("a", Tensor::row({0.5f, -1.5f, 2.0f, 0.0f}));
  store.add("b", Tensor::row({0.5f, -1.5f, 2.0f, 0.0f}));
  const double loss = forward_backward<float>(store, [](Tape<float>& t, BoundParams<float>& p) {
    Var d = t.sub(p["a"], p["b"]);
    return t.mean(t.mul(d, d));
  });
  CHECK(loss == doctest::Approx(0.0));
  for (int i = 0; i < 4; ++i) {
    CHECK(store.at("a").grad[i] == doctest::Approx(0.0f));
    CHECK(store.at("b").grad[i] == doctest::Approx(0.0f));
  }
}

TEST_CASE("forward_backward: frozen slots report zero grad") {
  ParamStore store;
  store.add("w", Tensor::row({2.0f, 3.0f}));
  store.set_frozen("w", true);
  const double loss = forward_backward<float>(store, [](Tape<float>& t, BoundParams<float>& p) {
    return t.sum(t.mul(p["w"], p["w"]));
  });
  CHECK(loss == doctest::Approx(13.0));
  CHECK(store.at("w").grad[0] == 0.0f);
  CHECK(store.at("w").grad[1] == 0.0f);
}

TEST_CASE("gradients of a random 3-layer graph match finite differences") {
  Rng rng(42);
  ParamStore store;
  store.add("W1", uniform_tensor<float>({4, 5}, -0.8, 0.8, rng));
  store.add("b1", uniform_tensor<float>({5}, -0.2, 0.2, rng));
  store.add("W2", uniform_tensor<float>({5, 3}, -0.8, 0.8, rng));
  store.add("b2", uniform_tensor<float>({3}, -0.2, 0.2, rng));
  store.add("w3", uniform_tensor<float>({3, 1}, -0.8, 0.8, rng));
  const auto x_data = uniform_tensor<float>({2, 4}, -1.0, 1.0, rng).cast<double>();
  const auto y = std::vector<float>{1.0f, 0.0f};

  auto graph = [&](auto& t, auto& p) {
    using S = std::decay_t<decltype(t.scalar(Var{}))>;
    auto x = t.input(x_data.template cast<S>());
    auto h1 = t.tanh(t.add_rowvec(t.matmul(x, p["W1"]), p["b1"]));
    auto h2 = t.sigmoid(t.add_rowvec(t.matmul(h1, p["W2"]), p["b2"]));
    auto probs = t.sigmoid(t.matmul(h2, p["w3"]));
    return t.bce_sum(probs, std::vector<S>(y.begin(), y.end()));
  };
  const auto report = gradient_check(store, graph, 1e-5);
  CHECK(report.entries.size() == 5);
  CHECK(report.max_rel_err() < 1e-4);
}

TEST_CASE("gradient_check is near-exact on a quadratic") {
  ParamStore store;
  store.add("q", Tensor::row({1.0f, -2.0f, 0.5f}));
  auto graph = [](auto& t, auto& p) {
    auto q = p["q"];
    return t.sum(t.mul(q, q));
  };
  const auto report = gradient_check(store, graph);
  CHECK(report.max_rel_err() < 1e-7);
}

TEST_CASE("rmsprop: zero gradient is a fixed point for values") {
  Rng rng(7);
  ParamStore store;
  store.add("w", uniform_tensor<float>({8}, -1.0, 1.0, rng));
  const Tensor before = store.at("w").value;
  rmsprop_step(store, {});
  CHECK(bit_identical(before, store.at("w").value));
}

TEST_CASE("rmsprop: frozen slot is bit-identical under any gradient") {
  ParamStore store;
  auto& slot = store.add("w", Tensor::row({1.25f}));
  slot.frozen = true;
  slot.grad[0] = 5.0f;
  const Tensor before = slot.value;
  const Tensor cache_before = slot.rms_cache;
  rmsprop_step(store, {});
  CHECK(bit_identical(before, store.at("w").value));
  CHECK(bit_identical(cache_before, store.at("w").rms_cache));
}

TEST_CASE("rmsprop: hand-evaluated single step") {
  ParamStore store;
  auto& slot = store.add("w", Tensor::row({0.0f}));
  slot.grad[0] = 1.0f;
  RmsPropConfig cfg;  // lr=0.001, decay=0.9, eps=1e-8
  rmsprop_step(store, cfg);
  CHECK(store.at("w").rms_cache[0] == doctest::Approx(0.1f));
  const float expected = -0.001f * 1.0f / (std::sqrt(0.1f) + 1e-8f);
  CHECK(store.at("w").value[0] == doctest::Approx(expected));
}

TEST_CASE("rmsprop: non-positive learning rate is a config error") {
  ParamStore store;
  store.add("w", Tensor::row({1.0f}));
  CHECK_THROWS_AS(rmsprop_step(store, {.lr = 0.0f}), config_error);
  CHECK_THROWS_AS(rmsprop_step(store, {.lr = -1.0f}), config_error);
}

TEST_CASE("dropout: inference mode is the exact identity") {
  Rng rng(3);
  Tape<float> tape;
  const Tensor x = uniform_tensor<float>({5, 7}, -2.0, 2.0, rng);
  Var in = tape.input(x);
  Var out = tape.dropout(in, 0.5, /*training=*/false, &rng);
  CHECK(out.id == in.id);
  CHECK(bit_identical(tape.value(out), x));
}

TEST_CASE("dropout: zero rate in training is the identity") {
  Rng rng(3);
  Tape<float> tape;
  const Tensor x = uniform_tensor<float>({4}, -1.0, 1.0, rng);
  Var out = tape.dropout(tape.input(x), 0.0, true, &rng);
  CHECK(bit_identical(tape.value(out), x));
}

TEST_CASE("dropout: training mode preserves expectation within 5%") {
  Rng rng(11);
  Tape<float> tape;
  Tensor ones({200, 100}, 1.0f);
  Var out = tape.dropout(tape.input(std::move(ones)), 0.5, true, &rng);
  double mean = 0.0;
  const auto& v = tape.value(out);
  for (std::int64_t i = 0; i < v.size(); ++i) mean += v[i];
  mean /= static_cast<double>(v.size());
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("dropout: rate >= 1 rejected") {
  Rng rng(1);
  Tape<float> tape;
  Var in = tape.input(Tensor::row({1.0f}));
  CHECK_THROWS_AS(tape.dropout(in, 1.0, true, &rng), config_error);
}

TEST_CASE("dropout: same seed gives bit-identical masks") {
  auto run = [] {
    Rng rng(99);
    Tape<float> tape;
    Tensor x({64}, 1.0f);
    Var out = tape.dropout(tape.input(std::move(x)), 0.5, true, &rng);
    return tape.value(out);
  };
  CHECK(bit_identical(run(), run()));
}

TEST_CASE("shape mismatch raises dim_error") {
  Tape<float> tape;
  Var a = tape.input(Tensor({2, 3}, 1.0f));
  Var b = tape.input(Tensor({3, 3}, 1.0f));
  CHECK_THROWS_AS(tape.add(a, b), dim_error);
  CHECK_THROWS_AS(tape.mul(a, b), dim_error);
  Var c = tape.input(Tensor({4, 2}, 1.0f));
  CHECK_THROWS_AS(tape.matmul(a, c), dim_error);
}

TEST_CASE("non-finite intermediates raise numeric_error") {
  Tape<float> tape;
  Var a = tape.input(Tensor::row({100.0f}));
  Var big = tape.affine(a, 1e30f, 0.0f);
  CHECK_THROWS_AS(tape.mul(big, big), numeric_error);
}

TEST_CASE("gather_rows rejects out-of-range ids") {
  Tape<float> tape;
  Var table = tape.input(Tensor({3, 2}, 1.0f));
  CHECK_THROWS_AS(tape.gather_rows(table, {0, 3}), data_error);
}

TEST_CASE("embedding gather accumulates gradients per row") {
  ParamStore store;
  store.add("emb", Tensor({3, 2}, std::vector<float>{1, 2, 3, 4, 5, 6}));
  forward_backward<float>(store, [](Tape<float>& t, BoundParams<float>& p) {
    // Row 1 is gathered twice; its gradient must be 2, others 1 or 0.
    return t.sum(t.gather_rows(p["emb"], {1, 1, 2}));
  });
  const auto& g = store.at("emb").grad;
  CHECK(g[0] == 0.0f);
  CHECK(g[1] == 0.0f);
  CHECK(g[2] == 2.0f);
  CHECK(g[3] == 2.0f);
  CHECK(g[4] == 1.0f);
  CHECK(g[5] == 1.0f);
}

TEST_CASE("rng streams are deterministic and independent") {
  Rng a = Rng::derive(123, stream::kLabeledDropout, 5);
  Rng b = Rng::derive(123, stream::kLabeledDropout, 5);
  Rng c = Rng::derive(123, stream::kProjectionDropout, 5);
  bool all_same = true, any_diff = false;
  for (int i = 0; i < 32; ++i) {
    const auto va = a.next(), vb = b.next(), vc = c.next();
    all_same = all_same && va == vb;
    any_diff = any_diff || va != vc;
  }
  CHECK(all_same);
  CHECK(any_diff);
}

TEST_CASE("rng uniform_int covers inclusive bounds") {
  Rng rng(5);
  bool lo_seen = false, hi_seen = false;
  for (int i = 0; i < 2000; ++i) {
    const int v = rng.uniform_int(15, 30);
    CHECK(v >= 15);
    CHECK(v <= 30);
    lo_seen = lo_seen || v == 15;
    hi_seen = hi_seen || v == 30;
  }
  CHECK(lo_seen);
  CHECK(hi_seen);
}
