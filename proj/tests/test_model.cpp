#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "xlt/errors.hpp"
#include "xlt/model/checkpoint.hpp"
#include "xlt/model/gru.hpp"
#include "xlt/model/model.hpp"
#include "xlt/model/predict.hpp"
#include "xlt/numcore/gradcheck.hpp"

using namespace xlt;
using namespace xlt::model;
using numcore::BoundParams;
using numcore::ParamStore;
using numcore::Rng;
using numcore::Tape;
using numcore::Tensor;
using numcore::Tensor64;
using numcore::Var;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("xlt_model_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

textpipe::Vocabulary vocab_of(int words, const std::string& prefix) {
  textpipe::Vocabulary v;
  for (int i = 0; i < words; ++i) v.add(prefix + std::to_string(i));
  return v;
}

TransferModel toy_model(int vocab_words = 18, std::uint64_t seed = 11) {
  ModelConfig cfg;
  cfg.embed_dim = 8;
  cfg.sent_hidden = 8;
  cfg.repr_dim = 8;
  cfg.sentences = 3;
  cfg.words = 4;
  cfg.dropout = 0.5f;
  std::vector<LanguagePack> langs;
  langs.push_back({"en", vocab_of(vocab_words, "e")});
  langs.push_back({"fr", vocab_of(vocab_words, "f")});
  return TransferModel::create(cfg, std::move(langs), seed);
}

textpipe::TokenGrid random_grid(int S, int W, int vocab_size, Rng& rng) {
  textpipe::TokenGrid g;
  g.sentences = S;
  g.words = W;
  g.ids.resize(static_cast<std::size_t>(S) * W);
  for (auto& id : g.ids) id = rng.uniform_int(0, vocab_size - 1);
  return g;
}

std::vector<char> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Scalar GRU recurrence, written independently of the library kernels.
std::vector<double> oracle_gru_step(const std::vector<double>& x, const std::vector<double>& h,
                                    const GruWeightsT<float>& w) {
  const int in = static_cast<int>(x.size());
  const int hid = static_cast<int>(h.size());
  auto gate = [&](const Tensor& W, const Tensor& U, const Tensor& b,
                  const std::vector<double>& hvec) {
    std::vector<double> out(static_cast<std::size_t>(hid));
    for (int j = 0; j < hid; ++j) {
      double acc = b[j];
      for (int i = 0; i < in; ++i) acc += static_cast<double>(W.at(i, j)) * x[static_cast<std::size_t>(i)];
      for (int i = 0; i < hid; ++i) acc += static_cast<double>(U.at(i, j)) * hvec[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
  };
  std::vector<double> z = gate(*w.Wz, *w.Uz, *w.bz, h);
  std::vector<double> r = gate(*w.Wr, *w.Ur, *w.br, h);
  for (double& v : z) v = 1.0 / (1.0 + std::exp(-v));
  for (double& v : r) v = 1.0 / (1.0 + std::exp(-v));
  std::vector<double> rh(static_cast<std::size_t>(hid));
  for (int i = 0; i < hid; ++i) rh[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)] * h[static_cast<std::size_t>(i)];
  std::vector<double> c = gate(*w.Wh, *w.Uh, *w.bh, rh);
  for (double& v : c) v = std::tanh(v);
  std::vector<double> out(static_cast<std::size_t>(hid));
  for (int i = 0; i < hid; ++i)
    out[static_cast<std::size_t>(i)] =
        (1.0 - z[static_cast<std::size_t>(i)]) * h[static_cast<std::size_t>(i)] +
        z[static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace

TEST_CASE("gru_step: all-zero cell maps zero state to zero") {
  ParamStore store;
  Rng rng(1);
  add_gru_params(store, "g", {3, 3}, rng);
  for (int i = 0; i < store.size(); ++i)
    for (std::int64_t k = 0; k < store.slot(i).value.size(); ++k) store.slot(i).value[k] = 0.0f;
  const auto w = GruWeights::from_store(store, "g");
  const Tensor h = gru_step(Tensor::row({1.0f, -2.0f, 0.5f}), Tensor::row({0.0f, 0.0f, 0.0f}), w);
  for (int i = 0; i < 3; ++i) CHECK(h[i] == doctest::Approx(0.0));
}

TEST_CASE("gru_step: all-zero cell halves the previous state") {
  ParamStore store;
  Rng rng(1);
  add_gru_params(store, "g", {3, 3}, rng);
  for (int i = 0; i < store.size(); ++i)
    for (std::int64_t k = 0; k < store.slot(i).value.size(); ++k) store.slot(i).value[k] = 0.0f;
  const auto w = GruWeights::from_store(store, "g");
  const Tensor h =
      gru_step(Tensor::row({0.0f, 0.0f, 0.0f}), Tensor::row({0.4f, -1.0f, 2.0f}), w);
  CHECK(h[0] == doctest::Approx(0.2));
  CHECK(h[1] == doctest::Approx(-0.5));
  CHECK(h[2] == doctest::Approx(1.0));
}

TEST_CASE("gru_step matches a step-by-step scalar evaluation") {
  ParamStore store;
  Rng rng(42);
  add_gru_params(store, "g", {3, 3}, rng);
  const auto w = GruWeights::from_store(store, "g");
  const Tensor x = numcore::uniform_tensor<float>({3}, -1.0, 1.0, rng);
  const Tensor h = numcore::uniform_tensor<float>({3}, -1.0, 1.0, rng);
  const Tensor got = gru_step(x, h, w);
  const auto expected =
      oracle_gru_step({x[0], x[1], x[2]}, {h[0], h[1], h[2]}, w);
  for (int i = 0; i < 3; ++i)
    CHECK(static_cast<double>(got[i]) == doctest::Approx(expected[static_cast<std::size_t>(i)]).epsilon(1e-6));
}

TEST_CASE("encode is deterministic outside training and matches the recurrence oracle") {
  TransferModel m = toy_model();
  Rng rng(7);
  const auto grid = random_grid(3, 4, m.language("en").vocab.size(), rng);
  const std::vector<const textpipe::TokenGrid*> grids{&grid, &grid};
  const ModelView view = swap_embeddings(m, "en");
  const Tensor reprs = represent_batch(view, grids);
  REQUIRE(reprs.shape() == std::vector<int>{2, 8});

  // Identical grids encode identically.
  for (int j = 0; j < 8; ++j) CHECK(reprs.at(0, j) == reprs.at(1, j));

  // Unrolled oracle: sentence GRU per row, then review GRU over the
  // sentence vectors; dropout off.
  const Tensor& table = m.params.at("embed.en").value;
  const auto sent_w = GruWeights::from_store(m.params, "sent");
  const auto rev_w = GruWeights::from_store(m.params, "review");
  std::vector<std::vector<double>> sentence_vecs;
  for (int s = 0; s < 3; ++s) {
    std::vector<double> h(8, 0.0);
    for (int t = 0; t < 4; ++t) {
      const int id = grid.at(s, t);
      std::vector<double> x(8);
      for (int j = 0; j < 8; ++j) x[static_cast<std::size_t>(j)] = table.at(id, j);
      h = oracle_gru_step(x, h, sent_w);
    }
    sentence_vecs.push_back(h);
  }
  std::vector<double> r(8, 0.0);
  for (int s = 0; s < 3; ++s) r = oracle_gru_step(sentence_vecs[static_cast<std::size_t>(s)], r, rev_w);
  for (int j = 0; j < 8; ++j)
    CHECK(static_cast<double>(reprs.at(0, j)) == doctest::Approx(r[static_cast<std::size_t>(j)]).epsilon(1e-5));
}

TEST_CASE("embedding swap changes predictions but shares the encoder objects") {
  TransferModel m = toy_model();
  Rng rng(3);
  const auto grid = random_grid(3, 4, m.language("en").vocab.size(), rng);
  const std::vector<const textpipe::TokenGrid*> grids{&grid};

  const ModelView en = swap_embeddings(m, "en");
  const ModelView fr = swap_embeddings(m, "fr");
  const auto p_en = predict_batch(en, grids);
  const auto p_fr = predict_batch(fr, grids);
  CHECK(p_en[0] != p_fr[0]);  // different tables, different outputs

  // Identity of the shared parameters, not just equality.
  CHECK(&en.model->params.at("sent.Wz") == &fr.model->params.at("sent.Wz"));
  CHECK(&en.model->params.at("pred.W") == &fr.model->params.at("pred.W"));

  // Swap to the same language is the identity; swapping back and forth too.
  const ModelView en2 = swap_embeddings(*en.model, "en");
  CHECK(predict_batch(en2, grids) == p_en);
  CHECK_THROWS_AS(swap_embeddings(m, "de"), config_error);
}

TEST_CASE("predict_k: zero weights give the uniform distribution") {
  const Tensor repr = Tensor::row({0.3f, -0.7f, 1.1f});
  const Tensor w({4, 3});
  const Tensor b({4});
  const auto probs = predict_k(repr, w, b);
  for (const double p : probs) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("predict_k outputs a probability distribution") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor repr = numcore::uniform_tensor<float>({5}, -2.0, 2.0, rng);
    const Tensor w = numcore::uniform_tensor<float>({3, 5}, -2.0, 2.0, rng);
    const Tensor b = numcore::uniform_tensor<float>({3}, -1.0, 1.0, rng);
    const auto probs = predict_k(repr, w, b);
    double total = 0.0;
    for (const double p : probs) {
      CHECK(p >= 0.0);
      total += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("predict_k with K=2 and a zero second neuron reduces to a sigmoid") {
  Rng rng(13);
  const Tensor repr = numcore::uniform_tensor<float>({6}, -1.0, 1.0, rng);
  Tensor w({2, 6});
  for (int j = 0; j < 6; ++j) w.at(0, j) = static_cast<float>(rng.uniform(-1.0, 1.0));
  const Tensor b({2});
  const auto probs = predict_k(repr, w, b);
  double z = 0.0;
  for (int j = 0; j < 6; ++j) z += static_cast<double>(w.at(0, j)) * repr[j];
  CHECK(probs[0] == doctest::Approx(1.0 / (1.0 + std::exp(-z))).epsilon(1e-9));
}

TEST_CASE("predict_binary closed forms and monotonicity") {
  const Tensor repr = Tensor::row({1.0f, 1.0f});
  CHECK(predict_binary(repr, Tensor({1, 2}), Tensor({1})) == doctest::Approx(0.5));

  // theta . r + b = ln 3  =>  sigmoid = 0.75
  Tensor w({1, 2});
  w.at(0, 0) = static_cast<float>(std::log(3.0));
  CHECK(predict_binary(repr, w, Tensor({1})) == doctest::Approx(0.75).epsilon(1e-6));

  double prev = 0.0;
  for (int i = 0; i < 10; ++i) {
    w.at(0, 0) = static_cast<float>(-2.0 + 0.5 * i);
    const double p = predict_binary(repr, w, Tensor({1}));
    if (i > 0) CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("full toy model passes the gradient check through encode and predict") {
  TransferModel m = toy_model();
  Rng rng(21);
  const auto g1 = random_grid(3, 4, m.language("en").vocab.size(), rng);
  const auto g2 = random_grid(3, 4, m.language("en").vocab.size(), rng);
  const GridBatch batch = GridBatch::from_grids(std::vector<const textpipe::TokenGrid*>{&g1, &g2});

  auto graph = [&](auto& t, auto& p) {
    using S = std::decay_t<decltype(t.scalar(Var{}))>;
    Var r = encode_on_tape(t, p, m.cfg, batch, "embed.en", false, nullptr);
    Var probs = predict_binary_on_tape(t, p, r);
    return t.bce_sum(probs, std::vector<S>{S{1}, S{0}});
  };
  const auto report = numcore::gradient_check(m.params, graph);
  // The French table is unused in this graph and must not appear with junk.
  for (const auto& e : report.entries) CHECK(e.max_rel_err < 1e-4);
  CHECK(report.entries.size() == static_cast<std::size_t>(m.params.size()));
}

TEST_CASE("checkpoint: save-load-save is byte-identical with two languages") {
  TempDir tmp;
  TransferModel m = toy_model();
  const auto f1 = tmp.path / "a.xlt";
  const auto f2 = tmp.path / "b.xlt";
  save_checkpoint(m, f1);
  TransferModel loaded = load_checkpoint(f1);
  save_checkpoint(loaded, f2);
  CHECK(file_bytes(f1) == file_bytes(f2));

  REQUIRE(loaded.languages().size() == 2);
  CHECK(loaded.languages()[0].tag == "en");
  CHECK(loaded.languages()[1].tag == "fr");
  CHECK(loaded.language("fr").vocab.size() == m.language("fr").vocab.size());
  CHECK(loaded.language("fr").vocab.token(2) == m.language("fr").vocab.token(2));
  CHECK(loaded.cfg.embed_dim == 8);

  // All tensors bit-identical.
  for (int i = 0; i < m.params.size(); ++i) {
    const auto& a = m.params.slot(i).value;
    const auto& b = loaded.params.at(m.params.slot(i).name).value;
    REQUIRE(a.same_shape(b));
    CHECK(std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * 4) == 0);
  }
}

TEST_CASE("checkpoint: corruption is reported by failure class") {
  TempDir tmp;
  TransferModel m = toy_model();
  const auto file = tmp.path / "m.xlt";
  save_checkpoint(m, file);
  auto bytes = file_bytes(file);

  auto write_variant = [&](const fs::path& p, const std::vector<char>& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  };

  SUBCASE("bad magic") {
    auto corrupt = bytes;
    corrupt[0] = 'Z';
    write_variant(tmp.path / "bad_magic.xlt", corrupt);
    try {
      load_checkpoint(tmp.path / "bad_magic.xlt");
      FAIL("expected checkpoint_error");
    } catch (const checkpoint_error& e) {
      CHECK(e.fault() == checkpoint_fault::bad_magic);
    }
  }

  SUBCASE("unsupported version") {
    auto corrupt = bytes;
    corrupt[8] = 99;
    write_variant(tmp.path / "bad_version.xlt", corrupt);
    try {
      load_checkpoint(tmp.path / "bad_version.xlt");
      FAIL("expected checkpoint_error");
    } catch (const checkpoint_error& e) {
      CHECK(e.fault() == checkpoint_fault::bad_version);
    }
  }

  SUBCASE("truncated payload") {
    auto corrupt = bytes;
    corrupt.resize(corrupt.size() - 17);
    write_variant(tmp.path / "short.xlt", corrupt);
    try {
      load_checkpoint(tmp.path / "short.xlt");
      FAIL("expected checkpoint_error");
    } catch (const checkpoint_error& e) {
      CHECK(e.fault() == checkpoint_fault::truncated);
    }
  }
}

TEST_CASE("grid batches reject ids outside the embedding table") {
  TransferModel m = toy_model();
  textpipe::TokenGrid g;
  g.sentences = 3;
  g.words = 4;
  g.ids.assign(12, 0);
  g.ids[5] = static_cast<std::int32_t>(m.language("en").vocab.size());  // one past the end
  const ModelView view = swap_embeddings(m, "en");
  CHECK_THROWS_AS(predict_batch(view, std::vector<const textpipe::TokenGrid*>{&g}),
                  data_error);
}
