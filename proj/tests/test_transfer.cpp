#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <map>

#include "xlt/errors.hpp"
#include "xlt/numcore/gradcheck.hpp"
#include "xlt/synth/benchmark.hpp"
#include "xlt/synth/generator.hpp"
#include "xlt/transfer/losses.hpp"
#include "xlt/transfer/trainer.hpp"

using namespace xlt;
using namespace xlt::transfer;
using model::GridBatch;
using model::LanguagePack;
using model::ModelConfig;
using model::TransferModel;
using numcore::Rng;
using numcore::Tensor;
using textpipe::EncodedReview;
using textpipe::ParallelParagraph;
using textpipe::TokenGrid;
using textpipe::Vocabulary;

namespace {

Vocabulary vocab_of(int words, const std::string& prefix) {
  Vocabulary v;
  for (int i = 0; i < words; ++i) v.add(prefix + std::to_string(i));
  return v;
}

ModelConfig tiny_cfg() {
  ModelConfig cfg;
  cfg.embed_dim = 6;
  cfg.sent_hidden = 8;
  cfg.repr_dim = 8;
  cfg.sentences = 2;
  cfg.words = 3;
  return cfg;
}

TransferModel tiny_model(std::uint64_t seed = 5) {
  return TransferModel::create(tiny_cfg(), {{"src", vocab_of(12, "s")}, {"tgt", vocab_of(12, "t")}},
                               seed);
}

TokenGrid grid_from(std::vector<std::int32_t> ids, int S, int W) {
  TokenGrid g;
  g.sentences = S;
  g.words = W;
  g.ids = std::move(ids);
  return g;
}

EncodedReview review_of(std::vector<std::int32_t> ids, int label, int S, int W) {
  EncodedReview r;
  r.grid = grid_from(std::move(ids), S, W);
  r.label = label;
  return r;
}

std::vector<EncodedReview> random_reviews(int n, const ModelConfig& cfg, int vocab, Rng& rng) {
  std::vector<EncodedReview> out;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int32_t> ids(static_cast<std::size_t>(cfg.sentences) * cfg.words);
    for (auto& id : ids) id = rng.uniform_int(0, vocab - 1);
    out.push_back(review_of(std::move(ids), rng.uniform_int(0, 1), cfg.sentences, cfg.words));
  }
  return out;
}

std::vector<ParallelParagraph> random_paragraphs(int n, const ModelConfig& cfg, int vocab,
                                                 Rng& rng) {
  std::vector<ParallelParagraph> out;
  for (int i = 0; i < n; ++i) {
    ParallelParagraph p;
    std::vector<std::int32_t> a(static_cast<std::size_t>(cfg.sentences) * cfg.words);
    std::vector<std::int32_t> b(a.size());
    for (auto& id : a) id = rng.uniform_int(0, vocab - 1);
    for (auto& id : b) id = rng.uniform_int(0, vocab - 1);
    p.source = grid_from(std::move(a), cfg.sentences, cfg.words);
    p.target = grid_from(std::move(b), cfg.sentences, cfg.words);
    p.group_size = cfg.sentences;
    out.push_back(std::move(p));
  }
  return out;
}

void set_all(TransferModel& m, const std::string& slot, float value) {
  auto& t = m.params.at(slot).value;
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = value;
}

std::map<std::string, Tensor> snapshot(const TransferModel& m) {
  std::map<std::string, Tensor> out;
  for (int i = 0; i < m.params.size(); ++i)
    out.emplace(m.params.slot(i).name, m.params.slot(i).value);
  return out;
}

bool bits_equal(const Tensor& a, const Tensor& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * 4) == 0;
}

synth::SynthSpec small_spec(std::uint64_t seed = 3) {
  synth::SynthSpec spec;
  spec.vocab_size = 120;
  spec.positive_words = 20;
  spec.negative_words = 20;
  spec.labeled = 240;
  spec.parallel = 420;
  spec.test = 120;
  spec.seed = seed;
  return spec;
}

synth::BenchConfig small_bench(std::uint64_t seed = 9) {
  synth::BenchConfig cfg;
  cfg.model.embed_dim = 8;
  cfg.model.sent_hidden = 12;
  cfg.model.repr_dim = 12;
  cfg.plan.seed = seed;
  cfg.plan.batch_size = 16;
  cfg.plan.parallel_batch_size = 8;
  cfg.plan.labeled_epochs = 2;
  cfg.plan.projection_epochs = 3;
  cfg.plan.pretrain_epochs = 1;
  cfg.plan.joint_epochs = 2;
  return cfg;
}

}  // namespace

TEST_CASE("labeled loss: closed forms") {
  TransferModel m = tiny_model();
  // Zero prediction layer puts every probability at exactly 0.5.
  set_all(m, "pred.W", 0.0f);
  set_all(m, "pred.b", 0.0f);
  const auto r1 = review_of({2, 3, 4, 5, 6, 7}, 1, 2, 3);
  const auto r0 = review_of({7, 6, 5, 4, 3, 2}, 0, 2, 3);

  const double single = labeled_loss(m, {r1}, "src");
  CHECK(single == doctest::Approx(std::log(2.0)).epsilon(1e-6));

  // Additivity over the batch.
  const double pair = labeled_loss(m, {r1, r0}, "src");
  CHECK(pair == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-6));

  // Saturated correct prediction: loss vanishes (clamped at 1e-7).
  auto& bias = m.params.at("pred.b").value;
  bias[0] = 30.0f;
  const double perfect = labeled_loss(m, {r1}, "src");
  CHECK(perfect == doctest::Approx(0.0).epsilon(1e-5));
  CHECK(perfect < 1e-5);
}

TEST_CASE("projection loss: identical branches give exactly zero") {
  TransferModel m = tiny_model();
  // Same embeddings on both sides plus the same grids => identical
  // representations.
  m.params.at("embed.tgt").value = m.params.at("embed.src").value;
  ParallelParagraph p;
  p.source = grid_from({2, 3, 4, 5, 6, 7}, 2, 3);
  p.target = p.source;
  p.group_size = 2;
  CHECK(projection_loss(m, {p}, "src", "tgt") == 0.0);
}

TEST_CASE("projection loss: forced representation difference of 0.25") {
  // d^T = 4, R_e = [1,0,0,0], R_f = 0 -> (1/4) * 1 = 0.25. Checks the loss
  // composition on the tape with pinned representations.
  numcore::Tape<float> tape;
  auto r_e = tape.input(Tensor({1, 4}, std::vector<float>{1, 0, 0, 0}));
  auto r_f = tape.input(Tensor({1, 4}));
  auto diff = tape.sub(r_e, r_f);
  auto loss = tape.affine(tape.sum(tape.mul(diff, diff)), 0.25f, 0.0f);
  CHECK(tape.scalar(loss) == doctest::Approx(0.25));
}

TEST_CASE("projection loss: non-negative and symmetric across branches") {
  TransferModel m = tiny_model(17);
  Rng rng(23);
  const auto paras = random_paragraphs(6, m.cfg, 12, rng);
  const double forward = projection_loss(m, paras, "src", "tgt");
  CHECK(forward >= 0.0);

  std::vector<ParallelParagraph> swapped;
  for (const auto& p : paras) {
    ParallelParagraph q;
    q.source = p.target;
    q.target = p.source;
    q.group_size = p.group_size;
    swapped.push_back(std::move(q));
  }
  const double backward = projection_loss(m, swapped, "tgt", "src");
  CHECK(forward == backward);
}

TEST_CASE("projection loss: missing language table is a config error") {
  TransferModel m = tiny_model();
  Rng rng(1);
  const auto paras = random_paragraphs(1, m.cfg, 12, rng);
  CHECK_THROWS_AS(projection_loss(m, paras, "src", "de"), config_error);
}

TEST_CASE("label projection: hard threshold with ties to zero") {
  TransferModel m = tiny_model();
  set_all(m, "pred.W", 0.0f);
  ParallelParagraph p;
  p.source = grid_from({2, 3, 4, 5, 6, 7}, 2, 3);
  p.target = grid_from({4, 4, 4, 4, 4, 4}, 2, 3);
  p.group_size = 2;
  const GridBatch src = GridBatch::from_grids(std::vector<const TokenGrid*>{&p.source});

  // pi = sigmoid(b): 0.6 -> pseudo-label 1, no matter the margin.
  m.params.at("pred.b").value[0] = static_cast<float>(std::log(0.6 / 0.4));
  CHECK(source_hard_labels(m, src, "src") == std::vector<float>{1.0f});

  // Exact tie at 0.5 -> 0.
  m.params.at("pred.b").value[0] = 0.0f;
  CHECK(source_hard_labels(m, src, "src") == std::vector<float>{0.0f});

  // Confident agreement on both sides -> loss near zero.
  m.params.at("pred.b").value[0] = 30.0f;
  CHECK(label_projection_loss(m, {p}, "src", "tgt") == doctest::Approx(0.0).epsilon(1e-5));
}

TEST_CASE("label projection: no gradient reaches the source branch") {
  TransferModel m = tiny_model();
  ParallelParagraph p;
  p.source = grid_from({2, 3, 4, 5, 6, 7}, 2, 3);
  p.target = grid_from({8, 9, 10, 2, 3, 4}, 2, 3);
  p.group_size = 2;
  const GridBatch src = GridBatch::from_grids(std::vector<const TokenGrid*>{&p.source});
  const GridBatch tgt = GridBatch::from_grids(std::vector<const TokenGrid*>{&p.target});

  const auto pseudo = source_hard_labels(m, src, "src");
  numcore::forward_backward<float>(
      m.params, [&](numcore::Tape<float>& t, numcore::BoundParams<float>& bp) {
        return labeled_loss_on_tape(t, bp, m.cfg, tgt, pseudo, "tgt", false, nullptr);
      });
  const auto& src_grad = m.params.at("embed.src").grad;
  for (std::int64_t i = 0; i < src_grad.size(); ++i) CHECK(src_grad[i] == 0.0f);
  const auto& tgt_grad = m.params.at("embed.tgt").grad;
  double sum = 0.0;
  for (std::int64_t i = 0; i < tgt_grad.size(); ++i) sum += std::fabs(tgt_grad[i]);
  CHECK(sum > 0.0);
}

TEST_CASE("projection graph passes the gradient check through both branches") {
  TransferModel m = tiny_model(29);
  ParallelParagraph p;
  p.source = grid_from({2, 3, 4, 5, 6, 7}, 2, 3);
  p.target = grid_from({8, 9, 10, 2, 3, 4}, 2, 3);
  const GridBatch src = GridBatch::from_grids(std::vector<const TokenGrid*>{&p.source});
  const GridBatch tgt = GridBatch::from_grids(std::vector<const TokenGrid*>{&p.target});

  auto graph = [&](auto& t, auto& bp) {
    return projection_loss_on_tape(t, bp, m.cfg, src, tgt, "src", "tgt", false, nullptr);
  };
  const auto report = numcore::gradient_check(m.params, graph);
  CHECK(report.max_rel_err() < 1e-4);
}

TEST_CASE("two-stage training freezes the source side bit-exactly") {
  const auto corpus = synth::generate(small_spec());
  synth::BenchConfig cfg = small_bench();
  const auto data = synth::prepare_bench_data(corpus, cfg);
  TransferModel m = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const Tensor tgt_init = m.params.at("embed.tgt").value;

  std::map<std::string, Tensor> stage1;
  const TrainLog log =
      train_two_stage(m, data.train, data.parallel, cfg.plan, "src", "tgt",
                      [&](const TransferModel& snap) { stage1 = snapshot(snap); });

  CHECK(log.freeze_epoch == cfg.plan.labeled_epochs);
  // Frozen slots: bit-identical to the stage-1 snapshot.
  for (const auto& [name, tensor] : stage1) {
    if (name == "embed.tgt") continue;
    CHECK(bits_equal(tensor, m.params.at(name).value));
  }
  // The target table moved away from both its init and the stage-1 state.
  CHECK(!bits_equal(tgt_init, m.params.at("embed.tgt").value));
  CHECK(!bits_equal(stage1.at("embed.tgt"), m.params.at("embed.tgt").value));

  // Stage-2 steps log no labeled loss and total == alpha * projection.
  bool saw_stage2 = false;
  for (const auto& s : log.steps) {
    CHECK(s.total == s.labeled_loss + cfg.plan.alpha * s.projection_loss);
    if (s.epoch >= log.freeze_epoch) {
      saw_stage2 = true;
      CHECK(s.labeled_loss == 0.0);
      CHECK(s.projection_loss >= 0.0);
    }
  }
  CHECK(saw_stage2);
}

TEST_CASE("two-stage with zero projection epochs leaves target embeddings at init") {
  const auto corpus = synth::generate(small_spec());
  synth::BenchConfig cfg = small_bench();
  cfg.plan.projection_epochs = 0;
  const auto data = synth::prepare_bench_data(corpus, cfg);
  TransferModel m = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const Tensor tgt_init = m.params.at("embed.tgt").value;
  train_two_stage(m, data.train, data.parallel, cfg.plan, "src", "tgt");
  CHECK(bits_equal(tgt_init, m.params.at("embed.tgt").value));
}

TEST_CASE("two-stage stage 2 reduces the projection loss epoch over epoch") {
  synth::SynthSpec spec = small_spec(21);
  spec.parallel = 1500;  // enough steps per epoch for the trend to dominate dropout noise
  const auto corpus = synth::generate(spec);
  synth::BenchConfig cfg = small_bench(21);
  const auto data = synth::prepare_bench_data(corpus, cfg);
  TransferModel m = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const TrainLog log = train_two_stage(m, data.train, data.parallel, cfg.plan, "src", "tgt");

  std::map<int, std::pair<double, int>> by_epoch;  // epoch -> (sum, count)
  for (const auto& s : log.steps)
    if (s.epoch >= log.freeze_epoch) {
      by_epoch[s.epoch].first += s.projection_loss;
      by_epoch[s.epoch].second += 1;
    }
  REQUIRE(by_epoch.size() == 3);
  std::vector<double> means;
  for (const auto& [epoch, acc] : by_epoch) means.push_back(acc.first / acc.second);
  CHECK(means[0] > means[1]);
  CHECK(means[1] > means[2]);
}

TEST_CASE("joint training with alpha=0 reproduces labeled-only training bit for bit") {
  const auto corpus = synth::generate(small_spec(7));
  synth::BenchConfig cfg = small_bench(13);
  cfg.plan.alpha = 0.0;
  const auto data = synth::prepare_bench_data(corpus, cfg);

  TransferModel a = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const TrainLog log_joint = train_joint(a, data.train, data.parallel, cfg.plan, "src", "tgt");

  TransferModel b = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const TrainLog log_labeled = train_labeled_only(b, data.train, cfg.plan, "src");

  CHECK(loss_csv_string(log_joint) == loss_csv_string(log_labeled));
  for (int i = 0; i < a.params.size(); ++i)
    CHECK(bits_equal(a.params.slot(i).value, b.params.at(a.params.slot(i).name).value));
}

TEST_CASE("joint training logs total = labeled + alpha*projection each step") {
  const auto corpus = synth::generate(small_spec(11));
  synth::BenchConfig cfg = small_bench(19);
  cfg.plan.alpha = 0.7;
  const auto data = synth::prepare_bench_data(corpus, cfg);
  TransferModel m = TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
  const TrainLog log = train_joint(m, data.train, data.parallel, cfg.plan, "src", "tgt");

  const int steps_per_epoch =
      static_cast<int>((data.train.size() + cfg.plan.batch_size - 1) / cfg.plan.batch_size);
  CHECK(static_cast<int>(log.steps.size()) ==
        steps_per_epoch * (cfg.plan.pretrain_epochs + cfg.plan.joint_epochs));

  bool saw_projection = false;
  for (const auto& s : log.steps) {
    CHECK(s.total == s.labeled_loss + cfg.plan.alpha * s.projection_loss);
    if (s.epoch < cfg.plan.pretrain_epochs) CHECK(s.projection_loss == 0.0);
    if (s.projection_loss > 0.0) saw_projection = true;
  }
  CHECK(saw_projection);
}

TEST_CASE("training is deterministic given the seed") {
  const auto corpus = synth::generate(small_spec(15));
  synth::BenchConfig cfg = small_bench(27);
  const auto data = synth::prepare_bench_data(corpus, cfg);

  auto run = [&] {
    TransferModel m =
        TransferModel::create(cfg.model, {data.source, data.target}, cfg.plan.seed);
    return loss_csv_string(train_joint(m, data.train, data.parallel, cfg.plan, "src", "tgt"));
  };
  CHECK(run() == run());
}

TEST_CASE("trainers validate their configuration and datasets") {
  TransferModel m = tiny_model();
  TrainingPlan plan;
  plan.alpha = -0.5;
  CHECK_THROWS_AS(plan.validate(), config_error);
  plan.alpha = 1.0;
  plan.batch_size = 0;
  CHECK_THROWS_AS(plan.validate(), config_error);
  plan.batch_size = 8;

  CHECK_THROWS_AS(train_joint(m, {}, {}, plan, "src", "tgt"), config_error);
  Rng rng(2);
  const auto reviews = random_reviews(4, m.cfg, 12, rng);
  CHECK_THROWS_AS(train_two_stage(m, reviews, {}, plan, "src", "tgt"), config_error);
}
