#include "xlt/transfer/trainer.hpp"

#include <cstdio>
#include <fstream>
#include <numeric>

#include "xlt/errors.hpp"

namespace xlt::transfer {

namespace {

using numcore::Rng;
using textpipe::EncodedReview;
using textpipe::ParallelParagraph;

std::vector<int> shuffled_indices(std::size_t n, Rng rng) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  return order;
}

struct LabeledBatch {
  GridBatch grids;
  std::vector<float> labels;
};

LabeledBatch gather_labeled(const std::vector<EncodedReview>& data,
                            const std::vector<int>& order, std::size_t begin, std::size_t end) {
  std::vector<const EncodedReview*> ptrs;
  LabeledBatch b;
  for (std::size_t i = begin; i < end; ++i) {
    const EncodedReview& r = data[static_cast<std::size_t>(order[i])];
    ptrs.push_back(&r);
    b.labels.push_back(static_cast<float>(r.label));
  }
  b.grids = GridBatch::from_reviews(ptrs);
  return b;
}

struct ParallelBatch {
  GridBatch source;
  GridBatch target;
};

ParallelBatch gather_parallel(const std::vector<ParallelParagraph>& data,
                              const std::vector<int>& order, std::size_t begin,
                              std::size_t end) {
  std::vector<const textpipe::TokenGrid*> src, tgt;
  for (std::size_t i = begin; i < end; ++i) {
    const ParallelParagraph& p = data[static_cast<std::size_t>(order[i])];
    src.push_back(&p.source);
    tgt.push_back(&p.target);
  }
  return ParallelBatch{GridBatch::from_grids(src), GridBatch::from_grids(tgt)};
}

// Endless stream of parallel batches; reshuffles each time the set is
// exhausted, with a seed derived from the cycle index.
class ParallelCycler {
 public:
  ParallelCycler(const std::vector<ParallelParagraph>& data, std::uint64_t seed, int batch)
      : data_(&data), seed_(seed), batch_(batch) {}

  ParallelBatch next() {
    if (pos_ >= order_.size()) {
      order_ = shuffled_indices(data_->size(),
                                Rng::derive(seed_, numcore::stream::kParallelShuffle,
                                            static_cast<std::uint64_t>(cycle_++)));
      pos_ = 0;
    }
    const std::size_t end = std::min(pos_ + static_cast<std::size_t>(batch_), order_.size());
    ParallelBatch b = gather_parallel(*data_, order_, pos_, end);
    pos_ = end;
    return b;
  }

 private:
  const std::vector<ParallelParagraph>* data_;
  std::uint64_t seed_;
  int batch_;
  std::vector<int> order_;
  std::size_t pos_ = 0;
  int cycle_ = 0;
};

// Shared loop: runs `epochs` epochs over the labeled set starting at epoch
// number `epoch_base`; when `with_projection` is set, every step also draws a
// parallel batch and adds alpha * projection (or label-projection) loss.
void run_labeled_epochs(TransferModel& model, const std::vector<EncodedReview>& labeled,
                        const TrainingPlan& plan, const std::string& source_lang,
                        const std::string& target_lang, int epoch_base, int epochs,
                        bool with_projection, ParallelCycler* parallel, TrainLog& log,
                        int& global_step) {
  const ModelConfig& cfg = model.cfg;
  for (int e = 0; e < epochs; ++e) {
    const int epoch = epoch_base + e;
    const auto order = shuffled_indices(
        labeled.size(), Rng::derive(plan.seed, numcore::stream::kLabeledShuffle,
                                    static_cast<std::uint64_t>(epoch)));
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(plan.batch_size)) {
      const std::size_t end =
          std::min(begin + static_cast<std::size_t>(plan.batch_size), order.size());
      const LabeledBatch batch = gather_labeled(labeled, order, begin, end);

      const bool mix = with_projection && plan.alpha != 0.0;
      ParallelBatch pbatch;
      std::vector<float> pseudo;
      if (mix) {
        pbatch = parallel->next();
        if (plan.supervision == SupervisionMode::label)
          pseudo = source_hard_labels(model, pbatch.source, source_lang);
      }

      double labeled_value = 0.0, projection_value = 0.0;
      numcore::forward_backward<float>(
          model.params, [&](Tape<float>& t, BoundParams<float>& p) {
            Rng drop_lab = Rng::derive(plan.seed, numcore::stream::kLabeledDropout,
                                       static_cast<std::uint64_t>(global_step));
            Var loss = labeled_loss_on_tape(t, p, cfg, batch.grids, batch.labels, source_lang,
                                            true, &drop_lab);
            labeled_value = static_cast<double>(t.scalar(loss));
            if (mix) {
              Rng drop_proj = Rng::derive(plan.seed, numcore::stream::kProjectionDropout,
                                          static_cast<std::uint64_t>(global_step));
              // Representation matching uses inference-mode encodes: Eq-style
              // task representations, not their dropout-corrupted versions.
              // The label branch is an ordinary classification loss and keeps
              // dropout like the labeled loss.
              Var proj =
                  plan.supervision == SupervisionMode::representation
                      ? projection_loss_on_tape(t, p, cfg, pbatch.source, pbatch.target,
                                                source_lang, target_lang, false, nullptr)
                      : labeled_loss_on_tape(t, p, cfg, pbatch.target, pseudo, target_lang,
                                             true, &drop_proj);
              projection_value = static_cast<double>(t.scalar(proj));
              loss = t.add(loss, t.affine(proj, static_cast<float>(plan.alpha), 0.0f));
            }
            return loss;
          });
      numcore::rmsprop_step(model.params, plan.optim);

      log.steps.push_back(LossBreakdown{epoch, global_step, labeled_value, projection_value,
                                        labeled_value + plan.alpha * projection_value});
      ++global_step;
    }
  }
}

void require_nonempty(const std::vector<EncodedReview>& labeled) {
  if (labeled.empty()) throw config_error("training needs a non-empty labeled dataset");
}

}  // namespace

void TrainingPlan::validate() const {
  if (alpha < 0.0) throw config_error("alpha must be non-negative");
  if (labeled_epochs < 0 || projection_epochs < 0 || pretrain_epochs < 0 || joint_epochs < 0)
    throw config_error("epoch counts must be non-negative");
  if (batch_size < 1) throw config_error("batch_size must be at least 1");
  if (parallel_batch_size < 0) throw config_error("parallel_batch_size must be non-negative");
}

std::string loss_csv_string(const TrainLog& log) {
  std::string out = "epoch,step,labeled_loss,projection_loss,total\n";
  char buf[160];
  for (const auto& s : log.steps) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", s.epoch, s.step, s.labeled_loss,
                  s.projection_loss, s.total);
    out += buf;
  }
  return out;
}

void write_loss_csv(const TrainLog& log, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write loss log: " + file.string());
  out << loss_csv_string(log);
}

TrainLog train_two_stage(TransferModel& model, const std::vector<EncodedReview>& labeled,
                         const std::vector<ParallelParagraph>& parallel,
                         const TrainingPlan& plan, const std::string& source_lang,
                         const std::string& target_lang, const StageCallback& after_stage1) {
  plan.validate();
  require_nonempty(labeled);
  if (parallel.empty()) throw config_error("two-stage training needs parallel data");
  model.language(source_lang);
  model.language(target_lang);

  TrainLog log;
  int global_step = 0;

  // Stage 1: source-language classifier on the labeled loss.
  run_labeled_epochs(model, labeled, plan, source_lang, target_lang, 0, plan.labeled_epochs,
                     false, nullptr, log, global_step);
  if (after_stage1) after_stage1(model);

  // Freeze everything the projection stage must not touch: source embeddings
  // and the shared encoder/prediction stack. Only V keeps learning.
  model.params.set_frozen_prefix(TransferModel::embed_slot(source_lang), true);
  model.params.set_frozen_prefix("sent.", true);
  model.params.set_frozen_prefix("review.", true);
  model.params.set_frozen_prefix("pred.", true);
  log.freeze_epoch = plan.labeled_epochs;

  const ModelConfig& cfg = model.cfg;
  const int pbatch_size = plan.effective_parallel_batch();
  for (int e = 0; e < plan.projection_epochs; ++e) {
    const int epoch = plan.labeled_epochs + e;
    const auto order = shuffled_indices(
        parallel.size(), Rng::derive(plan.seed, numcore::stream::kParallelShuffle,
                                     static_cast<std::uint64_t>(e)));
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(pbatch_size)) {
      const std::size_t end =
          std::min(begin + static_cast<std::size_t>(pbatch_size), order.size());
      const ParallelBatch batch = gather_parallel(parallel, order, begin, end);
      std::vector<float> pseudo;
      if (plan.supervision == SupervisionMode::label)
        pseudo = source_hard_labels(model, batch.source, source_lang);

      double projection_value = 0.0;
      numcore::forward_backward<float>(
          model.params, [&](Tape<float>& t, BoundParams<float>& p) {
            Rng drop = Rng::derive(plan.seed, numcore::stream::kProjectionDropout,
                                   static_cast<std::uint64_t>(global_step));
            // Same convention as the joint phase: representation matching on
            // inference-mode encodes, label projection with dropout.
            Var proj = plan.supervision == SupervisionMode::representation
                           ? projection_loss_on_tape(t, p, cfg, batch.source, batch.target,
                                                     source_lang, target_lang, false, nullptr)
                           : labeled_loss_on_tape(t, p, cfg, batch.target, pseudo, target_lang,
                                                  true, &drop);
            projection_value = static_cast<double>(t.scalar(proj));
            return proj;
          });
      numcore::rmsprop_step(model.params, plan.optim);

      log.steps.push_back(LossBreakdown{epoch, global_step, 0.0, projection_value,
                                        plan.alpha * projection_value});
      ++global_step;
    }
  }
  return log;
}

TrainLog train_joint(TransferModel& model, const std::vector<EncodedReview>& labeled,
                     const std::vector<ParallelParagraph>& parallel, const TrainingPlan& plan,
                     const std::string& source_lang, const std::string& target_lang) {
  plan.validate();
  require_nonempty(labeled);
  if (plan.alpha != 0.0 && parallel.empty())
    throw config_error("joint training needs parallel data when alpha is non-zero");
  model.language(source_lang);
  if (plan.alpha != 0.0) model.language(target_lang);

  TrainLog log;
  int global_step = 0;
  run_labeled_epochs(model, labeled, plan, source_lang, target_lang, 0, plan.pretrain_epochs,
                     false, nullptr, log, global_step);
  ParallelCycler cycler(parallel, plan.seed, plan.effective_parallel_batch());
  run_labeled_epochs(model, labeled, plan, source_lang, target_lang, plan.pretrain_epochs,
                     plan.joint_epochs, true, &cycler, log, global_step);
  return log;
}

TrainLog train_labeled_only(TransferModel& model, const std::vector<EncodedReview>& labeled,
                            const TrainingPlan& plan, const std::string& source_lang) {
  plan.validate();
  require_nonempty(labeled);
  model.language(source_lang);

  TrainLog log;
  int global_step = 0;
  run_labeled_epochs(model, labeled, plan, source_lang, source_lang, 0,
                     plan.pretrain_epochs + plan.joint_epochs, false, nullptr, log,
                     global_step);
  return log;
}

}  // namespace xlt::transfer
