#include "xlt/transfer/losses.hpp"

#include "xlt/errors.hpp"

namespace xlt::transfer {

namespace {

GridBatch source_side(const std::vector<textpipe::ParallelParagraph>& batch) {
  std::vector<const textpipe::TokenGrid*> grids;
  grids.reserve(batch.size());
  for (const auto& p : batch) grids.push_back(&p.source);
  return GridBatch::from_grids(grids);
}

GridBatch target_side(const std::vector<textpipe::ParallelParagraph>& batch) {
  std::vector<const textpipe::TokenGrid*> grids;
  grids.reserve(batch.size());
  for (const auto& p : batch) grids.push_back(&p.target);
  return GridBatch::from_grids(grids);
}

void require_language(const TransferModel& model, const std::string& tag) {
  if (!model.has_language(tag))
    throw config_error("model is missing an embedding table for language '" + tag + "'");
}

}  // namespace

template <typename T>
Var labeled_loss_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                         const GridBatch& batch, const std::vector<float>& labels,
                         const std::string& lang_tag, bool training, Rng* dropout_rng) {
  if (static_cast<int>(labels.size()) != batch.batch)
    throw dim_error("labeled_loss: label count does not match batch size");
  Var repr = model::encode_on_tape(tape, params, cfg, batch,
                                   TransferModel::embed_slot(lang_tag), training, dropout_rng);
  Var probs = model::predict_binary_on_tape(tape, params, repr);
  return tape.bce_sum(probs, std::vector<T>(labels.begin(), labels.end()));
}

template Var labeled_loss_on_tape<float>(Tape<float>&, BoundParams<float>&, const ModelConfig&,
                                         const GridBatch&, const std::vector<float>&,
                                         const std::string&, bool, Rng*);
template Var labeled_loss_on_tape<double>(Tape<double>&, BoundParams<double>&,
                                          const ModelConfig&, const GridBatch&,
                                          const std::vector<float>&, const std::string&, bool,
                                          Rng*);

template <typename T>
Var projection_loss_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                            const GridBatch& source, const GridBatch& target,
                            const std::string& source_lang, const std::string& target_lang,
                            bool training, Rng* dropout_rng) {
  if (source.batch != target.batch)
    throw dim_error("projection_loss: source and target batches differ in size");
  Var r_src = model::encode_on_tape(tape, params, cfg, source,
                                    TransferModel::embed_slot(source_lang), training,
                                    dropout_rng);
  Var r_tgt = model::encode_on_tape(tape, params, cfg, target,
                                    TransferModel::embed_slot(target_lang), training,
                                    dropout_rng);
  Var diff = tape.sub(r_src, r_tgt);
  return tape.affine(tape.sum(tape.mul(diff, diff)), T{1} / static_cast<T>(cfg.repr_dim), T{0});
}

template Var projection_loss_on_tape<float>(Tape<float>&, BoundParams<float>&,
                                            const ModelConfig&, const GridBatch&,
                                            const GridBatch&, const std::string&,
                                            const std::string&, bool, Rng*);
template Var projection_loss_on_tape<double>(Tape<double>&, BoundParams<double>&,
                                             const ModelConfig&, const GridBatch&,
                                             const GridBatch&, const std::string&,
                                             const std::string&, bool, Rng*);

std::vector<float> source_hard_labels(const TransferModel& model, const GridBatch& source,
                                      const std::string& source_lang) {
  require_language(model, source_lang);
  const numcore::Tensor probs = numcore::forward_values<float>(
      model.params, [&](Tape<float>& t, BoundParams<float>& p) {
        Var r = model::encode_on_tape(t, p, model.cfg, source,
                                      TransferModel::embed_slot(source_lang), false, nullptr);
        return model::predict_binary_on_tape(t, p, r);
      });
  std::vector<float> labels(static_cast<std::size_t>(probs.size()));
  for (std::int64_t i = 0; i < probs.size(); ++i)
    labels[static_cast<std::size_t>(i)] = probs[i] > 0.5f ? 1.0f : 0.0f;
  return labels;
}

double labeled_loss(const TransferModel& model,
                    const std::vector<textpipe::EncodedReview>& batch,
                    const std::string& lang_tag) {
  require_language(model, lang_tag);
  if (batch.empty()) throw data_error("labeled_loss: empty batch");
  std::vector<const textpipe::EncodedReview*> ptrs;
  std::vector<float> labels;
  for (const auto& r : batch) {
    ptrs.push_back(&r);
    labels.push_back(static_cast<float>(r.label));
  }
  const GridBatch grids = GridBatch::from_reviews(ptrs);
  const auto loss = numcore::forward_values<float>(
      model.params, [&](Tape<float>& t, BoundParams<float>& p) {
        return labeled_loss_on_tape(t, p, model.cfg, grids, labels, lang_tag, false, nullptr);
      });
  return static_cast<double>(loss[0]);
}

double projection_loss(const TransferModel& model,
                       const std::vector<textpipe::ParallelParagraph>& batch,
                       const std::string& source_lang, const std::string& target_lang) {
  require_language(model, source_lang);
  require_language(model, target_lang);
  if (batch.empty()) throw data_error("projection_loss: empty batch");
  const GridBatch src = source_side(batch), tgt = target_side(batch);
  const auto loss = numcore::forward_values<float>(
      model.params, [&](Tape<float>& t, BoundParams<float>& p) {
        return projection_loss_on_tape(t, p, model.cfg, src, tgt, source_lang, target_lang,
                                       false, nullptr);
      });
  return static_cast<double>(loss[0]);
}

double label_projection_loss(const TransferModel& model,
                             const std::vector<textpipe::ParallelParagraph>& batch,
                             const std::string& source_lang, const std::string& target_lang) {
  require_language(model, source_lang);
  require_language(model, target_lang);
  if (batch.empty()) throw data_error("label_projection_loss: empty batch");
  const GridBatch src = source_side(batch), tgt = target_side(batch);
  const std::vector<float> pseudo = source_hard_labels(model, src, source_lang);
  const auto loss = numcore::forward_values<float>(
      model.params, [&](Tape<float>& t, BoundParams<float>& p) {
        return labeled_loss_on_tape(t, p, model.cfg, tgt, pseudo, target_lang, false, nullptr);
      });
  return static_cast<double>(loss[0]);
}

}  // namespace xlt::transfer
