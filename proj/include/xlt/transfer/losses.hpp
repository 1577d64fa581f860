#pragma once

#include <string>
#include <vector>

#include "xlt/model/model.hpp"

namespace xlt::transfer {

using model::GridBatch;
using model::ModelConfig;
using model::TransferModel;
using numcore::BoundParams;
using numcore::Rng;
using numcore::Tape;
using numcore::Var;

// Graph builders for the three losses. Gradient routing is a consequence of
// which slots are frozen: in two-stage training the source-side parameters
// are frozen, so the source branch of the projection loss contributes a
// constant target; in joint training gradients flow through both branches.

// Summed binary cross-entropy of the batch's predictions against labels.
template <typename T>
Var labeled_loss_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                         const GridBatch& batch, const std::vector<float>& labels,
                         const std::string& lang_tag, bool training, Rng* dropout_rng);

// sum_j (1/d^T) * ||R(e_j) - R(f_j)||^2: mean-squared error between the task
// representations of the two sides of each parallel pseudo paragraph.
template <typename T>
Var projection_loss_on_tape(Tape<T>& tape, BoundParams<T>& params, const ModelConfig& cfg,
                            const GridBatch& source, const GridBatch& target,
                            const std::string& source_lang, const std::string& target_lang,
                            bool training, Rng* dropout_rng);

// Hard pseudo-labels from the source side of parallel data: 1 when the
// source prediction exceeds 0.5, else 0 (an exact 0.5 tie maps to 0).
// Computed with dropout off and detached from the gradient graph.
std::vector<float> source_hard_labels(const TransferModel& model, const GridBatch& source,
                                      const std::string& source_lang);

// --- evaluation-mode scalar losses (dropout off, no gradients) -------------

double labeled_loss(const TransferModel& model,
                    const std::vector<textpipe::EncodedReview>& batch,
                    const std::string& lang_tag);

double projection_loss(const TransferModel& model,
                       const std::vector<textpipe::ParallelParagraph>& batch,
                       const std::string& source_lang, const std::string& target_lang);

double label_projection_loss(const TransferModel& model,
                             const std::vector<textpipe::ParallelParagraph>& batch,
                             const std::string& source_lang, const std::string& target_lang);

}  // namespace xlt::transfer
