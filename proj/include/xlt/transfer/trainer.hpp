#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "xlt/model/model.hpp"
#include "xlt/numcore/optim.hpp"
#include "xlt/transfer/losses.hpp"

namespace xlt::transfer {

enum class SupervisionMode { representation, label };

// Training schedule and mixing configuration. The epoch defaults follow the
// standard recipe: 10+10 for two-stage, 4 pretrain + 12 joint for joint
// training; alpha defaults to 1.
struct TrainingPlan {
  double alpha = 1.0;
  int labeled_epochs = 10;     // two-stage, stage 1
  int projection_epochs = 10;  // two-stage, stage 2
  int pretrain_epochs = 4;     // joint, labeled-only warmup
  int joint_epochs = 12;       // joint, mixed phase
  int batch_size = 32;
  int parallel_batch_size = 0;  // 0 = same as batch_size
  std::uint64_t seed = 0;
  SupervisionMode supervision = SupervisionMode::representation;
  numcore::RmsPropConfig optim;

  int effective_parallel_batch() const {
    return parallel_batch_size > 0 ? parallel_batch_size : batch_size;
  }
  void validate() const;
};

// One optimizer step's loss record. total == labeled + alpha*projection.
struct LossBreakdown {
  int epoch = 0;
  int step = 0;
  double labeled_loss = 0.0;
  double projection_loss = 0.0;
  double total = 0.0;
};

struct TrainLog {
  std::vector<LossBreakdown> steps;
  int freeze_epoch = -1;  // two-stage: first epoch with frozen source side
};

// Loss log as CSV: epoch,step,labeled_loss,projection_loss,total.
void write_loss_csv(const TrainLog& log, const std::filesystem::path& file);
std::string loss_csv_string(const TrainLog& log);

using StageCallback = std::function<void(const TransferModel&)>;

// Stage 1 fits (U, theta_M, theta_pi) on the labeled loss; stage 2 freezes
// them and fits only the target embeddings V on the projection loss (or the
// label-projection loss, by supervision mode). The frozen flags are left in
// place on return; `after_stage1` runs between the stages, before freezing.
TrainLog train_two_stage(TransferModel& model,
                         const std::vector<textpipe::EncodedReview>& labeled,
                         const std::vector<textpipe::ParallelParagraph>& parallel,
                         const TrainingPlan& plan, const std::string& source_lang,
                         const std::string& target_lang,
                         const StageCallback& after_stage1 = nullptr);

// Pretrains on the labeled loss alone, then takes joint steps: each step
// draws one labeled batch and one parallel batch, accumulates
// grad(L_DL) + alpha*grad(L_DP) and applies a single optimizer update.
// Epoch length is defined by the labeled set; parallel batches cycle with a
// reshuffle. alpha == 0 skips the parallel branch entirely, reproducing
// labeled-only training bit for bit under the same seed.
TrainLog train_joint(TransferModel& model,
                     const std::vector<textpipe::EncodedReview>& labeled,
                     const std::vector<textpipe::ParallelParagraph>& parallel,
                     const TrainingPlan& plan, const std::string& source_lang,
                     const std::string& target_lang);

// Labeled loss only, for pretrain_epochs + joint_epochs epochs (the joint
// schedule with the parallel branch removed).
TrainLog train_labeled_only(TransferModel& model,
                            const std::vector<textpipe::EncodedReview>& labeled,
                            const TrainingPlan& plan, const std::string& source_lang);

}  // namespace xlt::transfer
