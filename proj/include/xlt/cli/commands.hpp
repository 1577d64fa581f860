#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "xlt/eval/interpolate.hpp"
#include "xlt/eval/metrics.hpp"
#include "xlt/eval/neighbors.hpp"
#include "xlt/eval/sweep.hpp"
#include "xlt/synth/generator.hpp"
#include "xlt/transfer/trainer.hpp"

namespace xlt::cli {

// Stable exit codes for scripting.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    // usage / configuration errors
inline constexpr int kExitData = 3;     // malformed or inconsistent data
inline constexpr int kExitNumeric = 4;  // numeric / dimension errors

// Resolves an output directory against $XLT_OUTPUT_ROOT when the given path
// is relative and the variable is set.
std::filesystem::path resolve_output_dir(const std::string& dir);

// --- gen-synth --------------------------------------------------------

struct GenSynthArgs {
  synth::SynthSpec spec;
  std::string out_dir;
};

// Writes corpus files plus manifest.json (spec echo + content hashes).
void cmd_gen_synth(const GenSynthArgs& args);

// --- build-vocab ------------------------------------------------------

struct BuildVocabArgs {
  std::vector<std::string> inputs;
  std::string format = "jsonl";          // format of `inputs`: jsonl | text
  std::vector<std::string> text_inputs;  // extra plain-text inputs, any format mix
  std::string lang;
  int min_count = 2;
  int max_size = 50000;
  std::string output;
};

void cmd_build_vocab(const BuildVocabArgs& args);

// --- train --------------------------------------------------------------

struct TrainArgs {
  std::string mode = "joint";  // joint | two-stage | labeled-only
  std::string supervision = "representation";
  std::string labeled;
  std::string parallel_source;
  std::string parallel_target;
  std::string source_vocab;
  std::string target_vocab;
  std::string source_lang = "en";
  std::string target_lang = "fr";
  model::ModelConfig model;
  transfer::TrainingPlan plan;
  int paragraph_sentences = 0;  // 0 = model.sentences
  std::string out_dir;
};

struct TrainOutputs {
  std::filesystem::path checkpoint;
  std::filesystem::path stage1_checkpoint;  // two-stage only
  std::filesystem::path loss_csv;
  std::filesystem::path manifest;
  double final_labeled_loss = 0.0;
  double final_projection_loss = 0.0;
};

TrainOutputs cmd_train(const TrainArgs& args);

// --- evaluate -----------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string test;
  std::string lang;
  std::string out_csv;  // optional
};

eval::EvalReport cmd_evaluate(const EvaluateArgs& args);

// --- neighbors ------------------------------------------------------------

struct NeighborsArgs {
  std::string checkpoint;
  std::vector<std::string> queries;
  std::string source_lang;
  std::string target_lang;
  int k = 10;
};

// One row per neighbor: "query\ttoken\tscore".
std::vector<std::string> cmd_neighbors(const NeighborsArgs& args);

// --- interpolate -----------------------------------------------------------

struct InterpolateArgs {
  std::string dev_a;
  std::string dev_b;
  std::string dev_labels;  // labeled JSONL
  std::string test_a;
  std::string test_b;
  std::string test_labels;  // optional labeled JSONL for a test report
  std::string out_scores;   // optional combined-score output
};

struct InterpolateOutputs {
  eval::InterpolationResult result;
  bool has_test_report = false;
  eval::EvalReport test_report;
};

InterpolateOutputs cmd_interpolate(const InterpolateArgs& args);

// --- sweep ---------------------------------------------------------------

struct SweepArgs {
  eval::SweepSpec spec;
  std::string out_csv;
};

std::vector<eval::SweepCell> cmd_sweep(const SweepArgs& args);

}  // namespace xlt::cli
