#pragma once

#include <string>
#include <vector>

#include "xlt/eval/metrics.hpp"
#include "xlt/synth/generator.hpp"
#include "xlt/transfer/trainer.hpp"

namespace xlt::synth {

// Desk-scale end-to-end harness over a generated corpus: vocabulary
// construction, encoding, training, evaluation. The sweep, the acceptance
// suite and the tests all run transfer experiments through this one path.
struct BenchConfig {
  model::ModelConfig model;
  transfer::TrainingPlan plan;
  int paragraph_sentences = 0;   // grid rows for pseudo paragraphs; 0 = same as model.sentences
  std::string source_lang = "src";
  std::string target_lang = "tgt";

  BenchConfig() {
    model.embed_dim = 16;
    model.sent_hidden = 32;
    model.repr_dim = 32;
    model.sentences = 4;
    model.words = 8;
    plan.parallel_batch_size = 8;
  }
};

struct BenchData {
  model::LanguagePack source;
  model::LanguagePack target;
  std::vector<textpipe::EncodedReview> train;
  std::vector<textpipe::EncodedReview> source_test;
  std::vector<textpipe::EncodedReview> target_test;
  std::vector<textpipe::ParallelParagraph> parallel;
};

// Tokenizes and encodes a generated corpus. Vocabularies come from the
// training + parallel text with min_count 1 (synthetic corpora are small and
// fully intentional). Paragraph batching draws group sizes from a stream
// derived from plan.seed.
BenchData prepare_bench_data(const GeneratedCorpus& corpus, const BenchConfig& cfg);

enum class BenchMode { joint, two_stage };

struct BenchResult {
  double source_accuracy = 0.0;
  double target_accuracy = 0.0;
  eval::EvalReport source_report;
  eval::EvalReport target_report;
  transfer::TrainLog log;
};

// Creates a fresh model seeded from cfg.plan.seed, trains it with the
// requested regime, and evaluates on both test sets via the embedding swap.
// The trained model is returned through `model_out` when non-null.
BenchResult run_benchmark(const GeneratedCorpus& corpus, const BenchConfig& cfg, BenchMode mode,
                          model::TransferModel* model_out = nullptr);

}  // namespace xlt::synth
