// xlt: train a source-language sentiment classifier and transfer it to a
// target language over parallel text, plus the evaluation tooling around it.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "xlt/cli/commands.hpp"
#include "xlt/errors.hpp"

namespace {

using namespace xlt;

void add_spec_flags(CLI::App* cmd, synth::SynthSpec& spec) {
  cmd->add_option("--vocab-size", spec.vocab_size, "Source vocabulary size");
  cmd->add_option("--positive-words", spec.positive_words, "Positive lexicon size");
  cmd->add_option("--negative-words", spec.negative_words, "Negative lexicon size");
  cmd->add_option("--min-sentences", spec.min_sentences, "Min sentences per review");
  cmd->add_option("--max-sentences", spec.max_sentences, "Max sentences per review");
  cmd->add_option("--min-words", spec.min_words, "Min words per sentence");
  cmd->add_option("--max-words", spec.max_words, "Max words per sentence");
  cmd->add_option("--polarity-ratio", spec.polarity_ratio,
                  "Chance a word slot carries polarity");
  cmd->add_option("--noise", spec.noise, "Cipher noise rate in [0,1)");
  cmd->add_option("--labeled", spec.labeled, "Labeled training reviews");
  cmd->add_option("--parallel", spec.parallel, "Parallel sentence pairs");
  cmd->add_option("--test", spec.test, "Reviews per test set");
}

void add_model_flags(CLI::App* cmd, model::ModelConfig& cfg) {
  cmd->add_option("--embed-dim", cfg.embed_dim, "Embedding size d");
  cmd->add_option("--hidden-dim", cfg.sent_hidden, "Sentence GRU width h");
  cmd->add_option("--repr-dim", cfg.repr_dim, "Review GRU width / representation size");
  cmd->add_option("--sentences", cfg.sentences, "Review grid rows S");
  cmd->add_option("--words", cfg.words, "Review grid columns W");
  cmd->add_option("--dropout", cfg.dropout, "Dropout rate");
}

void add_plan_flags(CLI::App* cmd, transfer::TrainingPlan& plan) {
  cmd->add_option("--alpha", plan.alpha, "Projection loss mixing weight");
  cmd->add_option("--labeled-epochs", plan.labeled_epochs, "Two-stage: stage-1 epochs");
  cmd->add_option("--projection-epochs", plan.projection_epochs, "Two-stage: stage-2 epochs");
  cmd->add_option("--pretrain-epochs", plan.pretrain_epochs, "Joint: warmup epochs");
  cmd->add_option("--joint-epochs", plan.joint_epochs, "Joint: mixed epochs");
  cmd->add_option("--batch-size", plan.batch_size, "Labeled batch size");
  cmd->add_option("--parallel-batch-size", plan.parallel_batch_size,
                  "Parallel batch size (0 = batch size)");
  cmd->add_option("--seed", plan.seed, "Run seed");
  cmd->add_option("--lr", plan.optim.lr, "RMSProp learning rate");
  cmd->add_option("--decay", plan.optim.decay, "RMSProp decay");
  cmd->add_option("--eps", plan.optim.eps, "RMSProp epsilon");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual model transfer via representation projection"};
  app.require_subcommand(1);
  // Flat key=value lines with '#' comments; keys are subcommand-qualified
  // ("train.seed=7"). Command-line flags override file values; unknown keys
  // are rejected.
  app.set_config("--config", "", "Config file (key=value lines; flags override)");
  app.allow_config_extras(false);

  // gen-synth
  cli::GenSynthArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-synth", "Generate a synthetic bilingual corpus");
  add_spec_flags(gen_cmd, gen.spec);
  gen_cmd->add_option("--seed", gen.spec.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();

  // build-vocab
  cli::BuildVocabArgs bv;
  CLI::App* bv_cmd = app.add_subcommand("build-vocab", "Build a vocabulary file");
  bv_cmd->add_option("--input", bv.inputs, "Input file(s)")->required()->delimiter(',');
  bv_cmd->add_option("--format", bv.format, "Input format: jsonl | text");
  bv_cmd->add_option("--text-input", bv.text_inputs, "Extra plain-text input file(s)")
      ->delimiter(',');
  bv_cmd->add_option("--lang", bv.lang, "Language tag");
  bv_cmd->add_option("--min-count", bv.min_count, "Minimum token frequency");
  bv_cmd->add_option("--max-size", bv.max_size, "Maximum vocabulary size");
  bv_cmd->add_option("--output", bv.output, "Output vocabulary file")->required();

  // train
  cli::TrainArgs tr;
  CLI::App* tr_cmd = app.add_subcommand("train", "Train a classifier / transfer it");
  tr_cmd->add_option("--mode", tr.mode, "joint | two-stage | labeled-only");
  tr_cmd->add_option("--supervision", tr.supervision, "representation | label");
  tr_cmd->add_option("--labeled", tr.labeled, "Labeled JSONL file")->required();
  tr_cmd->add_option("--parallel-source", tr.parallel_source, "Parallel source text");
  tr_cmd->add_option("--parallel-target", tr.parallel_target, "Parallel target text");
  tr_cmd->add_option("--source-vocab", tr.source_vocab, "Source vocabulary file")->required();
  tr_cmd->add_option("--target-vocab", tr.target_vocab, "Target vocabulary file");
  tr_cmd->add_option("--source-lang", tr.source_lang, "Source language tag");
  tr_cmd->add_option("--target-lang", tr.target_lang, "Target language tag");
  tr_cmd->add_option("--paragraph-sentences", tr.paragraph_sentences,
                     "Pseudo-paragraph grid rows (0 = --sentences)");
  tr_cmd->add_option("--out", tr.out_dir, "Run output directory")->required();
  add_model_flags(tr_cmd, tr.model);
  add_plan_flags(tr_cmd, tr.plan);

  // evaluate
  cli::EvaluateArgs ev;
  CLI::App* ev_cmd = app.add_subcommand("evaluate", "Evaluate a checkpoint on a test set");
  ev_cmd->add_option("--checkpoint", ev.checkpoint, "Model checkpoint")->required();
  ev_cmd->add_option("--test", ev.test, "Labeled JSONL test file")->required();
  ev_cmd->add_option("--lang", ev.lang, "Language table to evaluate with")->required();
  ev_cmd->add_option("--out", ev.out_csv, "Report CSV path");

  // neighbors
  cli::NeighborsArgs nb;
  CLI::App* nb_cmd = app.add_subcommand("neighbors", "Cross-lingual nearest neighbors");
  nb_cmd->add_option("--checkpoint", nb.checkpoint, "Model checkpoint")->required();
  nb_cmd->add_option("--query", nb.queries, "Query token(s)")->required()->delimiter(',');
  nb_cmd->add_option("--source-lang", nb.source_lang, "Query language")->required();
  nb_cmd->add_option("--target-lang", nb.target_lang, "Neighbor language")->required();
  nb_cmd->add_option("-k,--k", nb.k, "Neighbors per query");

  // interpolate
  cli::InterpolateArgs ip;
  CLI::App* ip_cmd =
      app.add_subcommand("interpolate", "Combine two models' per-example scores");
  ip_cmd->add_option("--dev-a", ip.dev_a, "Model A dev scores (JSONL)")->required();
  ip_cmd->add_option("--dev-b", ip.dev_b, "Model B dev scores (JSONL)")->required();
  ip_cmd->add_option("--dev-labels", ip.dev_labels, "Dev labels (labeled JSONL)")->required();
  ip_cmd->add_option("--test-a", ip.test_a, "Model A test scores")->required();
  ip_cmd->add_option("--test-b", ip.test_b, "Model B test scores")->required();
  ip_cmd->add_option("--test-labels", ip.test_labels, "Optional test labels for a report");
  ip_cmd->add_option("--out", ip.out_scores, "Combined test scores output");

  // sweep
  cli::SweepArgs sw;
  CLI::App* sw_cmd = app.add_subcommand("sweep", "Model-size sweep on synthetic data");
  sw_cmd->add_option("--embed-dims", sw.spec.embed_dims, "Embedding dims")
      ->required()
      ->delimiter(',');
  sw_cmd->add_option("--encode-dims", sw.spec.encode_dims, "Encoder dims")
      ->required()
      ->delimiter(',');
  sw_cmd->add_option("--runs", sw.spec.runs, "Runs per cell");
  sw_cmd->add_option("--out", sw.out_csv, "Output CSV")->required();
  add_spec_flags(sw_cmd, sw.spec.data);
  sw_cmd->add_option("--data-seed", sw.spec.data.seed, "Corpus base seed");
  sw_cmd->add_option("--sentences", sw.spec.base.model.sentences, "Review grid rows");
  sw_cmd->add_option("--words", sw.spec.base.model.words, "Review grid columns");
  sw_cmd->add_option("--dropout", sw.spec.base.model.dropout, "Dropout rate");
  add_plan_flags(sw_cmd, sw.spec.base.plan);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) {
      cli::cmd_gen_synth(gen);
      std::cout << "wrote corpus to " << cli::resolve_output_dir(gen.out_dir).string() << "\n";
    } else if (bv_cmd->parsed()) {
      cli::cmd_build_vocab(bv);
      std::cout << "wrote vocabulary " << cli::resolve_output_dir(bv.output).string() << "\n";
    } else if (tr_cmd->parsed()) {
      const cli::TrainOutputs out = cmd_train(tr);
      std::cout << "checkpoint: " << out.checkpoint.string() << "\n"
                << "loss log:   " << out.loss_csv.string() << "\n";
      if (!out.stage1_checkpoint.empty())
        std::cout << "stage 1:    " << out.stage1_checkpoint.string() << "\n";
      std::printf("final losses: labeled=%.6f projection=%.6f\n", out.final_labeled_loss,
                  out.final_projection_loss);
    } else if (ev_cmd->parsed()) {
      const eval::EvalReport report = cmd_evaluate(ev);
      std::cout << report.pretty();
    } else if (nb_cmd->parsed()) {
      for (const auto& row : cmd_neighbors(nb)) std::cout << row << "\n";
    } else if (ip_cmd->parsed()) {
      const cli::InterpolateOutputs out = cmd_interpolate(ip);
      std::printf("lambda=%.2f dev_accuracy=%.4f\n", out.result.lambda,
                  out.result.dev_accuracy);
      if (out.has_test_report) std::cout << out.test_report.pretty();
    } else if (sw_cmd->parsed()) {
      const auto cells = cmd_sweep(sw);
      std::cout << "wrote " << cells.size() << " sweep cells to "
                << cli::resolve_output_dir(sw.out_csv).string() << "\n";
    }
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return cli::kExitUsage;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return cli::kExitData;
  } catch (const dim_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return cli::kExitNumeric;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return cli::kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return cli::kExitOk;
}
