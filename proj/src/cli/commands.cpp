#include "xlt/cli/commands.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "xlt/errors.hpp"
#include "xlt/model/checkpoint.hpp"
#include "xlt/textpipe/io.hpp"
#include "xlt/util/hash.hpp"

namespace xlt::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_manifest(const json& manifest, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw data_error("cannot write manifest: " + file.string());
  out << manifest.dump(2) << '\n';
}

json hash_entry(const fs::path& file) { return util::hash_tag(util::fnv1a_file(file)); }

json spec_json(const synth::SynthSpec& spec) {
  return json{{"vocab_size", spec.vocab_size},
              {"positive_words", spec.positive_words},
              {"negative_words", spec.negative_words},
              {"min_sentences", spec.min_sentences},
              {"max_sentences", spec.max_sentences},
              {"min_words", spec.min_words},
              {"max_words", spec.max_words},
              {"polarity_ratio", spec.polarity_ratio},
              {"noise", spec.noise},
              {"labeled", spec.labeled},
              {"parallel", spec.parallel},
              {"test", spec.test},
              {"seed", spec.seed}};
}

json model_json(const model::ModelConfig& cfg) {
  return json{{"embed_dim", cfg.embed_dim},   {"sent_hidden", cfg.sent_hidden},
              {"repr_dim", cfg.repr_dim},     {"sentences", cfg.sentences},
              {"words", cfg.words},           {"classes", cfg.classes},
              {"dropout", cfg.dropout}};
}

json plan_json(const transfer::TrainingPlan& plan) {
  return json{{"alpha", plan.alpha},
              {"labeled_epochs", plan.labeled_epochs},
              {"projection_epochs", plan.projection_epochs},
              {"pretrain_epochs", plan.pretrain_epochs},
              {"joint_epochs", plan.joint_epochs},
              {"batch_size", plan.batch_size},
              {"parallel_batch_size", plan.parallel_batch_size},
              {"seed", plan.seed},
              {"lr", plan.optim.lr},
              {"decay", plan.optim.decay},
              {"eps", plan.optim.eps}};
}

std::vector<int> labels_of(const textpipe::LabeledFile& file) {
  std::vector<int> labels;
  labels.reserve(file.reviews.size());
  for (const auto& r : file.reviews) labels.push_back(r.label);
  return labels;
}

}  // namespace

fs::path resolve_output_dir(const std::string& dir) {
  fs::path p(dir);
  if (p.is_relative()) {
    if (const char* root = std::getenv("XLT_OUTPUT_ROOT"); root != nullptr && *root != '\0')
      p = fs::path(root) / p;
  }
  return p;
}

void cmd_gen_synth(const GenSynthArgs& args) {
  if (args.out_dir.empty()) throw config_error("gen-synth: --out is required");
  args.spec.validate();
  const fs::path dir = resolve_output_dir(args.out_dir);
  const synth::GeneratedCorpus corpus = synth::generate(args.spec);
  synth::write_corpus(corpus, dir);

  const synth::CorpusFiles files = synth::corpus_files(dir);
  json manifest;
  manifest["command"] = "gen-synth";
  manifest["spec"] = spec_json(args.spec);
  manifest["outputs"] = json{{files.train.filename().string(), hash_entry(files.train)},
                             {files.source_test.filename().string(), hash_entry(files.source_test)},
                             {files.target_test.filename().string(), hash_entry(files.target_test)},
                             {files.parallel_source.filename().string(),
                              hash_entry(files.parallel_source)},
                             {files.parallel_target.filename().string(),
                              hash_entry(files.parallel_target)},
                             {files.cipher_map.filename().string(), hash_entry(files.cipher_map)}};
  write_manifest(manifest, dir / "manifest.json");
}

void cmd_build_vocab(const BuildVocabArgs& args) {
  if (args.inputs.empty() && args.text_inputs.empty())
    throw config_error("build-vocab: at least one --input is required");
  if (args.output.empty()) throw config_error("build-vocab: --output is required");
  if (args.format != "jsonl" && args.format != "text")
    throw config_error("build-vocab: --format must be jsonl or text");

  textpipe::VocabBuilder builder;
  for (const auto& input : args.inputs) {
    if (args.format == "jsonl") {
      const auto file = textpipe::read_labeled_jsonl(input);
      for (const auto& review : file.reviews)
        for (const auto& sentence : review.sentences) builder.add_sentence(sentence);
    } else {
      for (const auto& sentence : textpipe::read_tokenized_lines(input))
        builder.add_sentence(sentence);
    }
  }
  for (const auto& input : args.text_inputs)
    for (const auto& sentence : textpipe::read_tokenized_lines(input))
      builder.add_sentence(sentence);
  const textpipe::Vocabulary vocab =
      builder.build(args.lang, args.min_count, args.max_size);
  vocab.save(resolve_output_dir(args.output));
}

TrainOutputs cmd_train(const TrainArgs& args) {
  if (args.labeled.empty()) throw config_error("train: --labeled is required");
  if (args.source_vocab.empty()) throw config_error("train: --source-vocab is required");
  if (args.out_dir.empty()) throw config_error("train: --out is required");
  const bool needs_parallel = args.mode != "labeled-only";
  if (needs_parallel &&
      (args.parallel_source.empty() || args.parallel_target.empty() ||
       args.target_vocab.empty()))
    throw config_error("train: " + args.mode +
                       " mode needs --parallel-source, --parallel-target and --target-vocab");
  if (args.mode != "joint" && args.mode != "two-stage" && args.mode != "labeled-only")
    throw config_error("train: unknown mode " + args.mode);
  if (args.supervision != "representation" && args.supervision != "label")
    throw config_error("train: unknown supervision " + args.supervision);

  transfer::TrainingPlan plan = args.plan;
  plan.supervision = args.supervision == "label" ? transfer::SupervisionMode::label
                                                 : transfer::SupervisionMode::representation;
  plan.validate();

  const fs::path out_dir = resolve_output_dir(args.out_dir);
  fs::create_directories(out_dir);

  // Data.
  const textpipe::LabeledFile labeled_file = textpipe::read_labeled_jsonl(args.labeled);
  std::vector<model::LanguagePack> langs;
  langs.push_back({args.source_lang,
                   textpipe::Vocabulary::load(args.source_vocab, args.source_lang)});
  const auto train_set = textpipe::encode_reviews(labeled_file.reviews, langs[0].vocab,
                                                  args.model.sentences, args.model.words);

  std::vector<textpipe::ParallelParagraph> parallel;
  if (needs_parallel) {
    langs.push_back({args.target_lang,
                     textpipe::Vocabulary::load(args.target_vocab, args.target_lang)});
    const auto pf = textpipe::read_parallel_text(args.parallel_source, args.parallel_target);
    const int para_S =
        args.paragraph_sentences > 0 ? args.paragraph_sentences : args.model.sentences;
    numcore::Rng group_rng =
        numcore::Rng::derive(plan.seed, numcore::stream::kParagraphSize, 0);
    parallel = textpipe::batch_pseudo_paragraphs(pf.source, pf.target, langs[0].vocab,
                                                 langs[1].vocab, group_rng, para_S,
                                                 args.model.words);
  }

  model::TransferModel m = model::TransferModel::create(args.model, langs, plan.seed);

  TrainOutputs outputs;
  outputs.checkpoint = out_dir / "checkpoint.xlt";
  outputs.loss_csv = out_dir / "loss.csv";
  outputs.manifest = out_dir / "manifest.json";

  transfer::TrainLog log;
  if (args.mode == "two-stage") {
    outputs.stage1_checkpoint = out_dir / "checkpoint_stage1.xlt";
    log = transfer::train_two_stage(
        m, train_set, parallel, plan, args.source_lang, args.target_lang,
        [&](const model::TransferModel& snap) {
          model::save_checkpoint(snap, outputs.stage1_checkpoint);
        });
  } else if (args.mode == "joint") {
    log = transfer::train_joint(m, train_set, parallel, plan, args.source_lang,
                                args.target_lang);
  } else {
    log = transfer::train_labeled_only(m, train_set, plan, args.source_lang);
  }

  model::save_checkpoint(m, outputs.checkpoint);
  transfer::write_loss_csv(log, outputs.loss_csv);
  if (!log.steps.empty()) {
    outputs.final_labeled_loss = log.steps.back().labeled_loss;
    outputs.final_projection_loss = log.steps.back().projection_loss;
  }

  json manifest;
  manifest["command"] = "train";
  manifest["mode"] = args.mode;
  manifest["supervision"] = args.supervision;
  manifest["source_lang"] = args.source_lang;
  if (needs_parallel) manifest["target_lang"] = args.target_lang;
  manifest["model"] = model_json(args.model);
  manifest["plan"] = plan_json(plan);
  manifest["seed"] = plan.seed;
  if (log.freeze_epoch >= 0) manifest["freeze_epoch"] = log.freeze_epoch;
  json inputs;
  inputs[args.labeled] = hash_entry(args.labeled);
  inputs[args.source_vocab] = hash_entry(args.source_vocab);
  if (needs_parallel) {
    inputs[args.parallel_source] = hash_entry(args.parallel_source);
    inputs[args.parallel_target] = hash_entry(args.parallel_target);
    inputs[args.target_vocab] = hash_entry(args.target_vocab);
  }
  manifest["inputs"] = inputs;
  json out_hashes;
  out_hashes["checkpoint.xlt"] = hash_entry(outputs.checkpoint);
  out_hashes["loss.csv"] = hash_entry(outputs.loss_csv);
  if (!outputs.stage1_checkpoint.empty())
    out_hashes["checkpoint_stage1.xlt"] = hash_entry(outputs.stage1_checkpoint);
  manifest["outputs"] = out_hashes;
  write_manifest(manifest, outputs.manifest);
  return outputs;
}

eval::EvalReport cmd_evaluate(const EvaluateArgs& args) {
  if (args.checkpoint.empty() || args.test.empty() || args.lang.empty())
    throw config_error("evaluate: --checkpoint, --test and --lang are required");
  const model::TransferModel m = model::load_checkpoint(args.checkpoint);
  const model::ModelView view = model::swap_embeddings(m, args.lang);
  const textpipe::LabeledFile test_file = textpipe::read_labeled_jsonl(args.test);
  const auto test_set = textpipe::encode_reviews(test_file.reviews, view.vocab(),
                                                 m.cfg.sentences, m.cfg.words);
  const eval::EvalReport report = eval::evaluate(view, test_set);
  if (!args.out_csv.empty()) {
    const fs::path out = resolve_output_dir(args.out_csv);
    std::ofstream f(out);
    if (!f) throw data_error("cannot write report: " + out.string());
    f << report.csv();
  }
  return report;
}

std::vector<std::string> cmd_neighbors(const NeighborsArgs& args) {
  if (args.checkpoint.empty() || args.queries.empty())
    throw config_error("neighbors: --checkpoint and --query are required");
  if (args.source_lang.empty() || args.target_lang.empty())
    throw config_error("neighbors: --source-lang and --target-lang are required");
  const model::TransferModel m = model::load_checkpoint(args.checkpoint);
  std::vector<std::string> rows;
  char buf[256];
  for (const auto& query : args.queries) {
    const auto nn = eval::neighbors(m, query, args.source_lang, args.target_lang, args.k);
    for (const auto& n : nn) {
      std::snprintf(buf, sizeof buf, "%s\t%s\t%.6f", query.c_str(), n.token.c_str(), n.score);
      rows.emplace_back(buf);
    }
  }
  return rows;
}

InterpolateOutputs cmd_interpolate(const InterpolateArgs& args) {
  if (args.dev_a.empty() || args.dev_b.empty() || args.dev_labels.empty() ||
      args.test_a.empty() || args.test_b.empty())
    throw config_error(
        "interpolate: --dev-a, --dev-b, --dev-labels, --test-a and --test-b are required");
  const auto dev_a = eval::read_score_file(args.dev_a);
  const auto dev_b = eval::read_score_file(args.dev_b);
  const auto dev_labels = labels_of(textpipe::read_labeled_jsonl(args.dev_labels));
  const auto test_a = eval::read_score_file(args.test_a);
  const auto test_b = eval::read_score_file(args.test_b);

  InterpolateOutputs out;
  out.result = eval::interpolate(dev_a, dev_b, dev_labels, test_a, test_b);
  if (!args.out_scores.empty())
    eval::write_score_file(out.result.combined_test, resolve_output_dir(args.out_scores));

  if (!args.test_labels.empty()) {
    const auto test_labels = labels_of(textpipe::read_labeled_jsonl(args.test_labels));
    if (test_labels.size() != out.result.combined_test.size())
      throw data_error("interpolate: test labels and scores are not aligned");
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < test_labels.size(); ++i) {
      const int pred = out.result.combined_test[i] > 0.5 ? 1 : 0;
      if (pred == 1 && test_labels[i] == 1) ++tp;
      else if (pred == 1) ++fp;
      else if (test_labels[i] == 0) ++tn;
      else ++fn;
    }
    out.test_report = eval::EvalReport::from_counts(tp, fp, tn, fn);
    out.has_test_report = true;
  }
  return out;
}

std::vector<eval::SweepCell> cmd_sweep(const SweepArgs& args) {
  if (args.out_csv.empty()) throw config_error("sweep: --out is required");
  const auto cells = eval::size_sweep(args.spec);
  const fs::path out = resolve_output_dir(args.out_csv);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream f(out);
  if (!f) throw data_error("cannot write sweep csv: " + out.string());
  f << eval::sweep_csv(cells);
  return cells;
}

}  // namespace xlt::cli
