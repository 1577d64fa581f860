// Python bindings over the pipeline's main operations. File-oriented calls
// (gen_synth, train, evaluate, ...) mirror the CLI subcommands and return
// plain dicts; the pure functions (tokenize, fisher_exact, ...) work on
// in-memory values.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xlt/cli/commands.hpp"
#include "xlt/errors.hpp"
#include "xlt/eval/fisher.hpp"
#include "xlt/eval/metrics.hpp"
#include "xlt/textpipe/encode.hpp"
#include "xlt/textpipe/tokenize.hpp"

namespace py = pybind11;
using namespace xlt;

namespace {

py::dict report_dict(const eval::EvalReport& r) {
  py::dict d;
  d["tp"] = r.tp;
  d["fp"] = r.fp;
  d["tn"] = r.tn;
  d["fn"] = r.fn;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["accuracy"] = r.accuracy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cross-lingual model transfer via representation projection";

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<data_error>(m, "DataError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<dim_error>(m, "DimensionError", PyExc_ValueError);

  m.def("tokenize", [](const std::string& text) { return textpipe::tokenize(text); },
        py::arg("text"),
        "Lowercase, split on whitespace, detach punctuation; keeps intra-word apostrophes.");

  m.def(
      "binarize_rating",
      [](double stars) -> py::object {
        const auto label = textpipe::binarize_rating(stars);
        if (!label) return py::none();
        return py::int_(*label);
      },
      py::arg("stars"), "Star rating to binary label; None for 3-star reviews.");

  m.def("fisher_exact", &eval::fisher_exact, py::arg("a"), py::arg("b"), py::arg("c"),
        py::arg("d"), "Two-sided Fisher exact test p-value for [[a, b], [c, d]].");

  m.def("f1_from_pr", &eval::f1_from_pr, py::arg("precision"), py::arg("recall"));

  m.def(
      "interpolate",
      [](const std::vector<double>& dev_a, const std::vector<double>& dev_b,
         const std::vector<int>& dev_labels, const std::vector<double>& test_a,
         const std::vector<double>& test_b) {
        const auto r = eval::interpolate(dev_a, dev_b, dev_labels, test_a, test_b);
        py::dict d;
        d["lambda"] = r.lambda;
        d["dev_accuracy"] = r.dev_accuracy;
        d["combined_test"] = r.combined_test;
        return d;
      },
      py::arg("dev_a"), py::arg("dev_b"), py::arg("dev_labels"), py::arg("test_a"),
      py::arg("test_b"),
      "Grid-search the mixing weight on dev accuracy, apply it to the test scores.");

  m.def(
      "gen_synth",
      [](const std::string& out_dir, std::uint64_t seed, int vocab_size, int positive_words,
         int negative_words, int labeled, int parallel, int test, double noise) {
        cli::GenSynthArgs args;
        args.out_dir = out_dir;
        args.spec.seed = seed;
        args.spec.vocab_size = vocab_size;
        args.spec.positive_words = positive_words;
        args.spec.negative_words = negative_words;
        args.spec.labeled = labeled;
        args.spec.parallel = parallel;
        args.spec.test = test;
        args.spec.noise = noise;
        cli::cmd_gen_synth(args);
        const auto files = synth::corpus_files(cli::resolve_output_dir(out_dir));
        py::dict d;
        d["train"] = files.train;
        d["source_test"] = files.source_test;
        d["target_test"] = files.target_test;
        d["parallel_source"] = files.parallel_source;
        d["parallel_target"] = files.parallel_target;
        d["cipher_map"] = files.cipher_map;
        return d;
      },
      py::arg("out_dir"), py::arg("seed") = 1, py::arg("vocab_size") = 200,
      py::arg("positive_words") = 30, py::arg("negative_words") = 30,
      py::arg("labeled") = 2000, py::arg("parallel") = 3000, py::arg("test") = 500,
      py::arg("noise") = 0.0, "Generate the synthetic bilingual benchmark corpus.");

  m.def(
      "build_vocab",
      [](const std::vector<std::string>& inputs, const std::string& output,
         const std::string& format, const std::vector<std::string>& text_inputs,
         const std::string& lang, int min_count, int max_size) {
        cli::BuildVocabArgs args;
        args.inputs = inputs;
        args.output = output;
        args.format = format;
        args.text_inputs = text_inputs;
        args.lang = lang;
        args.min_count = min_count;
        args.max_size = max_size;
        cli::cmd_build_vocab(args);
      },
      py::arg("inputs"), py::arg("output"), py::arg("format") = "jsonl",
      py::arg("text_inputs") = std::vector<std::string>{}, py::arg("lang") = "",
      py::arg("min_count") = 2, py::arg("max_size") = 50000);

  m.def(
      "train",
      [](const std::string& labeled, const std::string& source_vocab,
         const std::string& out_dir, const std::string& mode, const std::string& supervision,
         const std::string& parallel_source, const std::string& parallel_target,
         const std::string& target_vocab, const std::string& source_lang,
         const std::string& target_lang, int embed_dim, int hidden_dim, int repr_dim,
         int sentences, int words, float dropout, double alpha, int labeled_epochs,
         int projection_epochs, int pretrain_epochs, int joint_epochs, int batch_size,
         int parallel_batch_size, std::uint64_t seed) {
        cli::TrainArgs args;
        args.labeled = labeled;
        args.source_vocab = source_vocab;
        args.out_dir = out_dir;
        args.mode = mode;
        args.supervision = supervision;
        args.parallel_source = parallel_source;
        args.parallel_target = parallel_target;
        args.target_vocab = target_vocab;
        args.source_lang = source_lang;
        args.target_lang = target_lang;
        args.model.embed_dim = embed_dim;
        args.model.sent_hidden = hidden_dim;
        args.model.repr_dim = repr_dim;
        args.model.sentences = sentences;
        args.model.words = words;
        args.model.dropout = dropout;
        args.plan.alpha = alpha;
        args.plan.labeled_epochs = labeled_epochs;
        args.plan.projection_epochs = projection_epochs;
        args.plan.pretrain_epochs = pretrain_epochs;
        args.plan.joint_epochs = joint_epochs;
        args.plan.batch_size = batch_size;
        args.plan.parallel_batch_size = parallel_batch_size;
        args.plan.seed = seed;
        const cli::TrainOutputs out = cli::cmd_train(args);
        py::dict d;
        d["checkpoint"] = out.checkpoint;
        d["loss_csv"] = out.loss_csv;
        d["manifest"] = out.manifest;
        if (!out.stage1_checkpoint.empty()) d["stage1_checkpoint"] = out.stage1_checkpoint;
        d["final_labeled_loss"] = out.final_labeled_loss;
        d["final_projection_loss"] = out.final_projection_loss;
        return d;
      },
      py::arg("labeled"), py::arg("source_vocab"), py::arg("out_dir"),
      py::arg("mode") = "joint", py::arg("supervision") = "representation",
      py::arg("parallel_source") = "", py::arg("parallel_target") = "",
      py::arg("target_vocab") = "", py::arg("source_lang") = "en",
      py::arg("target_lang") = "fr", py::arg("embed_dim") = 64, py::arg("hidden_dim") = 256,
      py::arg("repr_dim") = 256, py::arg("sentences") = 30, py::arg("words") = 20,
      py::arg("dropout") = 0.5f, py::arg("alpha") = 1.0, py::arg("labeled_epochs") = 10,
      py::arg("projection_epochs") = 10, py::arg("pretrain_epochs") = 4,
      py::arg("joint_epochs") = 12, py::arg("batch_size") = 32,
      py::arg("parallel_batch_size") = 0, py::arg("seed") = 0,
      "Train a classifier (joint / two-stage / labeled-only); writes a checkpoint, a loss "
      "CSV and a manifest, and returns their paths.");

  m.def(
      "evaluate",
      [](const std::string& checkpoint, const std::string& test, const std::string& lang,
         const std::string& out_csv) {
        cli::EvaluateArgs args;
        args.checkpoint = checkpoint;
        args.test = test;
        args.lang = lang;
        args.out_csv = out_csv;
        return report_dict(cli::cmd_evaluate(args));
      },
      py::arg("checkpoint"), py::arg("test"), py::arg("lang"), py::arg("out_csv") = "",
      "Swap in the language's embeddings and evaluate on a labeled JSONL test set.");

  m.def(
      "neighbors",
      [](const std::string& checkpoint, const std::string& query,
         const std::string& source_lang, const std::string& target_lang, int k) {
        const model::TransferModel mdl = model::load_checkpoint(checkpoint);
        const auto nn = eval::neighbors(mdl, query, source_lang, target_lang, k);
        std::vector<std::pair<std::string, double>> out;
        out.reserve(nn.size());
        for (const auto& n : nn) out.emplace_back(n.token, n.score);
        return out;
      },
      py::arg("checkpoint"), py::arg("query"), py::arg("source_lang"),
      py::arg("target_lang"), py::arg("k") = 10,
      "Top-k target tokens by embedding cosine similarity.");

  m.attr("__version__") = "0.1.0";
}
