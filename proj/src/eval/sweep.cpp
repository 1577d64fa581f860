#include "xlt/eval/sweep.hpp"

#include <cmath>
#include <cstdio>

#include "xlt/errors.hpp"

namespace xlt::eval {

std::uint64_t sweep_corpus_seed(const SweepSpec& spec, int run) {
  return numcore::Rng::mix(numcore::Rng::mix(spec.data.seed, numcore::stream::kSweepRun),
                           static_cast<std::uint64_t>(run));
}

std::uint64_t sweep_train_seed(const SweepSpec& spec, int run, int cell_index) {
  return numcore::Rng::mix(
      numcore::Rng::mix(spec.base.plan.seed, numcore::stream::kSweepCell),
      static_cast<std::uint64_t>(run) * 4096 + static_cast<std::uint64_t>(cell_index));
}

std::vector<SweepCell> size_sweep(const SweepSpec& spec) {
  if (spec.embed_dims.empty() || spec.encode_dims.empty())
    throw config_error("sweep: dimension grids must be non-empty");
  if (spec.runs < 1) throw config_error("sweep: runs must be at least 1");

  const int cells = static_cast<int>(spec.embed_dims.size() * spec.encode_dims.size());
  std::vector<std::vector<double>> accs(static_cast<std::size_t>(cells));
  std::vector<bool> failed(static_cast<std::size_t>(cells), false);

  // One corpus per run, shared across cells, so cell comparisons are paired.
  for (int run = 0; run < spec.runs; ++run) {
    synth::SynthSpec data_spec = spec.data;
    data_spec.seed = sweep_corpus_seed(spec, run);
    const synth::GeneratedCorpus corpus = synth::generate(data_spec);

    int cell = 0;
    for (const int embed : spec.embed_dims) {
      for (const int encode : spec.encode_dims) {
        synth::BenchConfig cfg = spec.base;
        cfg.model.embed_dim = embed;
        cfg.model.sent_hidden = encode;
        cfg.model.repr_dim = encode;
        cfg.plan.seed = sweep_train_seed(spec, run, cell);
        try {
          const synth::BenchResult r =
              synth::run_benchmark(corpus, cfg, synth::BenchMode::joint);
          accs[static_cast<std::size_t>(cell)].push_back(r.target_accuracy);
        } catch (const error&) {
          failed[static_cast<std::size_t>(cell)] = true;
        }
        ++cell;
      }
    }
  }

  std::vector<SweepCell> out;
  int cell = 0;
  for (const int embed : spec.embed_dims) {
    for (const int encode : spec.encode_dims) {
      SweepCell c;
      c.embed_dim = embed;
      c.encode_dim = encode;
      const auto& a = accs[static_cast<std::size_t>(cell)];
      c.run_accs = a;
      c.runs = static_cast<int>(a.size());
      c.failed = failed[static_cast<std::size_t>(cell)] || a.empty();
      if (!c.failed) {
        double sum = 0.0;
        for (const double v : a) sum += v;
        c.mean_acc = sum / static_cast<double>(a.size());
        double sq = 0.0;
        for (const double v : a) sq += (v - c.mean_acc) * (v - c.mean_acc);
        c.std_acc = a.size() > 1 ? std::sqrt(sq / static_cast<double>(a.size() - 1)) : 0.0;
      } else {
        c.mean_acc = std::nan("");
        c.std_acc = std::nan("");
      }
      out.push_back(c);
      ++cell;
    }
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "embed_dim,encode_dim,runs,mean_acc,std_acc\n";
  char buf[128];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.6f,%.6f\n", c.embed_dim, c.encode_dim, c.runs,
                  c.mean_acc, c.std_acc);
    out += buf;
  }
  return out;
}

}  // namespace xlt::eval
