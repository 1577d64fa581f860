#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xlt/synth/benchmark.hpp"

namespace xlt::eval {

// Model-size study: trains and evaluates the full transfer pipeline for each
// (embedding dim, encoding dim) cell, `runs` times with distinct seeds, and
// reports mean/std target-test accuracy per cell. The encoding dim sets both
// GRU widths (sentence hidden and task-representation size).
struct SweepSpec {
  std::vector<int> embed_dims;
  std::vector<int> encode_dims;
  int runs = 1;
  synth::SynthSpec data;
  synth::BenchConfig base;  // model dims are overridden per cell
};

struct SweepCell {
  int embed_dim = 0;
  int encode_dim = 0;
  int runs = 0;
  double mean_acc = 0.0;
  double std_acc = 0.0;
  bool failed = false;
  std::vector<double> run_accs;  // per-run accuracies behind the aggregates
};

// Seed derivations, exposed so a single sweep cell can be reproduced by a
// direct run_benchmark call.
std::uint64_t sweep_corpus_seed(const SweepSpec& spec, int run);
std::uint64_t sweep_train_seed(const SweepSpec& spec, int run, int cell_index);

std::vector<SweepCell> size_sweep(const SweepSpec& spec);

// CSV: embed_dim,encode_dim,runs,mean_acc,std_acc (failed cells emit nan).
std::string sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace xlt::eval
