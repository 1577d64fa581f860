#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "xlt/numcore/params.hpp"

namespace xlt::numcore {

struct GradCheckEntry {
  std::string slot;
  double max_rel_err = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;

  double max_rel_err() const {
    double worst = 0.0;
    for (const auto& e : entries) worst = std::max(worst, e.max_rel_err);
    return worst;
  }
  bool all_below(double tol) const { return max_rel_err() < tol; }
};

// Compares analytic gradients against central finite differences, slot by
// slot, element by element. Runs entirely in 64-bit on a private copy of the
// store with freezing cleared (this checks the calculus, not the freeze
// policy). The builder must describe a dropout-free graph, i.e. be built
// with training=false.
//
// Relative error per element:
//   |analytic - numeric| / max(|analytic|, |numeric|, 1e-8)
// evaluated at each probe step, keeping the best step per element. The probe
// step trades truncation (grows as eps^2) against roundoff in the loss
// difference (shrinks as 1/eps); no single step conditions both the large
// and the near-zero gradient elements of a deep recurrent graph, while a
// genuinely wrong gradient fails at every step.
template <typename F>
GradCheckReport gradient_check(const ParamStore& params, F&& build,
                               std::vector<double> fd_steps = {1e-3, 1e-4, 1e-5}) {
  if (fd_steps.empty()) throw config_error("gradient_check: need at least one probe step");
  ParamStoreT<double> mirror = params.template cast<double>();
  mirror.unfreeze_all();

  // Analytic pass.
  forward_backward<double>(mirror, build);

  auto eval_loss = [&]() -> double {
    const TensorT<double> out = forward_values<double>(mirror, build);
    if (out.size() != 1) throw dim_error("gradient_check: loss must be scalar");
    return out[0];
  };

  GradCheckReport report;
  for (int i = 0; i < mirror.size(); ++i) {
    ParamSlotT<double>& slot = mirror.slot(i);
    GradCheckEntry entry{slot.name, 0.0};
    for (std::int64_t k = 0; k < slot.value.size(); ++k) {
      const double analytic = slot.grad[k];
      const double orig = slot.value[k];
      double best = std::numeric_limits<double>::infinity();
      for (const double eps : fd_steps) {
        slot.value[k] = orig + eps;
        const double up = eval_loss();
        slot.value[k] = orig - eps;
        const double down = eval_loss();
        slot.value[k] = orig;
        const double numeric = (up - down) / (2.0 * eps);
        const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
        best = std::min(best, std::fabs(analytic - numeric) / denom);
        if (best == 0.0) break;
      }
      entry.max_rel_err = std::max(entry.max_rel_err, best);
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

template <typename F>
GradCheckReport gradient_check(const ParamStore& params, F&& build, double fd_eps) {
  return gradient_check(params, std::forward<F>(build), std::vector<double>{fd_eps});
}

}  // namespace xlt::numcore
