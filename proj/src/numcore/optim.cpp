#include "xlt/numcore/optim.hpp"

#include <cmath>

#include "xlt/errors.hpp"

namespace xlt::numcore {

void rmsprop_step(ParamStore& store, const RmsPropConfig& cfg) {
  if (!(cfg.lr > 0.0f)) throw config_error("rmsprop: learning rate must be positive");
  if (cfg.decay < 0.0f || cfg.decay > 1.0f) throw config_error("rmsprop: decay must be in [0,1]");
  if (!(cfg.eps > 0.0f)) throw config_error("rmsprop: eps must be positive");
  for (int i = 0; i < store.size(); ++i) {
    ParamSlot& s = store.slot(i);
    if (s.frozen) continue;
    float* v = s.value.data();
    const float* g = s.grad.data();
    float* c = s.rms_cache.data();
    const std::int64_t n = s.value.size();
    for (std::int64_t k = 0; k < n; ++k) {
      c[k] = cfg.decay * c[k] + (1.0f - cfg.decay) * g[k] * g[k];
      v[k] -= cfg.lr * g[k] / (std::sqrt(c[k]) + cfg.eps);
    }
    require_finite(s.value, "rmsprop_step");
  }
}

}  // namespace xlt::numcore
