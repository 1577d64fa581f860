#pragma once

#include "xlt/numcore/params.hpp"

namespace xlt::numcore {

// RMSProp with the method's canonical defaults.
struct RmsPropConfig {
  float lr = 1e-3f;
  float decay = 0.9f;
  float eps = 1e-8f;
};

// One update over every non-frozen slot:
//   cache <- decay*cache + (1-decay)*grad^2
//   value <- value - lr*grad / (sqrt(cache) + eps)
// Frozen slots are left bit-identical, including their caches.
void rmsprop_step(ParamStore& store, const RmsPropConfig& cfg);

}  // namespace xlt::numcore
