#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xlt/errors.hpp"
#include "xlt/numcore/tape.hpp"
#include "xlt/numcore/tensor.hpp"

namespace xlt::numcore {

// Named trainable tensor plus its gradient and RMSProp accumulator.
// A frozen slot still participates in forward passes but reports a zero
// gradient and receives no optimizer update.
template <typename T>
struct ParamSlotT {
  std::string name;
  TensorT<T> value;
  TensorT<T> grad;
  TensorT<T> rms_cache;
  bool frozen = false;
};

// Ordered collection of slots. Insertion order is part of the contract:
// checkpoints serialize slots in this order, which is what makes
// save -> load -> save byte-identical.
template <typename T>
class ParamStoreT {
 public:
  ParamSlotT<T>& add(const std::string& name, TensorT<T> init) {
    if (index_.count(name)) throw config_error("duplicate parameter slot: " + name);
    auto slot = std::make_unique<ParamSlotT<T>>();
    slot->name = name;
    slot->grad = TensorT<T>(init.shape());
    slot->rms_cache = TensorT<T>(init.shape());
    slot->value = std::move(init);
    index_.emplace(name, static_cast<int>(slots_.size()));
    slots_.push_back(std::move(slot));
    return *slots_.back();
  }

  bool has(const std::string& name) const { return index_.count(name) != 0; }

  ParamSlotT<T>& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw config_error("unknown parameter slot: " + name);
    return *slots_[static_cast<std::size_t>(it->second)];
  }
  const ParamSlotT<T>& at(const std::string& name) const {
    return const_cast<ParamStoreT*>(this)->at(name);
  }

  int size() const { return static_cast<int>(slots_.size()); }
  ParamSlotT<T>& slot(int i) { return *slots_[static_cast<std::size_t>(i)]; }
  const ParamSlotT<T>& slot(int i) const { return *slots_[static_cast<std::size_t>(i)]; }

  void zero_grads() {
    for (auto& s : slots_)
      for (std::int64_t i = 0; i < s->grad.size(); ++i) s->grad[i] = T{0};
  }

  void set_frozen(const std::string& name, bool frozen) { at(name).frozen = frozen; }

  void set_frozen_prefix(const std::string& prefix, bool frozen) {
    for (auto& s : slots_)
      if (s->name.rfind(prefix, 0) == 0) s->frozen = frozen;
  }

  void unfreeze_all() {
    for (auto& s : slots_) s->frozen = false;
  }

  template <typename U>
  ParamStoreT<U> cast() const {
    ParamStoreT<U> out;
    for (const auto& s : slots_) {
      auto& ns = out.add(s->name, s->value.template cast<U>());
      ns.rms_cache = s->rms_cache.template cast<U>();
      ns.frozen = s->frozen;
    }
    return out;
  }

 private:
  std::vector<std::unique_ptr<ParamSlotT<T>>> slots_;  // stable addresses
  std::unordered_map<std::string, int> index_;
};

using ParamSlot = ParamSlotT<float>;
using ParamStore = ParamStoreT<float>;

// Binds slots of a store into a tape on demand. Frozen slots bind as
// constants, so backward skips their whole branch.
template <typename T>
class BoundParams {
 public:
  BoundParams(Tape<T>& tape, const ParamStoreT<T>& store) : tape_(&tape), store_(&store) {}

  Var get(const std::string& name) {
    auto it = bound_.find(name);
    if (it != bound_.end()) return it->second;
    const ParamSlotT<T>& slot = store_->at(name);
    Var v = tape_->leaf(slot.value, !slot.frozen);
    bound_.emplace(name, v);
    return v;
  }
  Var operator[](const std::string& name) { return get(name); }

  // Copies tape gradients into `target` (normally the bound store itself).
  // Unbound and frozen slots end up with zero grads.
  void harvest(ParamStoreT<T>& target) const {
    target.zero_grads();
    for (const auto& [name, var] : bound_) {
      ParamSlotT<T>& slot = target.at(name);
      if (slot.frozen) continue;
      const TensorT<T>& g = tape_->grad(var);
      if (!slot.grad.same_shape(g)) throw dim_error("harvest: gradient shape mismatch for " + name);
      slot.grad = g;
    }
  }

 private:
  Tape<T>* tape_;
  const ParamStoreT<T>* store_;
  std::unordered_map<std::string, Var> bound_;
};

// Runs a graph builder forward and backward, leaving per-slot gradients in
// the store. The builder is any callable (Tape<T>&, BoundParams<T>&) -> Var
// returning a scalar loss; inputs enter through its captures.
template <typename T, typename F>
double forward_backward(ParamStoreT<T>& store, F&& build) {
  Tape<T> tape;
  BoundParams<T> bound(tape, store);
  Var loss = build(tape, bound);
  if (tape.value(loss).size() != 1) throw dim_error("forward_backward: loss must be scalar");
  tape.backward(loss);
  bound.harvest(store);
  return static_cast<double>(tape.scalar(loss));
}

// Forward-only evaluation; returns the built node's value. Used for
// inference and for finite-difference probes.
template <typename T, typename F>
TensorT<T> forward_values(const ParamStoreT<T>& store, F&& build) {
  Tape<T> tape;
  BoundParams<T> bound(tape, store);
  Var out = build(tape, bound);
  return tape.value(out);
}

}  // namespace xlt::numcore
