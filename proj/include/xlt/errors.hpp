#pragma once

#include <stdexcept>
#include <string>

namespace xlt {

// Error taxonomy shared by all modules. The CLI maps these onto stable
// exit codes: config 2, data 3, numeric/dimension 4.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or usage: bad hyperparameters, unknown language
// tags, missing required options.
class config_error : public error {
 public:
  using error::error;
};

// Malformed or inconsistent input data: bad JSON lines, misaligned
// parallel files, out-of-range ratings, token ids outside a vocabulary.
class data_error : public error {
 public:
  using error::error;
};

// Tensor shape mismatch in a numeric operation.
class dim_error : public error {
 public:
  using error::error;
};

// Non-finite value produced by a numeric operation. Fail-fast: the step
// that produced the NaN/Inf aborts instead of propagating it.
class numeric_error : public error {
 public:
  using error::error;
};

enum class checkpoint_fault { bad_magic, bad_version, truncated, inconsistent };

// Checkpoint load failure; `fault()` distinguishes the failure classes.
class checkpoint_error : public data_error {
 public:
  checkpoint_error(checkpoint_fault fault, const std::string& msg)
      : data_error(msg), fault_(fault) {}
  checkpoint_fault fault() const { return fault_; }

 private:
  checkpoint_fault fault_;
};

}  // namespace xlt
