#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "xlt/errors.hpp"
#include "xlt/numcore/rng.hpp"

namespace xlt::numcore {

inline std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

inline std::int64_t shape_numel(const std::vector<int>& shape) {
  std::int64_t n = 1;
  for (int e : shape) {
    if (e <= 0) throw dim_error("tensor extents must be positive, got " + shape_str(shape));
    n *= e;
  }
  return n;
}

// Dense row-major tensor. Training uses float storage; gradient checking
// instantiates the same code with double.
template <typename T>
class TensorT {
 public:
  TensorT() = default;

  explicit TensorT(std::vector<int> shape, T fill = T{0})
      : shape_(std::move(shape)), data_(static_cast<std::size_t>(shape_numel(shape_)), fill) {}

  TensorT(std::vector<int> shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_numel(shape_) != static_cast<std::int64_t>(data_.size()))
      throw dim_error("tensor data length does not match shape " + shape_str(shape_));
  }

  static TensorT row(std::vector<T> values) {
    const int n = static_cast<int>(values.size());
    return TensorT({n}, std::move(values));
  }

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& vec() { return data_; }
  const std::vector<T>& vec() const { return data_; }

  T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  const T& operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // 2-D accessors; callers guarantee ndim()==2.
  int rows() const { return shape_[0]; }
  int cols() const { return ndim() == 1 ? 1 : shape_[1]; }
  T& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols() + c]; }
  const T& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols() + c]; }

  bool same_shape(const TensorT& other) const { return shape_ == other.shape_; }

  bool all_finite() const {
    for (const T v : data_)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }

  template <typename U>
  TensorT<U> cast() const {
    std::vector<U> out(data_.size());
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return TensorT<U>(shape_, std::move(out));
  }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

using Tensor = TensorT<float>;
using Tensor64 = TensorT<double>;

template <typename T>
void require_finite(const TensorT<T>& t, const char* op) {
  if (!t.all_finite())
    throw numeric_error(std::string("non-finite value produced by ") + op);
}

template <typename T>
void require_same_shape(const TensorT<T>& a, const TensorT<T>& b, const char* op) {
  if (!a.same_shape(b))
    throw dim_error(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                    shape_str(b.shape()));
}

// --- initializers ---------------------------------------------------------

template <typename T>
TensorT<T> uniform_tensor(std::vector<int> shape, double lo, double hi, Rng& rng) {
  TensorT<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

// Fan-based uniform init in +/- sqrt(6 / (fan_in + fan_out)).
template <typename T>
TensorT<T> glorot_tensor(std::vector<int> shape, int fan_in, int fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (static_cast<double>(fan_in) + fan_out));
  return uniform_tensor<T>(std::move(shape), -limit, limit, rng);
}

// --- matmul kernels -------------------------------------------------------
// Plain loops, cache-friendly orderings, __restrict so the compiler can
// vectorize the inner loops. `accumulate` adds into C instead of
// overwriting; backward passes rely on it.

template <typename T>
void matmul_nn(const TensorT<T>& a, const TensorT<T>& b, TensorT<T>& c, bool accumulate) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(0))
    throw dim_error("matmul: incompatible shapes " + shape_str(a.shape()) + " * " +
                    shape_str(b.shape()));
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (c.ndim() != 2 || c.dim(0) != m || c.dim(1) != n)
    throw dim_error("matmul: bad output shape");
  T* __restrict cd = c.data();
  const T* __restrict ad = a.data();
  const T* __restrict bd = b.data();
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(m) * k * n > 262144)
  for (int i = 0; i < m; ++i) {
    T* __restrict crow = cd + static_cast<std::size_t>(i) * n;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = T{0};
    const T* __restrict arow = ad + static_cast<std::size_t>(i) * k;
    for (int l = 0; l < k; ++l) {
      const T av = arow[l];
      const T* __restrict brow = bd + static_cast<std::size_t>(l) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// c[m,n] = a[m,k] * b[n,k]^T
template <typename T>
void matmul_nt(const TensorT<T>& a, const TensorT<T>& b, TensorT<T>& c, bool accumulate) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(1) != b.dim(1))
    throw dim_error("matmul_nt: incompatible shapes " + shape_str(a.shape()) + " * " +
                    shape_str(b.shape()) + "^T");
  const int m = a.dim(0), k = a.dim(1), n = b.dim(0);
  if (c.ndim() != 2 || c.dim(0) != m || c.dim(1) != n)
    throw dim_error("matmul_nt: bad output shape");
  T* __restrict cd = c.data();
  const T* __restrict ad = a.data();
  const T* __restrict bd = b.data();
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(m) * k * n > 262144)
  for (int i = 0; i < m; ++i) {
    const T* __restrict arow = ad + static_cast<std::size_t>(i) * k;
    T* __restrict crow = cd + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const T* __restrict brow = bd + static_cast<std::size_t>(j) * k;
      // Four independent accumulators so the reduction can use SIMD lanes.
      T s0{0}, s1{0}, s2{0}, s3{0};
      int l = 0;
      for (; l + 4 <= k; l += 4) {
        s0 += arow[l] * brow[l];
        s1 += arow[l + 1] * brow[l + 1];
        s2 += arow[l + 2] * brow[l + 2];
        s3 += arow[l + 3] * brow[l + 3];
      }
      T acc = (s0 + s1) + (s2 + s3);
      for (; l < k; ++l) acc += arow[l] * brow[l];
      crow[j] = accumulate ? crow[j] + acc : acc;
    }
  }
}

// c[k,n] = a[m,k]^T * b[m,n]
template <typename T>
void matmul_tn(const TensorT<T>& a, const TensorT<T>& b, TensorT<T>& c, bool accumulate) {
  if (a.ndim() != 2 || b.ndim() != 2 || a.dim(0) != b.dim(0))
    throw dim_error("matmul_tn: incompatible shapes " + shape_str(a.shape()) + "^T * " +
                    shape_str(b.shape()));
  const int m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (c.ndim() != 2 || c.dim(0) != k || c.dim(1) != n)
    throw dim_error("matmul_tn: bad output shape");
  T* __restrict cd = c.data();
  const T* __restrict ad = a.data();
  const T* __restrict bd = b.data();
#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(m) * k * n > 262144)
  for (int l = 0; l < k; ++l) {
    T* __restrict crow = cd + static_cast<std::size_t>(l) * n;
    if (!accumulate)
      for (int j = 0; j < n; ++j) crow[j] = T{0};
    for (int i = 0; i < m; ++i) {
      const T av = ad[static_cast<std::size_t>(i) * k + l];
      const T* __restrict brow = bd + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

}  // namespace xlt::numcore
