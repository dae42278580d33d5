// Copyright 2026 The asgld Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ASGLD_CORE_HPP
#define ASGLD_CORE_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asgld {

/// Raised whenever an operation would produce or consume a NaN/Inf entry.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Flat, fixed-dimension vector of doubles holding parameters, gradients and
 * per-coordinate optimizer accumulators.
 *
 * Every constructor and mutating operation rejects non-finite entries, so a
 * ParamVector that exists is always finite.
 */
class ParamVector {
 public:
  ParamVector() = default;

  explicit ParamVector(std::size_t dim, double fill = 0.0) : values_(dim, fill) { check_finite(); }

  ParamVector(std::initializer_list<double> init) : values_(init) { check_finite(); }

  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) { check_finite(); }

  static ParamVector zeros(std::size_t dim) { return ParamVector(dim, 0.0); }

  std::size_t dim() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double operator[](std::size_t i) const { return values_[i]; }

  /// Bounds-checked element write; the new value must be finite.
  void set(std::size_t i, double v) {
    if (i >= values_.size()) throw DimensionError("ParamVector::set: index out of range");
    if (!std::isfinite(v)) throw NonFiniteError("ParamVector::set: non-finite value");
    values_[i] = v;
  }

  std::span<const double> values() const { return values_; }
  const std::vector<double>& as_vector() const { return values_; }

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  double norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
  }

  bool operator==(const ParamVector&) const = default;

 private:
  void check_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) throw NonFiniteError("ParamVector: non-finite entry");
  }

  std::vector<double> values_;
};

namespace detail {

inline void require_same_dim(const ParamVector& x, const ParamVector& y, const char* op) {
  if (x.dim() != y.dim())
    throw DimensionError(std::string(op) + ": dimension mismatch (" + std::to_string(x.dim()) + " vs " +
                         std::to_string(y.dim()) + ")");
}

// Applies f coordinate-wise over two equally sized vectors.
template <typename F>
ParamVector zip(const ParamVector& x, const ParamVector& y, const char* op, F&& f) {
  require_same_dim(x, y, op);
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return ParamVector(std::move(out));
}

template <typename F>
ParamVector map(const ParamVector& x, F&& f) {
  std::vector<double> out(x.dim());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i]);
  return ParamVector(std::move(out));
}

inline double unit_uniform(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Returns a*x + y.
inline ParamVector axpy(double a, const ParamVector& x, const ParamVector& y) {
  return detail::zip(x, y, "axpy", [a](double xi, double yi) { return a * xi + yi; });
}

/// Hadamard product.
inline ParamVector elementwise_mul(const ParamVector& x, const ParamVector& y) {
  return detail::zip(x, y, "elementwise_mul", [](double xi, double yi) { return xi * yi; });
}

inline ParamVector operator+(const ParamVector& x, const ParamVector& y) {
  return detail::zip(x, y, "add", [](double a, double b) { return a + b; });
}

inline ParamVector operator-(const ParamVector& x, const ParamVector& y) {
  return detail::zip(x, y, "sub", [](double a, double b) { return a - b; });
}

inline ParamVector operator*(double a, const ParamVector& x) {
  return detail::map(x, [a](double v) { return a * v; });
}

/// SplitMix64 finalizer, used to derive independent sub-seeds from one seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * Seeded source of standard normal draws.
 *
 * Backed by a 64-bit Mersenne Twister and the Box-Muller transform. Each
 * normal consumes exactly two raw words and nothing is cached between calls,
 * so the generator position is a pure function of (seed, draws so far).
 * Not thread-safe; each run owns its own stream.
 */
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return draws_; }

  double standard_normal() {
    // u1 in (0, 1] keeps log() finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    ++draws_;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  bool operator==(const GaussianStream&) const = default;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uint64_t draws_ = 0;
};

/**
 * Draws mean + sqrt(variance) * z coordinate-wise, z standard normal.
 * Always advances the stream by exactly mean.dim() draws, including for
 * zero-variance coordinates, which come back exactly equal to the mean.
 */
inline ParamVector sample_gaussian(GaussianStream& stream, const ParamVector& mean, const ParamVector& variance) {
  detail::require_same_dim(mean, variance, "sample_gaussian");
  for (double v : variance)
    if (v < 0.0) throw std::invalid_argument("sample_gaussian: negative variance");
  std::vector<double> out(mean.dim());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double z = stream.standard_normal();
    out[i] = variance[i] == 0.0 ? mean[i] : mean[i] + std::sqrt(variance[i]) * z;
  }
  return ParamVector(std::move(out));
}

}  // namespace asgld

#endif  // ASGLD_CORE_HPP
