//
// Copyright 2026 The lattice-dp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LATTICE_DP_NOISE_H_
#define LATTICE_DP_NOISE_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lattice_dp/random.h"
#include "lattice_dp/smith.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

enum class NoiseKind { kLaplaceL1, kLaplaceL2, kGaussian };

inline std::string_view NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kLaplaceL1:
      return "l1";
    case NoiseKind::kLaplaceL2:
      return "l2";
    case NoiseKind::kGaussian:
      return "gauss";
  }
  return "unknown";
}

inline NoiseKind ParseNoiseKind(std::string_view name) {
  if (name == "l1") return NoiseKind::kLaplaceL1;
  if (name == "l2") return NoiseKind::kLaplaceL2;
  if (name == "gauss" || name == "gaussian") return NoiseKind::kGaussian;
  throw Error(ErrorCode::kConfigInvalid,
              "unknown norm '" + std::string(name) + "' (want l1, l2, gauss)");
}

// Unnormalized log-density of the noise on the lattice:
//   LaplaceL1:  -epsilon * |z|_1
//   LaplaceL2:  -epsilon * |z|_2
//   Gaussian:   -|z - center|_2^2 / (2 sigma^2)
struct NoiseTarget {
  NoiseKind kind = NoiseKind::kLaplaceL1;
  double epsilon = 0.0;
  double sigma = 0.0;
  std::vector<std::int64_t> center;  // empty means the origin

  static NoiseTarget LaplaceL1(double epsilon) {
    return Validated({NoiseKind::kLaplaceL1, epsilon, 0.0, {}});
  }
  static NoiseTarget LaplaceL2(double epsilon) {
    return Validated({NoiseKind::kLaplaceL2, epsilon, 0.0, {}});
  }
  static NoiseTarget Gaussian(double sigma,
                              std::vector<std::int64_t> center = {}) {
    return Validated({NoiseKind::kGaussian, 0.0, sigma, std::move(center)});
  }

 private:
  static NoiseTarget Validated(NoiseTarget t) {
    if (t.kind == NoiseKind::kGaussian) {
      if (!(t.sigma > 0.0) || !std::isfinite(t.sigma)) {
        throw Error(ErrorCode::kParameterDomain, "sigma must be positive");
      }
    } else if (!(t.epsilon > 0.0) || !std::isfinite(t.epsilon)) {
      throw Error(ErrorCode::kParameterDomain, "epsilon must be positive");
    }
    return t;
  }
};

namespace internal {

inline __int128 CheckedSquare(std::int64_t v) {
  return static_cast<__int128>(v) * static_cast<__int128>(v);
}

}  // namespace internal

// Norms are accumulated exactly in 128-bit integers; the only rounding is the
// conversion of the final scalar.
inline double LogTarget(const NoiseTarget& t, std::span<const std::int64_t> z) {
  switch (t.kind) {
    case NoiseKind::kLaplaceL1: {
      __int128 l1 = 0;
      for (std::int64_t v : z) l1 += v < 0 ? -static_cast<__int128>(v) : v;
      return -t.epsilon * static_cast<double>(l1);
    }
    case NoiseKind::kLaplaceL2: {
      __int128 sq = 0;
      for (std::int64_t v : z) sq += internal::CheckedSquare(v);
      return -t.epsilon * std::sqrt(static_cast<double>(sq));
    }
    case NoiseKind::kGaussian: {
      __int128 sq = 0;
      if (t.center.empty()) {
        for (std::int64_t v : z) sq += internal::CheckedSquare(v);
      } else {
        if (t.center.size() != z.size()) {
          throw Error(ErrorCode::kInvalidArgument,
                      "gaussian center has wrong dimension");
        }
        for (std::size_t i = 0; i < z.size(); ++i) {
          sq += internal::CheckedSquare(z[i] - t.center[i]);
        }
      }
      return -static_cast<double>(sq) / (2.0 * t.sigma * t.sigma);
    }
  }
  return 0.0;
}

// Two-sided geometric law on Z with mass (1 - a) / (1 + a) * a^|e|.
class DoubleGeometric {
 public:
  DoubleGeometric() : DoubleGeometric(std::exp(-1.0)) {}
  explicit DoubleGeometric(double a) : a_(a) {
    if (!(a >= 0.0 && a < 1.0)) {
      throw Error(ErrorCode::kParameterDomain,
                  "double geometric ratio must lie in [0, 1)");
    }
    log_a_ = a > 0.0 ? std::log(a) : -std::numeric_limits<double>::infinity();
    p_zero_ = (1.0 - a) / (1.0 + a);
    log_p_zero_ = std::log(p_zero_);
  }

  static DoubleGeometric FromRate(double b) { return DoubleGeometric(std::exp(-b)); }

  // Ratio whose law has standard deviation `sd`; var = 2a / (1 - a)^2.
  static DoubleGeometric WithStdDev(double sd) {
    if (!(sd > 0.0)) return DoubleGeometric(0.0);
    const double s2 = sd * sd;
    return DoubleGeometric(((s2 + 1.0) - std::sqrt(2.0 * s2 + 1.0)) / s2);
  }

  double ratio() const { return a_; }
  double Variance() const { return 2.0 * a_ / ((1.0 - a_) * (1.0 - a_)); }

  double LogPmf(std::int64_t e) const {
    if (e == 0) return log_p_zero_;
    if (a_ == 0.0) return -std::numeric_limits<double>::infinity();
    return log_p_zero_ + static_cast<double>(std::llabs(e)) * log_a_;
  }
  double Pmf(std::int64_t e) const { return std::exp(LogPmf(e)); }

  // Inverse CDF of |e| followed by a fair sign. P(|e| = 0) = p0 and, given
  // |e| >= 1, |e| - 1 is geometric with ratio a, which reproduces the mass
  // function exactly.
  template <typename Urbg>
  std::int64_t Sample(Urbg& rng) const {
    if (Uniform01(rng) < p_zero_) return 0;
    // 1 - U lies in (0, 1], so the log is finite.
    const double u = 1.0 - Uniform01(rng);
    const double g = std::floor(std::log(u) / log_a_);
    const std::int64_t magnitude =
        1 + (g < 4.0e18 ? static_cast<std::int64_t>(g) : std::int64_t{4000000000000000000});
    return (rng() >> 63) ? -magnitude : magnitude;
  }

 private:
  double a_;
  double log_a_;
  double p_zero_;
  double log_p_zero_;
};

// Volume of the unit Euclidean ball in m dimensions.
inline double UnitBallVolume(std::size_t m) {
  const double half = static_cast<double>(m) / 2.0;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

// Tail constant K = 4 * 2^m * V_m / sqrt(det(C^T C)) of the lattice-point
// counting bound.
inline double TailConstant(std::size_t m, const BigInt& gram_det) {
  const double root_det = std::sqrt(static_cast<double>(gram_det));
  return 4.0 * std::ldexp(UnitBallVolume(m), static_cast<int>(m)) / root_det;
}

inline double TailConstant(const LatticeBasis& basis) {
  return TailConstant(basis.lattice_dim, basis.gram_det);
}

// Explicit stand-in for the asymptotic constant in the Gaussian variance:
// c_A = 3 * max{m ln max(m, 2), ln max(K, e), 1}.
inline double CalibrationConstant(std::size_t m, double tail_constant) {
  const double md = static_cast<double>(m);
  const double dim_term = md * std::log(std::max(md, 2.0));
  const double k_term = std::log(std::max(tail_constant, std::numbers::e));
  return 3.0 * std::max({dim_term, k_term, 1.0});
}

struct GaussianCalibration {
  double c_a = 0.0;
  double sigma = 0.0;
};

// sigma^2 = 2 c_A ln(1/delta) / epsilon^2, valid for 0 < delta < epsilon < 1/e.
inline GaussianCalibration CalibrateGaussian(
    double epsilon, double delta, std::size_t m, double tail_constant,
    std::optional<double> c_a_override = std::nullopt) {
  if (!(delta > 0.0 && delta < epsilon && epsilon < 1.0 / std::numbers::e)) {
    throw Error(ErrorCode::kParameterDomain,
                "gaussian calibration needs 0 < delta < epsilon < 1/e (got "
                "epsilon=" + std::to_string(epsilon) +
                    ", delta=" + std::to_string(delta) + ")");
  }
  GaussianCalibration out;
  out.c_a = c_a_override ? *c_a_override : CalibrationConstant(m, tail_constant);
  if (!(out.c_a > 0.0)) {
    throw Error(ErrorCode::kParameterDomain, "c_A must be positive");
  }
  out.sigma = std::sqrt(2.0 * out.c_a * std::log(1.0 / delta)) / epsilon;
  return out;
}

inline double GaussianSigma(double epsilon, double delta, std::size_t m,
                            double tail_constant) {
  return CalibrateGaussian(epsilon, delta, m, tail_constant).sigma;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_NOISE_H_
