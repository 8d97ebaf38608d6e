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

#ifndef LATTICE_DP_SAMPLER_H_
#define LATTICE_DP_SAMPLER_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lattice_dp/int_matrix.h"
#include "lattice_dp/noise.h"
#include "lattice_dp/random.h"
#include "lattice_dp/smith.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

// Machine-word view of the lattice used on the sampler's hot path. Reduced
// coordinates v have length d; the first k are pinned at zero and coordinate
// k + j multiplies basis column j, so z = V v only involves the basis.
class ChainContext {
 public:
  ChainContext() = default;

  ChainContext(const IntMatrix& incidence, const IntMatrix& basis)
      : dim_(incidence.cols()),
        k_(incidence.rows()),
        m_(basis.cols()) {
    if (basis.rows() != dim_ || k_ + m_ != dim_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "basis shape does not match the incidence matrix");
    }
    columns_.resize(dim_ * m_);
    for (std::size_t j = 0; j < m_; ++j) {
      for (std::size_t i = 0; i < dim_; ++i) {
        columns_[j * dim_ + i] = ToInt64(basis(i, j));
      }
    }
    incidence_.resize(k_ * dim_);
    for (std::size_t l = 0; l < k_; ++l) {
      for (std::size_t i = 0; i < dim_; ++i) {
        incidence_[l * dim_ + i] = ToInt64(incidence(l, i));
      }
    }
  }

  // Lattice {0}: every coordinate is pinned.
  static ChainContext Degenerate(const IntMatrix& incidence) {
    return ChainContext(incidence, IntMatrix(incidence.cols(), 0));
  }

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return k_; }
  std::size_t lattice_dim() const { return m_; }
  bool degenerate() const { return m_ == 0; }

  std::span<const std::int64_t> column(std::size_t j) const {
    return {columns_.data() + j * dim_, dim_};
  }

  // z = V v (only the free coordinates of v contribute).
  std::vector<std::int64_t> Embed(std::span<const std::int64_t> v) const {
    if (v.size() != dim_) {
      throw Error(ErrorCode::kInvalidArgument, "reduced vector has wrong size");
    }
    std::vector<std::int64_t> z(dim_, 0);
    for (std::size_t j = 0; j < m_; ++j) AddScaledColumn(z, j, v[k_ + j]);
    return z;
  }

  // z += e * column(j), exactly.
  void AddScaledColumn(std::vector<std::int64_t>& z, std::size_t j,
                       std::int64_t e) const {
    if (e == 0) return;
    const std::int64_t* col = columns_.data() + j * dim_;
    for (std::size_t i = 0; i < dim_; ++i) {
      std::int64_t prod;
      if (__builtin_mul_overflow(col[i], e, &prod) ||
          __builtin_add_overflow(z[i], prod, &z[i])) {
        throw Error(ErrorCode::kNumericOverflow, "lattice point overflows int64");
      }
    }
  }

  // Exact check of A z = 0.
  bool InLattice(std::span<const std::int64_t> z) const {
    if (z.size() != dim_) return false;
    for (std::size_t l = 0; l < k_; ++l) {
      __int128 s = 0;
      for (std::size_t i = 0; i < dim_; ++i) {
        s += static_cast<__int128>(incidence_[l * dim_ + i]) * z[i];
      }
      if (s != 0) return false;
    }
    return true;
  }

 private:
  std::size_t dim_ = 0;
  std::size_t k_ = 0;
  std::size_t m_ = 0;
  std::vector<std::int64_t> columns_;    // m columns of length d
  std::vector<std::int64_t> incidence_;  // k x d, row-major
};

// Pre-jump law: coordinates 0..k-1 are identically zero and coordinate k + j
// is drawn from etas[j].
struct ProposalSpec {
  std::vector<DoubleGeometric> etas;

  static ProposalSpec Uniform(std::size_t lattice_dim, double a) {
    return {std::vector<DoubleGeometric>(lattice_dim, DoubleGeometric(a))};
  }
};

struct ChainState {
  std::vector<std::int64_t> v;  // reduced coordinates, length d
  std::vector<std::int64_t> z;  // V v
  double log_density = 0.0;     // LogTarget(z)
  std::uint64_t step_index = 0;

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

enum class InitKind { kFromProposal, kZero, kExplicit };

struct ChainInit {
  InitKind kind = InitKind::kFromProposal;
  std::vector<std::int64_t> v;  // kExplicit only, length d
};

struct ChainConfig {
  std::uint64_t nsim = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 0;
  ChainInit init;
  // Recompute the cached log-density every 1000 steps and compare.
  bool debug_checks = false;

  std::uint64_t RetainedCount() const {
    return thin == 0 || nsim < burn_in ? 0 : (nsim - burn_in) / thin;
  }

  void Validate() const {
    if (thin == 0) throw Error(ErrorCode::kConfigInvalid, "thin must be >= 1");
    if (nsim < burn_in || RetainedCount() == 0) {
      throw Error(ErrorCode::kConfigInvalid,
                  "nsim (" + std::to_string(nsim) +
                      ") must cover burn_in + thin (" +
                      std::to_string(burn_in) + " + " + std::to_string(thin) +
                      ")");
    }
  }

  // Burn-in followed by `count` retained draws.
  static ChainConfig ForReplicates(std::uint64_t count, std::uint64_t burn_in,
                                   std::uint64_t thin, std::uint64_t seed) {
    ChainConfig cfg;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.nsim = burn_in + count * thin;
    cfg.seed = seed;
    return cfg;
  }
};

namespace internal {

inline void CheckProposal(const ProposalSpec& ps, const ChainContext& ctx) {
  if (ps.etas.size() != ctx.lattice_dim()) {
    throw Error(ErrorCode::kConfigInvalid,
                "proposal has " + std::to_string(ps.etas.size()) +
                    " coordinates, lattice has " +
                    std::to_string(ctx.lattice_dim()));
  }
}

}  // namespace internal

// u = V e with e_0..e_{k-1} = 0 and the rest drawn from the etas; A u = 0 by
// construction.
template <typename Urbg>
std::vector<std::int64_t> ProposeJump(const ProposalSpec& ps,
                                      const ChainContext& ctx, Urbg& rng) {
  internal::CheckProposal(ps, ctx);
  std::vector<std::int64_t> u(ctx.dim(), 0);
  for (std::size_t j = 0; j < ctx.lattice_dim(); ++j) {
    ctx.AddScaledColumn(u, j, ps.etas[j].Sample(rng));
  }
  return u;
}

inline ChainState MakeState(const ChainContext& ctx, const NoiseTarget& target,
                            std::vector<std::int64_t> v) {
  if (v.size() != ctx.dim()) {
    throw Error(ErrorCode::kConfigInvalid, "initial state has wrong size");
  }
  for (std::size_t j = 0; j < ctx.rank(); ++j) {
    if (v[j] != 0) {
      throw Error(ErrorCode::kConfigInvalid,
                  "pinned reduced coordinates must be zero");
    }
  }
  ChainState s;
  s.z = ctx.Embed(v);
  s.v = std::move(v);
  s.log_density = LogTarget(target, s.z);
  return s;
}

template <typename Urbg>
ChainState InitialState(const ChainInit& init, const NoiseTarget& target,
                        const ProposalSpec& ps, const ChainContext& ctx,
                        Urbg& rng) {
  internal::CheckProposal(ps, ctx);
  std::vector<std::int64_t> v(ctx.dim(), 0);
  switch (init.kind) {
    case InitKind::kZero:
      break;
    case InitKind::kFromProposal:
      for (std::size_t j = 0; j < ctx.lattice_dim(); ++j) {
        v[ctx.rank() + j] = ps.etas[j].Sample(rng);
      }
      break;
    case InitKind::kExplicit:
      v = init.v;
      break;
  }
  return MakeState(ctx, target, std::move(v));
}

// Scratch buffers for in-place steps.
struct StepWorkspace {
  std::vector<std::int64_t> v;
  std::vector<std::int64_t> z;
};

// One Gibbs sweep builds the composite proposal v* coordinate by coordinate;
// a single uniform r then accepts it iff log r <= log q(V v*) - log q(V v).
// Returns whether the move was accepted.
template <typename Urbg>
bool MetropolisStep(ChainState& state, const NoiseTarget& target,
                    const ProposalSpec& ps, const ChainContext& ctx, Urbg& rng,
                    StepWorkspace& ws) {
  ws.v = state.v;
  ws.z = state.z;
  const std::size_t k = ctx.rank();
  for (std::size_t j = 0; j < ctx.lattice_dim(); ++j) {
    const std::int64_t e = ps.etas[j].Sample(rng);
    if (e == 0) continue;
    if (__builtin_add_overflow(ws.v[k + j], e, &ws.v[k + j])) {
      throw Error(ErrorCode::kNumericOverflow, "reduced coordinate overflow");
    }
    ctx.AddScaledColumn(ws.z, j, e);
  }
  const double proposed = LogTarget(target, ws.z);
  const double log_r = std::log(Uniform01(rng));
  ++state.step_index;
  if (log_r <= proposed - state.log_density) {
    state.v.swap(ws.v);
    state.z.swap(ws.z);
    state.log_density = proposed;
    return true;
  }
  return false;
}

template <typename Urbg>
ChainState MetropolisStep(const ChainState& state, const NoiseTarget& target,
                          const ProposalSpec& ps, const ChainContext& ctx,
                          Urbg& rng) {
  internal::CheckProposal(ps, ctx);
  ChainState next = state;
  StepWorkspace ws;
  MetropolisStep(next, target, ps, ctx, rng, ws);
  return next;
}

inline void CheckCachedDensity(const ChainState& state,
                               const NoiseTarget& target,
                               const ChainContext& ctx) {
  if (ctx.Embed(state.v) != state.z ||
      LogTarget(target, state.z) != state.log_density) {
    throw std::logic_error("cached chain state diverged from recomputation");
  }
}

// Runs the chain and calls `visit` with each retained state (steps
// burn_in + thin, burn_in + 2 thin, ..., up to nsim). Every retained z is
// checked against A z = 0. Returns the acceptance rate.
template <typename Visitor>
double RunChainVisit(const ChainConfig& cfg, const NoiseTarget& target,
                     const ProposalSpec& ps, const ChainContext& ctx,
                     Visitor&& visit) {
  cfg.Validate();
  internal::CheckProposal(ps, ctx);
  Rng rng(cfg.seed);
  ChainState state = InitialState(cfg.init, target, ps, ctx, rng);
  if (ctx.degenerate()) {
    for (std::uint64_t i = 0; i < cfg.RetainedCount(); ++i) {
      state.step_index = cfg.burn_in + (i + 1) * cfg.thin;
      visit(state);
    }
    return 1.0;
  }
  StepWorkspace ws;
  std::uint64_t accepted = 0;
  for (std::uint64_t l = 1; l <= cfg.nsim; ++l) {
    accepted += MetropolisStep(state, target, ps, ctx, rng, ws) ? 1 : 0;
    if (cfg.debug_checks && l % 1000 == 0) {
      CheckCachedDensity(state, target, ctx);
    }
    if (l > cfg.burn_in && (l - cfg.burn_in) % cfg.thin == 0) {
      if (!ctx.InLattice(state.z)) {
        throw std::logic_error("sampled noise violates the invariants");
      }
      visit(std::as_const(state));
    }
  }
  return static_cast<double>(accepted) / static_cast<double>(cfg.nsim);
}

inline std::vector<std::vector<std::int64_t>> RunChain(
    const ChainConfig& cfg, const NoiseTarget& target, const ProposalSpec& ps,
    const ChainContext& ctx) {
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(cfg.RetainedCount());
  RunChainVisit(cfg, target, ps, ctx,
                [&](const ChainState& s) { out.push_back(s.z); });
  return out;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_SAMPLER_H_
