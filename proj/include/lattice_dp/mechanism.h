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

#ifndef LATTICE_DP_MECHANISM_H_
#define LATTICE_DP_MECHANISM_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lattice_dp/constraints.h"
#include "lattice_dp/noise.h"
#include "lattice_dp/parallel.h"
#include "lattice_dp/random.h"
#include "lattice_dp/sampler.h"
#include "lattice_dp/smith.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

inline constexpr double kDefaultProposalRate = 1.0;  // a = e^-1

// Everything derived from a constraint set; compile once per constraint set
// and share across releases.
struct MechanismContext {
  ConstraintSet constraints;
  ReducedIncidence reduced;
  SmithDecomposition snf;
  std::optional<LatticeBasis> basis;  // empty when the lattice is {0}
  std::size_t lattice_dim = 0;
  double tail_constant = 0.0;  // meaningful only when lattice_dim > 0
  ChainContext chain;

  bool degenerate() const { return lattice_dim == 0; }
};

inline MechanismContext Compile(const ConstraintSet& cs) {
  MechanismContext ctx;
  ctx.constraints = cs;
  ctx.reduced = FullRankReduce(cs);
  ctx.snf = SmithNormalForm(ctx.reduced.matrix);
  if (ctx.reduced.rank == cs.dimension()) {
    ctx.chain = ChainContext::Degenerate(ctx.reduced.matrix);
    return ctx;
  }
  ctx.basis = ExtractLatticeBasis(ctx.snf);
  ctx.lattice_dim = ctx.basis->lattice_dim;
  ctx.tail_constant = TailConstant(*ctx.basis);
  ctx.chain = ChainContext(ctx.reduced.matrix, ctx.basis->basis);
  return ctx;
}

struct MechanismSpec {
  NoiseKind kind = NoiseKind::kLaplaceL1;
  double epsilon = 0.0;
  double delta = 0.0;  // Gaussian only
  ChainConfig sampler;
  // Pre-jump ratio a shared by all coordinates. Unset: e^-1 for Laplace
  // targets, scaled to sigma for the Gaussian (see GaussianProposalRatio).
  std::optional<double> proposal_ratio;
  std::optional<double> c_a_override;

  void Validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw Error(ErrorCode::kConfigInvalid, "epsilon must be positive");
    }
    if (kind == NoiseKind::kGaussian) {
      if (!(delta > 0.0 && delta < epsilon &&
            epsilon < 1.0 / std::numbers::e)) {
        throw Error(ErrorCode::kParameterDomain,
                    "gaussian mechanism needs 0 < delta < epsilon < 1/e");
      }
    } else if (delta != 0.0) {
      throw Error(ErrorCode::kConfigInvalid,
                  "Laplace mechanisms are pure; delta must be 0");
    }
  }
};

struct ResolvedNoise {
  NoiseTarget target;
  ProposalSpec proposal;
  double proposal_ratio = 0.0;
  std::optional<GaussianCalibration> calibration;
};

// Random-walk scale for a Gaussian of width sigma: per-coordinate standard
// deviation 2.38 sigma / (sqrt(m) * longest basis column).
inline double GaussianProposalRatio(const MechanismContext& ctx, double sigma) {
  double longest = 1.0;
  for (std::size_t j = 0; j < ctx.lattice_dim; ++j) {
    double sq = 0.0;
    for (std::int64_t x : ctx.chain.column(j)) {
      sq += static_cast<double>(x) * static_cast<double>(x);
    }
    longest = std::max(longest, std::sqrt(sq));
  }
  const double sd = 2.38 * sigma /
                    (std::sqrt(static_cast<double>(ctx.lattice_dim)) * longest);
  return DoubleGeometric::WithStdDev(sd).ratio();
}

inline ResolvedNoise ResolveNoise(const MechanismContext& ctx,
                                  const MechanismSpec& spec) {
  spec.Validate();
  ResolvedNoise out;
  switch (spec.kind) {
    case NoiseKind::kLaplaceL1:
      out.target = NoiseTarget::LaplaceL1(spec.epsilon);
      break;
    case NoiseKind::kLaplaceL2:
      out.target = NoiseTarget::LaplaceL2(spec.epsilon);
      break;
    case NoiseKind::kGaussian: {
      if (ctx.degenerate()) {
        // No noise is drawn; sigma is irrelevant but must be positive.
        out.target = NoiseTarget::Gaussian(1.0);
        break;
      }
      out.calibration =
          CalibrateGaussian(spec.epsilon, spec.delta, ctx.lattice_dim,
                            ctx.tail_constant, spec.c_a_override);
      out.target = NoiseTarget::Gaussian(out.calibration->sigma);
      break;
    }
  }
  if (spec.proposal_ratio) {
    out.proposal_ratio = *spec.proposal_ratio;
  } else if (spec.kind == NoiseKind::kGaussian && !ctx.degenerate()) {
    out.proposal_ratio = GaussianProposalRatio(ctx, out.target.sigma);
  } else {
    out.proposal_ratio = std::exp(-kDefaultProposalRate);
  }
  out.proposal = ProposalSpec::Uniform(ctx.lattice_dim, out.proposal_ratio);
  return out;
}

struct ReleaseDiagnostics {
  std::uint64_t seed = 0;
  std::uint64_t nsim = 0;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 0;
  double proposal_ratio = 0.0;
  double acceptance_rate = 0.0;
  std::size_t lattice_dim = 0;
  bool degenerate = false;
  std::optional<GaussianCalibration> calibration;
};

struct Release {
  std::vector<std::int64_t> output;  // x + z
  std::vector<std::int64_t> noise;   // z
  PrivacyBudget budget_spent;
  ReleaseDiagnostics diagnostics;
};

// Thinned post-burn-in noise draws from one long chain. Never reads data.
inline std::vector<std::vector<std::int64_t>> NoiseReplicates(
    const MechanismContext& ctx, const MechanismSpec& spec, std::size_t count,
    ReleaseDiagnostics* diagnostics = nullptr) {
  if (count < 1) throw Error(ErrorCode::kConfigInvalid, "count must be >= 1");
  ResolvedNoise noise = ResolveNoise(ctx, spec);
  ChainConfig cfg = spec.sampler;
  cfg.nsim = cfg.burn_in + count * cfg.thin;
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(count);
  const double acceptance = RunChainVisit(
      cfg, noise.target, noise.proposal, ctx.chain,
      [&](const ChainState& s) { out.push_back(s.z); });
  if (diagnostics) {
    diagnostics->seed = cfg.seed;
    diagnostics->nsim = cfg.nsim;
    diagnostics->burn_in = cfg.burn_in;
    diagnostics->thin = cfg.thin;
    diagnostics->proposal_ratio = noise.proposal_ratio;
    diagnostics->acceptance_rate = acceptance;
    diagnostics->lattice_dim = ctx.lattice_dim;
    diagnostics->degenerate = ctx.degenerate();
    diagnostics->calibration = noise.calibration;
  }
  return out;
}

// x + z with z the last retained draw of the configured chain. The noise
// chain is seeded from the spec alone, so equal seeds give equal noise for
// any x.
inline Release Privatize(const MechanismContext& ctx, const Histogram& x,
                         const MechanismSpec& spec) {
  if (x.size() != ctx.constraints.dimension()) {
    throw Error(ErrorCode::kConfigInvalid,
                "histogram length " + std::to_string(x.size()) +
                    " != constraint dimension " +
                    std::to_string(ctx.constraints.dimension()));
  }
  spec.sampler.Validate();
  Release release;
  ResolvedNoise noise = ResolveNoise(ctx, spec);
  const double acceptance = RunChainVisit(
      spec.sampler, noise.target, noise.proposal, ctx.chain,
      [&](const ChainState& s) { release.noise = s.z; });
  release.output.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (__builtin_add_overflow(x[i], release.noise[i], &release.output[i])) {
      throw Error(ErrorCode::kNumericOverflow, "release overflows int64");
    }
  }
  if (!Equivalent(ctx.constraints, x, release.output)) {
    throw std::logic_error("release does not preserve the invariants");
  }
  release.budget_spent = {spec.epsilon,
                          spec.kind == NoiseKind::kGaussian ? spec.delta : 0.0};
  auto& diag = release.diagnostics;
  diag.seed = spec.sampler.seed;
  diag.nsim = spec.sampler.nsim;
  diag.burn_in = spec.sampler.burn_in;
  diag.thin = spec.sampler.thin;
  diag.proposal_ratio = noise.proposal_ratio;
  diag.acceptance_rate = acceptance;
  diag.lattice_dim = ctx.lattice_dim;
  diag.degenerate = ctx.degenerate();
  diag.calibration = noise.calibration;
  return release;
}


struct IndependentChainsOptions {
  std::size_t chains = 4;
  // When set, each chain first runs `overdispersed_steps` iterations against
  // the same kind of target at this smaller epsilon (wider law), spreading
  // the starting points before burn-in.
  std::optional<double> overdispersed_epsilon;
  std::uint64_t overdispersed_steps = 0;
};

// Independent chains for multi-chain diagnostics. Chain c is seeded with
// DeriveSeed(spec.sampler.seed, c); each returns its thinned post-burn-in
// draws.
inline std::vector<std::vector<std::vector<std::int64_t>>> RunIndependentChains(
    const MechanismContext& ctx, const MechanismSpec& spec,
    const IndependentChainsOptions& opts) {
  spec.sampler.Validate();
  ResolvedNoise noise = ResolveNoise(ctx, spec);
  std::optional<NoiseTarget> wide;
  if (opts.overdispersed_epsilon) {
    const double eps = *opts.overdispersed_epsilon;
    if (!(eps > 0.0)) {
      throw Error(ErrorCode::kConfigInvalid,
                  "overdispersed epsilon must be positive");
    }
    switch (spec.kind) {
      case NoiseKind::kLaplaceL1:
        wide = NoiseTarget::LaplaceL1(eps);
        break;
      case NoiseKind::kLaplaceL2:
        wide = NoiseTarget::LaplaceL2(eps);
        break;
      case NoiseKind::kGaussian:
        wide = NoiseTarget::Gaussian(noise.target.sigma * spec.epsilon / eps);
        break;
    }
  }
  std::vector<std::vector<std::vector<std::int64_t>>> out(opts.chains);
  ParallelFor(opts.chains, [&](std::size_t c) {
    Rng rng(DeriveSeed(spec.sampler.seed, c));
    StepWorkspace ws;
    ChainState state = InitialState(spec.sampler.init, noise.target,
                                    noise.proposal, ctx.chain, rng);
    if (wide && !ctx.degenerate()) {
      state.log_density = LogTarget(*wide, state.z);
      for (std::uint64_t i = 0; i < opts.overdispersed_steps; ++i) {
        MetropolisStep(state, *wide, noise.proposal, ctx.chain, rng, ws);
      }
      state.log_density = LogTarget(noise.target, state.z);
      state.step_index = 0;
    }
    const ChainConfig& cfg = spec.sampler;
    auto& draws = out[c];
    draws.reserve(cfg.RetainedCount());
    for (std::uint64_t l = 1; l <= cfg.nsim; ++l) {
      if (!ctx.degenerate()) {
        MetropolisStep(state, noise.target, noise.proposal, ctx.chain, rng, ws);
      }
      if (l > cfg.burn_in && (l - cfg.burn_in) % cfg.thin == 0) {
        if (!ctx.chain.InLattice(state.z)) {
          throw std::logic_error("sampled noise violates the invariants");
        }
        draws.push_back(state.z);
      }
    }
  });
  return out;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_MECHANISM_H_
