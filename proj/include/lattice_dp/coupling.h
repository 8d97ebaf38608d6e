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

#ifndef LATTICE_DP_COUPLING_H_
#define LATTICE_DP_COUPLING_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lattice_dp/noise.h"
#include "lattice_dp/parallel.h"
#include "lattice_dp/random.h"
#include "lattice_dp/sampler.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

// Leader at time l, follower at time l - lag.
struct CoupledState {
  ChainState leader;
  ChainState follower;
  std::size_t lag = 1;
  bool met = false;
};

struct MeetingTimeSample {
  std::uint64_t tau = 0;
  std::size_t lag = 1;
};

struct TvBoundCurve {
  std::size_t lag = 1;
  std::vector<std::uint64_t> times;
  std::vector<double> bounds;
  std::size_t replicates = 0;
};

inline constexpr std::uint64_t kDefaultRejectionCap = 1'000'000;

struct CouplingWorkspace {
  std::vector<std::int64_t> v, w, zv, zw;
};

// One draw from the joint kernel. Per coordinate, the leader's proposal
// v_j + e is paired with the follower's through a maximal coupling of
// eta(. - v_j) and eta(. - w_j): the follower copies the leader's value with
// probability min(1, eta(v*_j - w_j) / eta(e)), otherwise it rejection-samples
// from where its own proposal mass exceeds the leader's. One shared uniform
// then drives both acceptance tests.
template <typename Urbg>
void CoupledStep(CoupledState& cs, const NoiseTarget& target,
                 const ProposalSpec& ps, const ChainContext& ctx, Urbg& rng,
                 CouplingWorkspace& ws,
                 std::uint64_t rejection_cap = kDefaultRejectionCap) {
  ChainState& lead = cs.leader;
  ChainState& follow = cs.follower;
  ws.v = lead.v;
  ws.w = follow.v;
  ws.zv = lead.z;
  ws.zw = follow.z;
  const std::size_t k = ctx.rank();
  for (std::size_t j = 0; j < ctx.lattice_dim(); ++j) {
    const DoubleGeometric& eta = ps.etas[j];
    const std::size_t c = k + j;
    const std::int64_t v_old = lead.v[c];
    const std::int64_t w_old = follow.v[c];

    const std::int64_t e = eta.Sample(rng);
    const std::int64_t v_new = v_old + e;
    const double log_s = std::log(Uniform01(rng));
    std::int64_t w_new;
    if (log_s + eta.LogPmf(e) <= eta.LogPmf(v_new - w_old)) {
      w_new = v_new;
    } else {
      std::uint64_t attempts = 0;
      for (;;) {
        if (++attempts > rejection_cap) {
          throw Error(ErrorCode::kCouplingRejectionCap,
                      "follower rejection sampler exceeded " +
                          std::to_string(rejection_cap) + " attempts");
        }
        const std::int64_t e_tilde = eta.Sample(rng);
        const double log_s_tilde = std::log(Uniform01(rng));
        const std::int64_t candidate = w_old + e_tilde;
        if (log_s_tilde + eta.LogPmf(e_tilde) > eta.LogPmf(candidate - v_old)) {
          w_new = candidate;
          break;
        }
      }
    }
    ws.v[c] = v_new;
    ws.w[c] = w_new;
    ctx.AddScaledColumn(ws.zv, j, e);
    ctx.AddScaledColumn(ws.zw, j, w_new - w_old);
  }

  const double log_r = std::log(Uniform01(rng));
  const double lead_proposed = LogTarget(target, ws.zv);
  const double follow_proposed = LogTarget(target, ws.zw);
  if (log_r <= lead_proposed - lead.log_density) {
    lead.v.swap(ws.v);
    lead.z.swap(ws.zv);
    lead.log_density = lead_proposed;
  }
  if (log_r <= follow_proposed - follow.log_density) {
    follow.v.swap(ws.w);
    follow.z.swap(ws.zw);
    follow.log_density = follow_proposed;
  }
  ++lead.step_index;
  ++follow.step_index;
  cs.met = lead.v == follow.v;
}

template <typename Urbg>
CoupledState CoupledStep(const CoupledState& cs, const NoiseTarget& target,
                         const ProposalSpec& ps, const ChainContext& ctx,
                         Urbg& rng) {
  internal::CheckProposal(ps, ctx);
  CoupledState next = cs;
  CouplingWorkspace ws;
  CoupledStep(next, target, ps, ctx, rng, ws);
  return next;
}

// Runs the leader alone for `lag` steps, starts the follower from the same
// initial law, then advances the pair under the joint kernel until the
// reduced coordinates coincide. Returns the leader time at meeting.
template <typename Urbg>
MeetingTimeSample SampleMeetingTime(std::size_t lag, const ChainInit& init,
                                    const NoiseTarget& target,
                                    const ProposalSpec& ps,
                                    const ChainContext& ctx, Urbg& rng,
                                    std::uint64_t max_time) {
  if (lag < 1) throw Error(ErrorCode::kInvalidArgument, "lag must be >= 1");
  internal::CheckProposal(ps, ctx);
  CoupledState cs;
  cs.lag = lag;
  cs.leader = InitialState(init, target, ps, ctx, rng);
  StepWorkspace step_ws;
  for (std::size_t i = 0; i < lag; ++i) {
    MetropolisStep(cs.leader, target, ps, ctx, rng, step_ws);
  }
  cs.follower = InitialState(init, target, ps, ctx, rng);
  CouplingWorkspace ws;
  for (std::uint64_t l = lag + 1;; ++l) {
    if (l > max_time) {
      throw Error(ErrorCode::kMeetingTimeout,
                  "chains with lag " + std::to_string(lag) +
                      " did not meet within " + std::to_string(max_time) +
                      " iterations");
    }
    CoupledStep(cs, target, ps, ctx, rng, ws);
    if (cs.met) return {l, lag};
  }
}

struct MeetingTimeOutcome {
  std::uint64_t seed = 0;
  std::optional<MeetingTimeSample> sample;
  std::string error;  // set when sample is empty
};

// Independent replicates; replicate i uses DeriveSeed(seed, i), so results do
// not depend on the thread count.
inline std::vector<MeetingTimeOutcome> SampleMeetingTimes(
    std::size_t lag, std::size_t replicates, std::uint64_t seed,
    const ChainInit& init, const NoiseTarget& target, const ProposalSpec& ps,
    const ChainContext& ctx, std::uint64_t max_time,
    std::size_t threads = ThreadCount()) {
  std::vector<MeetingTimeOutcome> out(replicates);
  ParallelFor(
      replicates,
      [&](std::size_t i) {
        out[i].seed = DeriveSeed(seed, i);
        Rng rng(out[i].seed);
        try {
          out[i].sample =
              SampleMeetingTime(lag, init, target, ps, ctx, rng, max_time);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kMeetingTimeout) throw;
          out[i].error = e.what();
        }
      },
      threads);
  return out;
}

// Estimated upper bound on the TV distance between the chain at time l and
// its target: the replicate mean of max(0, ceil((tau - L - l) / L)).
inline TvBoundCurve ComputeTvBound(std::span<const MeetingTimeSample> taus,
                                   std::span<const std::uint64_t> times) {
  TvBoundCurve curve;
  curve.replicates = taus.size();
  curve.times.assign(times.begin(), times.end());
  if (taus.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no meeting times");
  }
  curve.lag = taus.front().lag;
  for (const auto& t : taus) {
    if (t.lag != curve.lag) {
      throw Error(ErrorCode::kInvalidArgument, "meeting times mix lags");
    }
  }
  const auto lag = static_cast<std::int64_t>(curve.lag);
  for (std::uint64_t l : times) {
    double total = 0.0;
    for (const auto& t : taus) {
      const std::int64_t excess = static_cast<std::int64_t>(t.tau) - lag -
                                  static_cast<std::int64_t>(l);
      if (excess > 0) total += static_cast<double>((excess + lag - 1) / lag);
    }
    curve.bounds.push_back(total / static_cast<double>(taus.size()));
  }
  return curve;
}

// Gelman-Rubin potential scale reduction factor for one scalar quantity:
// sqrt(((n - 1) / n * W + B / n) / W). Chains with no variation at all give 1.
inline double Psrf(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) {
    throw Error(ErrorCode::kInsufficientChains, "need at least two chains");
  }
  const std::size_t n = chains.front().size();
  if (n < 2) {
    throw Error(ErrorCode::kInsufficientChains, "chains need >= 2 draws");
  }
  for (const auto& c : chains) {
    if (c.size() != n) {
      throw Error(ErrorCode::kInsufficientChains, "chains differ in length");
    }
  }
  const double m = static_cast<double>(chains.size());
  const double nd = static_cast<double>(n);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& c : chains) {
    double mean = 0.0;
    for (double x : c) mean += x;
    mean /= nd;
    double ss = 0.0;
    for (double x : c) ss += (x - mean) * (x - mean);
    within += ss / (nd - 1.0);
    means.push_back(mean);
  }
  within /= m;
  double grand = 0.0;
  for (double mu : means) grand += mu;
  grand /= m;
  double between_over_n = 0.0;
  for (double mu : means) between_over_n += (mu - grand) * (mu - grand);
  between_over_n /= (m - 1.0);
  if (within == 0.0) {
    return between_over_n == 0.0 ? 1.0
                                 : std::numeric_limits<double>::infinity();
  }
  const double pooled = (nd - 1.0) / nd * within + between_over_n;
  return std::sqrt(pooled / within);
}

// chains[c][t] is the d-vector drawn by chain c at retained step t; returns
// one PSRF per coordinate.
inline std::vector<double> PsrfPerCoordinate(
    const std::vector<std::vector<std::vector<std::int64_t>>>& chains) {
  if (chains.size() < 2) {
    throw Error(ErrorCode::kInsufficientChains, "need at least two chains");
  }
  if (chains.front().empty()) {
    throw Error(ErrorCode::kInsufficientChains, "chains are empty");
  }
  const std::size_t dim = chains.front().front().size();
  std::vector<double> out;
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<std::vector<double>> traces;
    for (const auto& chain : chains) {
      std::vector<double> trace;
      trace.reserve(chain.size());
      for (const auto& draw : chain) trace.push_back(static_cast<double>(draw.at(i)));
      traces.push_back(std::move(trace));
    }
    out.push_back(Psrf(traces));
  }
  return out;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_COUPLING_H_
