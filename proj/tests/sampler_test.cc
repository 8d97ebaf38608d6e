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

#include "lattice_dp/sampler.h"

#include <cmath>
#include <map>
#include <vector>

#include <gtest/gtest.h>

#include "lattice_dp/mechanism.h"
#include "oracles.h"

namespace lattice_dp {
namespace {

const double kInvE = std::exp(-1.0);

MechanismContext PairLattice() { return Compile(ConstraintSet::Partition({2})); }
MechanismContext Table4x4() { return Compile(ConstraintSet::TableMargins(4, 4)); }

TEST(ProposeJumpTest, DegenerateProposalIsZero) {
  auto ctx = Table4x4();
  Rng rng(1);
  auto ps = ProposalSpec::Uniform(ctx.lattice_dim, 0.0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(ProposeJump(ps, ctx.chain, rng), std::vector<std::int64_t>(16, 0));
  }
}

TEST(ProposeJumpTest, JumpsPreserveMargins) {
  auto ctx = Table4x4();
  Rng rng(2);
  auto ps = ProposalSpec::Uniform(ctx.lattice_dim, kInvE);
  for (int i = 0; i < 10000; ++i) {
    auto u = ProposeJump(ps, ctx.chain, rng);
    ASSERT_TRUE(ctx.chain.InLattice(u));
    ASSERT_EQ(Margins(ctx.constraints, u), std::vector<std::int64_t>(8, 0));
  }
}

TEST(ProposeJumpTest, WrongProposalSizeRejected) {
  auto ctx = Table4x4();
  Rng rng(3);
  EXPECT_THROW(ProposeJump(ProposalSpec::Uniform(3, kInvE), ctx.chain, rng), Error);
}

TEST(ProposeJumpTest, UnbiasedAndSymmetric) {
  auto ctx = Table4x4();
  Rng rng(4);
  auto ps = ProposalSpec::Uniform(ctx.lattice_dim, kInvE);
  constexpr int kDraws = 1'000'000;
  std::vector<std::vector<double>> coords(16);
  for (auto& c : coords) c.reserve(kDraws);
  std::vector<std::int64_t> first, negated_second;
  for (int i = 0; i < kDraws; ++i) {
    auto u = ProposeJump(ps, ctx.chain, rng);
    for (std::size_t j = 0; j < 16; ++j) coords[j].push_back(static_cast<double>(u[j]));
    if (i < 100'000) {
      first.push_back(u[5]);
    } else if (i < 200'000) {
      negated_second.push_back(-u[5]);
    }
  }
  for (std::size_t j = 0; j < 16; ++j) {
    auto m = testing::MeanAndStandardError(coords[j]);
    if (m.se == 0.0) {
      EXPECT_EQ(m.mean, 0.0);
    } else {
      EXPECT_LT(std::abs(m.mean), 4.0 * m.se) << "coordinate " << j;
    }
  }
  // u and -u have the same law.
  EXPECT_GT(testing::TwoSampleChiSquare(first, negated_second).p_value, 0.001);
}

TEST(ChainConfigTest, Validation) {
  ChainConfig cfg;
  cfg.nsim = 10;
  cfg.burn_in = 5;
  cfg.thin = 0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.thin = 6;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.thin = 5;
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_EQ(cfg.RetainedCount(), 1u);
  cfg.burn_in = 11;
  EXPECT_THROW(cfg.Validate(), Error);
  auto r = ChainConfig::ForReplicates(7, 100, 3, 9);
  EXPECT_EQ(r.nsim, 121u);
  EXPECT_EQ(r.RetainedCount(), 7u);
}

TEST(MakeStateTest, PinnedCoordinatesMustBeZero) {
  auto ctx = PairLattice();
  auto target = NoiseTarget::LaplaceL1(0.25);
  EXPECT_THROW(MakeState(ctx.chain, target, {1, 0}), Error);
  EXPECT_THROW(MakeState(ctx.chain, target, {0}), Error);
  auto s = MakeState(ctx.chain, target, {0, 3});
  EXPECT_TRUE(ctx.chain.InLattice(s.z));
  EXPECT_DOUBLE_EQ(s.log_density, -1.5);
}

TEST(MetropolisStepTest, ZeroJumpAlwaysAccepted) {
  auto ctx = Table4x4();
  auto target = NoiseTarget::LaplaceL1(0.25);
  auto ps = ProposalSpec::Uniform(ctx.lattice_dim, 0.0);
  Rng rng(5);
  auto state = InitialState(ChainInit{}, target, ProposalSpec::Uniform(9, kInvE), ctx.chain, rng);
  const auto before = state.z;
  StepWorkspace ws;
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(MetropolisStep(state, target, ps, ctx.chain, rng, ws));
  EXPECT_EQ(state.z, before);
  EXPECT_EQ(state.step_index, 1000u);
}

TEST(MetropolisStepTest, DownhillMovesAlwaysAccepted) {
  auto ctx = PairLattice();
  auto target = NoiseTarget::LaplaceL1(0.25);
  auto ps = ProposalSpec::Uniform(1, kInvE);
  Rng rng(6);
  StepWorkspace ws;
  int downhill = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    auto state = MakeState(ctx.chain, target, {0, (trial % 41) - 20});
    // Replay the proposal draw on a copy of the generator.
    Rng replay = rng;
    const std::int64_t e = ps.etas[0].Sample(replay);
    auto proposed = state.v;
    proposed[1] += e;
    const bool downhill_move =
        LogTarget(target, ctx.chain.Embed(proposed)) >= state.log_density;
    const bool accepted = MetropolisStep(state, target, ps, ctx.chain, rng, ws);
    if (downhill_move) {
      ++downhill;
      ASSERT_TRUE(accepted);
      ASSERT_EQ(state.v, proposed);
    }
  }
  EXPECT_GT(downhill, 1000);
}

TEST(MetropolisStepTest, RejectionLeavesStateExceptIndex) {
  auto ctx = PairLattice();
  auto target = NoiseTarget::LaplaceL1(5.0);  // steep: most moves rejected
  auto ps = ProposalSpec::Uniform(1, kInvE);
  Rng rng(7);
  auto state = MakeState(ctx.chain, target, {0, 0});
  int rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto next = MetropolisStep(state, target, ps, ctx.chain, rng);
    EXPECT_EQ(next.step_index, state.step_index + 1);
    if (next.v == state.v) {
      ++rejected;
      EXPECT_EQ(next.z, state.z);
      EXPECT_EQ(next.log_density, state.log_density);
    }
    state = next;
  }
  EXPECT_GT(rejected, 500);
}

TEST(RunChainTest, SingleRetainedSample) {
  auto ctx = Table4x4();
  ChainConfig cfg;
  cfg.burn_in = 50;
  cfg.thin = 10;
  cfg.nsim = 60;
  cfg.seed = 8;
  auto draws = RunChain(cfg, NoiseTarget::LaplaceL1(0.25), ProposalSpec::Uniform(9, kInvE),
                        ctx.chain);
  EXPECT_EQ(draws.size(), 1u);
}

TEST(RunChainTest, InvalidConfig) {
  auto ctx = Table4x4();
  ChainConfig cfg;
  cfg.burn_in = 50;
  cfg.nsim = 50;
  try {
    RunChain(cfg, NoiseTarget::LaplaceL1(0.25), ProposalSpec::Uniform(9, kInvE), ctx.chain);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
  }
}

TEST(RunChainTest, ReproducibleAndInvariant) {
  auto ctx = Table4x4();
  ChainConfig cfg = ChainConfig::ForReplicates(200, 1000, 50, 99);
  cfg.debug_checks = true;
  auto target = NoiseTarget::LaplaceL1(0.25);
  auto ps = ProposalSpec::Uniform(9, kInvE);
  auto a = RunChain(cfg, target, ps, ctx.chain);
  auto b = RunChain(cfg, target, ps, ctx.chain);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 200u);
  for (const auto& z : a) {
    ASSERT_EQ(Margins(ctx.constraints, z), std::vector<std::int64_t>(8, 0));
  }
  cfg.seed = 100;
  EXPECT_NE(RunChain(cfg, target, ps, ctx.chain), a);
}

TEST(RunChainTest, PinnedCoordinatesStayZeroAndCacheMatches) {
  auto ctx = Compile(IntersectingTriple());
  auto target = NoiseTarget::LaplaceL2(0.25);
  auto ps = ProposalSpec::Uniform(ctx.lattice_dim, std::exp(-1.5));
  ChainConfig cfg = ChainConfig::ForReplicates(100, 0, 100, 10);
  RunChainVisit(cfg, target, ps, ctx.chain, [&](const ChainState& s) {
    for (std::size_t j = 0; j < ctx.chain.rank(); ++j) ASSERT_EQ(s.v[j], 0);
    CheckCachedDensity(s, target, ctx.chain);
  });
}

TEST(RunChainTest, ExplicitAndZeroInit) {
  auto ctx = PairLattice();
  auto target = NoiseTarget::LaplaceL1(0.25);
  auto ps = ProposalSpec::Uniform(1, 0.0);  // chain never moves
  ChainConfig cfg = ChainConfig::ForReplicates(3, 0, 1, 1);
  cfg.init = {InitKind::kExplicit, {0, 4}};
  auto draws = RunChain(cfg, target, ps, ctx.chain);
  for (const auto& z : draws) EXPECT_EQ(z, ctx.chain.Embed(std::vector<std::int64_t>{0, 4}));
  cfg.init = {InitKind::kZero, {}};
  for (const auto& z : RunChain(cfg, target, ps, ctx.chain)) {
    EXPECT_EQ(z, (std::vector<std::int64_t>{0, 0}));
  }
}

TEST(RunChainTest, DegenerateLatticeEmitsZeros) {
  auto ctx = Compile(ConstraintSet(2, {{"a", {0}}, {"b", {1}}}));
  ASSERT_TRUE(ctx.chain.degenerate());
  ChainConfig cfg = ChainConfig::ForReplicates(4, 10, 10, 1);
  auto draws = RunChain(cfg, NoiseTarget::LaplaceL1(0.25), ProposalSpec{}, ctx.chain);
  ASSERT_EQ(draws.size(), 4u);
  for (const auto& z : draws) EXPECT_EQ(z, (std::vector<std::int64_t>{0, 0}));
}

TEST(RunChainTest, PairLatticeMatchesExactLaw) {
  // t in z = t (1, -1) has mass proportional to exp(-2 epsilon |t|).
  auto ctx = PairLattice();
  const double eps = 0.25;
  ChainConfig cfg = ChainConfig::ForReplicates(200'000, 1000, 1, 12);
  std::map<std::int64_t, double> freq;
  const std::int64_t sign = ctx.chain.column(0)[0];
  RunChainVisit(cfg, NoiseTarget::LaplaceL1(eps), ProposalSpec::Uniform(1, kInvE), ctx.chain,
                [&](const ChainState& s) { freq[s.z[0] * sign] += 1.0; });
  DoubleGeometric oracle(std::exp(-2.0 * eps));
  double tv = 0.0;
  double covered = 0.0;
  for (const auto& [t, c] : freq) {
    tv += std::abs(c / 200'000.0 - oracle.Pmf(t));
    covered += oracle.Pmf(t);
  }
  tv = 0.5 * (tv + (1.0 - covered));
  EXPECT_LT(tv, 0.03);
}

TEST(ChainContextTest, OverflowDetected) {
  auto ctx = PairLattice();
  std::vector<std::int64_t> z = {std::numeric_limits<std::int64_t>::max(), 0};
  try {
    ctx.chain.AddScaledColumn(z, 0, ctx.chain.column(0)[0]);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumericOverflow);
  }
}

}  // namespace
}  // namespace lattice_dp
