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

#include "lattice_dp/mechanism.h"

#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"

namespace lattice_dp {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

MechanismSpec L1Spec(std::uint64_t seed, std::uint64_t burn_in = 2000, std::uint64_t thin = 100) {
  MechanismSpec spec;
  spec.kind = NoiseKind::kLaplaceL1;
  spec.epsilon = 0.25;
  spec.sampler.burn_in = burn_in;
  spec.sampler.thin = thin;
  spec.sampler.nsim = burn_in + thin;
  spec.sampler.seed = seed;
  return spec;
}

TEST(CompileTest, LatticeDimensions) {
  EXPECT_EQ(Compile(ConstraintSet::Partition({4})).lattice_dim, 3u);
  auto table = Compile(ConstraintSet::TableMargins(4, 4));
  EXPECT_EQ(table.lattice_dim, 9u);
  EXPECT_EQ(table.basis->gram_det, 4096);
  EXPECT_NEAR(table.tail_constant, TailConstant(9, BigInt(4096)), 1e-12);
  // Five "states" over 23 "counties".
  EXPECT_EQ(Compile(ConstraintSet::Partition({3, 7, 1, 10, 2})).lattice_dim, 18u);
  auto full = Compile(ConstraintSet(3, {{"a", {0}}, {"b", {1}}, {"c", {2}}}));
  EXPECT_TRUE(full.degenerate());
  EXPECT_FALSE(full.basis.has_value());
}

TEST(MechanismSpecTest, Validation) {
  auto ctx = Compile(ConstraintSet::Partition({3}));
  MechanismSpec spec = L1Spec(1);
  spec.delta = 1e-6;
  EXPECT_EQ(CodeOf([&] { ResolveNoise(ctx, spec); }), ErrorCode::kConfigInvalid);
  spec.delta = 0.0;
  spec.epsilon = 0.0;
  EXPECT_EQ(CodeOf([&] { ResolveNoise(ctx, spec); }), ErrorCode::kConfigInvalid);
  spec.kind = NoiseKind::kGaussian;
  spec.epsilon = 0.5;
  spec.delta = 0.6;
  EXPECT_EQ(CodeOf([&] { ResolveNoise(ctx, spec); }), ErrorCode::kParameterDomain);
}

TEST(ResolveNoiseTest, ProposalDefaults) {
  auto ctx = Compile(ConstraintSet::TableMargins(4, 4));
  auto l1 = ResolveNoise(ctx, L1Spec(1));
  EXPECT_DOUBLE_EQ(l1.proposal_ratio, std::exp(-1.0));
  EXPECT_EQ(l1.proposal.etas.size(), 9u);
  EXPECT_FALSE(l1.calibration.has_value());

  MechanismSpec g = L1Spec(1);
  g.kind = NoiseKind::kGaussian;
  g.delta = 1e-6;
  auto gauss = ResolveNoise(ctx, g);
  ASSERT_TRUE(gauss.calibration.has_value());
  EXPECT_NEAR(gauss.target.sigma, 161.94873681290557, 1e-8);
  EXPECT_NEAR(gauss.proposal_ratio, GaussianProposalRatio(ctx, gauss.target.sigma), 0.0);
  EXPECT_GT(gauss.proposal_ratio, 0.9);

  g.proposal_ratio = 0.5;
  g.c_a_override = 10.0;
  auto custom = ResolveNoise(ctx, g);
  EXPECT_EQ(custom.proposal_ratio, 0.5);
  EXPECT_EQ(custom.calibration->c_a, 10.0);
}

TEST(PrivatizeTest, ChildrenTablePreservesMargins) {
  auto ctx = Compile(ConstraintSet::TableMargins(4, 4));
  Histogram x(testing::ChildrenTable());
  for (NoiseKind kind : {NoiseKind::kLaplaceL1, NoiseKind::kLaplaceL2, NoiseKind::kGaussian}) {
    MechanismSpec spec = L1Spec(5);
    spec.kind = kind;
    if (kind == NoiseKind::kGaussian) spec.delta = 1e-6;
    auto release = Privatize(ctx, x, spec);
    EXPECT_EQ(Margins(ctx.constraints, release.output), Margins(ctx.constraints, x));
    EXPECT_EQ(Margins(ctx.constraints, release.noise), std::vector<std::int64_t>(8, 0));
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(release.output[i], x[i] + release.noise[i]);
    }
    EXPECT_EQ(release.budget_spent.epsilon, 0.25);
    EXPECT_EQ(release.budget_spent.delta, kind == NoiseKind::kGaussian ? 1e-6 : 0.0);
    EXPECT_EQ(release.diagnostics.lattice_dim, 9u);
    EXPECT_EQ(release.diagnostics.calibration.has_value(), kind == NoiseKind::kGaussian);
  }
}

TEST(PrivatizeTest, FullyConstrainedReturnsInput) {
  auto ctx = Compile(ConstraintSet(2, {{"a", {0}}, {"b", {1}}}));
  Histogram x({7, 9});
  auto release = Privatize(ctx, x, L1Spec(3));
  EXPECT_EQ(release.output, x.values());
  EXPECT_EQ(release.noise, (std::vector<std::int64_t>{0, 0}));
  EXPECT_TRUE(release.diagnostics.degenerate);
  MechanismSpec g = L1Spec(3);
  g.kind = NoiseKind::kGaussian;
  g.delta = 1e-6;
  EXPECT_EQ(Privatize(ctx, x, g).output, x.values());
}

TEST(PrivatizeTest, StateTotalPreserved) {
  std::vector<std::int64_t> counties = {102, 5531, 17, 88000, 412, 3, 2990, 61, 700, 12044};
  auto ctx = Compile(ConstraintSet::Partition({counties.size()}));
  MechanismSpec spec = L1Spec(17);
  spec.epsilon = 0.192;
  spec.proposal_ratio = std::exp(-2.5);
  auto release = Privatize(ctx, Histogram(counties), spec);
  std::int64_t noise_sum = 0;
  for (auto z : release.noise) noise_sum += z;
  EXPECT_EQ(noise_sum, 0);
}

TEST(PrivatizeTest, DimensionMismatch) {
  auto ctx = Compile(ConstraintSet::Partition({3}));
  EXPECT_EQ(CodeOf([&] { Privatize(ctx, Histogram({1, 2}), L1Spec(1)); }),
            ErrorCode::kConfigInvalid);
}

TEST(PrivatizeTest, NoiseDoesNotDependOnData) {
  auto ctx = Compile(ConstraintSet::TableMargins(4, 4));
  Histogram a(testing::ChildrenTable());
  Histogram b(std::vector<std::int64_t>(16, 1000));
  auto ra = Privatize(ctx, a, L1Spec(21));
  auto rb = Privatize(ctx, b, L1Spec(21));
  EXPECT_EQ(ra.noise, rb.noise);
  EXPECT_NE(Privatize(ctx, a, L1Spec(22)).noise, ra.noise);
}

TEST(NoiseReplicatesTest, CountsAndLattice) {
  auto ctx = Compile(IntersectingTriple());
  MechanismSpec spec = L1Spec(2, 1000, 50);
  spec.kind = NoiseKind::kLaplaceL2;
  EXPECT_EQ(NoiseReplicates(ctx, spec, 1).size(), 1u);
  ReleaseDiagnostics diag;
  auto draws = NoiseReplicates(ctx, spec, 300, &diag);
  ASSERT_EQ(draws.size(), 300u);
  for (const auto& z : draws) {
    ASSERT_EQ(Margins(ctx.constraints, z), std::vector<std::int64_t>(3, 0));
  }
  EXPECT_EQ(diag.nsim, 1000u + 300u * 50u);
  EXPECT_GT(diag.acceptance_rate, 0.0);
  EXPECT_LT(diag.acceptance_rate, 1.0);
  EXPECT_EQ(CodeOf([&] { NoiseReplicates(ctx, spec, 0); }), ErrorCode::kConfigInvalid);
}

TEST(NoiseReplicatesTest, SmallTableUnbiased) {
  auto ctx = Compile(ConstraintSet::TableMargins(3, 3));
  auto draws = NoiseReplicates(ctx, L1Spec(4, 20'000, 500), 1000);
  for (std::size_t i = 0; i < 9; ++i) {
    std::vector<double> col;
    for (const auto& z : draws) col.push_back(static_cast<double>(z[i]));
    auto m = testing::MeanAndStandardError(col);
    EXPECT_LT(std::abs(m.mean), 4.0 * m.se) << "cell " << i;
  }
}

TEST(IndependentChainsTest, ShapeAndDeterminism) {
  auto ctx = Compile(ConstraintSet::TableMargins(3, 3));
  MechanismSpec spec = L1Spec(30, 500, 10);
  spec.sampler.nsim = 500 + 10 * 40;
  IndependentChainsOptions opts;
  opts.chains = 3;
  opts.overdispersed_epsilon = 0.05;
  opts.overdispersed_steps = 200;
  auto a = RunIndependentChains(ctx, spec, opts);
  ASSERT_EQ(a.size(), 3u);
  for (const auto& chain : a) {
    ASSERT_EQ(chain.size(), 40u);
    for (const auto& z : chain) ASSERT_TRUE(ctx.chain.InLattice(z));
  }
  EXPECT_EQ(RunIndependentChains(ctx, spec, opts), a);
  EXPECT_NE(a[0], a[1]);
  opts.overdispersed_epsilon = -1.0;
  EXPECT_EQ(CodeOf([&] { RunIndependentChains(ctx, spec, opts); }), ErrorCode::kConfigInvalid);
}

}  // namespace
}  // namespace lattice_dp
