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

#include "lattice_dp/smith.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "lattice_dp/constraints.h"
#include "lattice_dp/status.h"
#include "oracles.h"

namespace lattice_dp {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Every structural property a decomposition must satisfy.
void ExpectValidDecomposition(const IntMatrix& a, const SmithDecomposition& s) {
  EXPECT_EQ(s.u * a * s.v, s.d_mat);
  EXPECT_EQ(abs(Determinant(s.u)), 1);
  EXPECT_EQ(abs(Determinant(s.v)), 1);
  EXPECT_TRUE(testing::IsDiagonal(s.d_mat));
  EXPECT_EQ(s.v * s.v_inv, IntMatrix::Identity(a.cols()));
  for (std::size_t i = 0; i < s.rank; ++i) {
    EXPECT_GT(s.d_mat(i, i), 0);
    if (i + 1 < s.rank) EXPECT_EQ(s.d_mat(i + 1, i + 1) % s.d_mat(i, i), 0);
  }
  // a = u^-1 d v^-1.
  EXPECT_EQ(UnimodularInverse(s.u) * s.d_mat * s.v_inv, a);
}

TEST(SmithTest, Identity) {
  auto s = SmithNormalForm(IntMatrix::Identity(3));
  EXPECT_EQ(s.u, IntMatrix::Identity(3));
  EXPECT_EQ(s.d_mat, IntMatrix::Identity(3));
  EXPECT_EQ(s.v, IntMatrix::Identity(3));
  EXPECT_EQ(s.rank, 3u);
}

TEST(SmithTest, SumConstraint) {
  IntMatrix a = {{1, 1, 1, 1}};
  auto s = SmithNormalForm(a);
  EXPECT_EQ(s.d_mat, (IntMatrix{{1, 0, 0, 0}}));
  ExpectValidDecomposition(a, s);
}

TEST(SmithTest, NonTrivialInvariantFactors) {
  IntMatrix a = {{2, 4, 4}, {-6, 6, 12}};
  auto s = SmithNormalForm(a);
  ExpectValidDecomposition(a, s);
  EXPECT_EQ(s.d_mat(0, 0), 2);
  EXPECT_EQ(s.d_mat(1, 1), 6);
}

TEST(SmithTest, RandomBinaryFullRank) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    IntMatrix a = testing::RandomFullRowRank(rng, 3, 6);
    ExpectValidDecomposition(a, SmithNormalForm(a));
  }
}

TEST(SmithTest, Deterministic) {
  std::mt19937_64 rng(4);
  IntMatrix a = testing::RandomFullRowRank(rng, 4, 9);
  auto s1 = SmithNormalForm(a);
  auto s2 = SmithNormalForm(a);
  EXPECT_EQ(s1.u, s2.u);
  EXPECT_EQ(s1.v, s2.v);
}

TEST(SmithTest, RankDeficientRejected) {
  EXPECT_EQ(CodeOf([] { SmithNormalForm(IntMatrix{{1, 1, 0}, {2, 2, 0}}); }),
            ErrorCode::kRankDeficient);
  EXPECT_EQ(CodeOf([] { SmithNormalForm(IntMatrix{{1}, {1}}); }),
            ErrorCode::kRankDeficient);
}

TEST(LatticeBasisTest, PairSum) {
  IntMatrix a = {{1, 1}};
  auto basis = ExtractLatticeBasis(SmithNormalForm(a));
  ASSERT_EQ(basis.basis.rows(), 2u);
  ASSERT_EQ(basis.basis.cols(), 1u);
  EXPECT_EQ(basis.basis(0, 0) + basis.basis(1, 0), 0);
  EXPECT_EQ(abs(basis.basis(0, 0)), 1);
  EXPECT_EQ(basis.gram_det, 2);
}

TEST(LatticeBasisTest, FullyConstrainedIsEmpty) {
  EXPECT_EQ(CodeOf([] { ExtractLatticeBasis(SmithNormalForm(IntMatrix::Identity(4))); }),
            ErrorCode::kEmptyLattice);
}

TEST(LatticeBasisTest, TableMargins) {
  auto reduced = FullRankReduce(ConstraintSet::TableMargins(4, 4));
  ASSERT_EQ(reduced.rank, 7u);
  auto basis = ExtractLatticeBasis(SmithNormalForm(reduced.matrix));
  EXPECT_EQ(basis.lattice_dim, 9u);
  EXPECT_TRUE((reduced.matrix * basis.basis).IsZero());
  // The full 8-row system annihilates the basis too.
  EXPECT_TRUE((IncidenceMatrix(ConstraintSet::TableMargins(4, 4)) * basis.basis).IsZero());
}

TEST(LatticeBasisTest, RandomCombinationsStayInKernel) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-1000, 1000);
  for (int trial = 0; trial < 10; ++trial) {
    IntMatrix a = testing::RandomFullRowRank(rng, 3, 7);
    auto basis = ExtractLatticeBasis(SmithNormalForm(a));
    for (int i = 0; i < 100; ++i) {
      std::vector<BigInt> w(basis.lattice_dim);
      for (auto& x : w) x = coef(rng);
      for (const auto& y : a.Apply(basis.basis.Apply(w))) ASSERT_EQ(y, 0);
    }
  }
}

TEST(LatticeBasisTest, BasisGeneratesTheWholeKernel) {
  // A kernel vector of a has integer coordinates in the basis exactly when
  // the basis is a lattice basis; v_inv gives those coordinates.
  IntMatrix a = {{1, 1, 1, 0}, {0, 1, 1, 1}};
  auto snf = SmithNormalForm(a);
  auto basis = ExtractLatticeBasis(snf);
  std::vector<BigInt> z = {1, -1, 0, 1};  // a z = 0
  for (const auto& y : a.Apply(z)) ASSERT_EQ(y, 0);
  auto w = snf.v_inv.Apply(z);
  for (std::size_t i = 0; i < snf.rank; ++i) EXPECT_EQ(w[i], 0);
  std::vector<BigInt> free(w.begin() + static_cast<std::ptrdiff_t>(snf.rank), w.end());
  EXPECT_EQ(basis.basis.Apply(free), z);
}

TEST(UnimodularInverseTest, Examples) {
  EXPECT_EQ(UnimodularInverse(IntMatrix::Identity(4)), IntMatrix::Identity(4));
  EXPECT_EQ(UnimodularInverse(IntMatrix{{1, 1}, {0, 1}}), (IntMatrix{{1, -1}, {0, 1}}));
  EXPECT_EQ(CodeOf([] { UnimodularInverse(IntMatrix{{2, 0}, {0, 1}}); }),
            ErrorCode::kNotUnimodular);
  EXPECT_EQ(CodeOf([] { UnimodularInverse(IntMatrix(2, 3)); }),
            ErrorCode::kNotUnimodular);
}

TEST(UnimodularInverseTest, ProductOfElementaryMatrices) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> index(0, 5);
  std::uniform_int_distribution<int> factor(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix v = IntMatrix::Identity(6);
    for (int op = 0; op < 20; ++op) {
      const std::size_t i = index(rng);
      std::size_t j = index(rng);
      if (i == j) j = (j + 1) % 6;
      switch (op % 3) {
        case 0: v.AddRowMultiple(i, j, factor(rng)); break;
        case 1: v.SwapRows(i, j); break;
        case 2: v.NegateRow(i); break;
      }
    }
    IntMatrix inv = UnimodularInverse(v);
    EXPECT_EQ(v * inv, IntMatrix::Identity(6));
    EXPECT_EQ(inv * v, IntMatrix::Identity(6));
  }
}

TEST(GramDeterminantTest, Examples) {
  EXPECT_EQ(GramDeterminant(IntMatrix{{1}, {-1}}), 2);
  IntMatrix embedded(5, 3);
  for (std::size_t i = 0; i < 3; ++i) embedded(i + 1, i) = 1;
  EXPECT_EQ(GramDeterminant(embedded), 1);
  EXPECT_EQ(CodeOf([] { GramDeterminant(IntMatrix{{1, 2}, {1, 2}}); }),
            ErrorCode::kRankDeficient);
}

TEST(GramDeterminantTest, TableBasisMatchesOracles) {
  auto reduced = FullRankReduce(ConstraintSet::TableMargins(4, 4));
  auto basis = ExtractLatticeBasis(SmithNormalForm(reduced.matrix));
  const BigInt gram = GramDeterminant(basis.basis);
  EXPECT_GT(gram, 0);
  // Cauchy-Binet over all 9-row minors, each by rational elimination.
  EXPECT_EQ(gram, testing::CauchyBinetGram(basis.basis));
  // A totally unimodular full-rank A gives a primitive row lattice whose
  // covolume equals the kernel lattice's: det(C^T C) = det(A A^T).
  EXPECT_EQ(gram, testing::RationalDeterminant(reduced.matrix * reduced.matrix.Transpose()));
  // Closed form for an r x c margin system: r^(c-1) c^(r-1).
  EXPECT_EQ(gram, 4096);
}

TEST(GramDeterminantTest, InvariantUnderColumnPermutation) {
  std::mt19937_64 rng(8);
  IntMatrix a = testing::RandomFullRowRank(rng, 3, 8);
  IntMatrix b = ExtractLatticeBasis(SmithNormalForm(a)).basis;
  const BigInt reference = GramDeterminant(b);
  std::vector<std::size_t> order(b.cols());
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    IntMatrix p(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i) {
      for (std::size_t j = 0; j < b.cols(); ++j) p(i, j) = b(i, order[j]);
    }
    EXPECT_EQ(GramDeterminant(p), reference);
  }
}

}  // namespace
}  // namespace lattice_dp
