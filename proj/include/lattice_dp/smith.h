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

#ifndef LATTICE_DP_SMITH_H_
#define LATTICE_DP_SMITH_H_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>

#include "lattice_dp/int_matrix.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

// u * a * v == d_mat with u, v unimodular and d_mat diagonal, its nonzero
// diagonal entries forming a divisibility chain.
struct SmithDecomposition {
  IntMatrix a;
  IntMatrix u;      // k x k
  IntMatrix d_mat;  // k x d
  IntMatrix v;      // d x d
  IntMatrix v_inv;  // d x d
  std::size_t rank = 0;
};

// Integer basis of the lattice {z in Z^d : a z = 0}.
struct LatticeBasis {
  IntMatrix basis;  // d x m
  std::size_t ambient_dim = 0;
  std::size_t lattice_dim = 0;
  BigInt gram_det;  // det(basis^T basis)
};

IntMatrix UnimodularInverse(const IntMatrix& v);
BigInt GramDeterminant(const IntMatrix& basis);

namespace internal {

struct Pivot {
  std::size_t row;
  std::size_t col;
};

// Smallest nonzero magnitude in the trailing block [t:, t:]; ties go to the
// earliest entry in row-major order so the result is deterministic.
inline std::optional<Pivot> FindPivot(const IntMatrix& m, std::size_t t) {
  std::optional<Pivot> best;
  BigInt best_abs;
  for (std::size_t i = t; i < m.rows(); ++i) {
    for (std::size_t j = t; j < m.cols(); ++j) {
      if (m(i, j) == 0) continue;
      BigInt mag = boost::multiprecision::abs(m(i, j));
      if (!best || mag < best_abs) {
        best = Pivot{i, j};
        best_abs = std::move(mag);
        if (best_abs == 1) return best;
      }
    }
  }
  return best;
}

// First entry of the trailing block (t+1:, t+1:) not divisible by the pivot.
inline std::optional<Pivot> FindNonDivisible(const IntMatrix& m,
                                             std::size_t t) {
  const BigInt& p = m(t, t);
  if (p == 1) return std::nullopt;
  for (std::size_t i = t + 1; i < m.rows(); ++i) {
    for (std::size_t j = t + 1; j < m.cols(); ++j) {
      if (m(i, j) % p != 0) return Pivot{i, j};
    }
  }
  return std::nullopt;
}

}  // namespace internal

// Smith normal form by elementary row/column operations. The pivot at each
// stage is the smallest-magnitude entry of the remaining block; Euclidean
// reduction repeats until the pivot clears its row and column and divides
// the rest of the block.
inline SmithDecomposition SmithNormalForm(const IntMatrix& a) {
  const std::size_t k = a.rows();
  const std::size_t d = a.cols();
  if (k > d) {
    throw Error(ErrorCode::kRankDeficient,
                "more constraints (" + std::to_string(k) +
                    ") than dimensions (" + std::to_string(d) + ")");
  }
  SmithDecomposition out;
  out.a = a;
  out.d_mat = a;
  out.u = IntMatrix::Identity(k);
  out.v = IntMatrix::Identity(d);
  IntMatrix& m = out.d_mat;

  for (std::size_t t = 0; t < k; ++t) {
    for (;;) {
      auto pivot = internal::FindPivot(m, t);
      if (!pivot) {
        throw Error(ErrorCode::kRankDeficient,
                    "rank " + std::to_string(t) + " < " + std::to_string(k));
      }
      m.SwapRows(t, pivot->row);
      out.u.SwapRows(t, pivot->row);
      m.SwapCols(t, pivot->col);
      out.v.SwapCols(t, pivot->col);
      if (m(t, t) < 0) {
        m.NegateRow(t);
        out.u.NegateRow(t);
      }
      const BigInt p = m(t, t);
      bool clean = true;
      for (std::size_t i = t + 1; i < k; ++i) {
        if (m(i, t) == 0) continue;
        BigInt q = m(i, t) / p;
        m.AddRowMultiple(i, t, -q);
        out.u.AddRowMultiple(i, t, -q);
        if (m(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < d; ++j) {
        if (m(t, j) == 0) continue;
        BigInt q = m(t, j) / p;
        m.AddColMultiple(j, t, -q);
        out.v.AddColMultiple(j, t, -q);
        if (m(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      auto bad = internal::FindNonDivisible(m, t);
      if (!bad) break;
      // Pull the offending row into row t; the next pass reduces the pivot
      // to a proper divisor.
      m.AddRowMultiple(t, bad->row, 1);
      out.u.AddRowMultiple(t, bad->row, 1);
    }
  }
  out.rank = k;
  out.v_inv = UnimodularInverse(out.v);
  return out;
}

// Exact inverse of a matrix with determinant +-1, by integer row reduction of
// [v | I] to [I | v^-1].
inline IntMatrix UnimodularInverse(const IntMatrix& v) {
  if (v.rows() != v.cols()) {
    throw Error(ErrorCode::kNotUnimodular, "matrix is not square");
  }
  BigInt det = Determinant(v);
  if (det != 1 && det != -1) {
    throw Error(ErrorCode::kNotUnimodular,
                "determinant is " + det.str() + ", expected +-1");
  }
  const std::size_t n = v.rows();
  IntMatrix m = v;
  IntMatrix inv = IntMatrix::Identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    // Euclid on column c over rows c..n-1 until a single nonzero remains.
    for (;;) {
      std::size_t best = n;
      for (std::size_t r = c; r < n; ++r) {
        if (m(r, c) == 0) continue;
        if (best == n || abs(m(r, c)) < abs(m(best, c))) best = r;
      }
      m.SwapRows(c, best);
      inv.SwapRows(c, best);
      bool done = true;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (m(r, c) == 0) continue;
        BigInt q = m(r, c) / m(c, c);
        m.AddRowMultiple(r, c, -q);
        inv.AddRowMultiple(r, c, -q);
        if (m(r, c) != 0) done = false;
      }
      if (done) break;
    }
    if (m(c, c) < 0) {
      m.NegateRow(c);
      inv.NegateRow(c);
    }
  }
  // Upper triangular with unit diagonal now; clear above the diagonal.
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t r = 0; r < c; ++r) {
      if (m(r, c) == 0) continue;
      BigInt q = m(r, c);
      m.AddRowMultiple(r, c, -q);
      inv.AddRowMultiple(r, c, -q);
    }
  }
  return inv;
}

inline BigInt GramDeterminant(const IntMatrix& basis) {
  BigInt det = Determinant(basis.Transpose() * basis);
  if (det == 0) {
    throw Error(ErrorCode::kRankDeficient, "basis columns are dependent");
  }
  return det;
}

// The last d - k columns of v span the solutions of a z = 0: with
// z = v w, a z = u^-1 d_mat w vanishes iff w_l = 0 for every l < k.
inline LatticeBasis ExtractLatticeBasis(const SmithDecomposition& snf) {
  const std::size_t d = snf.v.rows();
  const std::size_t k = snf.rank;
  if (k == d) {
    throw Error(ErrorCode::kEmptyLattice,
                "constraints pin every coordinate; lattice is {0}");
  }
  LatticeBasis out;
  out.basis = snf.v.ColumnRange(k, d - k);
  out.ambient_dim = d;
  out.lattice_dim = d - k;
  if (!(snf.a * out.basis).IsZero()) {
    throw std::logic_error("lattice basis violates the constraints");
  }
  out.gram_det = GramDeterminant(out.basis);
  return out;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_SMITH_H_
