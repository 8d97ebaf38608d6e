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

#ifndef LATTICE_DP_INT_MATRIX_H_
#define LATTICE_DP_INT_MATRIX_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lattice_dp/status.h"

namespace lattice_dp {

using BigInt = boost::multiprecision::cpp_int;

// Dense integer matrix with exact arbitrary-precision entries, row-major.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols) {}

  IntMatrix(std::initializer_list<std::initializer_list<long long>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) {
        throw Error(ErrorCode::kInvalidArgument, "ragged matrix literal");
      }
      for (long long v : row) entries_.emplace_back(v);
    }
  }

  static IntMatrix Identity(std::size_t n) {
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return entries_.empty(); }

  BigInt& operator()(std::size_t r, std::size_t c) {
    return entries_[r * cols_ + c];
  }
  const BigInt& operator()(std::size_t r, std::size_t c) const {
    return entries_[r * cols_ + c];
  }

  const std::vector<BigInt>& entries() const { return entries_; }

  void SwapRows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) {
      std::swap((*this)(a, c), (*this)(b, c));
    }
  }

  void SwapCols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) {
      std::swap((*this)(r, a), (*this)(r, b));
    }
  }

  // row[dst] += factor * row[src]
  void AddRowMultiple(std::size_t dst, std::size_t src, const BigInt& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) {
      (*this)(dst, c) += factor * (*this)(src, c);
    }
  }

  // col[dst] += factor * col[src]
  void AddColMultiple(std::size_t dst, std::size_t src, const BigInt& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) {
      (*this)(r, dst) += factor * (*this)(r, src);
    }
  }

  void NegateRow(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
  }

  IntMatrix Transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    }
    return t;
  }

  // Columns [first, first + count).
  IntMatrix ColumnRange(std::size_t first, std::size_t count) const {
    IntMatrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < count; ++c) out(r, c) = (*this)(r, first + c);
    }
    return out;
  }

  IntMatrix SelectRows(const std::vector<std::size_t>& which) const {
    IntMatrix out(which.size(), cols_);
    for (std::size_t i = 0; i < which.size(); ++i) {
      for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(which[i], c);
    }
    return out;
  }

  bool IsZero() const {
    for (const auto& e : entries_) {
      if (e != 0) return false;
    }
    return true;
  }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

  friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw Error(ErrorCode::kInvalidArgument, "matrix product shape mismatch");
    }
    IntMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t l = 0; l < a.cols_; ++l) {
        const BigInt& ail = a(i, l);
        if (ail == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += ail * b(l, j);
      }
    }
    return out;
  }

  std::vector<BigInt> Apply(const std::vector<BigInt>& x) const {
    if (x.size() != cols_) {
      throw Error(ErrorCode::kInvalidArgument, "matrix-vector shape mismatch");
    }
    std::vector<BigInt> y(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    }
    return y;
  }

  std::string ToString() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
      os << (r == 0 ? "[" : " ");
      for (std::size_t c = 0; c < cols_; ++c) {
        os << (c == 0 ? "[" : ", ") << (*this)(r, c);
      }
      os << "]" << (r + 1 == rows_ ? "]" : "\n");
    }
    return os.str();
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<BigInt> entries_;
};

// Determinant by fraction-free (Bareiss) elimination with row pivoting.
inline BigInt Determinant(IntMatrix m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "determinant of non-square matrix");
  }
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  BigInt sign = 1;
  BigInt prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && m(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      m.SwapRows(k, swap);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        // Exact division is guaranteed by Sylvester's identity.
        m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
      }
      m(i, k) = 0;
    }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

// Indices of the earliest rows that are linearly independent over Q, in
// order. A row is kept iff it is not in the span of the rows kept before it.
inline std::vector<std::size_t> IndependentRows(const IntMatrix& a) {
  struct EchelonRow {
    std::vector<BigInt> values;
    std::size_t pivot;
  };
  std::vector<EchelonRow> echelon;
  std::vector<std::size_t> kept;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::vector<BigInt> row(a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c) row[c] = a(r, c);
    for (const auto& e : echelon) {
      if (row[e.pivot] == 0) continue;
      BigInt scale_row = e.values[e.pivot];
      BigInt scale_e = row[e.pivot];
      BigInt g = boost::multiprecision::gcd(scale_row, scale_e);
      scale_row /= g;
      scale_e /= g;
      for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] = row[c] * scale_row - e.values[c] * scale_e;
      }
    }
    std::size_t pivot = 0;
    while (pivot < row.size() && row[pivot] == 0) ++pivot;
    if (pivot == row.size()) continue;
    BigInt content = 0;
    for (const auto& v : row) content = boost::multiprecision::gcd(content, v);
    for (auto& v : row) v /= content;
    echelon.push_back({std::move(row), pivot});
    kept.push_back(r);
  }
  return kept;
}

inline std::size_t Rank(const IntMatrix& a) { return IndependentRows(a).size(); }

// Narrowing conversion used at the boundary to the sampler's machine-word
// arithmetic.
inline std::int64_t ToInt64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw Error(ErrorCode::kNumericOverflow,
                "integer entry does not fit in 64 bits");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_INT_MATRIX_H_
