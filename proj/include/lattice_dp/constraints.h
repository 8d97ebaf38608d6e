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

#ifndef LATTICE_DP_CONSTRAINTS_H_
#define LATTICE_DP_CONSTRAINTS_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lattice_dp/int_matrix.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

// One counting invariant: the sum of the histogram over `indices` is fixed.
struct CountingConstraint {
  std::string label;
  std::vector<std::size_t> indices;
};

// A collection of counting invariants over histograms of length `dimension`.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  ConstraintSet(std::size_t dimension, std::vector<CountingConstraint> subsets)
      : dimension_(dimension), subsets_(std::move(subsets)) {
    for (std::size_t l = 0; l < subsets_.size(); ++l) {
      std::set<std::size_t> seen;
      for (std::size_t i : subsets_[l].indices) {
        if (i >= dimension_) {
          throw Error(ErrorCode::kInvalidArgument,
                      "constraint " + std::to_string(l) + " index " +
                          std::to_string(i) + " outside [0, " +
                          std::to_string(dimension_) + ")");
        }
        if (!seen.insert(i).second) {
          throw Error(ErrorCode::kInvalidArgument,
                      "constraint " + std::to_string(l) +
                          " repeats index " + std::to_string(i));
        }
      }
    }
  }

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return subsets_.size(); }
  const std::vector<CountingConstraint>& subsets() const { return subsets_; }

  // One constraint per group of consecutive coordinates.
  static ConstraintSet Partition(const std::vector<std::size_t>& group_sizes) {
    std::vector<CountingConstraint> subsets;
    std::size_t next = 0;
    for (std::size_t g = 0; g < group_sizes.size(); ++g) {
      CountingConstraint c{"group" + std::to_string(g), {}};
      for (std::size_t i = 0; i < group_sizes[g]; ++i) c.indices.push_back(next++);
      subsets.push_back(std::move(c));
    }
    return ConstraintSet(next, std::move(subsets));
  }

  // Row and column margins of a rows x cols table stored row-major.
  static ConstraintSet TableMargins(std::size_t rows, std::size_t cols) {
    std::vector<CountingConstraint> subsets;
    for (std::size_t r = 0; r < rows; ++r) {
      CountingConstraint c{"row" + std::to_string(r), {}};
      for (std::size_t j = 0; j < cols; ++j) c.indices.push_back(r * cols + j);
      subsets.push_back(std::move(c));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      CountingConstraint c{"col" + std::to_string(j), {}};
      for (std::size_t r = 0; r < rows; ++r) c.indices.push_back(r * cols + j);
      subsets.push_back(std::move(c));
    }
    return ConstraintSet(rows * cols, std::move(subsets));
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<CountingConstraint> subsets_;
};

// Three mutually intersecting subsets over 14 records: two records in each
// of the seven regions of a three-set Venn diagram.
inline ConstraintSet IntersectingTriple() {
  // Region membership bit masks: bit s set means "in subset s".
  constexpr int kRegions[] = {0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111};
  std::vector<CountingConstraint> subsets = {
      {"A1", {}}, {"A2", {}}, {"A3", {}}};
  std::size_t record = 0;
  for (int region : kRegions) {
    for (int copy = 0; copy < 2; ++copy, ++record) {
      for (int s = 0; s < 3; ++s) {
        if (region & (1 << s)) subsets[s].indices.push_back(record);
      }
    }
  }
  return ConstraintSet(record, std::move(subsets));
}

// Non-negative counts over [d].
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(std::vector<std::int64_t> values)
      : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] < 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "histogram entry " + std::to_string(i) + " is negative");
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  const std::vector<std::int64_t>& values() const { return values_; }
  std::int64_t operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<std::int64_t> values_;
};

inline IntMatrix IncidenceMatrix(const ConstraintSet& cs) {
  IntMatrix a(cs.size(), cs.dimension());
  for (std::size_t l = 0; l < cs.size(); ++l) {
    for (std::size_t i : cs.subsets()[l].indices) a(l, i) = 1;
  }
  return a;
}

struct ReducedIncidence {
  IntMatrix matrix;
  std::size_t rank = 0;
  std::vector<std::size_t> kept_rows;  // indices into the original subsets
};

// Drops constraints implied by earlier ones, keeping the earliest rows.
inline ReducedIncidence FullRankReduce(const ConstraintSet& cs) {
  IntMatrix a = IncidenceMatrix(cs);
  ReducedIncidence out;
  out.kept_rows = IndependentRows(a);
  out.rank = out.kept_rows.size();
  out.matrix = a.SelectRows(out.kept_rows);
  return out;
}

inline std::vector<std::int64_t> Margins(const ConstraintSet& cs,
                                         std::span<const std::int64_t> x) {
  if (x.size() != cs.dimension()) {
    throw Error(ErrorCode::kInvalidArgument,
                "histogram length " + std::to_string(x.size()) +
                    " != constraint dimension " +
                    std::to_string(cs.dimension()));
  }
  std::vector<std::int64_t> sums;
  sums.reserve(cs.size());
  for (const auto& subset : cs.subsets()) {
    std::int64_t s = 0;
    for (std::size_t i : subset.indices) {
      if (__builtin_add_overflow(s, x[i], &s)) {
        throw Error(ErrorCode::kNumericOverflow, "margin overflows int64");
      }
    }
    sums.push_back(s);
  }
  return sums;
}

inline std::vector<std::int64_t> Margins(const ConstraintSet& cs,
                                         const Histogram& x) {
  return Margins(cs, std::span<const std::int64_t>(x.values()));
}

// x and y agree on every constrained sum.
inline bool Equivalent(const ConstraintSet& cs, std::span<const std::int64_t> x,
                       std::span<const std::int64_t> y) {
  return Margins(cs, x) == Margins(cs, y);
}

inline bool Equivalent(const ConstraintSet& cs, const Histogram& x,
                       std::span<const std::int64_t> y) {
  return Equivalent(cs, std::span<const std::int64_t>(x.values()), y);
}

// (epsilon, delta) privacy loss.
struct PrivacyBudget {
  double epsilon = 0.0;
  double delta = 0.0;

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;
};

// Sequential composition: losses add componentwise.
inline PrivacyBudget ComposeBudgets(std::span<const PrivacyBudget> budgets) {
  PrivacyBudget total;
  for (const auto& b : budgets) {
    if (!(b.epsilon >= 0.0) || !(b.delta >= 0.0)) {
      throw Error(ErrorCode::kParameterDomain,
                  "privacy budgets must be non-negative");
    }
    total.epsilon += b.epsilon;
    total.delta += b.delta;
  }
  return total;
}

// Records spends; does not enforce a cap.
class BudgetLedger {
 public:
  void Record(std::string label, PrivacyBudget spend) {
    ComposeBudgets(std::span<const PrivacyBudget>(&spend, 1));
    entries_.emplace_back(std::move(label), spend);
  }

  PrivacyBudget Total() const {
    std::vector<PrivacyBudget> spends;
    for (const auto& e : entries_) spends.push_back(e.second);
    return ComposeBudgets(spends);
  }

  const std::vector<std::pair<std::string, PrivacyBudget>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, PrivacyBudget>> entries_;
};

}  // namespace lattice_dp

#endif  // LATTICE_DP_CONSTRAINTS_H_
