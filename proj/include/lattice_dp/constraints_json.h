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

#ifndef LATTICE_DP_CONSTRAINTS_JSON_H_
#define LATTICE_DP_CONSTRAINTS_JSON_H_

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lattice_dp/constraints.h"
#include "lattice_dp/status.h"

namespace lattice_dp {

// {"dimension": d, "constraints": [{"label": "...", "indices": [...]}, ...]}
inline ConstraintSet ConstraintSetFromJson(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("dimension") ||
        !doc.contains("constraints")) {
      throw Error(ErrorCode::kParseError,
                  "constraint document needs 'dimension' and 'constraints'");
    }
    const auto dim = doc.at("dimension").get<long long>();
    if (dim <= 0) {
      throw Error(ErrorCode::kParseError, "'dimension' must be positive");
    }
    std::vector<CountingConstraint> subsets;
    for (const auto& item : doc.at("constraints")) {
      CountingConstraint c;
      c.label = item.value("label", "A" + std::to_string(subsets.size()));
      for (const auto& idx : item.at("indices")) {
        long long i = idx.get<long long>();
        if (i < 0) {
          throw Error(ErrorCode::kParseError,
                      "negative index in constraint '" + c.label + "'");
        }
        c.indices.push_back(static_cast<std::size_t>(i));
      }
      subsets.push_back(std::move(c));
    }
    return ConstraintSet(static_cast<std::size_t>(dim), std::move(subsets));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

inline nlohmann::json ConstraintSetToJson(const ConstraintSet& cs) {
  nlohmann::json doc;
  doc["dimension"] = cs.dimension();
  doc["constraints"] = nlohmann::json::array();
  for (const auto& c : cs.subsets()) {
    doc["constraints"].push_back({{"label", c.label}, {"indices", c.indices}});
  }
  return doc;
}

}  // namespace lattice_dp

#endif  // LATTICE_DP_CONSTRAINTS_JSON_H_
