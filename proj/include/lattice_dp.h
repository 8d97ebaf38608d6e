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

#ifndef LATTICE_DP_H_
#define LATTICE_DP_H_

#include "lattice_dp/constraints.h"
#include "lattice_dp/constraints_json.h"
#include "lattice_dp/coupling.h"
#include "lattice_dp/int_matrix.h"
#include "lattice_dp/mechanism.h"
#include "lattice_dp/noise.h"
#include "lattice_dp/parallel.h"
#include "lattice_dp/random.h"
#include "lattice_dp/sampler.h"
#include "lattice_dp/smith.h"
#include "lattice_dp/status.h"

#endif  // LATTICE_DP_H_
