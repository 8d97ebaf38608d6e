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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "csv_io.h"
#include "lattice_dp.h"

namespace lattice_dp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kConfigInvalid:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kParameterDomain:
    case ErrorCode::kNegativePopulation:
    case ErrorCode::kIoError:
      return kExitConfig;
    case ErrorCode::kMeetingTimeout:
      return kExitTimeout;
    case ErrorCode::kRankDeficient:
    case ErrorCode::kEmptyLattice:
    case ErrorCode::kNotUnimodular:
    case ErrorCode::kNumericOverflow:
    case ErrorCode::kInsufficientChains:
    case ErrorCode::kCouplingRejectionCap:
      return kExitNumeric;
  }
  return kExitNumeric;
}

std::uint64_t DefaultBurnIn(NoiseKind kind) {
  return kind == NoiseKind::kLaplaceL2 ? 1'000'000 : 100'000;
}

namespace {

std::string Resolve(const std::string& base, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base) / path).string();
}

json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path + ": " + e.what());
  }
}

template <typename T>
void ReadOptional(const json& obj, const char* key, std::optional<T>& dst) {
  if (obj.contains(key) && !obj.at(key).is_null()) dst = obj.at(key).get<T>();
}

template <typename T>
void ReadValue(const json& obj, const char* key, T& dst) {
  if (obj.contains(key) && !obj.at(key).is_null()) dst = obj.at(key).get<T>();
}

json BigIntToJson(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() &&
      v <= std::numeric_limits<std::int64_t>::max()) {
    return static_cast<std::int64_t>(v);
  }
  return v.str();
}

json MatrixToJson(const IntMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(BigIntToJson(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir + ": " + ec.message());
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << content;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

std::string GridToCsv(const IntegerGrid& grid) {
  std::ostringstream os;
  WriteIntegerGrid(os, grid);
  return os.str();
}

std::string SafeName(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out.empty() ? "unnamed" : out;
}

MechanismSpec BuildSpec(const ExperimentConfig& cfg) {
  MechanismSpec spec;
  spec.kind = cfg.kind;
  spec.epsilon = cfg.epsilon;
  spec.delta = cfg.delta;
  spec.proposal_ratio = cfg.a;
  spec.c_a_override = cfg.c_a;
  spec.sampler.burn_in = cfg.burn_in.value_or(DefaultBurnIn(cfg.kind));
  spec.sampler.thin = cfg.thin.value_or(kDefaultThin);
  spec.sampler.nsim =
      cfg.nsim.value_or(spec.sampler.burn_in + spec.sampler.thin);
  spec.sampler.seed = cfg.seed;
  return spec;
}

json ConfigManifest(const ExperimentConfig& cfg, const std::string& command) {
  json m;
  m["tool"] = "lattice_dp";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["seed"] = cfg.seed;
  m["norm"] = std::string(NoiseKindName(cfg.kind));
  m["epsilon"] = cfg.epsilon;
  m["delta"] = cfg.delta;
  if (cfg.a) m["a"] = *cfg.a;
  if (cfg.c_a) m["c_a_override"] = *cfg.c_a;
  m["data"] = cfg.data_path;
  m["data_format"] = cfg.data_format;
  return m;
}

json DiagnosticsToJson(const ReleaseDiagnostics& d) {
  json j;
  j["seed"] = d.seed;
  j["nsim"] = d.nsim;
  j["burn_in"] = d.burn_in;
  j["thin"] = d.thin;
  j["proposal_ratio"] = d.proposal_ratio;
  j["acceptance_rate"] = d.acceptance_rate;
  j["lattice_dim"] = d.lattice_dim;
  j["degenerate_lattice"] = d.degenerate;
  if (d.calibration) {
    j["sigma"] = d.calibration->sigma;
    j["c_a"] = d.calibration->c_a;
  }
  return j;
}

// A single lattice for the commands that do not fan out over states.
struct LatticeSource {
  ConstraintSet constraints;
  std::string label;
};

LatticeSource LoadLattice(const ExperimentConfig& cfg) {
  if (cfg.data_format == "county") {
    if (cfg.data_path.empty()) {
      throw Error(ErrorCode::kConfigInvalid, "county data needs a data path");
    }
    auto states = LoadCountyCsv(cfg.data_path);
    if (states.empty()) {
      throw Error(ErrorCode::kConfigInvalid, "county file has no records");
    }
    const StateHistogram* pick = &states.front();
    if (!cfg.state.empty()) {
      pick = nullptr;
      for (const auto& s : states) {
        if (s.state == cfg.state) pick = &s;
      }
      if (!pick) {
        throw Error(ErrorCode::kConfigInvalid,
                    "state '" + cfg.state + "' not in " + cfg.data_path);
      }
    }
    return {ConstraintSet::Partition({pick->counties.size()}), pick->state};
  }
  std::size_t dim = 0;
  if (!cfg.data_path.empty()) dim = ReadIntegerGrid(cfg.data_path).Flatten().size();
  return {ResolveConstraints(cfg, dim), "lattice"};
}

int CmdSnf(const std::string& input, const std::string& out_path,
           std::ostream& out) {
  IntegerGrid grid = ReadIntegerGrid(input);
  if (grid.rows.empty()) throw Error(ErrorCode::kParseError, input + ": empty matrix");
  const std::size_t cols = grid.rows.front().size();
  IntMatrix a(grid.rows.size(), cols);
  for (std::size_t r = 0; r < grid.rows.size(); ++r) {
    if (grid.rows[r].size() != cols) {
      throw Error(ErrorCode::kParseError,
                  input + ": row " + std::to_string(r + 1) + " has " +
                      std::to_string(grid.rows[r].size()) + " entries, expected " +
                      std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) a(r, c) = grid.rows[r][c];
  }
  SmithDecomposition snf = SmithNormalForm(a);
  json doc;
  doc["rank"] = snf.rank;
  doc["u"] = MatrixToJson(snf.u);
  doc["d"] = MatrixToJson(snf.d_mat);
  doc["v"] = MatrixToJson(snf.v);
  doc["v_inv"] = MatrixToJson(snf.v_inv);
  json factors = json::array();
  for (std::size_t l = 0; l < snf.rank; ++l) factors.push_back(BigIntToJson(snf.d_mat(l, l)));
  doc["invariant_factors"] = factors;
  if (snf.rank < a.cols()) {
    LatticeBasis basis = ExtractLatticeBasis(snf);
    doc["lattice_basis"] = MatrixToJson(basis.basis);
    doc["lattice_dim"] = basis.lattice_dim;
    doc["gram_det"] = BigIntToJson(basis.gram_det);
  } else {
    doc["lattice_basis"] = nullptr;
    doc["lattice_dim"] = 0;
  }
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    WriteFile(out_path, text);
  }
  return kExitOk;
}

int PrivatizeHistogram(const ExperimentConfig& cfg, std::ostream& out) {
  IntegerGrid grid = ReadIntegerGrid(cfg.data_path);
  Histogram x(grid.Flatten());
  ConstraintSet cs = ResolveConstraints(cfg, x.size());
  MechanismContext ctx = Compile(cs);
  MechanismSpec spec = BuildSpec(cfg);
  Release release = Privatize(ctx, x, spec);
  if (!Equivalent(cs, x, release.output)) {
    throw std::logic_error("margin check failed; refusing to write release");
  }
  EnsureDir(cfg.out_dir);
  WriteFile((fs::path(cfg.out_dir) / "output.csv").string(),
            GridToCsv(grid.Reshape(release.output)));
  WriteFile((fs::path(cfg.out_dir) / "noise.csv").string(),
            GridToCsv(grid.Reshape(release.noise)));
  json manifest = ConfigManifest(cfg, "privatize");
  manifest["constraints"] = ConstraintSetToJson(cs);
  manifest["rank"] = ctx.reduced.rank;
  manifest["sampler"] = DiagnosticsToJson(release.diagnostics);
  manifest["budget"] = {{"epsilon", release.budget_spent.epsilon},
                        {"delta", release.budget_spent.delta}};
  manifest["margins"] = Margins(cs, x);
  manifest["margins_verified"] = true;
  WriteFile((fs::path(cfg.out_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  out << "wrote " << cfg.out_dir << "/{output,noise}.csv"
      << (ctx.degenerate() ? " (degenerate lattice: noise is zero)" : "")
      << "\n";
  return kExitOk;
}

int PrivatizeCounties(const ExperimentConfig& cfg, std::ostream& out) {
  auto states = LoadCountyCsv(cfg.data_path);
  struct StateResult {
    Release release;
    std::uint64_t seed = 0;
  };
  std::vector<StateResult> results(states.size());
  ParallelFor(states.size(), [&](std::size_t s) {
    ExperimentConfig state_cfg = cfg;
    state_cfg.seed = DeriveSeed(cfg.seed, s);
    ConstraintSet cs = ConstraintSet::Partition({states[s].counties.size()});
    MechanismContext ctx = Compile(cs);
    results[s].seed = state_cfg.seed;
    results[s].release = Privatize(ctx, states[s].populations, BuildSpec(state_cfg));
    if (!Equivalent(cs, states[s].populations, results[s].release.output)) {
      throw std::logic_error("state total not preserved for " + states[s].state);
    }
  });
  EnsureDir(cfg.out_dir);
  std::ostringstream summary;
  summary << "state,counties,total,noisy_total,noise_sum,max_abs_noise\n";
  json per_state = json::array();
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto& st = states[s];
    const auto& rel = results[s].release;
    std::ostringstream csv;
    csv << "state,county,population,noisy_population,noise\n";
    std::int64_t total = 0, noisy = 0, noise_sum = 0, max_abs = 0;
    for (std::size_t i = 0; i < st.counties.size(); ++i) {
      csv << st.state << "," << st.counties[i] << "," << st.populations[i] << ","
          << rel.output[i] << "," << rel.noise[i] << "\n";
      total += st.populations[i];
      noisy += rel.output[i];
      noise_sum += rel.noise[i];
      max_abs = std::max<std::int64_t>(max_abs, std::llabs(rel.noise[i]));
    }
    WriteFile((fs::path(cfg.out_dir) / (SafeName(st.state) + "_release.csv")).string(),
              csv.str());
    summary << st.state << "," << st.counties.size() << "," << total << ","
            << noisy << "," << noise_sum << "," << max_abs << "\n";
    json entry = DiagnosticsToJson(rel.diagnostics);
    entry["state"] = st.state;
    entry["counties"] = st.counties.size();
    per_state.push_back(std::move(entry));
  }
  WriteFile((fs::path(cfg.out_dir) / "summary.csv").string(), summary.str());
  json manifest = ConfigManifest(cfg, "privatize");
  manifest["states"] = per_state;
  manifest["budget"] = {{"epsilon", cfg.epsilon},
                        {"delta", cfg.kind == NoiseKind::kGaussian ? cfg.delta : 0.0},
                        {"scope", "per state; states are disjoint"}};
  manifest["margins_verified"] = true;
  WriteFile((fs::path(cfg.out_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  out << "wrote " << states.size() << " state releases to " << cfg.out_dir << "\n";
  return kExitOk;
}

int CmdPrivatize(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.data_path.empty()) {
    throw Error(ErrorCode::kConfigInvalid, "privatize needs a data path");
  }
  return cfg.data_format == "county" ? PrivatizeCounties(cfg, out)
                                     : PrivatizeHistogram(cfg, out);
}

// Type-7 quantile of sorted data.
double Quantile(const std::vector<std::int64_t>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return static_cast<double>(sorted[lo]) +
         (h - static_cast<double>(lo)) *
             static_cast<double>(sorted[hi] - sorted[lo]);
}

int CmdReplicates(const ExperimentConfig& cfg, std::ostream& out) {
  LatticeSource src = LoadLattice(cfg);
  MechanismContext ctx = Compile(src.constraints);
  MechanismSpec spec = BuildSpec(cfg);
  const std::size_t count = cfg.replicates.value_or(1000);
  ReleaseDiagnostics diag;
  auto draws = NoiseReplicates(ctx, spec, count, &diag);
  const std::size_t d = src.constraints.dimension();

  EnsureDir(cfg.out_dir);
  std::ostringstream samples;
  for (std::size_t i = 0; i < d; ++i) samples << (i ? "," : "") << "z" << i;
  samples << "\n";
  for (const auto& z : draws) {
    for (std::size_t i = 0; i < d; ++i) samples << (i ? "," : "") << z[i];
    samples << "\n";
  }
  WriteFile((fs::path(cfg.out_dir) / "samples.csv").string(), samples.str());

  std::ostringstream summary;
  summary << "coordinate,mean,se,min,q1,median,q3,max\n";
  summary.precision(10);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<std::int64_t> col;
    col.reserve(draws.size());
    for (const auto& z : draws) col.push_back(z[i]);
    std::sort(col.begin(), col.end());
    double mean = 0.0;
    for (auto v : col) mean += static_cast<double>(v);
    mean /= static_cast<double>(col.size());
    double ss = 0.0;
    for (auto v : col) ss += (static_cast<double>(v) - mean) * (static_cast<double>(v) - mean);
    const double n = static_cast<double>(col.size());
    const double se = col.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    summary << i << "," << mean << "," << se << "," << col.front() << ","
            << Quantile(col, 0.25) << "," << Quantile(col, 0.5) << ","
            << Quantile(col, 0.75) << "," << col.back() << "\n";
  }
  WriteFile((fs::path(cfg.out_dir) / "summary.csv").string(), summary.str());

  json manifest = ConfigManifest(cfg, "replicates");
  manifest["lattice"] = src.label;
  manifest["constraints"] = ConstraintSetToJson(src.constraints);
  manifest["replicates"] = count;
  manifest["sampler"] = DiagnosticsToJson(diag);
  WriteFile((fs::path(cfg.out_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  out << "wrote " << count << " noise draws to " << cfg.out_dir << "\n";
  return kExitOk;
}

int CmdCouple(const ExperimentConfig& cfg, std::ostream& out,
              std::ostream& err) {
  LatticeSource src = LoadLattice(cfg);
  MechanismContext ctx = Compile(src.constraints);
  MechanismSpec spec = BuildSpec(cfg);
  ResolvedNoise noise = ResolveNoise(ctx, spec);
  const std::size_t replicates = cfg.replicates.value_or(200);
  EnsureDir(cfg.out_dir);
  bool any_timeout = false;
  json manifest = ConfigManifest(cfg, "couple");
  manifest["lattice"] = src.label;
  manifest["constraints"] = ConstraintSetToJson(src.constraints);
  manifest["replicates"] = replicates;
  manifest["max_iterations"] = cfg.max_iterations;
  manifest["proposal_ratio"] = noise.proposal_ratio;
  manifest["runs"] = json::array();

  for (std::size_t lag : cfg.lags) {
    auto outcomes = SampleMeetingTimes(lag, replicates, DeriveSeed(cfg.seed, lag),
                                       spec.sampler.init, noise.target,
                                       noise.proposal, ctx.chain,
                                       cfg.max_iterations);
    std::vector<MeetingTimeSample> taus;
    std::ostringstream meetings;
    meetings << "replicate,seed,tau,status\n";
    std::size_t timeouts = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      meetings << i << "," << o.seed << ",";
      if (o.sample) {
        taus.push_back(*o.sample);
        meetings << o.sample->tau << ",met\n";
      } else {
        ++timeouts;
        meetings << ",timeout\n";
        err << "lag " << lag << " replicate " << i << ": " << o.error << "\n";
      }
    }
    const std::string stem = "L" + std::to_string(lag);
    WriteFile((fs::path(cfg.out_dir) / ("meeting_times_" + stem + ".csv")).string(),
              meetings.str());
    json run = {{"lag", lag}, {"met", taus.size()}, {"timeouts", timeouts}};
    if (!taus.empty()) {
      std::vector<std::uint64_t> grid = cfg.l_grid;
      if (grid.empty()) {
        std::uint64_t max_tau = 0;
        for (const auto& t : taus) max_tau = std::max(max_tau, t.tau);
        const std::uint64_t step = std::max<std::uint64_t>(1, (max_tau + 99) / 100);
        for (std::uint64_t l = 0; l <= max_tau; l += step) grid.push_back(l);
      }
      TvBoundCurve curve = ComputeTvBound(taus, grid);
      std::ostringstream csv;
      csv.precision(10);
      csv << "l,bound,replicates\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << grid[i] << "," << curve.bounds[i] << "," << curve.replicates << "\n";
      }
      WriteFile((fs::path(cfg.out_dir) / ("tv_bound_" + stem + ".csv")).string(),
                csv.str());
      json tv = {{"lag", lag}, {"replicates", curve.replicates},
                 {"l", grid}, {"bound", curve.bounds}};
      std::vector<std::uint64_t> tau_values;
      for (const auto& t : taus) tau_values.push_back(t.tau);
      tv["tau"] = tau_values;
      WriteFile((fs::path(cfg.out_dir) / ("tv_bound_" + stem + ".json")).string(),
                tv.dump(2) + "\n");
    }
    manifest["runs"].push_back(run);
    any_timeout = any_timeout || timeouts > 0;
    out << "lag " << lag << ": " << taus.size() << "/" << replicates
        << " replicates met\n";
  }
  WriteFile((fs::path(cfg.out_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  return any_timeout ? kExitTimeout : kExitOk;
}

int CmdPsrf(const ExperimentConfig& cfg, std::ostream& out) {
  LatticeSource src = LoadLattice(cfg);
  MechanismContext ctx = Compile(src.constraints);
  ExperimentConfig psrf_cfg = cfg;
  if (!psrf_cfg.thin) psrf_cfg.thin = 100;
  MechanismSpec spec = BuildSpec(psrf_cfg);
  if (!cfg.nsim) spec.sampler.nsim = spec.sampler.burn_in + 1'000'000;
  IndependentChainsOptions opts;
  opts.chains = cfg.chains;
  opts.overdispersed_epsilon = cfg.overdispersed_epsilon;
  opts.overdispersed_steps = cfg.overdispersed_steps.value_or(spec.sampler.burn_in);
  auto chains = RunIndependentChains(ctx, spec, opts);
  std::vector<double> psrf = PsrfPerCoordinate(chains);
  EnsureDir(cfg.out_dir);
  std::ostringstream csv;
  csv.precision(10);
  csv << "coordinate,psrf\n";
  for (std::size_t i = 0; i < psrf.size(); ++i) csv << i << "," << psrf[i] << "\n";
  WriteFile((fs::path(cfg.out_dir) / "psrf.csv").string(), csv.str());
  const double worst = *std::max_element(psrf.begin(), psrf.end());
  json manifest = ConfigManifest(cfg, "psrf");
  manifest["lattice"] = src.label;
  manifest["constraints"] = ConstraintSetToJson(src.constraints);
  manifest["chains"] = cfg.chains;
  manifest["nsim"] = spec.sampler.nsim;
  manifest["burn_in"] = spec.sampler.burn_in;
  manifest["thin"] = spec.sampler.thin;
  manifest["overdispersed_steps"] = opts.overdispersed_steps;
  if (cfg.overdispersed_epsilon) {
    manifest["overdispersed_epsilon"] = *cfg.overdispersed_epsilon;
  }
  manifest["max_psrf"] = worst;
  WriteFile((fs::path(cfg.out_dir) / "manifest.json").string(),
            manifest.dump(2) + "\n");
  out << "max PSRF " << worst << "\n";
  return kExitOk;
}

}  // namespace

ExperimentConfig ConfigFromJson(const json& doc, const std::string& base_dir) {
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try {
    if (!doc.is_object()) {
      throw Error(ErrorCode::kParseError, "config must be a JSON object");
    }
    if (doc.contains("constraints")) cfg.constraints = doc.at("constraints");
    ReadValue(doc, "data", cfg.data_path);
    cfg.data_path = Resolve(base_dir, cfg.data_path);
    ReadValue(doc, "data_format", cfg.data_format);
    if (cfg.data_format != "histogram" && cfg.data_format != "county") {
      throw Error(ErrorCode::kConfigInvalid,
                  "data_format must be 'histogram' or 'county'");
    }
    ReadValue(doc, "state", cfg.state);
    if (doc.contains("norm")) cfg.kind = ParseNoiseKind(doc.at("norm").get<std::string>());
    ReadValue(doc, "epsilon", cfg.epsilon);
    ReadValue(doc, "delta", cfg.delta);
    if (doc.contains("sampler")) {
      const json& s = doc.at("sampler");
      ReadOptional(s, "nsim", cfg.nsim);
      ReadOptional(s, "burn_in", cfg.burn_in);
      ReadOptional(s, "thin", cfg.thin);
      ReadValue(s, "seed", cfg.seed);
      ReadOptional(s, "a", cfg.a);
      ReadOptional(s, "c_a", cfg.c_a);
    }
    if (doc.contains("diagnostics")) {
      const json& d = doc.at("diagnostics");
      ReadValue(d, "lags", cfg.lags);
      ReadOptional(d, "replicates", cfg.replicates);
      ReadValue(d, "l_grid", cfg.l_grid);
      ReadValue(d, "max_iterations", cfg.max_iterations);
      ReadValue(d, "chains", cfg.chains);
      ReadOptional(d, "overdispersed_epsilon", cfg.overdispersed_epsilon);
      ReadOptional(d, "overdispersed_steps", cfg.overdispersed_steps);
    }
    ReadValue(doc, "out", cfg.out_dir);
    cfg.out_dir = Resolve(base_dir, cfg.out_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  json doc = ReadJsonFile(path);
  std::string base = fs::path(path).parent_path().string();
  return ConfigFromJson(doc, base.empty() ? "." : base);
}

ConstraintSet ResolveConstraints(const ExperimentConfig& cfg,
                                 std::size_t dimension) {
  const json& src = cfg.constraints;
  ConstraintSet cs;
  if (src.is_null()) {
    throw Error(ErrorCode::kConfigInvalid, "no constraints configured");
  }
  if (src.is_string()) {
    cs = ConstraintSetFromJson(ReadJsonFile(Resolve(cfg.base_dir, src.get<std::string>())));
  } else if (src.is_object() && src.contains("table")) {
    const json& t = src.at("table");
    cs = ConstraintSet::TableMargins(t.at("rows").get<std::size_t>(),
                                     t.at("cols").get<std::size_t>());
  } else if (src.is_object() && src.contains("partition")) {
    cs = ConstraintSet::Partition(src.at("partition").get<std::vector<std::size_t>>());
  } else if (src.is_object() && src.contains("sum")) {
    if (dimension == 0) {
      throw Error(ErrorCode::kConfigInvalid, "'sum' constraints need data");
    }
    cs = ConstraintSet::Partition({dimension});
  } else {
    cs = ConstraintSetFromJson(src);
  }
  if (dimension != 0 && cs.dimension() != dimension) {
    throw Error(ErrorCode::kConfigInvalid,
                "constraints cover " + std::to_string(cs.dimension()) +
                    " cells but the data has " + std::to_string(dimension));
  }
  return cs;
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Invariant-preserving integer noise on constraint lattices"};
  app.require_subcommand(1);

  std::string snf_input, snf_out;
  auto* snf = app.add_subcommand("snf", "Smith normal form and lattice basis of an integer matrix CSV");
  snf->add_option("input", snf_input, "matrix CSV")->required();
  snf->add_option("--out", snf_out, "write JSON here instead of stdout");

  struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed, nsim, burn_in, thin;
    std::optional<double> epsilon, delta, a;
    std::optional<std::string> norm, out;
    std::vector<std::size_t> lags;
    std::optional<std::size_t> replicates;
  } flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "experiment config JSON")->required();
    sub->add_option("--seed", flags.seed, "RNG seed");
    sub->add_option("--epsilon", flags.epsilon, "privacy parameter epsilon");
    sub->add_option("--delta", flags.delta, "privacy parameter delta (gauss)");
    sub->add_option("--norm", flags.norm, "target: l1, l2 or gauss");
    sub->add_option("--a", flags.a, "double geometric proposal ratio a");
    sub->add_option("--nsim", flags.nsim, "total chain iterations");
    sub->add_option("--burn-in", flags.burn_in, "burn-in iterations");
    sub->add_option("--thin", flags.thin, "thinning stride");
    sub->add_option("--lag", flags.lags, "coupling lag L (repeatable)");
    sub->add_option("--replicates", flags.replicates, "replicate count");
    sub->add_option("--out", flags.out, "output directory");
  };
  auto* privatize = app.add_subcommand("privatize", "Release x + z for the configured data");
  auto* replicates = app.add_subcommand("replicates", "Thinned noise draws and per-cell summaries");
  auto* couple = app.add_subcommand("couple", "L-lag coupling meeting times and TV upper bounds");
  auto* psrf = app.add_subcommand("psrf", "Potential scale reduction factors across chains");
  for (auto* sub : {privatize, replicates, couple, psrf}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (snf->parsed()) return CmdSnf(snf_input, snf_out, out);

    ExperimentConfig cfg = LoadConfig(flags.config);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.epsilon) cfg.epsilon = *flags.epsilon;
    if (flags.delta) cfg.delta = *flags.delta;
    if (flags.norm) cfg.kind = ParseNoiseKind(*flags.norm);
    if (flags.a) cfg.a = *flags.a;
    if (flags.nsim) cfg.nsim = *flags.nsim;
    if (flags.burn_in) cfg.burn_in = *flags.burn_in;
    if (flags.thin) cfg.thin = *flags.thin;
    if (!flags.lags.empty()) cfg.lags = flags.lags;
    if (flags.replicates) cfg.replicates = *flags.replicates;
    if (flags.out) cfg.out_dir = *flags.out;

    if (privatize->parsed()) return CmdPrivatize(cfg, out);
    if (replicates->parsed()) return CmdReplicates(cfg, out);
    if (couple->parsed()) return CmdCouple(cfg, out, err);
    if (psrf->parsed()) return CmdPsrf(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::logic_error& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitConfig;
}

}  // namespace lattice_dp::cli
