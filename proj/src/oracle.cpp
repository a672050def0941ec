// SPDX-License-Identifier: Apache-2.0
#include "attndse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "attndse/error.hpp"
#include "attndse/io.hpp"
#include "attndse/rng.hpp"

namespace adse {
namespace {

struct ParamModel {
  const char* name;
  ResourceGroup group;
  double scale;  // normalizes the candidate value for the cost terms
  double power_lin;
  double power_quad;
  double area;
  double fallback;  // default when neither space nor config provides a value
};

// clang-format off
constexpr ParamModel kModel[] = {
    {"CoreFrequency",   ResourceGroup::kMemory,   3.0,    0.00, 0.00, 0.00, 2.0},
    {"FetchWidth",      ResourceGroup::kFrontend, 12.0,   0.25, 0.10, 0.30, 8},
    {"DecodeWidth",     ResourceGroup::kFrontend, 12.0,   0.30, 0.15, 0.40, 8},
    {"RenameWidth",     ResourceGroup::kRename,   12.0,   0.35, 0.20, 0.50, 8},
    {"DispatchWidth",   ResourceGroup::kRename,   12.0,   0.25, 0.10, 0.30, 8},
    {"IssueWidth",      ResourceGroup::kExecute,  12.0,   0.45, 0.30, 0.60, 8},
    {"WritebackWidth",  ResourceGroup::kCommit,   12.0,   0.30, 0.15, 0.40, 8},
    {"CommitWidth",     ResourceGroup::kCommit,   12.0,   0.20, 0.08, 0.25, 8},
    {"FetchBuffer",     ResourceGroup::kFrontend, 64.0,   0.05, 0.00, 0.05, 64},
    {"FetchQueue",      ResourceGroup::kFrontend, 48.0,   0.08, 0.02, 0.10, 32},
    {"BranchPredictor", ResourceGroup::kFrontend, 1.0,    0.05, 0.00, 0.05, 1},
    {"ChoicePredictor", ResourceGroup::kFrontend, 8192.0, 0.06, 0.00, 0.12, 4096},
    {"GlobalPredictor", ResourceGroup::kFrontend, 8192.0, 0.06, 0.00, 0.12, 4096},
    {"RASSize",         ResourceGroup::kFrontend, 40.0,   0.02, 0.00, 0.03, 32},
    {"BTBSize",         ResourceGroup::kFrontend, 4096.0, 0.08, 0.00, 0.15, 2048},
    {"ROBSize",         ResourceGroup::kWindow,   256.0,  0.40, 0.20, 0.60, 192},
    {"IntRF",           ResourceGroup::kWindow,   256.0,  0.35, 0.15, 0.70, 192},
    {"FpRF",            ResourceGroup::kWindow,   256.0,  0.30, 0.10, 0.70, 160},
    {"InstQueue",       ResourceGroup::kWindow,   80.0,   0.50, 0.30, 0.50, 64},
    {"LoadQueue",       ResourceGroup::kMemory,   48.0,   0.20, 0.10, 0.25, 40},
    {"StoreQueue",      ResourceGroup::kMemory,   48.0,   0.20, 0.10, 0.25, 40},
    {"IntALU",          ResourceGroup::kExecute,  8.0,    0.40, 0.10, 0.50, 6},
    {"IntMultDiv",      ResourceGroup::kExecute,  4.0,    0.30, 0.05, 0.60, 2},
    {"FpALU",           ResourceGroup::kExecute,  4.0,    0.40, 0.10, 0.80, 2},
    {"FpMultDiv",       ResourceGroup::kExecute,  4.0,    0.50, 0.10, 1.00, 2},
    {"Cacheline",       ResourceGroup::kMemory,   64.0,   0.05, 0.00, 0.10, 64},
    {"L1ICacheSize",    ResourceGroup::kFrontend, 64.0,   0.30, 0.00, 1.00, 32},
    {"L1ICacheAssoc",   ResourceGroup::kFrontend, 4.0,    0.05, 0.00, 0.10, 4},
    {"L1DCacheSize",    ResourceGroup::kMemory,   64.0,   0.35, 0.00, 1.10, 32},
    {"L1DCacheAssoc",   ResourceGroup::kMemory,   4.0,    0.06, 0.00, 0.12, 4},
    {"L2CacheSize",     ResourceGroup::kMemory,   256.0,  0.40, 0.00, 2.50, 256},
    {"L2CacheAssoc",    ResourceGroup::kMemory,   4.0,    0.08, 0.00, 0.20, 4},
};
// clang-format on

constexpr std::size_t kParamCount = std::size(kModel);

const ParamModel* find_model(std::string_view name) {
  for (const auto& m : kModel)
    if (name == m.name) return &m;
  return nullptr;
}

std::size_t model_index(std::string_view name) {
  for (std::size_t i = 0; i < kParamCount; ++i)
    if (name == kModel[i].name) return i;
  throw std::logic_error("unmodelled parameter");
}

consteval std::size_t I(std::string_view name) {
  for (std::size_t i = 0; i < kParamCount; ++i)
    if (name == kModel[i].name) return i;
  throw "unmodelled parameter";
}

// Per-width efficiency keeps integer widths of different groups from tying.
constexpr double kDecodeEff = 0.95;
constexpr double kRenameEff = 0.97;
constexpr double kDispatchEff = 0.93;
constexpr double kIssueEff = 0.91;
constexpr double kWritebackEff = 0.89;
constexpr double kCommitEff = 0.98;
// Fraction of peak ALU throughput reachable under port conflicts.
constexpr double kAluUtilization = 0.55;

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

std::string_view objective_name(Objective o) {
  switch (o) {
    case Objective::kIpc: return "ipc";
    case Objective::kPower: return "power";
    case Objective::kArea: return "area";
  }
  return "?";
}

Objective parse_objective(std::string_view name) {
  if (name == "ipc") return Objective::kIpc;
  if (name == "power") return Objective::kPower;
  if (name == "area") return Objective::kArea;
  throw InputError("unknown objective '" + std::string(name) + "'");
}

double objective_value(const ObjectiveVector& v, Objective o) {
  switch (o) {
    case Objective::kIpc: return v.ipc;
    case Objective::kPower: return v.power;
    case Objective::kArea: return v.area;
  }
  return 0.0;
}

bool is_maximized(Objective o) { return o == Objective::kIpc; }

std::string_view resource_group_name(ResourceGroup g) {
  switch (g) {
    case ResourceGroup::kFrontend: return "frontend";
    case ResourceGroup::kRename: return "rename";
    case ResourceGroup::kWindow: return "window";
    case ResourceGroup::kExecute: return "execute";
    case ResourceGroup::kMemory: return "memory";
    case ResourceGroup::kCommit: return "commit";
  }
  return "?";
}

ResourceGroup resource_group_of(std::string_view parameter) {
  const ParamModel* m = find_model(parameter);
  if (!m) throw InputError("parameter '" + std::string(parameter) + "' is not modelled by the oracle");
  return m->group;
}

const std::vector<std::string>& modelled_parameters() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& m : kModel) v.emplace_back(m.name);
    return v;
  }();
  return names;
}

OracleConfig OracleConfig::from_json(const nlohmann::json& j) {
  OracleConfig c;
  try {
    c.name = j.value("name", c.name);
    c.seed = j.value("seed", c.seed);
    if (j.contains("mix")) {
      const auto& m = j["mix"];
      c.mix.int_alu = m.value("int_alu", c.mix.int_alu);
      c.mix.int_mult_div = m.value("int_mult_div", c.mix.int_mult_div);
      c.mix.fp_alu = m.value("fp_alu", c.mix.fp_alu);
      c.mix.fp_mult_div = m.value("fp_mult_div", c.mix.fp_mult_div);
      c.mix.load = m.value("load", c.mix.load);
      c.mix.store = m.value("store", c.mix.store);
      c.mix.branch = m.value("branch", c.mix.branch);
    }
    c.ilp = j.value("ilp", c.ilp);
    c.window_scale = j.value("window_scale", c.window_scale);
    c.icache_footprint_kb = j.value("icache_footprint_kb", c.icache_footprint_kb);
    c.dcache_footprint_kb = j.value("dcache_footprint_kb", c.dcache_footprint_kb);
    c.l2_footprint_kb = j.value("l2_footprint_kb", c.l2_footprint_kb);
    c.memory_latency_ns = j.value("memory_latency_ns", c.memory_latency_ns);
    c.branch_miss_base = j.value("branch_miss_base", c.branch_miss_base);
    c.mispredict_penalty = j.value("mispredict_penalty", c.mispredict_penalty);
    if (j.contains("defaults"))
      for (const auto& [k, v] : j["defaults"].items()) c.defaults[k] = v;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("oracle config: ") + e.what());
  }
  const double fracs[] = {c.mix.int_alu, c.mix.int_mult_div, c.mix.fp_alu, c.mix.fp_mult_div,
                          c.mix.load,    c.mix.store,        c.mix.branch};
  for (double f : fracs)
    if (!(f > 0.0)) throw InputError("oracle config '" + c.name + "': mix fractions must be positive");
  const double positives[] = {c.ilp,
                              c.window_scale,
                              c.icache_footprint_kb,
                              c.dcache_footprint_kb,
                              c.l2_footprint_kb,
                              c.memory_latency_ns,
                              c.branch_miss_base,
                              c.mispredict_penalty};
  for (double v : positives)
    if (!(v > 0.0)) throw InputError("oracle config '" + c.name + "': coefficients must be positive");
  for (const auto& [k, v] : c.defaults)
    if (!find_model(k)) throw InputError("oracle config default for unknown parameter '" + k + "'");
  return c;
}

nlohmann::json OracleConfig::to_json() const {
  nlohmann::json d = nlohmann::json::object();
  for (const auto& [k, v] : defaults) d[k] = v;
  return {{"name", name},
          {"seed", seed},
          {"mix",
           {{"int_alu", mix.int_alu},
            {"int_mult_div", mix.int_mult_div},
            {"fp_alu", mix.fp_alu},
            {"fp_mult_div", mix.fp_mult_div},
            {"load", mix.load},
            {"store", mix.store},
            {"branch", mix.branch}}},
          {"ilp", ilp},
          {"window_scale", window_scale},
          {"icache_footprint_kb", icache_footprint_kb},
          {"dcache_footprint_kb", dcache_footprint_kb},
          {"l2_footprint_kb", l2_footprint_kb},
          {"memory_latency_ns", memory_latency_ns},
          {"branch_miss_base", branch_miss_base},
          {"mispredict_penalty", mispredict_penalty},
          {"defaults", d}};
}

OracleConfig load_oracle_config(const std::string& path) {
  try {
    return OracleConfig::from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("oracle config '" + path + "': " + e.what());
  }
}

OracleConfig builtin_oracle_config(std::string_view name) {
  OracleConfig c;
  if (name == "compute_bound") {
    c.name = "compute_bound";
    c.seed = 11;
  } else if (name == "memory_bound") {
    c.name = "memory_bound";
    c.seed = 12;
    c.mix = {0.30, 0.03, 0.08, 0.02, 0.34, 0.14, 0.12};
    c.ilp = 6.0;
    c.dcache_footprint_kb = 256.0;
    c.l2_footprint_kb = 2048.0;
    c.memory_latency_ns = 80.0;
  } else if (name == "branch_heavy") {
    c.name = "branch_heavy";
    c.seed = 13;
    c.mix = {0.40, 0.04, 0.05, 0.02, 0.22, 0.10, 0.22};
    c.ilp = 5.0;
    c.icache_footprint_kb = 96.0;
    c.branch_miss_base = 0.12;
    c.mispredict_penalty = 18.0;
  } else {
    throw InputError("unknown built-in workload '" + std::string(name) + "'");
  }
  return c;
}

struct SyntheticOracle::Resolved {
  std::array<double, kParamCount> v{};
};

SyntheticOracle::SyntheticOracle(const DesignSpace& space, OracleConfig cfg)
    : space_(space), cfg_(std::move(cfg)) {
  for (const auto& p : space_.params()) {
    if (!find_model(p.name))
      throw InputError("oracle does not model parameter '" + p.name + "'");
    space_model_index_.push_back(model_index(p.name));
  }
  for (const auto& m : kModel) {
    double value = m.fallback;
    if (auto it = cfg_.defaults.find(m.name); it != cfg_.defaults.end()) {
      if (it->second.is_string())
        value = it->second.get<std::string>() == "TournamentBP" ? 1.0 : 0.0;
      else
        value = it->second.get<double>();
    }
    base_values_.push_back(value);
  }
  Rng rng(mix_seed(cfg_.seed, 0x0c0ffee));
  for (const auto& m : kModel) {
    std::array<double, 3> c{m.power_lin, m.power_quad, m.area};
    for (double& x : c) x *= 0.9 + 0.2 * uniform01(rng);
    coeff_.push_back(c);
  }
}

SyntheticOracle::Resolved SyntheticOracle::resolve(const DesignPoint& p) const {
  space_.validate(p);
  Resolved r;
  std::copy(base_values_.begin(), base_values_.end(), r.v.begin());
  for (std::size_t i = 0; i < space_.size(); ++i)
    r.v[space_model_index_[i]] = space_.param(i).values[p.indices[i]];
  return r;
}

OracleBreakdown SyntheticOracle::breakdown(const DesignPoint& p) const {
  const Resolved r = resolve(p);
  auto val = [&](std::size_t i) { return r.v[i]; };
  const WorkloadMix& mix = cfg_.mix;

  // Frontend: fetch bandwidth (4-byte instructions) through a queue, with
  // branch and instruction-cache stalls folded in harmonically.
  const double fetch_bw = std::min(val(I("FetchWidth")), val(I("FetchBuffer")) / 4.0);
  const double queue_factor = val(I("FetchQueue")) / (val(I("FetchQueue")) + 4.0);
  const double tournament = val(I("BranchPredictor")) >= 0.5 ? 0.75 : 1.0;
  const double miss_rate = cfg_.branch_miss_base * tournament *
                           std::pow(2048.0 / val(I("ChoicePredictor")), 0.15) *
                           std::pow(2048.0 / val(I("GlobalPredictor")), 0.20) *
                           std::pow(1024.0 / val(I("BTBSize")), 0.10) * std::pow(16.0 / val(I("RASSize")), 0.10);
  const double icache_miss =
      clamp(0.004 * std::sqrt(cfg_.icache_footprint_kb / val(I("L1ICacheSize"))) *
                (val(I("L1ICacheAssoc")) < 3.0 ? 1.15 : 1.0),
            0.001, 0.5);
  const double stall_per_instr = mix.branch * miss_rate * cfg_.mispredict_penalty + icache_miss * 12.0;
  const double frontend = std::min(1.0 / (1.0 / (fetch_bw * queue_factor) + stall_per_instr),
                                   kDecodeEff * val(I("DecodeWidth")));

  const double rename = std::min(kRenameEff * val(I("RenameWidth")), kDispatchEff * val(I("DispatchWidth")));

  // Window: the tightest in-flight capacity sets how much ILP is exposed.
  const double int_dest = mix.int_alu + mix.int_mult_div + mix.load;
  const double fp_dest = mix.fp_alu + mix.fp_mult_div;
  const double window_entries =
      std::min({val(I("ROBSize")), (val(I("IntRF")) - 32.0) / int_dest, (val(I("FpRF")) - 32.0) / fp_dest,
                2.0 * val(I("InstQueue"))});
  const double window = cfg_.ilp * (1.0 - std::exp(-window_entries / cfg_.window_scale));

  const double execute =
      std::min({kIssueEff * val(I("IssueWidth")), kAluUtilization * val(I("IntALU")) / mix.int_alu,
                0.5 * val(I("IntMultDiv")) / mix.int_mult_div, val(I("FpALU")) / mix.fp_alu,
                0.5 * val(I("FpMultDiv")) / mix.fp_mult_div});

  // Memory: Little's law on the load/store queues with latency in cycles,
  // so a faster clock lengthens the miss penalty.
  const double line_factor = val(I("Cacheline")) < 48.0 ? 1.2 : 1.0;
  const double l1d_miss = clamp(0.04 * std::sqrt(cfg_.dcache_footprint_kb / val(I("L1DCacheSize"))) *
                                    (val(I("L1DCacheAssoc")) < 3.0 ? 1.15 : 1.0) * line_factor,
                                0.002, 0.6);
  const double l2_miss = clamp(0.25 * std::sqrt(cfg_.l2_footprint_kb / val(I("L2CacheSize"))) *
                                   (val(I("L2CacheAssoc")) < 3.0 ? 1.1 : 1.0),
                               0.01, 0.95);
  const double latency =
      3.0 + l1d_miss * (14.0 + l2_miss * cfg_.memory_latency_ns * val(I("CoreFrequency")));
  const double memory = std::min(val(I("LoadQueue")) / (mix.load * latency),
                                 val(I("StoreQueue")) / (mix.store * (latency * 0.5 + 2.0)));

  const double commit = std::min(kCommitEff * val(I("CommitWidth")), kWritebackEff * val(I("WritebackWidth")));

  OracleBreakdown b;
  b.rates = {frontend, rename, window, execute, memory, commit};
  std::size_t arg = 0;
  for (std::size_t g = 1; g < kResourceGroupCount; ++g)
    if (b.rates[g] < b.rates[arg]) arg = g;
  b.binding = static_cast<ResourceGroup>(arg);
  b.objectives.ipc = b.rates[arg];

  double dynamic = 0.0, area = 2.0;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const ParamModel& m = kModel[i];
    const auto& c = coeff_[i];
    const double u = r.v[i] / m.scale;
    dynamic += c[0] * u + c[1] * u * u;
    area += c[2] * u;
  }
  const double freq = val(I("CoreFrequency"));
  b.objectives.area = area;
  b.objectives.power = 0.5 + dynamic * std::pow(freq / 2.0, 1.5) + 0.05 * area;
  return b;
}

ObjectiveVector SyntheticOracle::evaluate_uncounted(const DesignPoint& p) const {
  return breakdown(p).objectives;
}

}  // namespace adse
