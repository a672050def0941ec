// SPDX-License-Identifier: Apache-2.0
#include "attndse/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "attndse/checkpoint.hpp"
#include "attndse/design_space.hpp"
#include "attndse/error.hpp"
#include "attndse/explorer.hpp"
#include "attndse/io.hpp"
#include "attndse/microarch_graph.hpp"
#include "attndse/oracle.hpp"
#include "attndse/pareto.hpp"
#include "attndse/surrogate.hpp"

#ifndef ATTNDSE_GIT_DESCRIBE
#define ATTNDSE_GIT_DESCRIBE "unknown"
#endif

namespace adse {

namespace fs = std::filesystem;

void RunManifest::seal() {
  const nlohmann::json body = {{"command", command}, {"settings", settings}, {"inputs", inputs}};
  nlohmann::json hashed = body;
  for (auto& [role, entry] : hashed["inputs"].items()) entry.erase("path");
  id = sha256_hex(hashed.dump()).substr(0, 16);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j = {{"format", "attndse-manifest"},
                      {"id", id},
                      {"command", command},
                      {"settings", settings},
                      {"inputs", inputs},
                      {"tool_version", ATTNDSE_GIT_DESCRIBE}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", std::string()) != "attndse-manifest")
    throw InputError("not a run manifest");
  RunManifest m;
  try {
    m.id = j.at("id").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.settings = j.at("settings");
    m.inputs = j.at("inputs");
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed manifest: ") + e.what());
  }
  for (auto& [k, v] : j.items())
    if (k != "format" && k != "id" && k != "command" && k != "settings" && k != "inputs" && k != "tool_version")
      m.extra[k] = v;
  return m;
}

RunManifest read_manifest(const fs::path& dir) {
  const auto text = read_file(dir / "manifest.json");
  try {
    return RunManifest::from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError((dir / "manifest.json").string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& dir, const RunManifest& m) {
  write_file_atomic(dir / "manifest.json", m.to_json().dump(2) + "\n");
}

namespace {

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

bool is_builtin_oracle(const std::string& s) {
  return s == "compute_bound" || s == "memory_bound" || s == "branch_heavy";
}

// Settings file: flags override it, it overrides defaults. Relative paths
// inside resolve against the file's directory; built-in oracle names stay
// as written.
struct Settings {
  nlohmann::json doc = nlohmann::json::object();
  fs::path base;

  void load(const std::string& path) {
    if (path.empty()) return;
    const auto text = read_file(path);
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
    if (!doc.is_object()) throw InputError(path + ": expected a JSON object");
    base = fs::path(path).parent_path();
  }
  const nlohmann::json* find(const std::string& section, const std::string& key) const {
    if (!section.empty()) {
      if (auto s = doc.find(section); s != doc.end() && s->is_object())
        if (auto v = s->find(key); v != s->end()) return &*v;
    }
    if (auto v = doc.find(key); v != doc.end()) return &*v;
    return nullptr;
  }
  std::string path(const CLI::App& app, const std::string& flag, const std::string& value,
                   const std::string& section, const std::string& key) const {
    if (app.count(flag)) return value;
    if (auto v = find(section, key)) {
      if (!v->is_string()) throw InputError("settings: '" + key + "' must be a string");
      const fs::path p(v->get<std::string>());
      if (is_builtin_oracle(p.string())) return p.string();
      return p.is_absolute() || base.empty() ? p.string() : (base / p).string();
    }
    return value;
  }
  template <typename T>
  T value(const CLI::App& app, const std::string& flag, const T& v, const std::string& section,
          const std::string& key) const {
    if (app.count(flag)) return v;
    if (auto j = find(section, key)) {
      try {
        return j->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw InputError("settings: '" + key + "' has the wrong type");
      }
    }
    return v;
  }
};

std::string require(const std::string& v, const std::string& what) {
  if (v.empty()) throw InputError("missing " + what);
  return v;
}

nlohmann::json input_entry(const std::string& path) {
  return {{"path", path}, {"sha256", sha256_hex(read_file(path))}};
}

OracleConfig resolve_oracle(const std::string& arg, RunManifest& m) {
  if (is_builtin_oracle(arg) && !fs::exists(arg)) {
    auto cfg = builtin_oracle_config(arg);
    m.inputs["oracle"] = {{"builtin", arg}, {"sha256", sha256_hex(cfg.to_json().dump())}};
    return cfg;
  }
  m.inputs["oracle"] = input_entry(arg);
  return load_oracle_config(arg);
}

fs::path prepare_out(const std::string& out) {
  const fs::path p(require(out, "--out"));
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw InputError("cannot create " + p.string() + ": " + ec.message());
  return p;
}

const char* const kCkptNames[] = {"ipc.ckpt", "power.ckpt", "area.ckpt"};

std::vector<SurrogateModel> load_models(const fs::path& dir, const DesignSpace& space, RunManifest& m) {
  std::vector<SurrogateModel> models;
  for (Objective o : kAllObjectives) {
    const auto path = (dir / kCkptNames[static_cast<int>(o)]).string();
    m.inputs[std::string("checkpoint_") + std::string(objective_name(o))] = input_entry(path);
    auto model = SurrogateModel::from_checkpoint(read_checkpoint(path), space);
    if (model.objective() != o)
      throw CompatibilityError(path + " holds a " + std::string(objective_name(model.objective())) + " model");
    models.push_back(std::move(model));
  }
  return models;
}

// Builds the predictor named by `kind` ("surrogate" or "perfect").
struct PredictorBundle {
  std::vector<SurrogateModel> models;
  std::unique_ptr<Predictor> predictor;
};

PredictorBundle make_predictor(const std::string& kind, const std::string& ckpt_dir, const std::string& graph,
                               const DesignSpace& space, const Oracle& oracle, RunManifest& m) {
  PredictorBundle b;
  if (kind == "surrogate") {
    b.models = load_models(require(ckpt_dir, "--checkpoints"), space, m);
    b.predictor = std::make_unique<SurrogatePredictor>(b.models[0], b.models[1], b.models[2]);
  } else if (kind == "perfect") {
    SerializationOrder order;
    if (!graph.empty()) {
      m.inputs["graph"] = input_entry(graph);
      order = serialize_space(space, load_core_graph(graph));
    } else {
      order = identity_order(space, 3);
    }
    b.predictor = std::make_unique<PerfectPredictor>(space, oracle, order);
  } else {
    throw InputError("unknown predictor '" + kind + "' (surrogate, perfect)");
  }
  return b;
}

std::vector<std::string> point_header(const DesignSpace& space) {
  std::vector<std::string> h;
  for (const auto& p : space.params()) h.push_back(p.name);
  return h;
}

void point_fields(CsvWriter& w, const DesignSpace& space, const DesignPoint& p) {
  for (std::size_t i = 0; i < space.size(); ++i) w.field(space.param(i).label(p.indices[i]));
}

void objective_fields(CsvWriter& w, const ObjectiveVector& v) {
  w.field(v.ipc).field(v.power).field(v.area);
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string config, space, graph, oracle, out;
  std::uint64_t seed = 1;
  std::size_t samples = 200, holdout = 100, epochs = 300, batch = 8;
  double lr = 1e-3;
};

int cmd_train(const CLI::App& app, const TrainArgs& a, std::ostream& out) {
  Settings s;
  s.load(a.config);
  RunManifest m;
  m.command = "train";
  const auto space_path = require(s.path(app, "--space", a.space, "", "space"), "--space");
  const auto graph_path = require(s.path(app, "--graph", a.graph, "", "graph"), "--graph");
  const auto oracle_arg = require(s.path(app, "--oracle", a.oracle, "", "oracle"), "--oracle");
  const auto seed = s.value(app, "--seed", a.seed, "", "seed");
  const auto samples = s.value(app, "--samples", a.samples, "train", "samples");
  const auto holdout = s.value(app, "--holdout", a.holdout, "train", "holdout");

  SurrogateConfig cfg;
  if (auto j = s.find("train", "surrogate")) cfg = SurrogateConfig::from_json(*j);
  if (app.count("--epochs")) cfg.epochs = a.epochs;
  if (app.count("--batch-size")) cfg.batch_size = a.batch;
  if (app.count("--lr")) cfg.lr = a.lr;
  cfg.seed = seed;
  cfg.validate();
  if (samples < 2) throw InputError("--samples must be at least 2");

  m.inputs["space"] = input_entry(space_path);
  m.inputs["graph"] = input_entry(graph_path);
  const auto space = load_design_space(space_path);
  const auto order = serialize_space(space, load_core_graph(graph_path));
  const SyntheticOracle oracle(space, resolve_oracle(oracle_arg, m));
  m.settings = {{"seed", seed}, {"samples", samples}, {"holdout", holdout}, {"surrogate", cfg.to_json()}};
  m.seal();
  const auto dir = prepare_out(a.out);
  const auto started = std::chrono::steady_clock::now();
  m.extra["started_at"] = utc_now();
  m.extra["status"] = "running";
  write_manifest(dir, m);

  const auto train_pts = random_sample(space, samples, mix_seed(seed, 11));
  const auto hold_pts = random_sample(space, holdout, mix_seed(seed, 12));
  std::vector<ObjectiveVector> train_truth, hold_truth;
  for (const auto& p : train_pts) train_truth.push_back(oracle.evaluate(p));
  for (const auto& p : hold_pts) hold_truth.push_back(oracle.evaluate(p));

  std::vector<SurrogateModel> models(3);
  std::vector<std::vector<TrainingLogRow>> logs(3);
  std::vector<std::exception_ptr> failures(3);
  parallel_for(3, worker_threads(), [&](std::size_t k) {
    try {
      const Objective o = kAllObjectives[k];
      LabeledSet train{train_pts, {}}, hold{hold_pts, {}};
      for (const auto& v : train_truth) train.labels.push_back(objective_value(v, o));
      for (const auto& v : hold_truth) hold.labels.push_back(objective_value(v, o));
      models[k] = SurrogateModel(space, order, cfg, o);
      logs[k] = models[k].train(train, hold.points.empty() ? nullptr : &hold);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  });
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  CsvWriter log({"manifest", "objective", "epoch", "loss", "holdout_mape"});
  nlohmann::json results = nlohmann::json::object();
  for (std::size_t k = 0; k < 3; ++k) {
    const Objective o = kAllObjectives[k];
    const auto path = dir / kCkptNames[k];
    write_checkpoint(path, models[k].to_checkpoint());
    results[std::string(objective_name(o))] = {
        {"checkpoint", kCkptNames[k]},
        {"sha256", sha256_hex(read_file(path))},
        {"final_loss", logs[k].empty() ? 0.0 : logs[k].back().loss}};
    for (const auto& row : logs[k]) {
      log.field(m.id).field(objective_name(o)).field(row.epoch).field(row.loss);
      if (row.holdout_mape) log.field(*row.holdout_mape);
      else log.empty();
      log.end_row();
    }
    out << objective_name(o) << ": final loss " << format_double(results[std::string(objective_name(o))]["final_loss"])
        << (logs[k].empty() || !logs[k].back().holdout_mape
                ? std::string()
                : ", holdout MAPE " + format_double(*logs[k].back().holdout_mape) + "%")
        << "\n";
  }
  write_file_atomic(dir / "training_log.csv", log.str());

  m.extra["results"] = results;
  m.extra["finished_at"] = utc_now();
  m.extra["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  m.extra["status"] = "complete";
  write_manifest(dir, m);
  return kExitOk;
}

// --- explore ---------------------------------------------------------------

struct ExploreArgs {
  std::string config, space, graph, oracle, out, checkpoints, acquisition = "aba", predictor = "surrogate",
                                                              direction_policy = "grow_ipc_shrink_cost";
  std::uint64_t seed = 1;
  std::size_t budget = 300, iterations = 100, initial = 64;
  std::vector<double> reference;
};

std::vector<double> parse_reference(const nlohmann::json& j) {
  try {
    return j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception&) {
    throw InputError("settings: 'reference' must be a list of numbers");
  }
}

int cmd_explore(const CLI::App& app, const ExploreArgs& a, std::ostream& out) {
  Settings s;
  s.load(a.config);
  RunManifest m;
  m.command = "explore";
  const auto space_path = require(s.path(app, "--space", a.space, "", "space"), "--space");
  const auto oracle_arg = require(s.path(app, "--oracle", a.oracle, "", "oracle"), "--oracle");
  const auto graph_path = s.path(app, "--graph", a.graph, "", "graph");
  const auto ckpt_dir = s.path(app, "--checkpoints", a.checkpoints, "explore", "checkpoints");
  const auto predictor_kind = s.value(app, "--predictor", a.predictor, "explore", "predictor");

  ExplorationConfig cfg;
  cfg.seed = s.value(app, "--seed", a.seed, "", "seed");
  cfg.eval_budget = s.value(app, "--budget", a.budget, "explore", "budget");
  cfg.max_iterations = s.value(app, "--iterations", a.iterations, "explore", "max_iterations");
  cfg.initial_samples = s.value(app, "--initial", a.initial, "explore", "initial_samples");
  cfg.acquisition = parse_acquisition(s.value(app, "--acquisition", a.acquisition, "explore", "acquisition"));
  cfg.direction_policy =
      parse_direction_policy(s.value(app, "--direction-policy", a.direction_policy, "explore", "direction_policy"));
  if (app.count("--reference")) cfg.reference = a.reference;
  else if (auto j = s.find("explore", "reference")) cfg.reference = parse_reference(*j);
  if (auto j = s.find("explore", "objectives")) {
    cfg.objectives.clear();
    for (const auto& o : *j) cfg.objectives.push_back(parse_objective(o.get<std::string>()));
  }
  cfg.validate();

  m.inputs["space"] = input_entry(space_path);
  const auto space = load_design_space(space_path);
  const SyntheticOracle oracle(space, resolve_oracle(oracle_arg, m));
  auto bundle = make_predictor(predictor_kind, ckpt_dir, graph_path, space, oracle, m);
  m.settings = cfg.to_json();
  m.settings["predictor"] = predictor_kind;
  m.seal();
  const auto dir = prepare_out(a.out);
  const auto started = std::chrono::steady_clock::now();
  m.extra["started_at"] = utc_now();
  m.extra["status"] = "running";
  write_manifest(dir, m);

  const auto r = run_exploration(space, *bundle.predictor, oracle, cfg);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  const auto names = point_header(space);
  // Front: the final set with predicted and oracle objectives.
  CsvWriter front(concat(concat({"manifest", "point"}, names),
                         {"pred_ipc", "pred_power", "pred_area", "ipc", "power", "area", "verified"}));
  const auto preds = bundle.predictor->predict([&] {
    std::vector<DesignPoint> pts;
    for (const auto& mem : r.predicted_front.sorted_members()) pts.push_back(mem.point);
    return pts;
  }());
  std::size_t k = 0;
  for (const auto& mem : r.predicted_front.sorted_members()) {
    front.field(m.id).field(mem.point.key());
    point_fields(front, space, mem.point);
    objective_fields(front, preds[k++]);
    objective_fields(front, r.final_scores.at(mem.point));
    front.field(r.verified.count(mem.point) ? 1 : 0);
    front.end_row();
  }
  write_file_atomic(dir / "front.csv", front.str());

  CsvWriter trace({"manifest", "iteration", "objective", "parent", "parameter", "direction", "rank", "fallback",
                   "at_boundary", "candidate", "pred_ipc", "pred_power", "pred_area", "accepted", "ipc", "power",
                   "area"});
  std::map<std::size_t, std::optional<Objective>> it_objective;
  for (const auto& it : r.iterations) it_objective[it.iteration] = it.objective;
  for (const auto& c : r.candidates) {
    trace.field(m.id).field(c.iteration);
    if (auto o = it_objective[c.iteration]) trace.field(objective_name(*o));
    else trace.empty();
    trace.field(c.parent);
    if (c.parameter) trace.field(space.param(*c.parameter).name);
    else trace.empty();
    trace.field(c.direction).field(c.rank).field(c.fallback ? 1 : 0).field(c.at_boundary ? 1 : 0).field(c.candidate);
    if (c.at_boundary) trace.empty().empty().empty();
    else objective_fields(trace, c.predicted);
    trace.field(c.accepted ? 1 : 0);
    if (c.measured) objective_fields(trace, *c.measured);
    else trace.empty().empty().empty();
    trace.end_row();
  }
  write_file_atomic(dir / "trace.csv", trace.str());

  CsvWriter curve({"manifest", "iteration", "phv", "evaluations", "objective", "queue_size", "front_size"});
  for (const auto& it : r.iterations) {
    curve.field(m.id).field(it.iteration).field(it.phv).field(it.evaluations);
    if (it.objective) curve.field(objective_name(*it.objective));
    else curve.empty();
    curve.field(it.queue_size).field(it.front_size).end_row();
  }
  write_file_atomic(dir / "phv_curve.csv", curve.str());

  std::vector<std::vector<double>> final_objs;
  for (const auto& [p, v] : r.final_scores) final_objs.push_back(project(v, cfg.objectives));
  const double final_front_phv = hypervolume_clipped(final_objs, r.reference, orientation_for(cfg.objectives));
  m.extra["results"] = {{"reference", r.reference},
                        {"phv", r.iterations.back().phv},
                        {"final_front_phv", final_front_phv},
                        {"iterations", r.iterations.back().iteration},
                        {"iterations_to_99", iterations_to_fraction(r.iterations)},
                        {"evaluations", r.evaluations},
                        {"reporting_calls", r.reporting_calls},
                        {"front_size", r.predicted_front.size()},
                        {"truncated", r.truncated},
                        {"stop_reason", r.stop_reason}};
  m.extra["finished_at"] = utc_now();
  m.extra["wall_time_s"] = wall;
  m.extra["status"] = "complete";
  write_manifest(dir, m);
  out << acquisition_name(cfg.acquisition) << ": PHV " << format_double(r.iterations.back().phv) << " after "
      << r.iterations.back().iteration << " iterations, " << r.evaluations << " oracle calls (" << r.stop_reason
      << ")\n";
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string config, space, graph, oracle, out, checkpoints, predictor = "surrogate";
  std::uint64_t seed = 1;
  std::size_t n = 500;
};

struct FitStats {
  double mape = 0.0, mse = 0.0, r2 = 0.0;
};

FitStats fit_stats(const std::vector<double>& pred, const std::vector<double>& truth) {
  FitStats f;
  f.mape = mape(pred, truth);
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  f.mse = ss_res / static_cast<double>(truth.size());
  f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return f;
}

int cmd_eval(const CLI::App& app, const EvalArgs& a, std::ostream& out) {
  Settings s;
  s.load(a.config);
  RunManifest m;
  m.command = "eval";
  const auto space_path = require(s.path(app, "--space", a.space, "", "space"), "--space");
  const auto oracle_arg = require(s.path(app, "--oracle", a.oracle, "", "oracle"), "--oracle");
  const auto graph_path = s.path(app, "--graph", a.graph, "", "graph");
  const auto ckpt_dir = s.path(app, "--checkpoints", a.checkpoints, "eval", "checkpoints");
  const auto predictor_kind = s.value(app, "--predictor", a.predictor, "eval", "predictor");
  const auto seed = s.value(app, "--seed", a.seed, "", "seed");
  const auto n = s.value(app, "--n", a.n, "eval", "n");
  if (n == 0) throw InputError("--n must be at least 1");

  m.inputs["space"] = input_entry(space_path);
  const auto space = load_design_space(space_path);
  const SyntheticOracle oracle(space, resolve_oracle(oracle_arg, m));
  auto bundle = make_predictor(predictor_kind, ckpt_dir, graph_path, space, oracle, m);
  m.settings = {{"seed", seed}, {"n", n}, {"predictor", predictor_kind}};
  m.seal();
  const auto dir = prepare_out(a.out);
  m.extra["started_at"] = utc_now();
  m.extra["status"] = "running";
  write_manifest(dir, m);

  const auto pts = random_sample(space, n, mix_seed(seed, 21));
  const auto preds = bundle.predictor->predict(pts);
  std::vector<ObjectiveVector> truth;
  for (const auto& p : pts) truth.push_back(oracle.evaluate(p));

  CsvWriter dump(concat(concat({"manifest", "point"}, point_header(space)),
                        {"ipc", "power", "area", "pred_ipc", "pred_power", "pred_area"}));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    dump.field(m.id).field(pts[i].key());
    point_fields(dump, space, pts[i]);
    objective_fields(dump, truth[i]);
    objective_fields(dump, preds[i]);
    dump.end_row();
  }
  write_file_atomic(dir / "predictions.csv", dump.str());

  CsvWriter report({"manifest", "objective", "n", "mape", "mse", "r2"});
  nlohmann::json results = nlohmann::json::object();
  for (Objective o : kAllObjectives) {
    std::vector<double> p, t;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      p.push_back(objective_value(preds[i], o));
      t.push_back(objective_value(truth[i], o));
    }
    const auto f = fit_stats(p, t);
    report.field(m.id).field(objective_name(o)).field(n).field(f.mape).field(f.mse).field(f.r2).end_row();
    results[std::string(objective_name(o))] = {{"mape", f.mape}, {"mse", f.mse}, {"r2", f.r2}};
    out << objective_name(o) << ": MAPE " << format_double(f.mape) << "%, MSE " << format_double(f.mse) << ", R2 "
        << format_double(f.r2) << "\n";
  }
  write_file_atomic(dir / "eval.csv", report.str());
  m.extra["results"] = results;
  m.extra["finished_at"] = utc_now();
  m.extra["status"] = "complete";
  write_manifest(dir, m);
  return kExitOk;
}

// --- report ----------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> runs;
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (a.runs.empty()) throw InputError("report: at least one run directory");
  RunManifest m;
  m.command = "report";
  struct Row {
    std::string run, id, acquisition;
    std::uint64_t seed = 0;
    double phv = 0.0, wall = 0.0;
    std::size_t iterations = 0, to99 = 0, evaluations = 0;
  };
  std::vector<Row> rows;
  std::optional<std::vector<double>> reference;
  std::string reference_run;
  for (const auto& run : a.runs) {
    const auto rm = read_manifest(run);
    if (rm.command != "explore") throw InputError(run + ": not an explore run");
    if (rm.extra.value("status", std::string()) != "complete") throw InputError(run + ": run did not complete");
    std::vector<double> ref;
    try {
      ref = rm.extra.at("results").at("reference").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw InputError(run + ": manifest lacks a reference point");
    }
    if (!reference) {
      reference = ref;
      reference_run = run;
    } else if (ref != *reference) {
      throw CompatibilityError("reference points differ between " + reference_run + " and " + run);
    }
    const auto curve_path = fs::path(run) / "phv_curve.csv";
    const auto csv = parse_csv(read_file(curve_path));
    if (csv.size() < 2) throw InputError(curve_path.string() + ": empty PHV curve");
    const auto& header = csv[0];
    const auto col = [&](const std::string& name) {
      const auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw InputError(curve_path.string() + ": missing column '" + name + "'");
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_it = col("iteration"), c_phv = col("phv"), c_ev = col("evaluations"), c_man = col("manifest");
    std::vector<IterationRecord> curve;
    for (std::size_t i = 1; i < csv.size(); ++i) {
      if (csv[i].size() != header.size()) throw InputError(curve_path.string() + ": ragged row");
      if (csv[i][c_man] != rm.id) throw InputError(curve_path.string() + ": row from another manifest");
      IterationRecord rec;
      try {
        rec.iteration = std::stoul(csv[i][c_it]);
        rec.phv = std::stod(csv[i][c_phv]);
        rec.evaluations = std::stoul(csv[i][c_ev]);
      } catch (const std::exception&) {
        throw InputError(curve_path.string() + ": malformed number");
      }
      curve.push_back(rec);
    }
    Row row;
    row.run = fs::path(run).lexically_normal().filename().string();
    if (row.run.empty()) row.run = fs::path(run).lexically_normal().parent_path().filename().string();
    row.id = rm.id;
    row.acquisition = rm.settings.value("acquisition", std::string());
    row.seed = rm.settings.value("seed", std::uint64_t{0});
    row.phv = curve.back().phv;
    row.iterations = curve.back().iteration;
    row.to99 = iterations_to_fraction(curve);
    row.evaluations = curve.back().evaluations;
    row.wall = rm.extra.value("wall_time_s", 0.0);
    rows.push_back(row);
    m.inputs[row.run] = {{"path", run}, {"manifest", rm.id}, {"sha256", sha256_hex(read_file(curve_path))}};
  }
  m.settings = {{"runs", rows.size()}};
  m.seal();
  const auto dir = prepare_out(a.out);
  m.extra["started_at"] = utc_now();
  m.extra["status"] = "running";
  write_manifest(dir, m);

  CsvWriter report({"manifest", "run", "run_manifest", "acquisition", "seed", "phv", "iterations",
                    "iterations_to_99", "evaluations", "wall_time_s"});
  for (const auto& row : rows) {
    report.field(m.id).field(row.run).field(row.id).field(row.acquisition).field(static_cast<long long>(row.seed));
    report.field(row.phv).field(row.iterations).field(row.to99).field(row.evaluations).field(row.wall).end_row();
    out << row.run << ": " << row.acquisition << " PHV " << format_double(row.phv) << ", 99% at iteration "
        << row.to99 << "\n";
  }
  write_file_atomic(dir / "report.csv", report.str());
  m.extra["reference"] = *reference;
  m.extra["finished_at"] = utc_now();
  m.extra["status"] = "complete";
  write_manifest(dir, m);
  return kExitOk;
}

// --- oracle eval -------------------------------------------------------------

struct OracleArgs {
  std::string config, space, oracle, out, points;
  std::uint64_t seed = 1;
  std::size_t n = 10;
};

std::vector<DesignPoint> read_points(const std::string& path, const DesignSpace& space) {
  const auto csv = parse_csv(read_file(path));
  std::vector<DesignPoint> pts;
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const auto& row = csv[i];
    if (row.empty() || (row.size() == 1 && row[0].empty())) continue;
    if (i == 0 && !row.empty() && !row[0].empty() && !std::isdigit(static_cast<unsigned char>(row[0][0])))
      continue;  // header
    if (row.size() != space.size())
      throw InputError(path + ": row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                       " indices, space has " + std::to_string(space.size()));
    DesignPoint p;
    for (const auto& f : row) {
      try {
        std::size_t used = 0;
        const auto v = std::stoul(f, &used);
        if (used != f.size()) throw std::invalid_argument(f);
        p.indices.push_back(static_cast<std::uint32_t>(v));
      } catch (const std::exception&) {
        throw InputError(path + ": row " + std::to_string(i + 1) + ": bad index '" + f + "'");
      }
    }
    space.validate(p);
    pts.push_back(std::move(p));
  }
  return pts;
}

int cmd_oracle_eval(const CLI::App& app, const OracleArgs& a, std::ostream& out) {
  Settings s;
  s.load(a.config);
  RunManifest m;
  m.command = "oracle eval";
  const auto space_path = require(s.path(app, "--space", a.space, "", "space"), "--space");
  const auto oracle_arg = require(s.path(app, "--oracle", a.oracle, "", "oracle"), "--oracle");
  const auto seed = s.value(app, "--seed", a.seed, "", "seed");
  const auto n = s.value(app, "--n", a.n, "oracle", "n");
  m.inputs["space"] = input_entry(space_path);
  const auto space = load_design_space(space_path);
  const SyntheticOracle oracle(space, resolve_oracle(oracle_arg, m));
  std::vector<DesignPoint> pts;
  if (!a.points.empty()) {
    m.inputs["points"] = input_entry(a.points);
    pts = read_points(a.points, space);
    m.settings = {{"points", "file"}};
  } else {
    pts = random_sample(space, n, mix_seed(seed, 31));
    m.settings = {{"seed", seed}, {"n", n}};
  }
  m.seal();
  const auto dir = prepare_out(a.out);
  m.extra["started_at"] = utc_now();
  m.extra["status"] = "running";
  write_manifest(dir, m);

  std::vector<std::string> idx_cols;
  for (const auto& p : space.params()) idx_cols.push_back(p.name);
  CsvWriter csv(concat(concat({"manifest"}, idx_cols), {"ipc", "power", "area", "binding"}));
  for (const auto& p : pts) {
    const auto b = oracle.breakdown(p);
    csv.field(m.id);
    for (auto i : p.indices) csv.field(static_cast<std::size_t>(i));
    objective_fields(csv, b.objectives);
    csv.field(resource_group_name(b.binding)).end_row();
  }
  write_file_atomic(dir / "oracle.csv", csv.str());
  m.extra["finished_at"] = utc_now();
  m.extra["status"] = "complete";
  write_manifest(dir, m);
  out << pts.size() << " points evaluated\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attention-guided design space exploration on a synthetic core model", "attn_dse"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ATTNDSE_GIT_DESCRIBE));

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train the IPC, power and area surrogates");
  train->add_option("--config", ta.config, "Settings JSON (flags take precedence)");
  train->add_option("--space", ta.space, "Design space JSON");
  train->add_option("--graph", ta.graph, "Perceptual graph JSON");
  train->add_option("--oracle", ta.oracle, "Oracle workload JSON or built-in name");
  train->add_option("--seed", ta.seed, "Seed");
  train->add_option("--samples", ta.samples, "Labelled training points");
  train->add_option("--holdout", ta.holdout, "Held-out points for the MAPE column (0 disables)");
  train->add_option("--epochs", ta.epochs, "Training epochs");
  train->add_option("--batch-size", ta.batch, "Minibatch size");
  train->add_option("--lr", ta.lr, "Adam learning rate");
  train->add_option("--out", ta.out, "Output directory");

  ExploreArgs ea;
  auto* explore_cmd = app.add_subcommand("explore", "Search the design space for the Pareto front");
  explore_cmd->add_option("--config", ea.config, "Settings JSON (flags take precedence)");
  explore_cmd->add_option("--space", ea.space, "Design space JSON");
  explore_cmd->add_option("--graph", ea.graph, "Perceptual graph JSON (perfect predictor only)");
  explore_cmd->add_option("--oracle", ea.oracle, "Oracle workload JSON or built-in name");
  explore_cmd->add_option("--checkpoints", ea.checkpoints, "Directory written by train");
  explore_cmd->add_option("--predictor", ea.predictor, "surrogate or perfect");
  explore_cmd->add_option("--acquisition", ea.acquisition, "aba or random");
  explore_cmd->add_option("--direction-policy", ea.direction_policy, "grow_ipc_shrink_cost or always_grow");
  explore_cmd->add_option("--seed", ea.seed, "Seed");
  explore_cmd->add_option("--budget", ea.budget, "Oracle calls");
  explore_cmd->add_option("--iterations", ea.iterations, "Maximum iterations");
  explore_cmd->add_option("--initial", ea.initial, "Initial random sample size");
  explore_cmd->add_option("--reference", ea.reference, "Reference point (ipc power area)")->expected(3);
  explore_cmd->add_option("--out", ea.out, "Output directory");

  EvalArgs va;
  auto* eval = app.add_subcommand("eval", "Score the surrogates against the oracle");
  eval->add_option("--config", va.config, "Settings JSON (flags take precedence)");
  eval->add_option("--space", va.space, "Design space JSON");
  eval->add_option("--graph", va.graph, "Perceptual graph JSON (perfect predictor only)");
  eval->add_option("--oracle", va.oracle, "Oracle workload JSON or built-in name");
  eval->add_option("--checkpoints", va.checkpoints, "Directory written by train");
  eval->add_option("--predictor", va.predictor, "surrogate or perfect");
  eval->add_option("--seed", va.seed, "Seed");
  eval->add_option("--n", va.n, "Test points");
  eval->add_option("--out", va.out, "Output directory");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "Merge explore runs into one comparison table");
  report->add_option("runs", ra.runs, "Explore output directories")->required();
  report->add_option("--out", ra.out, "Output directory")->required();

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand("oracle", "Query the synthetic oracle");
  oracle_cmd->require_subcommand(1);
  auto* oracle_eval = oracle_cmd->add_subcommand("eval", "Evaluate design points");
  oracle_eval->add_option("--config", oa.config, "Settings JSON (flags take precedence)");
  oracle_eval->add_option("--space", oa.space, "Design space JSON");
  oracle_eval->add_option("--oracle", oa.oracle, "Oracle workload JSON or built-in name");
  oracle_eval->add_option("--points", oa.points, "CSV of candidate indices, one point per row");
  oracle_eval->add_option("--seed", oa.seed, "Seed for random points");
  oracle_eval->add_option("--n", oa.n, "Random points when --points is absent");
  oracle_eval->add_option("--out", oa.out, "Output directory");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*train) return cmd_train(*train, ta, out);
    if (*explore_cmd) return cmd_explore(*explore_cmd, ea, out);
    if (*eval) return cmd_eval(*eval, va, out);
    if (*report) return cmd_report(ra, out);
    if (*oracle_eval) return cmd_oracle_eval(*oracle_eval, oa, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const CompatibilityError& e) {
    err << "compatibility error: " << e.what() << "\n";
    return kExitCompatibility;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace adse
