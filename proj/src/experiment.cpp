#include "spmtl/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "spmtl/rng.hpp"

namespace spmtl {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

std::string join(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                [&](const char* a) { return it.key() == a; });
    if (!ok) fail(join(where, it.key()), "unknown key");
  }
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  const auto x = v.get<long long>();
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
    fail(where, "integer out of range");
  }
  return static_cast<int>(x);
}

std::string as_string(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected true or false");
  return v.get<bool>();
}

TauRule parse_tau_rule(const std::string& s, const std::string& where) {
  if (s == "hard") return TauRule::Hard;
  if (s == "entropy") return TauRule::Entropy;
  fail(where, "expected \"hard\" or \"entropy\"");
}

ParameterList parse_parameters(const json& obj, const std::string& where,
                               std::initializer_list<const char*> skip = {}) {
  if (!obj.is_object()) fail(where, "expected an object");
  ParameterList out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::any_of(skip.begin(), skip.end(), [&](const char* k) { return it.key() == k; })) {
      continue;
    }
    out.emplace_back(it.key(), as_number(it.value(), join(where, it.key())));
  }
  return out;
}

DatasetConfig parse_dataset(const json& j, const fs::path& base_dir) {
  const std::string where = "dataset";
  if (!j.is_object()) fail(where, "expected an object");
  if (!j.contains("generator")) fail(join(where, "generator"), "missing");
  const std::string gen = as_string(j.at("generator"), join(where, "generator"));
  DatasetConfig ds;
  if (gen == "csv") {
    ds.source = DatasetConfig::Source::Csv;
    check_keys(j, where, {"generator", "path", "schema"});
    if (!j.contains("path")) fail(join(where, "path"), "missing");
    fs::path p = as_string(j.at("path"), join(where, "path"));
    ds.path = p.is_absolute() ? p : base_dir / p;
    if (!j.contains("schema")) fail(join(where, "schema"), "missing");
    const json& s = j.at("schema");
    const std::string sw = join(where, "schema");
    check_keys(s, sw, {"task_column", "target_column", "kind", "categorical_columns", "add_bias"});
    if (s.contains("task_column")) {
      ds.schema.task_column = as_string(s.at("task_column"), join(sw, "task_column"));
    }
    if (s.contains("target_column")) {
      ds.schema.target_column = as_string(s.at("target_column"), join(sw, "target_column"));
    }
    if (s.contains("kind")) {
      const std::string k = as_string(s.at("kind"), join(sw, "kind"));
      if (k == "regression") {
        ds.schema.kind = TaskKind::Regression;
      } else if (k == "classification") {
        ds.schema.kind = TaskKind::BinaryClassification;
      } else {
        fail(join(sw, "kind"), "expected \"regression\" or \"classification\"");
      }
    }
    if (s.contains("categorical_columns")) {
      const json& c = s.at("categorical_columns");
      if (!c.is_array()) fail(join(sw, "categorical_columns"), "expected an array");
      for (std::size_t i = 0; i < c.size(); ++i) {
        ds.schema.categorical_columns.push_back(
            as_string(c[i], join(sw, "categorical_columns[" + std::to_string(i) + "]")));
      }
    }
    if (s.contains("add_bias")) ds.schema.add_bias = as_bool(s.at("add_bias"), join(sw, "add_bias"));
    return ds;
  }
  if (gen == "syn1") {
    ds.source = DatasetConfig::Source::Syn1;
    ds.syn = SynConfig::syn1(0);
    check_keys(j, where,
               {"generator", "n_tasks", "n_per_task", "n_test_per_task", "d", "n_groups",
                "group_rank", "sigma_easy", "sigma_hard", "hard_fraction"});
  } else if (gen == "syn2") {
    ds.source = DatasetConfig::Source::Syn2;
    ds.syn = SynConfig::syn2(0);
    check_keys(j, where, {"generator", "n_tasks", "n_per_task", "n_test_per_task", "d", "sigma"});
  } else {
    fail(join(where, "generator"), "expected \"syn1\", \"syn2\" or \"csv\"");
  }
  SynConfig& c = ds.syn;
  auto i = [&](const char* key, int& dst) {
    if (j.contains(key)) dst = as_int(j.at(key), join(where, key));
  };
  auto x = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = as_number(j.at(key), join(where, key));
  };
  i("n_tasks", c.n_tasks);
  i("n_per_task", c.n_per_task);
  i("n_test_per_task", c.n_test_per_task);
  i("d", c.d);
  i("n_groups", c.n_groups);
  i("group_rank", c.group_rank);
  x("sigma_easy", c.sigma_easy);
  x("sigma_hard", c.sigma_hard);
  x("hard_fraction", c.hard_fraction);
  x("sigma", c.sigma);
  return ds;
}

bool is_synthetic(const DatasetConfig& ds) { return ds.source != DatasetConfig::Source::Csv; }

Index known_dim(const RunConfig& cfg) {
  return is_synthetic(cfg.dataset) ? static_cast<Index>(cfg.dataset.syn.d) : Index{0};
}

std::string what_of(const std::exception& e) { return e.what(); }

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, "", {"dataset", "algorithms", "pacing", "split", "cv", "seed", "output_dir",
                     "trajectory_algorithm", "jobs"});
  RunConfig cfg;
  if (!j.contains("dataset")) fail("dataset", "missing");
  cfg.dataset = parse_dataset(j.at("dataset"), base_dir);

  if (!j.contains("algorithms")) fail("algorithms", "missing");
  const json& algs = j.at("algorithms");
  if (!algs.is_array()) fail("algorithms", "expected an array");
  for (std::size_t i = 0; i < algs.size(); ++i) {
    const std::string where = "algorithms[" + std::to_string(i) + "]";
    AlgorithmEntry entry;
    if (algs[i].is_string()) {
      entry.name = algs[i].get<std::string>();
    } else if (algs[i].is_object()) {
      if (!algs[i].contains("name")) fail(join(where, "name"), "missing");
      entry.name = as_string(algs[i].at("name"), join(where, "name"));
      if (algs[i].contains("tau_rule")) {
        entry.tau_rule = parse_tau_rule(as_string(algs[i].at("tau_rule"), join(where, "tau_rule")),
                                        join(where, "tau_rule"));
      }
      entry.parameters = parse_parameters(algs[i], where, {"name", "tau_rule"});
    } else {
      fail(where, "expected an algorithm name or object");
    }
    cfg.algorithms.push_back(std::move(entry));
  }

  if (j.contains("pacing")) cfg.defaults = parse_parameters(j.at("pacing"), "pacing");

  if (j.contains("split")) {
    const json& s = j.at("split");
    check_keys(s, "split", {"train_fraction", "train_count", "stratified", "n_repeats"});
    if (s.contains("train_fraction")) {
      cfg.split.train_fraction = as_number(s.at("train_fraction"), "split.train_fraction");
    }
    if (s.contains("train_count")) {
      cfg.split.train_count = as_int(s.at("train_count"), "split.train_count");
    }
    if (s.contains("stratified")) cfg.split.stratified = as_bool(s.at("stratified"), "split.stratified");
    if (s.contains("n_repeats")) cfg.split.n_repeats = as_int(s.at("n_repeats"), "split.n_repeats");
  }
  if (is_synthetic(cfg.dataset) && !cfg.split.train_fraction && !cfg.split.train_count) {
    cfg.split.train_count = cfg.dataset.syn.n_per_task;
  }

  if (j.contains("cv")) {
    const json& c = j.at("cv");
    check_keys(c, "cv", {"k", "grid"});
    CvConfig cv;
    if (c.contains("k")) cv.k = as_int(c.at("k"), "cv.k");
    if (c.contains("grid")) {
      const json& g = c.at("grid");
      if (!g.is_object()) fail("cv.grid", "expected an object");
      Grid grid;
      for (auto it = g.begin(); it != g.end(); ++it) {
        const std::string where = join("cv.grid", it.key());
        if (!it.value().is_array()) fail(where, "expected an array of numbers");
        GridAxis axis{it.key(), {}};
        for (std::size_t i = 0; i < it.value().size(); ++i) {
          axis.values.push_back(as_number(it.value()[i], where + "[" + std::to_string(i) + "]"));
        }
        grid.push_back(std::move(axis));
      }
      cv.grid = std::move(grid);
    }
    cfg.cv = std::move(cv);
  }

  if (j.contains("seed")) {
    const json& s = j.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0)) {
      fail("seed", "expected a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (j.contains("output_dir")) cfg.output_dir = as_string(j.at("output_dir"), "output_dir");
  if (j.contains("trajectory_algorithm")) {
    cfg.trajectory_algorithm = as_string(j.at("trajectory_algorithm"), "trajectory_algorithm");
  }
  if (j.contains("jobs")) cfg.jobs = as_int(j.at("jobs"), "jobs");
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return parse_run_config(buf.str(), dir);
}

Grid default_grid(const Method& method, Index d) {
  Grid g;
  g.push_back({"gamma", {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0}});
  if (parameter_applies(method, "lambda0_scale")) {
    g.push_back({"lambda0_scale", {1e-2, 1e-1, 1.0, 10.0, 100.0}});
  }
  if (parameter_applies(method, "h") && d > 0) {
    GridAxis axis{"h", {}};
    const double dd = static_cast<double>(d);
    for (double v : {2.0, std::ceil(dd / 4.0), std::ceil(dd / 2.0)}) {
      v = std::clamp(v, 1.0, dd);
      if (std::find(axis.values.begin(), axis.values.end(), v) == axis.values.end()) {
        axis.values.push_back(v);
      }
    }
    g.push_back(std::move(axis));
  }
  return g;
}

Method resolve_method(const RunConfig& cfg, const AlgorithmEntry& entry, Index d) {
  Method m = method_by_name(entry.name);
  for (const auto& [name, value] : cfg.defaults) apply_parameter(m, name, value);
  for (const auto& [name, value] : entry.parameters) apply_parameter(m, name, value);
  if (entry.tau_rule) m.spec.tau_rule = *entry.tau_rule;
  if (m.kind == MethodKind::MTL && m.spec.variant == Variant::MTASO && !m.spec.pacing.h && d > 0) {
    m.spec.pacing.h = static_cast<int>(std::ceil(static_cast<double>(d) / 4.0));
  }
  return m;
}

std::vector<std::string> validate_config(const RunConfig& cfg) {
  std::vector<std::string> out;
  const Index d = known_dim(cfg);
  const DatasetConfig& ds = cfg.dataset;

  if (is_synthetic(ds)) {
    try {
      check_invariants(ds.syn, ds.source == DatasetConfig::Source::Syn2);
    } catch (const std::exception& e) {
      out.push_back("dataset: " + what_of(e));
    }
  } else {
    if (ds.path.empty()) {
      out.push_back("dataset.path: missing");
    } else if (!fs::is_regular_file(ds.path)) {
      out.push_back("dataset.path: file not found: " + ds.path.string());
    }
    if (ds.schema.task_column.empty()) out.push_back("dataset.schema.task_column: missing");
    if (ds.schema.target_column.empty()) out.push_back("dataset.schema.target_column: missing");
  }

  for (const auto& [name, value] : cfg.defaults) {
    if (!is_known_parameter(name)) out.push_back("pacing." + name + ": unknown parameter");
  }

  if (cfg.algorithms.empty()) out.push_back("algorithms: at least one algorithm is required");
  std::set<std::string> seen;
  const auto known = known_method_names();
  for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
    const AlgorithmEntry& entry = cfg.algorithms[i];
    const std::string where = "algorithms[" + std::to_string(i) + "]";
    if (std::find(known.begin(), known.end(), entry.name) == known.end()) {
      out.push_back(where + ": unknown algorithm '" + entry.name + "'");
      continue;
    }
    if (!seen.insert(entry.name).second) {
      out.push_back(where + ": algorithm '" + entry.name + "' listed twice");
    }
    bool params_ok = true;
    for (const auto& [name, value] : entry.parameters) {
      if (!is_known_parameter(name)) {
        out.push_back(where + "." + name + ": unknown parameter");
        params_ok = false;
      }
    }
    if (!params_ok) continue;
    try {
      const Method m = resolve_method(cfg, entry, d);
      check_invariants(m.spec.pacing);
      if (m.kind == MethodKind::MTL && d > 0) validate(m.spec, d);
    } catch (const std::exception& e) {
      out.push_back(where + " (" + entry.name + "): " + what_of(e));
    }
  }

  const SplitSpec& s = cfg.split;
  if (s.train_fraction.has_value() == s.train_count.has_value()) {
    out.push_back("split: exactly one of train_fraction and train_count must be set");
  }
  if (s.train_fraction && !(*s.train_fraction > 0.0 && *s.train_fraction < 1.0)) {
    out.push_back("split.train_fraction: must lie in (0, 1)");
  }
  if (s.train_count && *s.train_count < 1) out.push_back("split.train_count: must be at least 1");
  if (s.train_count && is_synthetic(ds) &&
      *s.train_count >= ds.syn.n_per_task + ds.syn.n_test_per_task) {
    out.push_back("split.train_count: leaves no test rows (n_per_task + n_test_per_task = " +
                  std::to_string(ds.syn.n_per_task + ds.syn.n_test_per_task) + ")");
  }
  if (s.n_repeats < 1) out.push_back("split.n_repeats: must be at least 1");
  if (s.stratified &&
      (is_synthetic(ds) || ds.schema.kind != TaskKind::BinaryClassification)) {
    out.push_back("split.stratified: needs a classification dataset");
  }

  if (cfg.cv) {
    if (cfg.cv->k < 2) out.push_back("cv.k: must be at least 2");
    if (s.train_count && cfg.cv->k > *s.train_count) {
      out.push_back("cv.k: larger than split.train_count");
    }
    if (cfg.cv->grid) {
      if (cfg.cv->grid->empty()) out.push_back("cv.grid: no parameters");
      for (const GridAxis& axis : *cfg.cv->grid) {
        const std::string where = "cv.grid." + axis.name;
        if (!is_known_parameter(axis.name)) {
          out.push_back(where + ": unknown parameter");
          continue;
        }
        if (axis.values.empty()) out.push_back(where + ": no values");
        for (double v : axis.values) {
          Method probe = method_by_name("spMTFL");
          try {
            apply_parameter(probe, axis.name, v);
            check_invariants(probe.spec.pacing);
          } catch (const std::exception& e) {
            out.push_back(where + " = " + format_number(v) + ": " + what_of(e));
          }
        }
      }
    }
  }

  if (cfg.jobs < 1) out.push_back("jobs: must be at least 1");
  if (cfg.output_dir.empty()) out.push_back("output_dir: empty");
  if (cfg.trajectory_algorithm) {
    const auto& t = *cfg.trajectory_algorithm;
    const bool listed = std::any_of(cfg.algorithms.begin(), cfg.algorithms.end(),
                                    [&](const AlgorithmEntry& e) { return e.name == t; });
    if (!listed) {
      out.push_back("trajectory_algorithm: '" + t + "' is not in algorithms");
    } else if (!baseline_of(t)) {
      out.push_back("trajectory_algorithm: '" + t + "' is not a self-paced algorithm");
    }
  }
  return out;
}

namespace {

RepeatOutcome run_repeat(const RunConfig& cfg, const MultitaskDataset* csv,
                         const SplitSpec& split_spec, int r, Execution exec) {
  const auto rep = static_cast<std::uint64_t>(r);
  std::optional<MultitaskDataset> generated;
  if (!csv) {
    SynConfig syn = cfg.dataset.syn;
    syn.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::kData), rep});
    generated = cfg.dataset.source == DatasetConfig::Source::Syn1 ? generate_syn1(syn).data
                                                                  : generate_syn2(syn).data;
  }
  const MultitaskDataset& data = csv ? *csv : *generated;
  const DataSplit ds = split_once(data, split_spec, r);

  RepeatOutcome out;
  out.metric = metric_for(ds.train);
  for (const auto& task : data.tasks()) out.task_ids.push_back(task.task_id);
  const Index d = data.dim();
  const std::uint64_t cv_seed =
      derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::kCrossValidation), rep});

  for (const AlgorithmEntry& entry : cfg.algorithms) {
    Method m = resolve_method(cfg, entry, d);
    m.spec.execution = exec;
    m.spec.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::kInit), rep});
    AlgorithmOutcome o;
    if (cfg.cv) {
      Grid grid;
      if (cfg.cv->grid) {
        for (const GridAxis& axis : *cfg.cv->grid) {
          if (parameter_applies(m, axis.name)) grid.push_back(axis);
        }
      } else {
        grid = default_grid(m, d);
      }
      if (!grid.empty()) {
        CrossValidationResult cvr = cross_validate(ds.train, m, grid, cfg.cv->k, cv_seed);
        const auto& values = cvr.scores[cvr.best_index].values;
        for (std::size_t a = 0; a < grid.size(); ++a) o.selected.emplace_back(grid[a].name, values[a]);
        o.warnings = std::move(cvr.warnings);
        m = std::move(cvr.best);
      }
    }
    const FitResult fitted = fit_method(ds.train, m);
    o.metric = evaluate(fitted.W, ds.test, out.metric);
    if (fitted.report) {
      o.tau_history = fitted.report->tau_history;
      o.lambda_schedule = fitted.report->lambda_schedule();
      o.iterations = fitted.report->iterations_run;
      o.converged = fitted.report->converged;
    }
    out.algorithms.push_back(std::move(o));
  }
  return out;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg) {
  const auto findings = validate_config(cfg);
  if (!findings.empty()) {
    std::string msg = findings.front();
    if (findings.size() > 1) msg += " (and " + std::to_string(findings.size() - 1) + " more)";
    throw ConfigError(msg);
  }
  std::optional<MultitaskDataset> csv;
  if (!is_synthetic(cfg.dataset)) csv = load_csv_dataset(cfg.dataset.path, cfg.dataset.schema);

  SplitSpec split_spec = cfg.split;
  split_spec.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(Stream::kSplit)});
  const int R = cfg.split.n_repeats;
  const Execution exec = cfg.jobs > 1 ? Execution::Serial : Execution::Parallel;

  std::vector<RepeatOutcome> repeats(static_cast<std::size_t>(R));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(R));
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic, 1)
  for (int r = 0; r < R; ++r) {
    try {
      repeats[static_cast<std::size_t>(r)] =
          run_repeat(cfg, csv ? &*csv : nullptr, split_spec, r, exec);
    } catch (...) {
      errors[static_cast<std::size_t>(r)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ExperimentResult result;
  result.metric = repeats.front().metric;
  result.task_ids = repeats.front().task_ids;
  for (const auto& entry : cfg.algorithms) result.algorithm_names.push_back(entry.name);
  result.repeats = std::move(repeats);

  const std::size_t A = cfg.algorithms.size();
  for (std::size_t a = 0; a < A; ++a) {
    std::vector<Vector> per_run;
    for (const auto& rep : result.repeats) per_run.push_back(rep.algorithms[a].metric);
    AlgorithmSummary s;
    s.name = result.algorithm_names[a];
    s.summary = aggregate_runs(per_run, result.metric);
    s.p_value = std::numeric_limits<double>::quiet_NaN();
    result.summaries.push_back(std::move(s));
  }
  for (auto& s : result.summaries) {
    const auto base = baseline_of(s.name);
    if (!base) continue;
    for (const auto& other : result.summaries) {
      if (other.name == *base) {
        s.baseline = *base;
        s.p_value = paired_t_test(s.summary.run_means, other.summary.run_means);
      }
    }
  }
  if (cfg.trajectory_algorithm) {
    result.trajectory_algorithm = cfg.trajectory_algorithm;
  } else {
    for (const auto& name : result.algorithm_names) {
      if (baseline_of(name)) {
        result.trajectory_algorithm = name;
        break;
      }
    }
  }
  return result;
}

namespace {

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(number_or_null(v[i]));
  return arr;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void write_trajectory(const ExperimentResult& result, std::size_t a, const fs::path& path) {
  std::ofstream out = open_output(path);
  out << "run,iteration,lambda,task_id,tau,score\n";
  for (std::size_t r = 0; r < result.repeats.size(); ++r) {
    for (const TauRecord& rec : result.repeats[r].algorithms[a].tau_history) {
      for (Index t = 0; t < rec.tau.size(); ++t) {
        out << r << ',' << rec.iteration << ',' << format_number(rec.lambda) << ','
            << result.task_ids[static_cast<std::size_t>(t)] << ',' << format_number(rec.tau[t])
            << ',' << format_number(rec.scores[t]) << '\n';
      }
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

void write_results(const ExperimentResult& result, const RunConfig& cfg, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  json j;
  j["metric"] = metric_name(result.metric);
  j["n_runs"] = result.repeats.size();
  j["seed"] = cfg.seed;
  j["task_ids"] = result.task_ids;
  json algs = json::object();
  json warnings = json::array();
  for (std::size_t a = 0; a < result.summaries.size(); ++a) {
    const AlgorithmSummary& s = result.summaries[a];
    json e;
    e["mean"] = number_or_null(s.summary.mean);
    e["std_error"] = number_or_null(s.summary.std_error);
    e["n_runs"] = s.summary.n_runs;
    e["per_task"] = vector_json(s.summary.per_task_metric);
    json rm = json::array();
    for (double m : s.summary.run_means) rm.push_back(number_or_null(m));
    e["run_means"] = rm;
    e["baseline"] = s.baseline ? json(*s.baseline) : json(nullptr);
    e["p_value"] = number_or_null(s.p_value);
    const bool self_paced = baseline_of(s.name).has_value();
    json runs = json::array();
    for (std::size_t r = 0; r < result.repeats.size(); ++r) {
      const AlgorithmOutcome& o = result.repeats[r].algorithms[a];
      json run;
      run["run"] = r;
      json hp = json::object();
      for (const auto& [name, value] : o.selected) hp[name] = value;
      run["selected"] = hp;
      if (o.iterations > 0) {
        run["iterations"] = o.iterations;
        run["converged"] = o.converged;
      }
      if (self_paced) {
        json lam = json::array();
        for (double l : o.lambda_schedule) lam.push_back(number_or_null(l));
        run["lambda_schedule"] = lam;
      }
      runs.push_back(run);
      for (const auto& w : o.warnings) warnings.push_back("run " + std::to_string(r) + ": " + w);
    }
    e["runs"] = runs;
    algs[s.name] = e;
  }
  j["algorithms"] = algs;
  j["trajectory_algorithm"] =
      result.trajectory_algorithm ? json(*result.trajectory_algorithm) : json(nullptr);
  j["warnings"] = warnings;
  {
    std::ofstream out = open_output(dir / "results.json");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing results.json");
  }

  {
    const fs::path path = dir / "per_task_errors.csv";
    std::ofstream out = open_output(path);
    out << "run,task_id,algorithm,metric_value\n";
    for (std::size_t r = 0; r < result.repeats.size(); ++r) {
      for (std::size_t a = 0; a < result.algorithm_names.size(); ++a) {
        const Vector& m = result.repeats[r].algorithms[a].metric;
        for (Index t = 0; t < m.size(); ++t) {
          out << r << ',' << result.task_ids[static_cast<std::size_t>(t)] << ','
              << result.algorithm_names[a] << ',' << format_number(m[t]) << '\n';
        }
      }
    }
    if (!out) throw Error("failed writing " + path.string());
  }

  bool wrote_main = false;
  for (std::size_t a = 0; a < result.algorithm_names.size(); ++a) {
    const std::string& name = result.algorithm_names[a];
    if (!baseline_of(name)) continue;
    write_trajectory(result, a, dir / ("tau_trajectory_" + name + ".csv"));
    if (result.trajectory_algorithm && *result.trajectory_algorithm == name) {
      write_trajectory(result, a, dir / "tau_trajectory.csv");
      wrote_main = true;
    }
  }
  if (!wrote_main) {
    std::ofstream out = open_output(dir / "tau_trajectory.csv");
    out << "run,iteration,lambda,task_id,tau,score\n";
  }
}

}  // namespace spmtl
