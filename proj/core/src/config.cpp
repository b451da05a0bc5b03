#include "torus3/config.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "torus3/errors.hpp"
#include "torus3/io.hpp"

namespace torus3 {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(path.empty() ? "<root>" : path, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(join(path, key), "unknown key");
  }
}

template <class T>
T as(const YAML::Node& node, const std::string& path, const char* type) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, std::string("expected ") + type);
  }
}

double real(const YAML::Node& node, const std::string& path) {
  const double v = as<double>(node, path, "a number");
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

long long integer(const YAML::Node& node, const std::string& path) { return as<long long>(node, path, "an integer"); }

bool boolean(const YAML::Node& node, const std::string& path) { return as<bool>(node, path, "true or false"); }

std::string text(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw ConfigError(path, "expected a string");
  return node.as<std::string>();
}

template <class Fn>
void each(const YAML::Node& node, const std::string& path, Fn fn) {
  if (!node.IsSequence()) throw ConfigError(path, "expected a list");
  for (std::size_t i = 0; i < node.size(); ++i) fn(node[i], path + "[" + std::to_string(i) + "]");
}

void parse_equation_node(const YAML::Node& node, RunConfig& c) {
  if (node.IsScalar()) {
    c.equation_name = node.as<std::string>();
    c.f_text.clear();
    if (!find_catalog_entry(c.equation_name)) {
      // Not a catalog name: accept it as an inline right-hand side.
      c.f_text = c.equation_name;
      c.equation_name = "custom";
    }
    return;
  }
  check_keys(node, "equation", {"name", "F", "coefficients", "dealias"});
  c.equation_name = node["name"] ? text(node["name"], "equation.name") : "custom";
  if (node["F"]) {
    c.f_text = text(node["F"], "equation.F");
  } else if (!find_catalog_entry(c.equation_name)) {
    throw ConfigError("equation.name", "unknown catalog equation '" + c.equation_name + "'");
  }
  if (node["coefficients"]) {
    const auto& co = node["coefficients"];
    if (!co.IsMap()) throw ConfigError("equation.coefficients", "expected a mapping");
    for (const auto& kv : co) {
      const auto key = kv.first.as<std::string>();
      c.coefficients[key] = text(kv.second, "equation.coefficients." + key);
    }
  }
  if (node["dealias"]) c.dealias = text(node["dealias"], "equation.dealias");
}

void parse_data(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "data", {"mean", "terms", "tail"});
  DataSpec d;
  if (node["mean"]) d.mean = real(node["mean"], "data.mean");
  if (node["terms"]) {
    each(node["terms"], "data.terms", [&](const YAML::Node& t, const std::string& p) {
      check_keys(t, p, {"mode", "cos", "sin"});
      if (!t["mode"]) throw ConfigError(join(p, "mode"), "is required");
      TrigTerm term;
      term.mode = static_cast<int>(integer(t["mode"], join(p, "mode")));
      if (term.mode < 1) throw ConfigError(join(p, "mode"), "must be at least 1");
      if (t["cos"]) term.cos_coeff = real(t["cos"], join(p, "cos"));
      if (t["sin"]) term.sin_coeff = real(t["sin"], join(p, "sin"));
      d.terms.push_back(term);
    });
  }
  if (node["tail"]) {
    const auto& t = node["tail"];
    check_keys(t, "data.tail", {"exponent", "amplitude", "seed"});
    if (!t["exponent"]) throw ConfigError("data.tail.exponent", "is required");
    if (!t["seed"]) throw ConfigError("data.tail.seed", "is required for random phases");
    d.tail_exponent = real(t["exponent"], "data.tail.exponent");
    if (t["amplitude"]) d.tail_amplitude = real(t["amplitude"], "data.tail.amplitude");
    d.seed = as<std::uint64_t>(t["seed"], "data.tail.seed", "a nonnegative integer");
  }
  c.data = d;
}

void parse_solve(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "solve",
             {"eps", "dt", "t_end", "scheme", "snapshot_stride", "blowup_threshold", "k0", "cfl", "record_energy",
              "picard"});
  auto& s = c.solve;
  if (node["eps"]) s.eps = real(node["eps"], "solve.eps");
  if (node["dt"]) s.dt = real(node["dt"], "solve.dt");
  if (node["t_end"]) s.t_end = real(node["t_end"], "solve.t_end");
  if (node["scheme"]) {
    try {
      s.scheme = parse_scheme(text(node["scheme"], "solve.scheme"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("solve.scheme", e.what());
    }
  }
  if (node["snapshot_stride"]) s.snapshot_stride = static_cast<int>(integer(node["snapshot_stride"], "solve.snapshot_stride"));
  if (node["blowup_threshold"]) s.blowup_threshold = real(node["blowup_threshold"], "solve.blowup_threshold");
  if (node["k0"]) s.k0 = SobolevIndex(real(node["k0"], "solve.k0"));
  if (node["cfl"]) s.cfl = real(node["cfl"], "solve.cfl");
  if (node["record_energy"]) s.record_energy = boolean(node["record_energy"], "solve.record_energy");
  if (node["picard"]) {
    const auto& p = node["picard"];
    check_keys(p, "solve.picard", {"half_nodes", "tolerance", "max_iterations"});
    if (p["half_nodes"]) s.picard.half_nodes = static_cast<int>(integer(p["half_nodes"], "solve.picard.half_nodes"));
    if (p["tolerance"]) s.picard.tolerance = real(p["tolerance"], "solve.picard.tolerance");
    if (p["max_iterations"]) {
      s.picard.max_iterations = static_cast<int>(integer(p["max_iterations"], "solve.picard.max_iterations"));
    }
  }
}

ExperimentKind parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::Solve, ExperimentKind::BonaSmith, ExperimentKind::Smoothing,
                 ExperimentKind::BackwardProbe, ExperimentKind::Dichotomy}) {
    if (experiment_kind_name(k) == name) return k;
  }
  throw ConfigError("experiment.kind", "unknown kind '" + name + "'");
}

void parse_experiment(const YAML::Node& node, RunConfig& c) {
  check_keys(node, "experiment",
             {"kind", "k", "m_values", "eps_only_fit", "offsets", "resolutions", "backward_eps", "backward_dt"});
  if (node["kind"]) c.kind = parse_kind(text(node["kind"], "experiment.kind"));
  if (node["k"]) c.k = real(node["k"], "experiment.k");
  if (node["m_values"]) {
    c.m_values.clear();
    each(node["m_values"], "experiment.m_values", [&](const YAML::Node& v, const std::string& p) {
      const auto m = integer(v, p);
      if (m < 1) throw ConfigError(p, "must be at least 1");
      c.m_values.push_back(static_cast<int>(m));
    });
  }
  if (node["eps_only_fit"]) c.eps_only_fit = boolean(node["eps_only_fit"], "experiment.eps_only_fit");
  if (node["offsets"]) {
    c.offsets.clear();
    each(node["offsets"], "experiment.offsets",
         [&](const YAML::Node& v, const std::string& p) { c.offsets.push_back(real(v, p)); });
  }
  if (node["resolutions"]) {
    c.resolutions.clear();
    each(node["resolutions"], "experiment.resolutions", [&](const YAML::Node& v, const std::string& p) {
      const auto n = integer(v, p);
      if (n < 8 || n % 2) throw ConfigError(p, "must be an even grid size >= 8");
      c.resolutions.push_back(static_cast<std::size_t>(n));
    });
  }
  if (node["backward_eps"]) c.backward_eps = real(node["backward_eps"], "experiment.backward_eps");
  if (node["backward_dt"]) c.backward_dt = real(node["backward_dt"], "experiment.backward_dt");
}

void validate(const RunConfig& c) {
  if (c.grid_size < 8 || c.grid_size % 2) throw ConfigError("grid_size", "must be an even number >= 8");
  if (c.k < 0) throw ConfigError("experiment.k", "must be nonnegative");
  if (c.m_values.empty()) throw ConfigError("experiment.m_values", "must not be empty");
  if (c.resolutions.empty()) throw ConfigError("experiment.resolutions", "must not be empty");
  if (!(c.backward_eps >= 0)) throw ConfigError("experiment.backward_eps", "must be nonnegative");
  if (!(c.backward_dt > 0)) throw ConfigError("experiment.backward_dt", "must be positive");
  if (c.dealias != "three_halves" && c.dealias != "double") {
    throw ConfigError("equation.dealias", "must be three_halves or double");
  }
  c.solve.validate();
  (void)c.equation();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Solve: return "solve";
    case ExperimentKind::BonaSmith: return "bona_smith";
    case ExperimentKind::Smoothing: return "smoothing";
    case ExperimentKind::BackwardProbe: return "backward_probe";
    case ExperimentKind::Dichotomy: return "dichotomy";
  }
  return "?";
}

Equation RunConfig::equation() const {
  const Dealias d = dealias == "double" ? Dealias::Double : Dealias::ThreeHalves;
  try {
    if (f_text.empty()) return catalog_entry(equation_name).equation().with_dealias(d);
    return make_equation(equation_name, f_text, coefficients).with_dealias(d);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    const std::string what = f_text.empty() ? equation_name : f_text;
    throw ConfigError("equation", "'" + what + "' is neither a catalog name nor a valid expression: " + e.what());
  }
}

RunConfig parse_config(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("YAML syntax: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) {
    validate(c);
    return c;
  }
  check_keys(root, "", {"equation", "grid_size", "data", "solve", "experiment", "output_dir", "threads"});
  if (root["equation"]) parse_equation_node(root["equation"], c);
  if (root["grid_size"]) {
    const auto n = integer(root["grid_size"], "grid_size");
    if (n < 8) throw ConfigError("grid_size", "must be an even number >= 8");
    c.grid_size = static_cast<std::size_t>(n);
  }
  if (root["data"]) parse_data(root["data"], c);
  if (root["solve"]) parse_solve(root["solve"], c);
  if (root["experiment"]) parse_experiment(root["experiment"], c);
  if (root["output_dir"]) c.output_dir = text(root["output_dir"], "output_dir");
  if (root["threads"]) {
    const auto t = integer(root["threads"], "threads");
    if (t < 1) throw ConfigError("threads", "must be at least 1");
    c.threads = static_cast<unsigned>(t);
  }
  validate(c);
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string config_to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(12);
  out << YAML::BeginMap;
  out << YAML::Key << "equation";
  if (c.f_text.empty() && c.coefficients.empty() && c.dealias == "three_halves") {
    out << YAML::Value << c.equation_name;
  } else {
    out << YAML::Value << YAML::BeginMap << YAML::Key << "name" << YAML::Value << c.equation_name;
    if (!c.f_text.empty()) out << YAML::Key << "F" << YAML::Value << c.f_text;
    if (!c.coefficients.empty()) {
      out << YAML::Key << "coefficients" << YAML::Value << YAML::BeginMap;
      for (const auto& [k, v] : c.coefficients) out << YAML::Key << k << YAML::Value << v;
      out << YAML::EndMap;
    }
    out << YAML::Key << "dealias" << YAML::Value << c.dealias << YAML::EndMap;
  }
  out << YAML::Key << "grid_size" << YAML::Value << c.grid_size;

  out << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mean" << YAML::Value << c.data.mean;
  out << YAML::Key << "terms" << YAML::Value << YAML::BeginSeq;
  for (const auto& t : c.data.terms) {
    out << YAML::Flow << YAML::BeginMap << YAML::Key << "mode" << YAML::Value << t.mode << YAML::Key << "cos"
        << YAML::Value << t.cos_coeff << YAML::Key << "sin" << YAML::Value << t.sin_coeff << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (c.data.tail_exponent) {
    out << YAML::Key << "tail" << YAML::Value << YAML::BeginMap << YAML::Key << "exponent" << YAML::Value
        << *c.data.tail_exponent << YAML::Key << "amplitude" << YAML::Value << c.data.tail_amplitude << YAML::Key
        << "seed" << YAML::Value << c.data.seed << YAML::EndMap;
  }
  out << YAML::EndMap;

  const auto& s = c.solve;
  out << YAML::Key << "solve" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "eps" << YAML::Value << s.eps;
  out << YAML::Key << "dt" << YAML::Value << s.dt;
  out << YAML::Key << "t_end" << YAML::Value << s.t_end;
  out << YAML::Key << "scheme" << YAML::Value << std::string(scheme_name(s.scheme));
  out << YAML::Key << "snapshot_stride" << YAML::Value << s.snapshot_stride;
  out << YAML::Key << "blowup_threshold" << YAML::Value << s.blowup_threshold;
  out << YAML::Key << "k0" << YAML::Value << s.k0.value();
  out << YAML::Key << "cfl" << YAML::Value << s.cfl;
  out << YAML::Key << "record_energy" << YAML::Value << s.record_energy;
  out << YAML::Key << "picard" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "half_nodes" << YAML::Value << s.picard.half_nodes;
  out << YAML::Key << "tolerance" << YAML::Value << s.picard.tolerance;
  out << YAML::Key << "max_iterations" << YAML::Value << s.picard.max_iterations;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(experiment_kind_name(c.kind));
  out << YAML::Key << "k" << YAML::Value << c.k;
  out << YAML::Key << "m_values" << YAML::Value << YAML::Flow << c.m_values;
  out << YAML::Key << "eps_only_fit" << YAML::Value << c.eps_only_fit;
  out << YAML::Key << "offsets" << YAML::Value << YAML::Flow << c.offsets;
  out << YAML::Key << "resolutions" << YAML::Value << YAML::Flow << c.resolutions;
  out << YAML::Key << "backward_eps" << YAML::Value << c.backward_eps;
  out << YAML::Key << "backward_dt" << YAML::Value << c.backward_dt;
  out << YAML::EndMap;

  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  out << YAML::Key << "threads" << YAML::Value << c.threads;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string default_config_yaml() {
  RunConfig c;
  c.data.terms = {{1, 2.0, 0.0}, {2, 0.0, 0.5}};
  return config_to_yaml(c);
}

// ---------------------------------------------------------------------------
// Runner

namespace {

void log_verdicts(const ExperimentReport& r, std::ostream& log) {
  for (const auto& v : r.verdicts) {
    log << "  [" << r.kind << "] " << v.criterion << ": " << outcome_name(v.outcome);
    if (!v.detail.empty()) log << " (" << v.detail << ")";
    log << '\n';
  }
  for (const auto& n : r.notes) log << "  [" << r.kind << "] note: " << n << '\n';
}

std::vector<Trajectory> forward_ladder(const Equation& eq, const RunConfig& c, const SolveParams& p) {
  std::vector<Trajectory> out;
  for (std::size_t n : c.resolutions) out.push_back(solve(eq, c.data.build(n), p));
  return out;
}

}  // namespace

RunOutcome run_config(const RunConfig& c, const RunOptions& options, std::ostream& log) {
  const Equation eq = c.equation();
  SolveParams params = c.solve;
  params.k = SobolevIndex(c.k);
  params.validate();
  const unsigned threads = options.threads ? options.threads : c.threads;

  RunOutcome outcome;
  outcome.run_dir = create_run_directory(c.output_dir);
  const fs::path& dir = outcome.run_dir;
  std::vector<std::string> files;
  auto add = [&files](const std::vector<std::string>& more) { files.insert(files.end(), more.begin(), more.end()); };
  log << "run directory " << dir.string() << '\n';

  switch (c.kind) {
    case ExperimentKind::Solve: {
      const TorusFunction phi = c.data.build(c.grid_size);
      const Trajectory tr = solve(eq, phi, params);
      log << "solve: " << termination_name(tr.terminated) << " at t=" << tr.horizon() << " after " << tr.substeps
          << " substeps\n";
      add(write_trajectory(dir / "trajectories" / "main", eq, params, tr));
      for (auto& f : files) f = "trajectories/main/" + f;
      try {
        outcome.reports.push_back(energy_monitor(eq, tr, params.k));
      } catch (const DegenerateDispersion& e) {
        ExperimentReport r;
        r.kind = "energy_monitor";
        r.notes.push_back(e.what());
        r.add_table("energy", {"t", "energy", "bound", "q_min", "delta", "delta_prime"});
        r.add_verdict("energy_bound", Outcome::Inconclusive, "energy", "energy undefined along the run");
        outcome.reports.push_back(std::move(r));
      }
      break;
    }
    case ExperimentKind::BonaSmith: {
      BonaSmithOptions bo;
      bo.base = params;
      bo.threads = threads;
      bo.eps_only_fit = c.eps_only_fit;
      auto res = bona_smith_run(eq, c.data.build(c.grid_size), params.k, c.m_values, params.t_end, bo);
      for (const auto& [m, tr] : res.family.trajectories) {
        SolveParams p = params;
        p.eps = 1.0 / m;
        p.snapshot_stride = 1;
        const std::string sub = "trajectories/m" + std::to_string(m);
        for (const auto& f : write_trajectory(dir / sub, eq, p, tr)) files.push_back(sub + "/" + f);
      }
      outcome.reports.push_back(std::move(res.report));
      break;
    }
    case ExperimentKind::Smoothing: {
      const auto ladder = forward_ladder(eq, c, params);
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        const std::string sub = "trajectories/N" + std::to_string(c.resolutions[i]);
        for (const auto& f : write_trajectory(dir / sub, eq, params, ladder[i])) files.push_back(sub + "/" + f);
      }
      outcome.reports.push_back(smoothing_profile(eq, ladder, params.k, c.offsets));
      break;
    }
    case ExperimentKind::BackwardProbe:
    case ExperimentKind::Dichotomy: {
      SolveParams p = params;
      p.eps = c.backward_eps;
      p.dt = std::min(c.backward_dt, p.t_end);
      const bool dichotomy = c.kind == ExperimentKind::Dichotomy;
      auto res = backward_probe(eq, c.data, params.k, c.resolutions, p, true);
      const Equation reversed = eq.time_reversed();
      for (std::size_t i = 0; i < res.backward.size(); ++i) {
        const std::string sub = "trajectories/backward_N" + std::to_string(c.resolutions[i]);
        for (const auto& f : write_trajectory(dir / sub, reversed, p, res.backward[i])) files.push_back(sub + "/" + f);
      }
      for (std::size_t i = 0; i < res.forward.size(); ++i) {
        const std::string sub = "trajectories/forward_N" + std::to_string(c.resolutions[i]);
        for (const auto& f : write_trajectory(dir / sub, eq, p, res.forward[i])) files.push_back(sub + "/" + f);
      }
      outcome.reports.push_back(std::move(res.report));
      if (dichotomy) outcome.reports.push_back(smoothing_profile(eq, res.forward, params.k, c.offsets));
      break;
    }
  }

  const std::string config_text = config_to_yaml(c);
  for (auto& r : outcome.reports) {
    r.provenance["config_fingerprint"] = fingerprint_hex(fingerprint_bytes(config_text));
    r.provenance["library_version"] = "0.1.0";
    log_verdicts(r, log);
    add(write_report(dir, r.kind, r));
    outcome.verdict_failed = outcome.verdict_failed || r.failed();
  }
  files.push_back(write_text(dir, "report.json", reports_to_json(outcome.reports)));
  files.push_back(write_text(dir, "config.yaml", config_text));

  nlohmann::json meta;
  meta["tool"] = "torus3";
  meta["version"] = "0.1.0";
  meta["created"] = utc_now();
  meta["kind"] = experiment_kind_name(c.kind);
  meta["config_fingerprint"] = fingerprint_hex(fingerprint_bytes(config_text));
  meta["equation"] = {{"name", eq.name()}, {"F", eq.expr().to_string()}, {"fingerprint", fingerprint_hex(eq.fingerprint())}};
  meta["data_fingerprint"] = fingerprint_hex(fingerprint(c.data.build(c.grid_size)));
  write_run_meta(dir, meta.dump(), files);
  return outcome;
}

int run(const fs::path& config_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig c = load_config(config_path);
    const RunOutcome o = run_config(c, options, out);
    if (o.verdict_failed) {
      err << "one or more verdicts failed\n";
      if (options.strict) return kExitVerdict;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace torus3
