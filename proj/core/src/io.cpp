#include "torus3/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "torus3/errors.hpp"

namespace torus3 {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// JSON has no NaN; non-finite values are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const SolveParams& p) {
  return {{"eps", p.eps},
          {"dt", p.dt},
          {"t_end", p.t_end},
          {"scheme", scheme_name(p.scheme)},
          {"snapshot_stride", p.snapshot_stride},
          {"blowup_threshold", p.blowup_threshold},
          {"k0", p.k0.value()},
          {"k", p.k.value()},
          {"cfl", p.cfl},
          {"record_energy", p.record_energy},
          {"picard",
           {{"half_nodes", p.picard.half_nodes},
            {"tolerance", p.picard.tolerance},
            {"max_iterations", p.picard.max_iterations}}}};
}

json report_json(const ExperimentReport& r) {
  json j;
  j["kind"] = r.kind;
  j["fitted_rates"] = json::object();
  for (const auto& [k, v] : r.fitted_rates) j["fitted_rates"][k] = number(v);
  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) {
    j["verdicts"].push_back(
        {{"criterion", v.criterion}, {"outcome", outcome_name(v.outcome)}, {"table", v.table}, {"detail", v.detail}});
  }
  j["tables"] = json::array();
  for (const auto& t : r.tables) {
    json rows = json::array();
    for (const auto& row : t.rows) {
      json jr = json::array();
      for (double x : row) jr.push_back(number(x));
      rows.push_back(std::move(jr));
    }
    j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"rows", std::move(rows)}});
  }
  j["provenance"] = r.provenance;
  j["notes"] = r.notes;
  return j;
}

}  // namespace

std::string function_to_json(const TorusFunction& f) {
  json j;
  j["grid_size"] = f.grid_size();
  json c = json::array();
  for (const auto& z : f.coeffs()) c.push_back({z.real(), z.imag()});
  j["coeffs"] = std::move(c);
  return j.dump();
}

TorusFunction function_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    const auto n = j.at("grid_size").get<std::size_t>();
    std::vector<Complex> c;
    for (const auto& z : j.at("coeffs")) c.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
    if (c.size() != n / 2 + 1) throw Error("coefficient count does not match grid size");
    return TorusFunction(n, std::move(c));
  } catch (const json::exception& e) {
    throw Error(std::string("malformed function JSON: ") + e.what());
  }
}

std::uint64_t fingerprint_bytes(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

fs::path create_run_directory(const fs::path& root) {
  fs::create_directories(root);
  for (int i = 1; i < 100000; ++i) {
    std::ostringstream name;
    name << "run-" << std::setw(4) << std::setfill('0') << i;
    const fs::path p = root / name.str();
    // create_directory reports false when the directory already exists.
    if (fs::create_directory(p)) return p;
  }
  throw Error("no free run directory under " + root.string());
}

std::string write_text(const fs::path& dir, const std::string& relative, std::string_view text) {
  const fs::path p = dir / relative;
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  return relative;
}

std::vector<std::string> write_trajectory(const fs::path& dir, const Equation& eq, const SolveParams& params,
                                          const Trajectory& traj) {
  fs::create_directories(dir);
  std::vector<std::string> files;

  std::ostringstream csv;
  csv << "t,h_k0,h_k,energy,delta,delta_prime,q_min,mean\n";
  for (const auto& r : traj.records) {
    csv << csv_number(r.t) << ',' << csv_number(r.h_k0) << ',' << csv_number(r.h_k) << ',' << csv_number(r.energy)
        << ',' << csv_number(r.delta) << ',' << csv_number(r.delta_prime) << ',' << csv_number(r.q_min) << ','
        << csv_number(r.mean) << '\n';
  }
  files.push_back(write_text(dir, "norms.csv", csv.str()));

  json snaps = json::array();
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const std::string name = "snap_" + std::to_string(i) + ".json";
    files.push_back(write_text(dir, name, function_to_json(traj.states[i])));
    snaps.push_back({{"index", i},
                     {"t", traj.times[i]},
                     {"file", name},
                     {"fingerprint", fingerprint_hex(fingerprint(traj.states[i]))}});
  }

  json meta;
  meta["equation"] = {{"name", eq.name()}, {"F", eq.expr().to_string()}, {"fingerprint", fingerprint_hex(eq.fingerprint())}};
  meta["params"] = params_json(params);
  meta["termination"] = termination_name(traj.terminated);
  meta["message"] = traj.message;
  meta["substeps"] = traj.substeps;
  meta["horizon"] = traj.horizon();
  meta["data_fingerprint"] = traj.states.empty() ? "" : fingerprint_hex(fingerprint(traj.states.front()));
  meta["snapshots"] = std::move(snaps);
  files.push_back(write_text(dir, "meta.json", meta.dump(2)));
  return files;
}

std::string reports_to_json(const std::vector<ExperimentReport>& reports) {
  json j = json::array();
  for (const auto& r : reports) j.push_back(report_json(r));
  return json{{"reports", std::move(j)}}.dump(2);
}

std::vector<std::string> write_report(const fs::path& dir, const std::string& label, const ExperimentReport& report) {
  std::vector<std::string> files;
  files.push_back(write_text(dir, label + ".json", report_json(report).dump(2)));
  for (const auto& t : report.tables) {
    std::ostringstream csv;
    for (std::size_t i = 0; i < t.columns.size(); ++i) csv << (i ? "," : "") << t.columns[i];
    csv << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << csv_number(row[i]);
      csv << '\n';
    }
    files.push_back(write_text(dir, "tables/" + label + "_" + t.name + ".csv", csv.str()));
  }
  for (std::size_t i = 0; i < report.plots.size(); ++i) {
    const auto& spec = report.plots[i];
    const Table& t = report.table(spec.table);
    files.push_back(write_text(dir, "plots/" + label + "_" + std::to_string(i) + "_" + spec.table + ".svg",
                               render_svg(t, spec)));
  }
  return files;
}

void write_run_meta(const fs::path& dir, std::string_view metadata_json, const std::vector<std::string>& files) {
  json meta = json::parse(metadata_json);
  json listed = json::object();
  for (const auto& f : files) listed[f] = fingerprint_hex(fingerprint_bytes(read_file(dir / f)));
  meta["files"] = std::move(listed);
  write_text(dir, "meta.json", meta.dump(2));
}

Validation validate_run_directory(const fs::path& dir) {
  Validation v;
  auto problem = [&v](std::string s) {
    v.ok = false;
    v.problems.push_back(std::move(s));
  };
  json meta;
  try {
    meta = json::parse(read_file(dir / "meta.json"));
  } catch (const std::exception& e) {
    problem(std::string("meta.json: ") + e.what());
    return v;
  }
  if (!meta.contains("files") || !meta["files"].is_object()) {
    problem("meta.json lists no files");
    return v;
  }
  for (const auto& [name, hash] : meta["files"].items()) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) {
      problem("missing " + name);
      continue;
    }
    if (fingerprint_hex(fingerprint_bytes(read_file(p))) != hash.get<std::string>()) problem("fingerprint mismatch: " + name);
    if (p.filename() == "meta.json") {
      try {
        const json tm = json::parse(read_file(p));
        for (const auto& s : tm.at("snapshots")) {
          const TorusFunction f = function_from_json(read_file(p.parent_path() / s.at("file").get<std::string>()));
          if (fingerprint_hex(fingerprint(f)) != s.at("fingerprint").get<std::string>()) {
            problem("snapshot fingerprint mismatch: " + (fs::path(name).parent_path() / s.at("file").get<std::string>()).string());
          }
        }
      } catch (const std::exception& e) {
        problem(name + ": " + e.what());
      }
    }
  }
  return v;
}

namespace {

// Left-justifies to `width` display columns, counting UTF-8 code points.
std::string pad(const std::string& s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80;
  return cols >= width ? s + " " : s + std::string(width - cols, ' ');
}

}  // namespace

std::string list_catalog() {
  std::ostringstream os;
  for (const auto& e : catalog()) {
    os << pad(e.name, 16) << pad(e.title, 28) << "F = " << pad(e.f_text, 34) << "delta = " << pad(e.delta_text, 14)
       << "P = " << pad(e.p_text, 14) << resonance_name(e.known) << '\n';
    for (const auto& [name, def] : e.coefficients) os << std::string(16, ' ') << "  " << name << "(x,t) = " << def << '\n';
  }
  return os.str();
}

}  // namespace torus3
