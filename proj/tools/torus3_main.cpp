#include <algorithm>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "torus3/config.hpp"
#include "torus3/errors.hpp"
#include "torus3/gauge.hpp"
#include "torus3/io.hpp"

namespace {

int check_identity(const std::string& name, double k_prime, std::uint64_t seed, std::size_t probes,
                   std::size_t grid) {
  const auto entry = torus3::find_catalog_entry(name);
  if (!entry) {
    std::cerr << "unknown catalog equation '" << name << "'\n";
    return torus3::kExitConfig;
  }
  const torus3::Equation eq = entry->get().equation();
  double worst = 0.0, worst_abs = 0.0;
  for (const auto& f : torus3::random_probes(probes, seed, grid, entry->get().probe_sign)) {
    const auto r = torus3::crucial_identity_residual(eq, f, 0.0, torus3::SobolevIndex(k_prime));
    worst = std::max(worst, r.relative);
    worst_abs = std::max(worst_abs, r.absolute);
  }
  std::cout << "equation " << name << "  k'=" << k_prime << "  probes=" << probes << "  seed=" << seed << '\n'
            << "residual " << worst << " (relative), " << worst_abs << " (absolute)\n";
  return worst < 1e-8 ? torus3::kExitOk : torus3::kExitVerdict;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"torus3: periodic solver and gauge diagnostics for u_t = F(u_xxx, u_xx, u_x, u, x, t)"};
  app.require_subcommand(0, 1);

  bool strict = false, print_defaults = false;
  unsigned threads = 0;
  app.add_flag("--strict", strict, "exit with status 4 when a verdict fails");
  app.add_option("--threads", threads, "worker threads for experiments (0 keeps the configured value)");
  app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a YAML configuration");
  run->add_option("config", config_path, "configuration file")->required();
  run->fallthrough();

  std::string eq_name;
  double k_prime = 10.0;
  std::uint64_t seed = 7;
  std::size_t probes = 10, grid = 256;
  auto* ident = app.add_subcommand("check-identity", "check the gauge cancellation identity on random probes");
  ident->add_option("--eq", eq_name, "catalog equation")->required();
  ident->add_option("--kprime", k_prime, "energy index k'");
  ident->add_option("--seed", seed, "probe seed");
  ident->add_option("--probes", probes, "number of probes");
  ident->add_option("--grid", grid, "grid size");

  auto* list = app.add_subcommand("list-catalog", "list the built-in equations");

  std::string run_dir;
  auto* verify = app.add_subcommand("verify", "re-validate a run directory against its meta.json");
  verify->add_option("run_dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : torus3::kExitConfig;
  }

  if (print_defaults) {
    std::cout << torus3::default_config_yaml();
    return torus3::kExitOk;
  }
  try {
    if (*run) return torus3::run(config_path, {threads, strict}, std::cout, std::cerr);
    if (*ident) return check_identity(eq_name, k_prime, seed, probes, grid);
    if (*list) {
      std::cout << torus3::list_catalog();
      return torus3::kExitOk;
    }
    if (*verify) {
      const auto v = torus3::validate_run_directory(run_dir);
      for (const auto& p : v.problems) std::cerr << p << '\n';
      std::cout << (v.ok ? "ok" : "invalid") << '\n';
      return v.ok ? torus3::kExitOk : torus3::kExitVerdict;
    }
  } catch (const torus3::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return torus3::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return torus3::kExitRuntime;
  }
  std::cout << app.help();
  return torus3::kExitOk;
}
