// cdma-mud: run built-in or file-based scenarios and parameter sweeps.
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "cdmamud/harness.hpp"

using namespace cdmamud;

namespace {

Scenario load_config(const std::string& path, Scenario base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return scenario_from_json(j, std::move(base));
}

void print_summary(const ScenarioReport& r) {
  std::cerr << r.scenario.name;
  if (!r.parameter.empty()) std::cerr << " " << r.parameter << "=" << r.value;
  std::cerr << " (" << r.wall_seconds << " s)\n";
  for (const auto& note : r.notes) std::cerr << "  note: " << note << "\n";
  for (const auto& p : r.points) {
    std::cerr << "  Eb/N0 " << p.ebn0_db << " dB  trials " << p.trials << "  CD " << p.cd.ber() << "  PSO "
              << p.pso.ber();
    if (p.has_omud) std::cerr << "  OMUD " << p.omud.ber();
    std::cerr << "  SuB " << p.sub.ber << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Swarm-based multiuser detection for DS-CDMA: Monte Carlo harness"};
  std::string config, scenario_name, sweep, out_dir = ".", format = "csv";
  std::optional<std::uint64_t> seed;
  std::optional<long long> trials;
  int jobs = 1, shards = 0;
  bool list = false, no_sidecar = false;

  app.add_option("--config", config, "JSON scenario file (applied on top of --scenario)");
  app.add_option("--scenario", scenario_name, "built-in scenario name");
  app.add_option("--sweep", sweep, "parameter grid, e.g. phi2=1,4,10,15 (omega, phi1, phi2, vmax, K, EbN0)");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--trials", trials, "fixed trial count per Eb/N0 point")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "plotdata"}));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--shards", shards, "work units per point (default 4 per job)")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-sidecar", no_sidecar, "skip the JSON metadata file");
  app.add_flag("--list", list, "list built-in scenarios and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (list) {
    for (const auto& n : builtin_scenario_names()) std::cout << n << "\n";
    return 0;
  }

  try {
    if (config.empty() && scenario_name.empty()) throw ConfigError("need --scenario or --config");
    Scenario s = scenario_name.empty() ? Scenario{} : builtin_scenario(scenario_name);
    if (!config.empty()) s = load_config(config, std::move(s));
    if (seed) s.seed = *seed;
    if (trials) s.budget = {BudgetMode::fixed, *trials, s.budget.errors, s.budget.max_trials};
    s.validate();

    EmitOptions emit;
    emit.out_dir = out_dir;
    emit.basename = s.name;
    emit.format = output_format_from_name(format);
    emit.sidecar = !no_sidecar;
    const RunOptions run{jobs, shards};

    std::vector<ScenarioReport> reports;
    if (sweep.empty()) {
      reports.push_back(run_scenario(s, run));
    } else {
      const SweepSpec spec = parse_sweep(sweep, s);
      for (double v : spec.values) apply_sweep_value(s, spec.parameter, v).validate();
      reports = run_sweep(spec, run).cells;
      emit.basename += "-" + spec.parameter;
    }
    for (const auto& r : reports) print_summary(r);
    for (const auto& path : emit_results(reports, emit)) std::cout << path.string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
