#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cdmamud/analysis.hpp"
#include "cdmamud/channel.hpp"
#include "cdmamud/detectors.hpp"
#include "cdmamud/modem.hpp"

namespace cdmamud {

// Invalid scenario, sweep or command line input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NearFar {
  int strong_users = 0;     // the last `strong_users` users get the offset
  double offset_db = 0.0;
  bool weak_only = true;    // restrict statistics to the remaining users
};

struct CsiError {
  double gain = 0.0;
  double phase = 0.0;
};

enum class BudgetMode { fixed, min_trials };

struct Budget {
  BudgetMode mode = BudgetMode::fixed;
  long long trials = 1000;        // fixed mode
  double errors = 100.0;          // min_trials mode: target error count at the single-user bound
  long long max_trials = 2000000; // min_trials mode ceiling
};

struct Scenario {
  std::string name = "custom";
  Modulation modulation = Modulation::bpsk;
  int users = 15;
  int processing_gain = 31;
  int symbols = 1;
  bool synchronous = true;
  std::string profile_name = "pd1";
  PowerDelayProfile profile = PowerDelayProfile::named("pd1");
  int fingers = 1;
  int antennas = 1;
  Fading fading = Fading::slow;
  bool per_antenna_delays = false;
  std::vector<double> ebn0_db{20.0};
  NearFar near_far;
  CsiError csi;
  SwarmConfig swarm;
  Budget budget;
  std::uint64_t seed = 1;
  bool run_omud = false;
  std::uint64_t search_cap = kDefaultSearchCap;

  // Throws ConfigError on hard violations; returns notes for values outside
  // the studied parameter ranges (extrapolation).
  std::vector<std::string> validate() const;
};

inline constexpr int kMaxUsers = 64;

// Optimised swarm coefficients per channel/modulation family.
SwarmConfig table_swarm_defaults(Modulation mod, bool diversity);

nlohmann::json to_json(const Scenario& s);
// Keys missing from `j` keep the values of `base`.
Scenario scenario_from_json(const nlohmann::json& j, Scenario base = {});
Scenario builtin_scenario(std::string_view name);
std::vector<std::string> builtin_scenario_names();
// 16 hex digits of FNV-1a over the canonical JSON of the scenario.
std::string scenario_hash(const Scenario& s);

struct RunOptions {
  int jobs = 1;
  int shards = 0;  // 0: 4 per job
};

struct SingleUserBound {
  double ser = 0.0;
  double ber = 0.0;
  std::string method;  // closed-form | mgf-integral | awgn
};

SingleUserBound single_user_bound(const Scenario& s, double ebn0_db);

struct PointReport {
  double ebn0_db = 0.0;
  long long trials = 0;
  ErrorStats cd;
  ErrorStats pso;                   // final decision
  std::vector<ErrorStats> pso_trace;  // per iteration 0..G, bit counters only
  ErrorStats omud;
  bool has_omud = false;
  SingleUserBound sub;
  std::uint64_t draw_digest = 0;  // order-independent hash of channel/code/symbol/noise draws
  long long pso_evaluations = 0;
  long long trace_violations = 0;  // non-monotone gbest traces or final below seed
};

struct ScenarioReport {
  Scenario scenario;
  std::string hash;
  std::string parameter;  // sweep parameter, empty for plain runs
  double value = 0.0;
  std::vector<std::string> notes;
  std::vector<PointReport> points;
  double wall_seconds = 0.0;
};

// Trials are independent work units seeded from (seed, point, trial); shards
// are merged in a fixed order, so the result does not depend on jobs/shards.
ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts = {});

struct SweepSpec {
  std::string parameter;  // omega | phi1 | phi2 | vmax | K | EbN0
  std::vector<double> values;
  Scenario base;
};

SweepSpec parse_sweep(std::string_view text, const Scenario& base);  // "phi2=1,4,10,15"
Scenario apply_sweep_value(const Scenario& base, std::string_view parameter, double value);

struct SweepRow {
  double value;
  double ebn0_db;
  int iteration;
  double ber;
};

struct SweepReport {
  SweepSpec spec;
  std::vector<ScenarioReport> cells;
  std::vector<SweepRow> table() const;  // PSO convergence rows per grid value
};

// Every cell reuses the base seed, so channel, code, symbol and noise draws
// are common to all grid values.
SweepReport run_sweep(const SweepSpec& spec, const RunOptions& opts = {});

enum class OutputFormat { csv, plotdata };
OutputFormat output_format_from_name(std::string_view name);

inline constexpr int kSchemaVersion = 1;

std::string format_csv(std::span<const ScenarioReport> reports);
std::string format_plotdata(std::span<const ScenarioReport> reports);
nlohmann::json metadata_json(std::span<const ScenarioReport> reports);

struct EmitOptions {
  std::filesystem::path out_dir = ".";
  std::string basename = "results";
  OutputFormat format = OutputFormat::csv;
  bool sidecar = true;
};

// Writes <basename>.csv or <basename>.dat plus the <basename>.json sidecar.
std::vector<std::filesystem::path> emit_results(std::span<const ScenarioReport> reports, const EmitOptions& opts);

}  // namespace cdmamud
