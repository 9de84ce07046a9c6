#include <cstdio>
#include <string>

#include "cdmamud/harness.hpp"

namespace cdmamud {

using nlohmann::json;

SwarmConfig table_swarm_defaults(Modulation mod, bool diversity) {
  SwarmConfig cfg;
  cfg.inertia = 1.0;
  cfg.vmax = 4.0;
  switch (mod) {
    case Modulation::bpsk:
      cfg.cognitive = 2.0;
      cfg.social = diversity ? 15.0 : 10.0;
      cfg.iterations = diversity ? 50 : 30;
      break;
    case Modulation::qpsk:
      cfg.cognitive = 4.0;
      cfg.social = 4.0;
      cfg.iterations = 50;
      break;
    case Modulation::qam16:
      cfg.cognitive = 6.0;
      cfg.social = 1.0;
      cfg.iterations = 100;
      break;
  }
  return cfg;
}

std::vector<std::string> Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (users < 1 || users > kMaxUsers) fail("users must be in [1, " + std::to_string(kMaxUsers) + "]");
  if (processing_gain < 1) fail("processing_gain must be >= 1");
  if (symbols < 1) fail("symbols must be >= 1");
  if (!synchronous && symbols < 3) fail("asynchronous detection needs at least 3 symbols per window");
  if (antennas < 1) fail("antennas must be >= 1");
  try {
    profile.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (fingers < 1 || fingers > profile.path_count()) fail("fingers must satisfy 1 <= D <= L");
  if (!synchronous && profile.max_delay() >= processing_gain) fail("delay spread exceeds one symbol");
  if (ebn0_db.empty()) fail("ebn0_db list is empty");
  if (near_far.strong_users < 0 || near_far.strong_users >= users)
    fail("near_far.strong_users must leave at least one reference user");
  if (!(csi.gain >= 0.0 && csi.gain < 1.0) || !(csi.phase >= 0.0 && csi.phase < 1.0))
    fail("csi error bounds must lie in [0, 1)");
  try {
    swarm.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (budget.mode == BudgetMode::fixed && budget.trials < 1) fail("budget.trials must be >= 1");
  if (budget.mode == BudgetMode::min_trials && (!(budget.errors > 0.0) || budget.max_trials < 1))
    fail("budget.errors and budget.max_trials must be positive");
  if (run_omud) {
    const long bits = static_cast<long>(Constellation(modulation).bits_per_symbol()) * users * symbols;
    if (bits >= 63 || (std::uint64_t{1} << bits) > search_cap)
      fail("exhaustive detector search space 2^" + std::to_string(bits) + " exceeds search_cap");
  }

  std::vector<std::string> notes;
  auto note = [&](const std::string& msg) { notes.push_back("extrapolation: " + msg); };
  if (users < 5 || users > 31) note("K = " + std::to_string(users) + " outside [5, 31]");
  if (processing_gain != 31) note("N = " + std::to_string(processing_gain) + " (studied: 31)");
  if (antennas > 3) note("Q = " + std::to_string(antennas) + " > 3");
  if (profile.path_count() > 3) note("L = " + std::to_string(profile.path_count()) + " > 3");
  for (double e : ebn0_db)
    if (e < 0.0 || e > 30.0) note("Eb/N0 = " + std::to_string(e) + " dB outside [0, 30]");
  return notes;
}

namespace {

std::string budget_mode_name(BudgetMode m) { return m == BudgetMode::fixed ? "fixed" : "min_trials"; }

BudgetMode budget_mode_from_name(const std::string& name) {
  if (name == "fixed") return BudgetMode::fixed;
  if (name == "min_trials") return BudgetMode::min_trials;
  throw ConfigError("unknown budget mode '" + name + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

json to_json(const Scenario& s) {
  json profile = s.profile_name == "custom"
                     ? json{{"delays", s.profile.delays}, {"energies", s.profile.energies}}
                     : json(s.profile_name);
  return json{
      {"name", s.name},
      {"modulation", modulation_name(s.modulation)},
      {"users", s.users},
      {"processing_gain", s.processing_gain},
      {"symbols", s.symbols},
      {"synchronous", s.synchronous},
      {"channel",
       {{"profile", profile},
        {"fingers", s.fingers},
        {"antennas", s.antennas},
        {"fading", fading_name(s.fading)},
        {"per_antenna_delays", s.per_antenna_delays}}},
      {"ebn0_db", s.ebn0_db},
      {"near_far",
       {{"strong_users", s.near_far.strong_users},
        {"offset_db", s.near_far.offset_db},
        {"weak_only", s.near_far.weak_only}}},
      {"csi_error", {{"gain", s.csi.gain}, {"phase", s.csi.phase}}},
      {"swarm",
       {{"inertia", s.swarm.inertia},
        {"cognitive", s.swarm.cognitive},
        {"social", s.swarm.social},
        {"vmax", s.swarm.vmax},
        {"population", s.swarm.population},
        {"iterations", s.swarm.iterations},
        {"initial_velocity", initial_velocity_name(s.swarm.initial_velocity)},
        {"cache_fitness", s.swarm.cache_fitness}}},
      {"budget",
       {{"mode", budget_mode_name(s.budget.mode)},
        {"trials", s.budget.trials},
        {"errors", s.budget.errors},
        {"max_trials", s.budget.max_trials}}},
      {"seed", s.seed},
      {"run_omud", s.run_omud},
      {"search_cap", s.search_cap},
  };
}

Scenario scenario_from_json(const json& j, Scenario s) {
  try {
    if (!j.is_object()) throw ConfigError("scenario config must be a JSON object");
    read(j, "name", s.name);
    if (j.contains("modulation")) s.modulation = modulation_from_name(j.at("modulation").get<std::string>());
    read(j, "users", s.users);
    read(j, "processing_gain", s.processing_gain);
    read(j, "symbols", s.symbols);
    read(j, "synchronous", s.synchronous);
    if (j.contains("channel")) {
      const auto& c = j.at("channel");
      if (c.contains("profile")) {
        const auto& p = c.at("profile");
        if (p.is_string()) {
          s.profile_name = p.get<std::string>();
          s.profile = PowerDelayProfile::named(s.profile_name);
        } else {
          s.profile_name = "custom";
          s.profile.delays = p.at("delays").get<std::vector<int>>();
          s.profile.energies = p.at("energies").get<std::vector<double>>();
          s.profile.validate();
        }
      }
      read(c, "fingers", s.fingers);
      read(c, "antennas", s.antennas);
      if (c.contains("fading")) s.fading = fading_from_name(c.at("fading").get<std::string>());
      read(c, "per_antenna_delays", s.per_antenna_delays);
    }
    if (j.contains("ebn0_db") && j.at("ebn0_db").is_number())
      s.ebn0_db = {j.at("ebn0_db").get<double>()};
    else
      read(j, "ebn0_db", s.ebn0_db);
    if (j.contains("near_far")) {
      const auto& n = j.at("near_far");
      read(n, "strong_users", s.near_far.strong_users);
      read(n, "offset_db", s.near_far.offset_db);
      read(n, "weak_only", s.near_far.weak_only);
    }
    if (j.contains("csi_error")) {
      read(j.at("csi_error"), "gain", s.csi.gain);
      read(j.at("csi_error"), "phase", s.csi.phase);
    }
    if (j.contains("swarm")) {
      const auto& w = j.at("swarm");
      read(w, "inertia", s.swarm.inertia);
      read(w, "cognitive", s.swarm.cognitive);
      read(w, "social", s.swarm.social);
      read(w, "vmax", s.swarm.vmax);
      read(w, "population", s.swarm.population);
      read(w, "iterations", s.swarm.iterations);
      if (w.contains("initial_velocity"))
        s.swarm.initial_velocity = initial_velocity_from_name(w.at("initial_velocity").get<std::string>());
      read(w, "cache_fitness", s.swarm.cache_fitness);
    }
    if (j.contains("budget")) {
      const auto& b = j.at("budget");
      if (b.contains("mode")) s.budget.mode = budget_mode_from_name(b.at("mode").get<std::string>());
      read(b, "trials", s.budget.trials);
      read(b, "errors", s.budget.errors);
      read(b, "max_trials", s.budget.max_trials);
    }
    read(j, "seed", s.seed);
    read(j, "run_omud", s.run_omud);
    read(j, "search_cap", s.search_cap);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario config: ") + e.what());
  }
  return s;
}

namespace {

Scenario flat_bpsk(std::string name, int users, double ebn0) {
  Scenario s;
  s.name = std::move(name);
  s.users = users;
  s.ebn0_db = {ebn0};
  s.swarm = table_swarm_defaults(Modulation::bpsk, false);
  return s;
}

Scenario with_modulation(Scenario s, Modulation mod) {
  s.modulation = mod;
  s.swarm = table_swarm_defaults(mod, false);
  return s;
}

Scenario with_profile(Scenario s, const std::string& profile) {
  s.profile_name = profile;
  s.profile = PowerDelayProfile::named(profile);
  s.fingers = s.profile.path_count();
  return s;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  return {"calibration", "fig4",   "fig5",   "fig6a",  "fig6b",  "fig7",   "fig8",   "fig9",  "fig10a",
          "fig10b",      "fig11a", "fig11b", "fig12a", "fig12b", "fig14a", "fig14b", "fig14c"};
}

Scenario builtin_scenario(std::string_view name) {
  if (name == "calibration") {
    Scenario s = flat_bpsk("calibration", 1, 0.0);
    s.ebn0_db = {0, 5, 10, 15, 20};
    s.budget = {BudgetMode::min_trials, 1000, 1000.0, 5000000};
    s.swarm.iterations = 0;
    return s;
  }
  // Flat-fading parameter studies at 22 dB with K = 15.
  if (name == "fig4" || name == "fig5" || name == "fig6a") {
    Scenario s = flat_bpsk(std::string(name), 15, 22.0);
    s.budget.trials = 3000;
    return s;
  }
  if (name == "fig6b") {
    Scenario s = flat_bpsk("fig6b", 15, 20.0);
    s.budget = {BudgetMode::min_trials, 1000, 100.0, 200000};
    return s;
  }
  if (name == "fig7") {
    Scenario s = with_modulation(flat_bpsk("fig7", 15, 22.0), Modulation::qpsk);
    s.budget.trials = 2000;
    return s;
  }
  if (name == "fig8") {
    Scenario s = with_modulation(flat_bpsk("fig8", 15, 30.0), Modulation::qam16);
    s.budget.trials = 1000;
    return s;
  }
  if (name == "fig9") {
    Scenario s = with_profile(flat_bpsk("fig9", 15, 22.0), "pd2");
    s.synchronous = false;
    s.symbols = 3;
    s.swarm = table_swarm_defaults(Modulation::bpsk, true);
    s.budget.trials = 1000;
    return s;
  }
  if (name == "fig10a" || name == "fig10b") {
    Scenario s = flat_bpsk(std::string(name), 15, 0.0);
    s.ebn0_db = {0, 5, 10, 15, 20, 25};
    s.budget = {BudgetMode::min_trials, 1000, 100.0, 100000};
    if (name == "fig10b") s.near_far = {7, 6.0, true};
    return s;
  }
  if (name == "fig11a") {
    Scenario s = with_profile(flat_bpsk("fig11a", 15, 15.0), "pd3");
    s.synchronous = false;
    s.symbols = 3;
    s.swarm = table_swarm_defaults(Modulation::bpsk, true);
    s.budget = {BudgetMode::min_trials, 1000, 100.0, 100000};
    return s;
  }
  if (name == "fig11b") {
    Scenario s = flat_bpsk("fig11b", 15, 15.0);
    s.antennas = 3;
    s.swarm = table_swarm_defaults(Modulation::bpsk, true);
    s.budget = {BudgetMode::min_trials, 1000, 100.0, 100000};
    return s;
  }
  if (name == "fig12a" || name == "fig12b") {
    Scenario s = flat_bpsk(std::string(name), 15, 0.0);
    s.ebn0_db = {0, 5, 10, 15, 20};
    if (name == "fig12a") {
      s = with_profile(s, "pd2");
      s.synchronous = false;
      s.symbols = 3;
    } else {
      s.antennas = 2;
    }
    s.swarm = table_swarm_defaults(Modulation::bpsk, true);
    s.csi = {0.10, 0.10};
    s.budget.trials = 1000;
    return s;
  }
  if (name == "fig14a") {
    Scenario s = flat_bpsk("fig14a", 24, 20.0);
    s.swarm.iterations = 50;
    s.budget.trials = 1000;
    return s;
  }
  if (name == "fig14b") {
    Scenario s = with_modulation(flat_bpsk("fig14b", 12, 20.0), Modulation::qpsk);
    s.budget.trials = 1000;
    return s;
  }
  if (name == "fig14c") {
    Scenario s = with_modulation(flat_bpsk("fig14c", 6, 20.0), Modulation::qam16);
    s.budget.trials = 1000;
    return s;
  }
  throw ConfigError("unknown built-in scenario '" + std::string(name) + "'");
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cdmamud
