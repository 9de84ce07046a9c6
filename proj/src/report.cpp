#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "cdmamud/harness.hpp"

namespace cdmamud {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One emitted curve point.
struct Row {
  const ScenarioReport* report;
  const PointReport* point;
  std::string detector;
  int iteration;  // -1: not an iterative detector
  double ber;
  double ser;
  long long bit_errors, bits, symbol_errors, symbols;
  bool has_counts;
};

std::vector<Row> collect(std::span<const ScenarioReport> reports) {
  std::vector<Row> rows;
  for (const auto& r : reports)
    for (const auto& p : r.points) {
      auto counted = [&](std::string name, int it, const ErrorStats& e) {
        rows.push_back({&r, &p, std::move(name), it, e.ber(), e.ser(), e.bit_errors, e.bits, e.symbol_errors,
                        e.symbols, true});
      };
      counted("cd", -1, p.cd);
      for (std::size_t t = 0; t < p.pso_trace.size(); ++t) counted("pso", static_cast<int>(t), p.pso_trace[t]);
      if (!p.pso_trace.empty()) counted("pso", -1, p.pso);
      if (p.has_omud) counted("omud", -1, p.omud);
      rows.push_back({&r, &p, "sub", -1, p.sub.ber, p.sub.ser, 0, 0, 0, 0, false});
    }
  return rows;
}

}  // namespace

OutputFormat output_format_from_name(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "plotdata") return OutputFormat::plotdata;
  throw ConfigError("unknown output format '" + std::string(name) + "' (expected csv or plotdata)");
}

// Iteration -1 is the final decision. Bound rows carry no counters and an
// empty confidence band; trace rows only count bits, so their ser is empty.
std::string format_csv(std::span<const ScenarioReport> reports) {
  std::ostringstream out;
  out << "# cdmamud-results schema=" << kSchemaVersion << "\n";
  out << "scenario_hash,scenario,param,value,ebn0_db,detector,iteration,ber,ser,bit_errors,bits,symbol_errors,"
         "symbols,trials,ci_low,ci_high,reliable,seed\n";
  for (const Row& row : collect(reports)) {
    const ScenarioReport& r = *row.report;
    out << r.hash << ',' << r.scenario.name << ',' << r.parameter << ',' << (r.parameter.empty() ? "" : num(r.value))
        << ',' << num(row.point->ebn0_db) << ',' << row.detector << ',' << row.iteration << ',' << num(row.ber) << ','
        << (row.has_counts && row.symbols == 0 ? "" : num(row.ser)) << ',';
    if (row.has_counts) {
      out << row.bit_errors << ',' << row.bits << ',' << row.symbol_errors << ',' << row.symbols << ','
          << row.point->trials << ',' << num(row.ber * kConfidenceLow) << ',' << num(row.ber * kConfidenceHigh) << ','
          << (row.bit_errors >= kReliableErrors ? 1 : 0);
    } else {
      out << ",,,,,,,";
    }
    out << ',' << r.scenario.seed << '\n';
  }
  return out.str();
}

// Gnuplot data: one indexed block per curve (blank-line pairs), x = Eb/N0
// or iteration for the convergence curves.
std::string format_plotdata(std::span<const ScenarioReport> reports) {
  std::ostringstream out;
  out << "# cdmamud-results schema=" << kSchemaVersion << " plotdata\n";
  int block = 0;
  auto header = [&](const std::string& title, const char* x) {
    if (block++) out << "\n\n";
    out << "# curve " << title << "\n# " << x << " ber\n";
  };
  for (const auto& r : reports) {
    std::string prefix = r.scenario.name;
    if (!r.parameter.empty()) prefix += " " + r.parameter + "=" + num(r.value);
    if (r.points.empty()) continue;
    auto by_snr = [&](const std::string& detector, auto&& pick) {
      header(prefix + " " + detector, "ebn0_db");
      for (const auto& p : r.points) out << num(p.ebn0_db) << ' ' << num(pick(p)) << '\n';
    };
    by_snr("cd", [](const PointReport& p) { return p.cd.ber(); });
    by_snr("pso", [](const PointReport& p) { return p.pso.ber(); });
    if (r.points.front().has_omud) by_snr("omud", [](const PointReport& p) { return p.omud.ber(); });
    by_snr("sub", [](const PointReport& p) { return p.sub.ber; });
    for (const auto& p : r.points) {
      header(prefix + " pso-convergence ebn0_db=" + num(p.ebn0_db), "iteration");
      for (std::size_t t = 0; t < p.pso_trace.size(); ++t) out << t << ' ' << num(p.pso_trace[t].ber()) << '\n';
    }
  }
  return out.str();
}

nlohmann::json metadata_json(std::span<const ScenarioReport> reports) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.points)
      points.push_back({{"ebn0_db", p.ebn0_db},
                        {"trials", p.trials},
                        {"bound_method", p.sub.method},
                        {"pso_evaluations", p.pso_evaluations},
                        {"trace_violations", p.trace_violations}});
    runs.push_back({{"scenario", to_json(r.scenario)},
                    {"scenario_hash", r.hash},
                    {"parameter", r.parameter},
                    {"value", r.value},
                    {"notes", r.notes},
                    {"points", points},
                    {"wall_seconds", r.wall_seconds}});
  }
  return {{"schema", kSchemaVersion}, {"library_version", CDMAMUD_VERSION}, {"runs", runs}};
}

std::vector<std::filesystem::path> emit_results(std::span<const ScenarioReport> reports, const EmitOptions& opts) {
  if (reports.empty()) throw std::invalid_argument("emit_results: nothing to write");
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + opts.out_dir.string() + ": " + ec.message());

  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.close();
    if (!f) throw std::runtime_error("failed to write " + path.string());
  };

  std::vector<std::filesystem::path> written;
  const bool csv = opts.format == OutputFormat::csv;
  written.push_back(opts.out_dir / (opts.basename + (csv ? ".csv" : ".dat")));
  write(written.back(), csv ? format_csv(reports) : format_plotdata(reports));
  if (opts.sidecar) {
    written.push_back(opts.out_dir / (opts.basename + ".json"));
    write(written.back(), metadata_json(reports).dump(2) + "\n");
  }
  return written;
}

}  // namespace cdmamud
