#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <sstream>
#include <mutex>
#include <thread>

#include "cdmamud/airlink.hpp"
#include "cdmamud/harness.hpp"

namespace cdmamud {

namespace {

class Fnv64 {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void value(const T& v) {
    bytes(&v, sizeof v);
  }
  std::uint64_t digest() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ull;
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// Everything that stays fixed across the trials of one Eb/N0 point.
struct PointSetup {
  const Scenario* scenario;
  Constellation constellation;
  ChannelLayout layout;
  std::vector<double> amplitudes;
  double n0;
  std::vector<std::uint8_t> symbol_mask;  // per block symbol
  std::vector<std::uint8_t> bit_mask;     // per block bit
  std::uint64_t point_index;
};

PointSetup make_setup(const Scenario& s, std::size_t point_index) {
  PointSetup ps{&s, Constellation(s.modulation), {}, {}, 0.0, {}, {}, point_index};
  const int K = s.users, I = s.symbols, m = ps.constellation.bits_per_symbol();
  ps.layout = {K, I, s.antennas, s.processing_gain, s.fading, s.synchronous, s.per_antenna_delays};

  // Reference bit energy 1; N0 from Eb/N0 of the reference users.
  ps.n0 = 1.0 / db_to_linear(s.ebn0_db[point_index]);
  const int first_strong = K - s.near_far.strong_users;
  ps.amplitudes.resize(K);
  for (int k = 0; k < K; ++k) {
    const double eb = k >= first_strong ? db_to_linear(s.near_far.offset_db) : 1.0;
    ps.amplitudes[k] = std::sqrt(m * eb);
  }

  // Guard symbols at both edges of an asynchronous window are not counted.
  const bool guard = !s.synchronous && I >= 3;
  ps.symbol_mask.assign(static_cast<std::size_t>(K) * I, 0);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) {
      const bool symbol_counted = !guard || (i > 0 && i < I - 1);
      const bool user_counted = !(s.near_far.weak_only && s.near_far.strong_users > 0 && k >= first_strong);
      ps.symbol_mask[static_cast<std::size_t>(i) * K + k] = symbol_counted && user_counted;
    }
  ps.bit_mask.resize(ps.symbol_mask.size() * m);
  for (std::size_t r = 0; r < ps.symbol_mask.size(); ++r)
    for (int j = 0; j < m; ++j) ps.bit_mask[r * m + j] = ps.symbol_mask[r];
  return ps;
}

struct ShardResult {
  ErrorStats cd, pso, omud;
  std::vector<ErrorStats> trace;
  std::uint64_t digest = 0;
  long long evaluations = 0;
  long long violations = 0;

  void merge(const ShardResult& o) {
    cd.merge(o.cd);
    pso.merge(o.pso);
    omud.merge(o.omud);
    if (trace.size() < o.trace.size()) trace.resize(o.trace.size());
    for (std::size_t t = 0; t < o.trace.size(); ++t) trace[t].merge(o.trace[t]);
    digest += o.digest;
    evaluations += o.evaluations;
    violations += o.violations;
  }
};

void run_trial(const PointSetup& ps, std::uint64_t trial, ShardResult& out) {
  const Scenario& s = *ps.scenario;
  const Constellation& c = ps.constellation;
  const int K = s.users, I = s.symbols, M = c.order();

  Rng draws = make_rng(s.seed, ps.point_index, trial, Stream::draws);
  const SpreadingSet codes = SpreadingSet::generate(K, s.processing_gain, draws);
  const ChannelRealization channel = draw_channel(s.profile, ps.layout, draws);

  std::uniform_int_distribution<int> label_dist(0, M - 1);
  Eigen::MatrixXcd truth_grid(K, I);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) truth_grid(k, i) = c.grid_point(static_cast<unsigned>(label_dist(draws)));
  const Bits truth = grid_symbols_to_bits(truth_grid, c);

  const ReceivedSignal rx =
      synthesize_received(truth_grid * c.energy_scale(), ps.amplitudes, channel, codes, ps.n0, draws);

  Rng csi_rng = make_rng(s.seed, ps.point_index, trial, Stream::csi);
  const ChannelEstimate estimate = corrupt_estimate(channel, s.csi.gain, s.csi.phase, csi_rng);

  const DespreadObservation obs = despread(rx, codes, channel, s.fingers);
  std::vector<CorrelationStructure> correlations;
  const int distinct = s.per_antenna_delays ? s.antennas : 1;
  for (int q = 0; q < distinct; ++q) correlations.push_back(compute_correlations(codes, channel, q, s.fingers, I));

  const Eigen::MatrixXcd zeta = mrc_combine(obs, estimate);
  const ConventionalDecision cd = conventional_decide(zeta, estimate, s.fingers, ps.amplitudes, c);
  accumulate(out.cd, truth, cd.bits, c.bits_per_symbol(), ps.symbol_mask);

  const LlfContext ctx(obs, std::move(correlations), estimate, ps.amplitudes, c);
  const LikelihoodModel model(ctx);

  Rng swarm_rng = make_rng(s.seed, ps.point_index, trial, Stream::swarm);
  const SwarmResult pso = pso_detect(model, cd.bits, s.swarm, swarm_rng, {truth, ps.bit_mask});
  accumulate(out.pso, truth, pso.detection.bits, c.bits_per_symbol(), ps.symbol_mask);
  if (out.trace.size() < pso.trace.size()) out.trace.resize(pso.trace.size());
  for (std::size_t t = 0; t < pso.trace.size(); ++t) {
    out.trace[t].bit_errors += pso.trace[t].bit_errors;
    out.trace[t].bits += pso.trace[t].counted_bits;
    out.trace[t].trials += 1;
  }
  out.evaluations += pso.evaluations;

  const double seed_fitness = model.fitness(cd.bits);
  bool ok = pso.detection.fitness >= seed_fitness;
  for (std::size_t t = 1; t < pso.trace.size(); ++t) ok = ok && pso.trace[t].fitness >= pso.trace[t - 1].fitness;
  if (!ok) ++out.violations;

  if (s.run_omud) {
    const Detection best = omud_exhaustive(model, s.search_cap);
    accumulate(out.omud, truth, best.bits, c.bits_per_symbol(), ps.symbol_mask);
  }

  out.cd.trials += 1;
  out.pso.trials += 1;
  out.omud.trials += s.run_omud ? 1 : 0;

  Fnv64 h;
  for (int k = 0; k < K; ++k)
    for (int n = 0; n < s.processing_gain; ++n) h.value(static_cast<std::int8_t>(codes.chip(k, n)));
  h.bytes(truth.data(), truth.size());
  for (int q = 0; q < channel.antennas(); ++q)
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < channel.paths(); ++l) {
        h.value(channel.delay(q, k, l));
        for (int i = 0; i < I; ++i) {
          h.value(channel.gain(q, k, l, i));
          h.value(channel.phase(q, k, l, i));
        }
      }
  for (const auto& r : rx.antennas) h.bytes(r.data(), sizeof(std::complex<double>) * r.size());
  out.digest += h.digest();
}

long long trials_for_point(const Scenario& s, const SingleUserBound& sub, const PointSetup& ps) {
  if (s.budget.mode == BudgetMode::fixed) return s.budget.trials;
  const long long counted = std::count(ps.symbol_mask.begin(), ps.symbol_mask.end(), std::uint8_t{1});
  if (counted == 0 || !(sub.ser > 0.0)) return s.budget.max_trials;
  const auto symbols = static_cast<double>(min_trials(sub.ser, s.budget.errors));
  const auto trials = static_cast<long long>(std::ceil(symbols / static_cast<double>(counted)));
  return std::clamp(trials, 1LL, s.budget.max_trials);
}

}  // namespace

SingleUserBound single_user_bound(const Scenario& s, double ebn0_db) {
  const Constellation c(s.modulation);
  const int M = c.order(), m = c.bits_per_symbol();
  const double nu_symbol = m * db_to_linear(ebn0_db);

  SingleUserBound out;
  if (s.fading == Fading::none) {
    // Combined SNR of D x Q unit-gain branches.
    out.ser = awgn_ser(M, nu_symbol * s.antennas * s.fingers);
    out.method = "awgn";
  } else {
    std::vector<double> nu;
    for (int q = 0; q < s.antennas; ++q)
      for (int l = 0; l < s.fingers; ++l) nu.push_back(nu_symbol * s.profile.energies[l]);
    try {
      out.ser = M == 2 ? sub_ber_bpsk(nu) : sub_ser(M, nu);
      out.method = "closed-form";
    } catch (const std::domain_error&) {
      out.ser = sub_ser_mgf(M, nu);
      out.method = "mgf-integral";
    }
  }
  // Gray-mapped QAM: BER ~ SER / m at the plotted SNRs.
  out.ber = out.ser / m;
  return out;
}

ScenarioReport run_scenario(const Scenario& s, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioReport report;
  report.scenario = s;
  report.notes = s.validate();
  report.hash = scenario_hash(s);

  const int jobs = std::max(1, opts.jobs);
  const int shard_count = opts.shards > 0 ? opts.shards : 4 * jobs;

  for (std::size_t p = 0; p < s.ebn0_db.size(); ++p) {
    const PointSetup ps = make_setup(s, p);
    PointReport point;
    point.ebn0_db = s.ebn0_db[p];
    point.sub = single_user_bound(s, point.ebn0_db);
    point.trials = trials_for_point(s, point.sub, ps);
    point.has_omud = s.run_omud;

    const auto total = static_cast<std::uint64_t>(point.trials);
    const auto shards = static_cast<std::uint64_t>(std::min<long long>(shard_count, point.trials));
    std::vector<ShardResult> results(shards);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
      for (std::uint64_t sh = next++; sh < shards; sh = next++) {
        const std::uint64_t begin = total * sh / shards, end = total * (sh + 1) / shards;
        try {
          for (std::uint64_t t = begin; t < end; ++t) run_trial(ps, t, results[sh]);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    ShardResult merged;
    for (const auto& r : results) merged.merge(r);
    point.cd = merged.cd;
    point.pso = merged.pso;
    point.omud = merged.omud;
    point.pso_trace = std::move(merged.trace);
    point.draw_digest = merged.digest;
    point.pso_evaluations = merged.evaluations;
    point.trace_violations = merged.violations;
    report.points.push_back(std::move(point));
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Scenario apply_sweep_value(const Scenario& base, std::string_view parameter, double value) {
  Scenario s = base;
  if (parameter == "omega") {
    s.swarm.inertia = value;
  } else if (parameter == "phi1") {
    s.swarm.cognitive = value;
  } else if (parameter == "phi2") {
    s.swarm.social = value;
  } else if (parameter == "vmax") {
    s.swarm.vmax = value;
  } else if (parameter == "K") {
    if (value != std::floor(value)) throw ConfigError("sweep K values must be integers");
    s.users = static_cast<int>(value);
  } else if (parameter == "EbN0") {
    s.ebn0_db = {value};
  } else {
    throw ConfigError("unknown sweep parameter '" + std::string(parameter) +
                      "' (expected omega, phi1, phi2, vmax, K or EbN0)");
  }
  return s;
}

SweepSpec parse_sweep(std::string_view text, const Scenario& base) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError("sweep must look like name=v1,v2,...");
  SweepSpec spec;
  spec.parameter = std::string(text.substr(0, eq));
  spec.base = base;
  std::stringstream ss{std::string(text.substr(eq + 1))};
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      spec.values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("sweep value '" + item + "' is not a number");
    }
  }
  if (spec.values.empty()) throw ConfigError("sweep grid is empty");
  return spec;
}

SweepReport run_sweep(const SweepSpec& spec, const RunOptions& opts) {
  if (spec.values.empty()) throw ConfigError("sweep grid is empty");
  SweepReport out;
  out.spec = spec;
  for (double v : spec.values) {
    Scenario cell = apply_sweep_value(spec.base, spec.parameter, v);
    ScenarioReport r = run_scenario(cell, opts);
    r.parameter = spec.parameter;
    r.value = v;
    out.cells.push_back(std::move(r));
  }
  return out;
}

std::vector<SweepRow> SweepReport::table() const {
  std::vector<SweepRow> rows;
  for (const auto& cell : cells)
    for (const auto& point : cell.points)
      for (std::size_t t = 0; t < point.pso_trace.size(); ++t)
        rows.push_back({cell.value, point.ebn0_db, static_cast<int>(t), point.pso_trace[t].ber()});
  return rows;
}

}  // namespace cdmamud
