// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "cdmamud/analysis.hpp"
#include "cdmamud/harness.hpp"

using namespace cdmamud;

namespace {

long long g_violations = 0;  // non-monotone gbest traces seen by any scenario run
long long g_runs = 0;

ScenarioReport run_tracked(const Scenario& s, const RunOptions& opts = {}) {
  ScenarioReport r = run_scenario(s, opts);
  for (const auto& p : r.points) {
    g_violations += p.trace_violations;
    g_runs += p.trials;
  }
  return r;
}

struct Outcome {
  bool pass;
  std::string detail;
};

int g_failures = 0;

void criterion(const char* id, const char* title, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++g_failures;
  std::printf("%s %s: %s (%s) [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, title, out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---- AC4 oracle: average the conditional SER over the MRC SNR density.

double q_func(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double qam_conditional(int M, double g) {
  const double a = 1 - 1 / std::sqrt(double(M));
  const double q = q_func(std::sqrt(3 * g / (M - 1.0)));
  return 4 * a * q - 4 * a * a * q * q;
}

double density_oracle(int M, const std::vector<double>& nu) {
  auto density = [&](double g) {
    double f = 0;
    for (std::size_t l = 0; l < nu.size(); ++l) {
      double w = 1;
      for (std::size_t k = 0; k < nu.size(); ++k)
        if (k != l) w *= nu[l] / (nu[l] - nu[k]);
      f += w / nu[l] * std::exp(-g / nu[l]);
    }
    return f;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate([&](double g) { return qam_conditional(M, g) * density(g); }, 1e-14);
}

// ---- AC5 oracle: chip-level Euclidean metric, exhaustive over all labels.

struct SmallInstance {
  Constellation c;
  SpreadingSet codes;
  ChannelRealization channel;
  std::vector<double> amplitudes;
  ReceivedSignal rx;
  Bits seed;
  std::unique_ptr<LikelihoodModel> model;
};

SmallInstance small_instance(Modulation mod, int K, double ebn0_db, Rng& rng) {
  SmallInstance s{Constellation(mod), {}, {}, {}, {}, {}, nullptr};
  const int m = s.c.bits_per_symbol();
  s.codes = SpreadingSet::generate(K, 31, rng);
  ChannelLayout layout;
  layout.users = K;
  s.channel = draw_channel(PowerDelayProfile::named("pd1"), layout, rng);
  s.amplitudes.assign(K, std::sqrt(double(m)));
  Eigen::MatrixXcd grid(K, 1);
  std::uniform_int_distribution<unsigned> pick(0, s.c.order() - 1);
  for (int k = 0; k < K; ++k) grid(k, 0) = s.c.grid_point(pick(rng));
  const double n0 = std::pow(10.0, -ebn0_db / 10);
  s.rx = synthesize_received(grid * s.c.energy_scale(), s.amplitudes, s.channel, s.codes, n0, rng);
  const auto obs = despread(s.rx, s.codes, s.channel, 1);
  const auto est = perfect_estimate(s.channel);
  s.seed = conventional_decide(mrc_combine(obs, est), est, 1, s.amplitudes, s.c).bits;
  const LlfContext ctx(obs, {compute_correlations(s.codes, s.channel, 0, 1, 1)}, est, s.amplitudes, s.c);
  s.model = std::make_unique<LikelihoodModel>(ctx);
  return s;
}

// Minimiser of ||r - s(d)||^2 over every complex symbol vector, enumerated
// user by user on the constellation points themselves.
Bits enumeration_oracle(const SmallInstance& s) {
  const int K = s.codes.users(), N = s.codes.processing_gain(), M = s.c.order(), m = s.c.bits_per_symbol();
  std::vector<Eigen::VectorXcd> signature(K);
  for (int k = 0; k < K; ++k) {
    signature[k] = Eigen::VectorXcd::Zero(N);
    for (int n = 0; n < N; ++n)
      signature[k][n] = s.amplitudes[k] * s.channel.coefficient(0, k, 0, 0) * double(s.codes.chip(k, n)) /
                        std::sqrt(double(N));
  }
  std::vector<std::complex<double>> points(M);
  std::vector<Bits> labels(M);
  for (int label = 0; label < M; ++label) {
    labels[label].resize(m);
    for (int j = 0; j < m; ++j) labels[label][j] = (label >> (m - 1 - j)) & 1;
    points[label] = s.c.bits_to_symbol(labels[label]);
  }
  double best = 1e300;
  std::vector<int> arg(K, 0), cur(K, 0);
  long total = 1;
  for (int k = 0; k < K; ++k) total *= M;
  for (long idx = 0; idx < total; ++idx) {
    long rest = idx;
    for (int k = K - 1; k >= 0; --k) {
      cur[k] = static_cast<int>(rest % M);
      rest /= M;
    }
    Eigen::VectorXcd model = Eigen::VectorXcd::Zero(N);
    for (int k = 0; k < K; ++k) model += points[cur[k]] * signature[k];
    const double dist = (s.rx.antennas[0] - model).squaredNorm();
    if (dist < best) best = dist, arg = cur;
  }
  Bits out;
  for (int k = 0; k < K; ++k) out.insert(out.end(), labels[arg[k]].begin(), labels[arg[k]].end());
  return out;
}

// ---- AC9 oracle: finger waveforms on an explicit chip axis.

Eigen::VectorXd finger_waveform(const SpreadingSet& codes, const ChannelRealization& ch, int i, int k, int l,
                                Eigen::Index length) {
  const int N = codes.processing_gain();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(length);
  for (int n = 0; n < N; ++n) w[i * N + ch.delay(0, k, l) + n] = codes.chip(k, n);
  return w;
}

}  // namespace

int main() {
  std::printf("acceptance suite, library %s\n", CDMAMUD_VERSION);

  criterion("AC1", "bit-change probability at saturated velocity", [] {
    const double table[] = {0.269, 0.119, 0.047, 0.018, 0.007};
    std::ostringstream d;
    bool ok = true;
    for (int v = 1; v <= 5; ++v) {
      const double flip = 1.0 - sigmoid(v);
      const double rounded = std::round(flip * 1000) / 1000;
      ok = ok && std::abs(rounded - table[v - 1]) < 1e-12;
      d << (v > 1 ? " " : "") << std::string(fmt(flip));
    }
    return Outcome{ok, "1-S(Vmax) = " + d.str()};
  });

  criterion("AC2", "population sizes", [] {
    auto direct = [](int m, int K, int I) {
      return 10 * int(std::ceil(0.3454 * (std::sqrt(std::numbers::pi * (m * K * I - 1)) + 2)));
    };
    const int cases[3][4] = {{1, 1, 1, 10}, {1, 15, 1, 30}, {4, 15, 1, 60}};
    bool ok = true;
    std::ostringstream d;
    for (const auto& c : cases) {
      const int got = population_size(c[0], c[1], c[2]);
      ok = ok && got == c[3] && got == direct(c[0], c[1], c[2]);
      d << got << " ";
    }
    return Outcome{ok, "P = " + d.str() + "expected 10 30 60"};
  });

  criterion("AC3", "single-user chain inside the 95% band of the bound", [] {
    const auto r = run_tracked(builtin_scenario("calibration"));
    bool ok = true;
    std::ostringstream d;
    for (const auto& p : r.points) {
      const double ratio = p.cd.ber() / p.sub.ber;
      ok = ok && ratio >= kConfidenceLow && ratio <= kConfidenceHigh && p.cd.reliable();
      d << p.ebn0_db << "dB:" << fmt(ratio) << " ";
    }
    return Outcome{ok, "CD/SuB " + d.str()};
  });

  criterion("AC4", "closed-form bound against density quadrature", [] {
    const std::vector<std::vector<double>> profiles{{1.0}, {0.832, 0.168}};
    double worst = 0;
    bool boundary = true;
    for (int M : {4, 16}) {
      for (const auto& pd : profiles) {
        for (int db = 0; db <= 30; ++db) {
          std::vector<double> nu;
          for (double e : pd) nu.push_back(std::pow(10.0, db / 10.0) * e);
          const double ref = density_oracle(M, nu);
          worst = std::max(worst, std::abs(sub_ser(M, nu) - ref) / ref);
        }
        const std::vector<double> zero(pd.size(), 0.0);
        boundary = boundary && sub_ser(M, zero) == 1.0 - 1.0 / M;
      }
    }
    return Outcome{worst <= 1e-6 && boundary, "max relative deviation " + fmt(worst) +
                                                   (boundary ? ", boundary exact" : ", boundary mismatch")};
  });

  criterion("AC5", "small-instance optimality of exhaustive and swarm search", [] {
    Rng rng(20240501);
    int omud_match = 0, pso_match = 0;
    const int instances = 100;
    for (int t = 0; t < instances; ++t) {
      const Modulation mod = t % 2 ? Modulation::qpsk : Modulation::bpsk;
      const int K = 2 + t % 3;
      const double ebn0 = (t / 3) % 4 * 4.0;  // 0, 4, 8, 12 dB
      const auto s = small_instance(mod, K, ebn0, rng);
      const Bits oracle = enumeration_oracle(s);
      omud_match += omud_exhaustive(*s.model).bits == oracle;
      SwarmConfig cfg = table_swarm_defaults(mod, false);
      cfg.iterations = 200;
      const auto pso = pso_detect(*s.model, s.seed, cfg, rng);
      pso_match += pso.detection.bits == oracle;
      for (std::size_t i = 1; i < pso.trace.size(); ++i)
        if (pso.trace[i].fitness < pso.trace[i - 1].fitness) ++g_violations;
      if (pso.detection.fitness < s.model->fitness(s.seed)) ++g_violations;
    }
    return Outcome{omud_match == instances && pso_match >= 95,
                   "exhaustive " + std::to_string(omud_match) + "/100, swarm " + std::to_string(pso_match) + "/100"};
  });

  criterion("AC9", "correlation structure against chip-level brute force", [] {
    Rng rng(777);
    double worst = 0;
    bool shape = true;
    for (int t = 0; t < 100; ++t) {
      const int K = 1 + t % 5, I = 1 + (t / 5) % 3, D = 1 + (t / 15) % 2;
      const auto codes = SpreadingSet::generate(K, 31, rng);
      ChannelLayout layout;
      layout.users = K;
      layout.symbols = I;
      layout.synchronous = false;
      const auto ch = draw_channel(PowerDelayProfile::named(D == 1 && t % 2 ? "pd1" : "pd2"), layout, rng);
      const auto cs = compute_correlations(codes, ch, 0, D, I);
      const Eigen::Index n = static_cast<Eigen::Index>(K) * D, len = static_cast<Eigen::Index>(I + 1) * 31;
      for (int i = 0; i < I; ++i)
        for (int k = 0; k < K; ++k)
          for (int l = 0; l < D; ++l)
            for (int j = 0; j < I; ++j)
              for (int u = 0; u < K; ++u)
                for (int m = 0; m < D; ++m) {
                  const double oracle =
                      finger_waveform(codes, ch, i, k, l, len).dot(finger_waveform(codes, ch, j, u, m, len)) / 31.0;
                  worst = std::max(worst, std::abs(oracle - cs.R((i * K + k) * D + l, (j * K + u) * D + m)));
                  if (std::abs(i - j) > 1) shape = shape && cs.R((i * K + k) * D + l, (j * K + u) * D + m) == 0.0;
                }
      shape = shape && cs.R0 == cs.R0.transpose() && (cs.R0.diagonal().array() == 1.0).all();
      for (int i = 0; i < I; ++i) {
        shape = shape && cs.R.block(i * n, i * n, n, n) == cs.R0;
        if (i + 1 < I)
          shape = shape && cs.R.block((i + 1) * n, i * n, n, n) == cs.R1 &&
                  cs.R.block(i * n, (i + 1) * n, n, n) == cs.R1.transpose();
      }
    }
    return Outcome{worst <= 1e-12 && shape, "max deviation " + fmt(worst) + (shape ? ", block tridiagonal" : ", shape broken")};
  });

  criterion("AC8", "determinism and shard-invariant merging", [] {
    Scenario s = builtin_scenario("fig9");
    s.users = 8;
    s.ebn0_db = {5.0, 15.0};
    s.budget.trials = 64;
    const auto a = run_tracked(s, {1, 1});
    const auto b = run_tracked(s, {1, 1});
    const bool bytes = format_csv(std::span(&a, 1)) == format_csv(std::span(&b, 1));
    bool merged = true;
    for (int shards : {4, 8}) {
      const auto r = run_tracked(s, {1, shards});
      for (std::size_t p = 0; p < a.points.size(); ++p)
        merged = merged && r.points[p].cd == a.points[p].cd && r.points[p].pso == a.points[p].pso &&
                 r.points[p].pso_trace == a.points[p].pso_trace && r.points[p].draw_digest == a.points[p].draw_digest;
    }
    return Outcome{bytes && merged, std::string(bytes ? "CSV identical" : "CSV differs") +
                                        (merged ? ", shards 1/4/8 agree" : ", shard results differ")};
  });

  // (a) inertia grid under common random numbers at the iteration budget.
  criterion("AC7a", "inertia 1 reaches the lowest BER at the iteration budget", [] {
    const auto rep = run_sweep(parse_sweep("omega=0.5,1,1.5", builtin_scenario("fig4")));
    double best_other = 1.0, at_one = 1.0;
    std::ostringstream d;
    for (const auto& cell : rep.cells) {
      for (const auto& p : cell.points) g_violations += p.trace_violations;
      const double ber = cell.points[0].pso.ber();
      d << "w=" << cell.value << ":" << fmt(ber) << " ";
      if (cell.value == 1.0)
        at_one = ber;
      else
        best_other = std::min(best_other, ber);
    }
    return Outcome{at_one <= best_other, d.str() + "(G=30, 3000 trials)"};
  });

  criterion("AC7b", "swarm beats conventional detection; near-far robustness", [] {
    const auto equal = run_tracked(builtin_scenario("fig10a"));
    const auto nfr = run_tracked(builtin_scenario("fig10b"));
    bool ok = true;
    double worst_ratio = 0;
    for (std::size_t p = 0; p < equal.points.size(); ++p) {
      const auto& e = equal.points[p];
      const auto& n = nfr.points[p];
      if (e.ebn0_db >= 5.0) ok = ok && e.pso.ber() < e.cd.ber() && n.pso.ber() < n.cd.ber();
      const double ratio = n.pso.ber() / e.pso.ber();
      worst_ratio = std::max(worst_ratio, ratio);
      ok = ok && ratio <= 2.0;
    }
    return Outcome{ok, "PSO < CD from 5 dB in both; worst weak/equal PSO BER ratio " + fmt(worst_ratio)};
  });

  criterion("AC7c", "swarm BER falls with more paths and more antennas", [] {
    // Each study at one fixed Eb/N0: paths at the scenario's own 15 dB, antennas at
    // 10 dB where the Q = 3 bound still needs under 10^5 trials.
    constexpr double kPathsEbN0 = 15.0, kAntennasEbN0 = 10.0;
    std::vector<double> by_l, by_q;
    std::ostringstream d;
    for (const char* profile : {"pd1", "pd2", "pd3"}) {
      Scenario s = builtin_scenario("fig11a");
      s.profile_name = profile;
      s.profile = PowerDelayProfile::named(profile);
      s.fingers = s.profile.path_count();
      s.ebn0_db = {kPathsEbN0};
      by_l.push_back(run_tracked(s).points[0].pso.ber());
      d << "L=" << s.fingers << ":" << fmt(by_l.back()) << " ";
    }
    for (int q = 1; q <= 3; ++q) {
      Scenario s = builtin_scenario("fig11b");
      s.antennas = q;
      s.ebn0_db = {kAntennasEbN0};
      by_q.push_back(run_tracked(s).points[0].pso.ber());
      d << "Q=" << q << ":" << fmt(by_q.back()) << " ";
    }
    const bool ok = by_l[0] > by_l[1] && by_l[1] > by_l[2] && by_q[0] > by_q[1] && by_q[1] > by_q[2];
    return Outcome{ok, d.str() + "(L at " + fmt(kPathsEbN0) + " dB, Q at " + fmt(kAntennasEbN0) + " dB)"};
  });

  // Runs after every other scenario so that their traces are included.
  criterion("AC6", "monotone gbest traces and final fitness never below the seed", [] {
    for (const auto& name : builtin_scenario_names()) {
      Scenario s = builtin_scenario(name);
      s.budget = {BudgetMode::fixed, 8, 100.0, 8};
      run_tracked(s);
    }
    return Outcome{g_violations == 0, std::to_string(g_violations) + " violations over " + std::to_string(g_runs) +
                                          " scenario trials plus the small instances"};
  });

  std::printf("%s: %d criteria failed\n", g_failures ? "FAIL" : "PASS", g_failures);
  return g_failures ? 1 : 0;
}
