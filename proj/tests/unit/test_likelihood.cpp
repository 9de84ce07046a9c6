#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cdmamud/detectors.hpp"

using namespace cdmamud;

namespace {

struct Instance {
  Constellation c;
  SpreadingSet codes;
  ChannelRealization channel;
  std::vector<double> amplitudes;
  Eigen::MatrixXcd truth;
  ReceivedSignal rx;
  DespreadObservation obs;
  std::vector<CorrelationStructure> correlations;
};

Instance make_instance(Modulation mod, int K, int I, int Q, const std::string& profile, bool sync, double n0,
                       Rng& rng) {
  Instance s{Constellation(mod), {}, {}, {}, {}, {}, {}, {}};
  s.codes = SpreadingSet::generate(K, 31, rng);
  ChannelLayout layout;
  layout.users = K;
  layout.symbols = I;
  layout.antennas = Q;
  layout.synchronous = sync;
  const auto pd = PowerDelayProfile::named(profile);
  s.channel = draw_channel(pd, layout, rng);
  for (int k = 0; k < K; ++k) s.amplitudes.push_back(std::sqrt(s.c.bits_per_symbol() * (1.0 + 0.3 * k)));
  std::uniform_int_distribution<unsigned> pick(0, s.c.order() - 1);
  s.truth.resize(K, I);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) s.truth(k, i) = s.c.grid_point(pick(rng));
  s.rx = synthesize_received(s.truth * s.c.energy_scale(), s.amplitudes, s.channel, s.codes, n0, rng);
  s.obs = despread(s.rx, s.codes, s.channel, pd.path_count());
  for (int q = 0; q < Q; ++q)
    s.correlations.push_back(compute_correlations(s.codes, s.channel, q, pd.path_count(), I));
  return s;
}

// ||r||^2 - ||r - s(d)||^2 with s(d) built chip by chip from the candidate.
double chip_level_metric(const Instance& s, const Eigen::MatrixXcd& grid) {
  const int K = s.codes.users(), N = s.codes.processing_gain(), I = static_cast<int>(grid.cols());
  double total = 0;
  for (int q = 0; q < s.channel.antennas(); ++q) {
    Eigen::VectorXcd model = Eigen::VectorXcd::Zero(s.rx.length());
    for (int i = 0; i < I; ++i)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < s.channel.paths(); ++l)
          for (int n = 0; n < N; ++n)
            model[i * N + s.channel.delay(q, k, l) + n] += s.amplitudes[k] * s.c.energy_scale() * grid(k, i) *
                                                         s.channel.coefficient(q, k, l, i) * double(s.codes.chip(k, n)) /
                                                         std::sqrt(double(N));
    total += s.rx.antennas[q].squaredNorm() - (s.rx.antennas[q] - model).squaredNorm();
  }
  return total;
}

Eigen::MatrixXcd grid_from_index(const Constellation& c, std::uint64_t idx, int K, int I) {
  const int m = c.bits_per_symbol();
  const int total = m * K * I;
  Bits bits(total);
  for (int b = 0; b < total; ++b) bits[b] = (idx >> (total - 1 - b)) & 1u;
  return bits_to_grid_symbols(bits, c, K, I);
}

}  // namespace

TEST_CASE("likelihood matches the chip-level distance metric") {
  Rng rng(31);
  const Modulation mods[] = {Modulation::bpsk, Modulation::qpsk, Modulation::qam16};
  for (int trial = 0; trial < 12; ++trial) {
    const bool sync = trial % 2 == 0;
    const auto s = make_instance(mods[trial % 3], 3, sync ? 1 : 3, 1 + trial % 2, sync ? "pd1" : "pd2", sync, 0.3, rng);
    const LlfContext ctx(s.obs, s.correlations, perfect_estimate(s.channel), s.amplitudes, s.c);
    const LikelihoodModel model(ctx);
    std::uniform_int_distribution<unsigned> pick(0, s.c.order() - 1);
    for (int t = 0; t < 10; ++t) {
      Eigen::MatrixXcd cand(s.truth.rows(), s.truth.cols());
      for (Eigen::Index i = 0; i < cand.size(); ++i) cand(i) = s.c.grid_point(pick(rng));
      const double oracle = chip_level_metric(s, cand);
      const double dense = llf(ctx.expand(cand), ctx);
      const double compiled = model.fitness(cand);
      const double fromBits = model.fitness(grid_symbols_to_bits(cand, s.c));
      const double tol = 1e-9 * std::max(1.0, std::abs(oracle));
      CHECK(std::abs(dense - oracle) < tol);
      CHECK(std::abs(compiled - oracle) < tol);
      CHECK(compiled == fromBits);
    }
  }
}

TEST_CASE("expand repeats each block symbol over its fingers") {
  Rng rng(32);
  const auto s = make_instance(Modulation::qpsk, 2, 3, 1, "pd3", false, 0.1, rng);
  const LlfContext ctx(s.obs, s.correlations, perfect_estimate(s.channel), s.amplitudes, s.c);
  const auto d = ctx.expand(s.truth);
  REQUIRE(d.size() == 2 * 2 * 3 * 3);
  const Eigen::Index half = d.size() / 2;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 3; ++l) {
        CHECK(d[(i * 2 + k) * 3 + l] == s.truth(k, i).real());
        CHECK(d[half + (i * 2 + k) * 3 + l] == s.truth(k, i).imag());
      }
}

TEST_CASE("exhaustive search returns the first maximiser") {
  Rng rng(33);
  for (auto mod : {Modulation::bpsk, Modulation::qpsk}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = make_instance(mod, 4, 1, 1, "pd1", true, 1.0, rng);
      const LlfContext ctx(s.obs, s.correlations, perfect_estimate(s.channel), s.amplitudes, s.c);
      const LikelihoodModel model(ctx);
      const auto best = omud_exhaustive(model);
      const int bits = s.c.bits_per_symbol() * 4;
      double top = -1e300;
      std::uint64_t arg = 0;
      for (std::uint64_t idx = 0; idx < (1ull << bits); ++idx) {
        const double v = chip_level_metric(s, grid_from_index(s.c, idx, 4, 1));
        if (v > top + 1e-9 * std::abs(top)) top = v, arg = idx;
      }
      CHECK(best.symbols == grid_from_index(s.c, arg, 4, 1));
      CHECK(std::abs(best.fitness - top) < 1e-9 * std::abs(top));
    }
  }
}

TEST_CASE("noise-free exhaustive search recovers the transmitted block") {
  Rng rng(34);
  const auto s = make_instance(Modulation::qam16, 2, 3, 2, "pd2", false, 0.0, rng);
  const LlfContext ctx(s.obs, s.correlations, perfect_estimate(s.channel), s.amplitudes, s.c);
  const LikelihoodModel model(ctx);
  const auto best = omud_exhaustive(model, 1ull << 24);
  CHECK(best.symbols == s.truth);
}

TEST_CASE("search cap") {
  Rng rng(35);
  const auto s = make_instance(Modulation::qpsk, 6, 1, 1, "pd1", true, 1.0, rng);
  const LlfContext ctx(s.obs, s.correlations, perfect_estimate(s.channel), s.amplitudes, s.c);
  const LikelihoodModel model(ctx);
  CHECK_THROWS_AS(omud_exhaustive(model, 1ull << 11), std::length_error);
  CHECK_NOTHROW(omud_exhaustive(model, 1ull << 12));
}
