#include "cdmamud/airlink.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cdmamud {

SpreadingSet::SpreadingSet(int users, int processing_gain)
    : users_(users), gain_(processing_gain), chips_(static_cast<std::size_t>(users) * processing_gain, 1) {
  if (users < 1 || processing_gain < 1) throw std::invalid_argument("spreading set needs K >= 1 and N >= 1");
}

SpreadingSet SpreadingSet::generate(int users, int processing_gain, Rng& rng) {
  SpreadingSet s(users, processing_gain);
  std::bernoulli_distribution coin(0.5);
  for (auto& c : s.chips_) c = coin(rng) ? 1 : -1;
  return s;
}

void SpreadingSet::set_chip(int k, int n, int value) {
  if (value != 1 && value != -1) throw std::invalid_argument("chips must be +1 or -1");
  chips_[static_cast<std::size_t>(k) * gain_ + n] = static_cast<std::int8_t>(value);
}

double SpreadingSet::energy(int k) const {
  double acc = 0.0;
  for (int n = 0; n < gain_; ++n) acc += chip(k, n) * chip(k, n);
  return acc / gain_;
}

ReceivedSignal synthesize_received(const Eigen::MatrixXcd& symbols, std::span<const double> amplitudes,
                                   const ChannelRealization& channel, const SpreadingSet& codes, double n0,
                                   Rng& rng) {
  const int K = codes.users(), N = codes.processing_gain();
  const int I = static_cast<int>(symbols.cols());
  if (symbols.rows() != K || channel.users() != K || static_cast<int>(amplitudes.size()) != K)
    throw std::invalid_argument("synthesize_received: user count mismatch");
  if (channel.symbols() != I) throw std::invalid_argument("synthesize_received: symbol count mismatch");
  if (n0 < 0.0) throw std::invalid_argument("synthesize_received: negative noise density");

  const Eigen::Index length = static_cast<Eigen::Index>(I) * N + channel.max_delay();
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));

  ReceivedSignal out;
  out.antennas.assign(channel.antennas(), Eigen::VectorXcd::Zero(length));
  for (int q = 0; q < channel.antennas(); ++q) {
    auto& r = out.antennas[q];
    for (int i = 0; i < I; ++i)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < channel.paths(); ++l) {
          const std::complex<double> weight = amplitudes[k] * symbols(k, i) * channel.coefficient(q, k, l, i) * norm;
          const Eigen::Index start = static_cast<Eigen::Index>(i) * N + channel.delay(q, k, l);
          for (int n = 0; n < N; ++n) r[start + n] += weight * static_cast<double>(codes.chip(k, n));
        }
  }

  if (n0 > 0.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(n0 / 2.0));
    for (auto& r : out.antennas)
      for (Eigen::Index n = 0; n < length; ++n) {
        const double re = normal(rng);
        const double im = normal(rng);
        r[n] += std::complex<double>(re, im);
      }
  }
  return out;
}

Eigen::VectorXd DespreadObservation::stacked(int q) const {
  const auto& v = y[q];
  Eigen::VectorXd out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

DespreadObservation despread(const ReceivedSignal& received, const SpreadingSet& codes,
                             const ChannelRealization& delays, int fingers) {
  if (fingers < 1 || fingers > delays.paths())
    throw std::invalid_argument("despread: need 1 <= D <= L, got D = " + std::to_string(fingers));
  if (static_cast<int>(received.antennas.size()) != delays.antennas())
    throw std::invalid_argument("despread: antenna count mismatch");

  const int K = codes.users(), N = codes.processing_gain(), I = delays.symbols();
  const double norm = 1.0 / std::sqrt(static_cast<double>(N));

  DespreadObservation obs{K, I, fingers, {}};
  obs.y.assign(delays.antennas(), Eigen::VectorXcd::Zero(obs.dimension()));
  for (int q = 0; q < delays.antennas(); ++q) {
    const auto& r = received.antennas[q];
    for (int i = 0; i < I; ++i)
      for (int k = 0; k < K; ++k)
        for (int l = 0; l < fingers; ++l) {
          const Eigen::Index start = static_cast<Eigen::Index>(i) * N + delays.delay(q, k, l);
          if (start + N > r.size()) throw std::invalid_argument("despread: received stream too short");
          std::complex<double> acc = 0.0;
          for (int n = 0; n < N; ++n) acc += r[start + n] * static_cast<double>(codes.chip(k, n));
          obs.y[q][obs.index(i, k, l)] = acc * norm;
        }
  }
  return obs;
}

Eigen::MatrixXd CorrelationStructure::real_extension() const {
  const Eigen::Index n = R.rows();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = R;
  out.bottomRightCorner(n, n) = R;
  return out;
}

double chip_overlap(const SpreadingSet& codes, int k, int start_k, int u, int start_u) {
  const int N = codes.processing_gain();
  const int lo = std::max(start_k, start_u);
  const int hi = std::min(start_k, start_u) + N;
  long acc = 0;
  for (int n = lo; n < hi; ++n) acc += codes.chip(k, n - start_k) * codes.chip(u, n - start_u);
  return static_cast<double>(acc) / N;
}

CorrelationStructure compute_correlations(const SpreadingSet& codes, const ChannelRealization& delays, int q,
                                          int fingers, int symbols) {
  const int K = codes.users(), N = codes.processing_gain(), D = fingers;
  if (D < 1 || D > delays.paths()) throw std::invalid_argument("compute_correlations: need 1 <= D <= L");
  if (symbols < 1) throw std::invalid_argument("compute_correlations: need I >= 1");
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < D; ++l) {
      const int tau = delays.delay(q, k, l);
      if (tau < 0 || tau >= N)
        throw std::invalid_argument("compute_correlations: delay " + std::to_string(tau) +
                                    " outside one symbol interval");
    }

  CorrelationStructure cs;
  cs.users = K;
  cs.fingers = D;
  cs.symbols = symbols;
  const int KD = K * D;
  cs.R0.resize(KD, KD);
  cs.R1.resize(KD, KD);
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < D; ++l)
      for (int u = 0; u < K; ++u)
        for (int v = 0; v < D; ++v) {
          const int a = k * D + l, b = u * D + v;
          const int tk = delays.delay(q, k, l), tu = delays.delay(q, u, v);
          cs.R0(a, b) = chip_overlap(codes, k, tk, u, tu);
          cs.R1(a, b) = chip_overlap(codes, k, N + tk, u, tu);
        }

  const Eigen::Index n = static_cast<Eigen::Index>(KD) * symbols;
  cs.R = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < symbols; ++i) {
    cs.R.block(i * KD, i * KD, KD, KD) = cs.R0;
    if (i + 1 < symbols) {
      cs.R.block((i + 1) * KD, i * KD, KD, KD) = cs.R1;
      cs.R.block(i * KD, (i + 1) * KD, KD, KD) = cs.R1.transpose();
    }
  }
  return cs;
}

Eigen::VectorXcd effective_gains(std::span<const double> amplitudes, double energy_scale,
                                 const ChannelRealization& estimate, int q, int fingers) {
  const int K = estimate.users(), I = estimate.symbols(), D = fingers;
  if (static_cast<int>(amplitudes.size()) != K) throw std::invalid_argument("effective_gains: amplitude count");
  if (D < 1 || D > estimate.paths()) throw std::invalid_argument("effective_gains: need 1 <= D <= L");
  Eigen::VectorXcd x(static_cast<Eigen::Index>(K) * I * D);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      for (int l = 0; l < D; ++l)
        x[(static_cast<Eigen::Index>(i) * K + k) * D + l] =
            amplitudes[k] * energy_scale * estimate.coefficient(q, k, l, i);
  return x;
}

Eigen::MatrixXd real_effective_matrix(const Eigen::VectorXcd& gains) {
  const Eigen::Index n = gains.size();
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index a = 0; a < n; ++a) {
    W(a, a) = gains[a].real();
    W(a, n + a) = -gains[a].imag();
    W(n + a, a) = gains[a].imag();
    W(n + a, n + a) = gains[a].real();
  }
  return W;
}

Eigen::MatrixXcd mrc_combine(const DespreadObservation& obs, const ChannelEstimate& estimate) {
  const auto& h = estimate.coefficients;
  if (h.antennas() != obs.antennas() || h.users() != obs.users || h.symbols() != obs.symbols ||
      h.paths() < obs.fingers)
    throw std::invalid_argument("mrc_combine: estimate does not match observation");
  Eigen::MatrixXcd zeta = Eigen::MatrixXcd::Zero(obs.users, obs.symbols);
  for (int q = 0; q < obs.antennas(); ++q)
    for (int i = 0; i < obs.symbols; ++i)
      for (int k = 0; k < obs.users; ++k)
        for (int l = 0; l < obs.fingers; ++l)
          zeta(k, i) += obs.y[q][obs.index(i, k, l)] * std::conj(h.coefficient(q, k, l, i));
  return zeta;
}

ConventionalDecision conventional_decide(const Eigen::MatrixXcd& zeta, const ChannelEstimate& estimate, int fingers,
                                         std::span<const double> amplitudes, const Constellation& c) {
  const auto& h = estimate.coefficients;
  const int K = static_cast<int>(zeta.rows()), I = static_cast<int>(zeta.cols());
  if (h.users() != K || h.symbols() != I || static_cast<int>(amplitudes.size()) != K)
    throw std::invalid_argument("conventional_decide: dimension mismatch");

  ConventionalDecision out;
  out.symbols.resize(K, I);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k) {
      double combining_gain = 0.0;
      for (int q = 0; q < h.antennas(); ++q)
        for (int l = 0; l < fingers; ++l) combining_gain += h.gain(q, k, l, i) * h.gain(q, k, l, i);
      const double norm = amplitudes[k] * c.energy_scale() * combining_gain;
      const std::complex<double> scaled = norm > 0.0 ? zeta(k, i) / norm : zeta(k, i);
      out.symbols(k, i) = c.quantize(scaled);
    }
  out.bits = grid_symbols_to_bits(out.symbols, c);
  return out;
}

}  // namespace cdmamud
