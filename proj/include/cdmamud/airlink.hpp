#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cdmamud/channel.hpp"
#include "cdmamud/modem.hpp"
#include "cdmamud/random.hpp"

namespace cdmamud {

// Short +-1 spreading codes, one per user, rectangular chip pulse.
class SpreadingSet {
 public:
  SpreadingSet() = default;
  SpreadingSet(int users, int processing_gain);
  static SpreadingSet generate(int users, int processing_gain, Rng& rng);

  int users() const { return users_; }
  int processing_gain() const { return gain_; }
  int chip(int k, int n) const { return chips_[static_cast<std::size_t>(k) * gain_ + n]; }
  void set_chip(int k, int n, int value);
  // (1/N) sum_n a_k(n)^2; 1 for every valid code.
  double energy(int k) const;

  bool operator==(const SpreadingSet&) const = default;

 private:
  int users_ = 0;
  int gain_ = 0;
  std::vector<std::int8_t> chips_;
};

// Chip-rate complex baseband samples, one stream per receive antenna.
struct ReceivedSignal {
  std::vector<Eigen::VectorXcd> antennas;
  Eigen::Index length() const { return antennas.empty() ? 0 : antennas.front().size(); }
};

// Chip-level superposition of every (symbol, user, path) contribution plus
// complex AWGN of variance n0 / 2 per real dimension and chip. The chip
// interval is the time unit, so a user with amplitude A = sqrt(Es) delivers Es
// per symbol. `symbols` holds transmitted (energy-scaled) values, K x I.
// Stream length is I * N + max delay. n0 == 0 draws nothing from rng.
ReceivedSignal synthesize_received(const Eigen::MatrixXcd& symbols, std::span<const double> amplitudes,
                                   const ChannelRealization& channel, const SpreadingSet& codes, double n0,
                                   Rng& rng);

// Matched-filter outputs y[q] in block order: entry (i * K + k) * D + l.
struct DespreadObservation {
  int users = 0;
  int symbols = 0;
  int fingers = 0;
  std::vector<Eigen::VectorXcd> y;

  int antennas() const { return static_cast<int>(y.size()); }
  Eigen::Index dimension() const { return static_cast<Eigen::Index>(users) * symbols * fingers; }
  Eigen::Index index(int i, int k, int l) const { return (static_cast<Eigen::Index>(i) * users + k) * fingers + l; }
  // [Re(y_q); Im(y_q)]
  Eigen::VectorXd stacked(int q) const;
};

// Correlates each finger window with the unit-energy code waveform,
// y = (1/sqrt(N)) sum_n r(i N + tau + n) a_k(n), so a lone noise-free user
// despreads to A h d and white chip noise keeps its variance.
DespreadObservation despread(const ReceivedSignal& received, const SpreadingSet& codes,
                             const ChannelRealization& delays, int fingers);

// Cross-correlations of the finger waveforms of one antenna.
//
// R0(a, b): same symbol interval, R1(a, b): finger a in interval i + 1 against
// finger b in interval i, with a = k D + l. R is the KID x KID block
// tridiagonal matrix with R0 on the diagonal, R1 below and R1^T above.
struct CorrelationStructure {
  int users = 0;
  int fingers = 0;
  int symbols = 0;
  Eigen::MatrixXd R0;
  Eigen::MatrixXd R1;
  Eigen::MatrixXd R;

  // block-diag(R, R)
  Eigen::MatrixXd real_extension() const;
};

// Normalised overlap (1/N) sum_n a_k(n - start_k) a_u(n - start_u) of two code
// waveforms placed at integer chip offsets.
double chip_overlap(const SpreadingSet& codes, int k, int start_k, int u, int start_u);

// Requires 0 <= tau < N for every delay of antenna q (keeps R block tridiagonal).
CorrelationStructure compute_correlations(const SpreadingSet& codes, const ChannelRealization& delays, int q,
                                          int fingers, int symbols);

// Diagonal of A * H for antenna q in block order: amplitude_k * scale * h_hat.
Eigen::VectorXcd effective_gains(std::span<const double> amplitudes, double energy_scale,
                                 const ChannelRealization& estimate, int q, int fingers);

// Real 2n x 2n representation [[Re X, -Im X], [Im X, Re X]] of diag(x).
Eigen::MatrixXd real_effective_matrix(const Eigen::VectorXcd& gains);

// zeta_k^(i) = sum_q sum_{l < D} y * conj(h_hat); K x I.
Eigen::MatrixXcd mrc_combine(const DespreadObservation& obs, const ChannelEstimate& estimate);

struct ConventionalDecision {
  Eigen::MatrixXcd symbols;  // grid units, K x I
  Bits bits;                 // block bit layout
};

// Normalises zeta_k by A_k * scale * sum gamma_hat^2 and quantises each axis to
// the nearest alphabet level.
ConventionalDecision conventional_decide(const Eigen::MatrixXcd& zeta, const ChannelEstimate& estimate, int fingers,
                                         std::span<const double> amplitudes, const Constellation& c);

}  // namespace cdmamud
