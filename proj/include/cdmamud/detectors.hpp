#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cdmamud/airlink.hpp"
#include "cdmamud/channel.hpp"
#include "cdmamud/modem.hpp"
#include "cdmamud/random.hpp"

namespace cdmamud {

// Everything the log-likelihood of a one-shot block needs: despread outputs,
// per-antenna correlation structure and the effective gains A * H built from
// the channel estimate. The candidate vector d_p repeats every symbol D times
// in block order (i * K + k) * D + l.
class LlfContext {
 public:
  // `correlations` holds one entry per antenna, or a single entry shared by
  // all antennas.
  LlfContext(const DespreadObservation& obs, std::vector<CorrelationStructure> correlations,
             const ChannelEstimate& estimate, std::span<const double> amplitudes, const Constellation& c);

  int users() const { return users_; }
  int symbols() const { return symbols_; }
  int fingers() const { return fingers_; }
  int antennas() const { return static_cast<int>(y_.size()); }
  int bits_per_symbol() const { return constellation_.bits_per_symbol(); }
  int bit_count() const { return bits_per_symbol() * users_ * symbols_; }
  Eigen::Index real_dimension() const { return 2 * static_cast<Eigen::Index>(users_) * symbols_ * fingers_; }
  const Constellation& constellation() const { return constellation_; }

  const Eigen::VectorXcd& despread(int q) const { return y_[q]; }
  const Eigen::VectorXcd& gains(int q) const { return gains_[q]; }
  const Eigen::MatrixXd& correlation(int q) const { return correlations_[correlations_.size() == 1 ? 0 : q].R; }

  // Dense real-valued pieces of the decoupled likelihood.
  Eigen::VectorXd y_real(int q) const;
  Eigen::MatrixXd W(int q) const;
  Eigen::MatrixXd R_real(int q) const;

  // K x I grid symbols -> real stacked d_p of length 2KID.
  Eigen::VectorXd expand(const Eigen::MatrixXcd& grid_symbols) const;

 private:
  int users_;
  int symbols_;
  int fingers_;
  Constellation constellation_;
  std::vector<Eigen::VectorXcd> y_;
  std::vector<Eigen::VectorXcd> gains_;
  std::vector<CorrelationStructure> correlations_;
};

// sum_q [2 d^T W_q^T y_q - d^T W_q^T R W_q d] evaluated with dense matrices.
double llf(const Eigen::VectorXd& candidate, const LlfContext& ctx);

// The same likelihood compiled to a quadratic form over the KI block symbols,
// 2 s^T c - s^T G s with s = [Re; Im] of the grid symbols (real part only for
// BPSK). Immutable and safe to share between threads.
class LikelihoodModel {
 public:
  explicit LikelihoodModel(const LlfContext& ctx);

  int users() const { return users_; }
  int symbols() const { return symbols_; }
  int bit_count() const { return constellation_.bits_per_symbol() * users_ * symbols_; }
  const Constellation& constellation() const { return constellation_; }

  double fitness(std::span<const std::uint8_t> bits) const;
  double fitness(const Eigen::MatrixXcd& grid_symbols) const;

 private:
  double evaluate(const Eigen::VectorXd& s) const;

  int users_;
  int symbols_;
  Constellation constellation_;
  Eigen::VectorXd linear_;
  Eigen::MatrixXd quadratic_;
};

struct Detection {
  Bits bits;
  Eigen::MatrixXcd symbols;  // grid units, K x I
  double fitness = 0.0;
};

inline constexpr std::uint64_t kDefaultSearchCap = std::uint64_t{1} << 20;

// Exhaustive maximum-likelihood search. Candidates are enumerated as the
// integer value of the block bit vector (bit 0 most significant), from 0
// upward; ties keep the lowest candidate. Throws std::length_error when
// M^(KI) exceeds `cap`.
Detection omud_exhaustive(const LikelihoodModel& model, std::uint64_t cap = kDefaultSearchCap);

// ---- binary particle swarm -------------------------------------------------

enum class InitialVelocity { zero, random, seed };

InitialVelocity initial_velocity_from_name(std::string_view name);
std::string_view initial_velocity_name(InitialVelocity v);

struct SwarmConfig {
  double inertia = 1.0;     // omega
  double cognitive = 2.0;   // phi_1
  double social = 10.0;     // phi_2
  double vmax = 4.0;
  int population = 0;       // 0: size from population_size()
  int iterations = 30;      // G
  InitialVelocity initial_velocity = InitialVelocity::zero;
  bool cache_fitness = true;

  void validate() const;
};

struct Particle {
  Bits position;
  std::vector<double> velocity;
  Bits best_position;
  double best_fitness = 0.0;
};

// 10 * ceil(0.3454 * (sqrt(pi (mKI - 1)) + 2))
int population_size(int bits_per_symbol, int users, int symbols);

double sigmoid(double v);

// v <- clamp(omega v + phi1 u1 (b_best - b) + phi2 u2 (b_gbest - b), +-vmax)
// with the per-component uniforms given explicitly.
void velocity_update(Particle& p, std::span<const std::uint8_t> global_best, const SwarmConfig& cfg,
                     std::span<const double> u1, std::span<const double> u2);
// Draws u1[j] then u2[j] for each component j in order.
void velocity_update(Particle& p, std::span<const std::uint8_t> global_best, const SwarmConfig& cfg, Rng& rng);

// bit <- (u < S(v)), one uniform per component in order.
void position_update(Particle& p, Rng& rng);

struct TraceRecord {
  int iteration = 0;
  double fitness = 0.0;
  long bit_errors = -1;  // against TraceOptions::truth, -1 without truth
  long counted_bits = 0;
};

struct TraceOptions {
  std::span<const std::uint8_t> truth;
  // Per-bit weight: 1 counts the bit. Empty counts every bit.
  std::span<const std::uint8_t> mask;
};

struct SwarmResult {
  Detection detection;
  std::vector<TraceRecord> trace;  // iteration 0 is the seed, then one per iteration
  int population = 0;
  long evaluations = 0;  // likelihood evaluations actually computed
};

// Binary PSO seeded with a (conventional) decision.
//
// Particle 0 is the seed, the others are fair-coin bit vectors. Each of the G
// iterations evaluates the swarm, updates every velocity against the bests of
// the previous iteration, then updates personal bests (strict improvement)
// and the global best (best particle of the iteration, lowest index on ties,
// only on strict improvement), and finally resamples positions. G = 0 returns
// the seed.
//
// RNG order: initial positions (p = 1..P-1, bit order), initial velocities
// when random, then per iteration all velocity uniforms (p, j, u1 before u2)
// followed by all position uniforms (p, j).
SwarmResult pso_detect(const LikelihoodModel& model, std::span<const std::uint8_t> seed, const SwarmConfig& cfg,
                       Rng& rng, const TraceOptions& trace = {});

}  // namespace cdmamud
