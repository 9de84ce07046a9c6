#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "cdmamud/random.hpp"

namespace cdmamud {

// Mean energy per resolvable path against its chip delay.
struct PowerDelayProfile {
  std::vector<int> delays;       // chips, strictly increasing, first is 0
  std::vector<double> energies;  // E[gamma^2] per path, summing to 1

  int path_count() const { return static_cast<int>(delays.size()); }
  int max_delay() const { return delays.empty() ? 0 : delays.back(); }
  void validate() const;

  // "pd1" (flat), "pd2" and "pd3" (exponential, 2 and 3 paths).
  static PowerDelayProfile named(std::string_view name);
};

enum class Fading {
  slow,        // one draw per (antenna, user, path), held over the window
  per_symbol,  // fresh draw every symbol interval
  none,        // h = 1: AWGN
};

Fading fading_from_name(std::string_view name);
std::string_view fading_name(Fading f);

struct ChannelLayout {
  int users = 1;
  int symbols = 1;
  int antennas = 1;
  int processing_gain = 31;
  Fading fading = Fading::slow;
  bool synchronous = true;
  // Draw user delays separately for every receive antenna instead of sharing
  // them across the array.
  bool per_antenna_delays = false;
};

// Complex gains h[q][k][l][i] = gamma * exp(j theta) and total chip delays
// tau[q][k][l].
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(int antennas, int users, int paths, int symbols);

  int antennas() const { return antennas_; }
  int users() const { return users_; }
  int paths() const { return paths_; }
  int symbols() const { return symbols_; }

  double& gain(int q, int k, int l, int i) { return gain_[index(q, k, l, i)]; }
  double gain(int q, int k, int l, int i) const { return gain_[index(q, k, l, i)]; }
  double& phase(int q, int k, int l, int i) { return phase_[index(q, k, l, i)]; }
  double phase(int q, int k, int l, int i) const { return phase_[index(q, k, l, i)]; }
  int& delay(int q, int k, int l) { return delay_[(q * users_ + k) * paths_ + l]; }
  int delay(int q, int k, int l) const { return delay_[(q * users_ + k) * paths_ + l]; }

  std::complex<double> coefficient(int q, int k, int l, int i) const {
    return std::polar(gain(q, k, l, i), phase(q, k, l, i));
  }
  int max_delay() const;

  bool operator==(const ChannelRealization&) const = default;

 private:
  std::size_t index(int q, int k, int l, int i) const {
    return ((static_cast<std::size_t>(q) * users_ + k) * paths_ + l) * symbols_ + i;
  }

  int antennas_ = 0;
  int users_ = 0;
  int paths_ = 0;
  int symbols_ = 0;
  std::vector<double> gain_;
  std::vector<double> phase_;
  std::vector<int> delay_;
};

struct ChannelEstimate {
  ChannelRealization coefficients;
  double gain_error = 0.0;
  double phase_error = 0.0;
};

// Draw order (documented for reproducibility): user delays for every (q, k)
// (only the first antenna unless per_antenna_delays), then for every
// (q, k, l[, i]) two standard normals for the gain followed by one uniform
// phase.
//
// Asynchronous user delays are uniform over {0, ..., N - 1 - max path delay}
// so every total delay stays below one symbol.
ChannelRealization draw_channel(const PowerDelayProfile& profile, const ChannelLayout& layout, Rng& rng);

// Multiplicative uniform errors on gain and phase, independent per coefficient.
// Error bounds of zero return the truth unchanged without consuming draws.
ChannelEstimate corrupt_estimate(const ChannelRealization& truth, double gain_error, double phase_error,
                                 Rng& rng);

inline ChannelEstimate perfect_estimate(const ChannelRealization& truth) { return {truth, 0.0, 0.0}; }

}  // namespace cdmamud
