#include "cdmamud/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cdmamud {

void PowerDelayProfile::validate() const {
  if (delays.empty()) throw std::invalid_argument("power-delay profile has no paths");
  if (delays.size() != energies.size())
    throw std::invalid_argument("power-delay profile: delays and energies differ in length");
  if (delays.front() != 0) throw std::invalid_argument("power-delay profile: first delay must be 0");
  for (std::size_t l = 1; l < delays.size(); ++l)
    if (delays[l] <= delays[l - 1])
      throw std::invalid_argument("power-delay profile: delays must be strictly increasing");
  for (double e : energies)
    if (!(e > 0.0)) throw std::invalid_argument("power-delay profile: energies must be positive");
  const double total = std::accumulate(energies.begin(), energies.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("power-delay profile: energies sum to " + std::to_string(total) + ", not 1");
}

PowerDelayProfile PowerDelayProfile::named(std::string_view name) {
  if (name == "pd1") return {{0}, {1.0}};
  if (name == "pd2") return {{0, 1}, {0.8320, 0.1680}};
  if (name == "pd3") return {{0, 1, 2}, {0.8047, 0.1625, 0.0328}};
  throw std::invalid_argument("unknown power-delay profile '" + std::string(name) + "'");
}

Fading fading_from_name(std::string_view name) {
  if (name == "slow") return Fading::slow;
  if (name == "per_symbol") return Fading::per_symbol;
  if (name == "none" || name == "awgn") return Fading::none;
  throw std::invalid_argument("unknown fading mode '" + std::string(name) + "'");
}

std::string_view fading_name(Fading f) {
  switch (f) {
    case Fading::slow: return "slow";
    case Fading::per_symbol: return "per_symbol";
    case Fading::none: return "none";
  }
  return "?";
}

ChannelRealization::ChannelRealization(int antennas, int users, int paths, int symbols)
    : antennas_(antennas), users_(users), paths_(paths), symbols_(symbols) {
  const auto n = static_cast<std::size_t>(antennas) * users * paths * symbols;
  gain_.assign(n, 1.0);
  phase_.assign(n, 0.0);
  delay_.assign(static_cast<std::size_t>(antennas) * users * paths, 0);
}

int ChannelRealization::max_delay() const {
  return delay_.empty() ? 0 : *std::max_element(delay_.begin(), delay_.end());
}

ChannelRealization draw_channel(const PowerDelayProfile& profile, const ChannelLayout& layout, Rng& rng) {
  profile.validate();
  if (layout.users < 1 || layout.symbols < 1 || layout.antennas < 1 || layout.processing_gain < 1)
    throw std::invalid_argument("channel layout dimensions must be >= 1");

  const int Q = layout.antennas, K = layout.users, L = profile.path_count(), I = layout.symbols;
  ChannelRealization ch(Q, K, L, I);

  const int span = layout.processing_gain - profile.max_delay();
  if (!layout.synchronous && span < 1)
    throw std::invalid_argument("profile delay spread does not fit inside one symbol");

  std::uniform_int_distribution<int> user_delay(0, std::max(span - 1, 0));
  for (int q = 0; q < Q; ++q) {
    for (int k = 0; k < K; ++k) {
      int base = 0;
      if (!layout.synchronous) base = (q == 0 || layout.per_antenna_delays) ? user_delay(rng) : ch.delay(0, k, 0);
      for (int l = 0; l < L; ++l) ch.delay(q, k, l) = base + profile.delays[l];
    }
  }

  if (layout.fading == Fading::none) return ch;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const int draws_per_path = layout.fading == Fading::per_symbol ? I : 1;
  for (int q = 0; q < Q; ++q) {
    for (int k = 0; k < K; ++k) {
      for (int l = 0; l < L; ++l) {
        const double sigma = std::sqrt(profile.energies[l] / 2.0);
        for (int s = 0; s < draws_per_path; ++s) {
          const double g1 = normal(rng);
          const double g2 = normal(rng);
          const double gamma = sigma * std::hypot(g1, g2);
          const double theta = angle(rng);
          const int first = draws_per_path == 1 ? 0 : s;
          const int last = draws_per_path == 1 ? I : s + 1;
          for (int i = first; i < last; ++i) {
            ch.gain(q, k, l, i) = gamma;
            ch.phase(q, k, l, i) = theta;
          }
        }
      }
    }
  }
  return ch;
}

ChannelEstimate corrupt_estimate(const ChannelRealization& truth, double gain_error, double phase_error,
                                 Rng& rng) {
  auto check = [](double eps, const char* what) {
    if (!(eps >= 0.0 && eps < 1.0))
      throw std::invalid_argument(std::string(what) + " error bound must lie in [0, 1)");
  };
  check(gain_error, "gain");
  check(phase_error, "phase");

  ChannelEstimate est{truth, gain_error, phase_error};
  if (gain_error == 0.0 && phase_error == 0.0) return est;

  std::uniform_real_distribution<double> gain_factor(1.0 - gain_error, 1.0 + gain_error);
  std::uniform_real_distribution<double> phase_factor(1.0 - phase_error, 1.0 + phase_error);
  auto& c = est.coefficients;
  for (int q = 0; q < c.antennas(); ++q)
    for (int k = 0; k < c.users(); ++k)
      for (int l = 0; l < c.paths(); ++l)
        for (int i = 0; i < c.symbols(); ++i) {
          c.gain(q, k, l, i) *= gain_factor(rng);
          c.phase(q, k, l, i) *= phase_factor(rng);
        }
  return est;
}

}  // namespace cdmamud
