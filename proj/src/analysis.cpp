#include "cdmamud/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace cdmamud {

namespace {

// p_l = prod_{k != l} (1 - nu_k / nu_l)^-1
std::vector<double> partial_fraction_weights(std::span<const double> nu) {
  if (nu.empty()) throw std::invalid_argument("single-user bound needs at least one branch");
  for (double v : nu)
    if (!(v >= 0.0)) throw std::invalid_argument("branch SNRs must be non-negative");
  const double scale = *std::max_element(nu.begin(), nu.end());
  std::vector<double> p(nu.size(), 1.0);
  for (std::size_t l = 0; l < nu.size(); ++l)
    for (std::size_t k = 0; k < nu.size(); ++k) {
      if (k == l) continue;
      if (std::abs(nu[k] - nu[l]) <= 1e-9 * scale)
        throw std::domain_error("repeated branch SNR: closed-form weights are singular");
      p[l] /= 1.0 - nu[k] / nu[l];
    }
  return p;
}

double qam_alpha(int M) { return 1.0 - 1.0 / std::sqrt(static_cast<double>(M)); }
double qam_gain(int M) { return 3.0 / (2.0 * (M - 1.0)); }

double gaussian_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

bool all_zero(std::span<const double> nu) {
  return !nu.empty() && std::all_of(nu.begin(), nu.end(), [](double v) { return v == 0.0; });
}

}  // namespace

double sub_ser(int M, std::span<const double> nu) {
  if (M != 4 && M != 16) throw std::invalid_argument("sub_ser is defined for M = 4 or 16, got " + std::to_string(M));
  if (all_zero(nu)) return 1.0 - 1.0 / M;
  const auto p = partial_fraction_weights(nu);
  const double alpha = qam_alpha(M), g = qam_gain(M);
  double first = 0.0, arc = 0.0, weights = 0.0;
  for (std::size_t l = 0; l < nu.size(); ++l) {
    const double beta = std::sqrt(nu[l] * g / (1.0 + nu[l] * g));
    first += p[l] * (1.0 - beta);
    arc += beta > 0.0 ? p[l] * beta * std::atan(1.0 / beta) : 0.0;
    weights += p[l];
  }
  return 2.0 * alpha * first + alpha * alpha * (4.0 / std::numbers::pi * arc - weights);
}

double sub_ber_bpsk(std::span<const double> nu) {
  if (all_zero(nu)) return 0.5;
  const auto p = partial_fraction_weights(nu);
  double acc = 0.0;
  for (std::size_t l = 0; l < nu.size(); ++l) acc += p[l] * (1.0 - std::sqrt(nu[l] / (1.0 + nu[l])));
  return 0.5 * acc;
}

double sub_ser_mgf(int M, std::span<const double> nu) {
  if (M != 2 && M != 4 && M != 16) throw std::invalid_argument("sub_ser_mgf supports M = 2, 4, 16");
  if (nu.empty()) throw std::invalid_argument("single-user bound needs at least one branch");
  const double g = M == 2 ? 1.0 : qam_gain(M);
  auto product = [&](double phi) {
    const double s2 = std::sin(phi) * std::sin(phi);
    double acc = 1.0;
    for (double v : nu) acc /= 1.0 + g * v / s2;
    return acc;
  };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double half = Quad::integrate(product, 0.0, std::numbers::pi / 2, 15, 1e-13);
  if (M == 2) return half / std::numbers::pi;
  const double quarter = Quad::integrate(product, 0.0, std::numbers::pi / 4, 15, 1e-13);
  const double alpha = qam_alpha(M);
  return 4.0 * alpha / std::numbers::pi * half - 4.0 * alpha * alpha / std::numbers::pi * quarter;
}

double awgn_ser(int M, double nu) {
  if (M == 2) return gaussian_q(std::sqrt(2.0 * nu));
  if (M != 4 && M != 16) throw std::invalid_argument("awgn_ser supports M = 2, 4, 16");
  const double alpha = qam_alpha(M);
  const double q = gaussian_q(std::sqrt(2.0 * qam_gain(M) * nu));
  return 4.0 * alpha * q - 4.0 * alpha * alpha * q * q;
}

std::uint64_t min_trials(double rate, double n_errors) {
  if (!(rate > 0.0)) throw std::invalid_argument("min_trials: target rate must be > 0");
  if (!(n_errors > 0.0)) throw std::invalid_argument("min_trials: n_errors must be > 0");
  return static_cast<std::uint64_t>(std::ceil(n_errors / rate));
}

ErrorStats& ErrorStats::merge(const ErrorStats& other) {
  bit_errors += other.bit_errors;
  symbol_errors += other.symbol_errors;
  bits += other.bits;
  symbols += other.symbols;
  trials += other.trials;
  return *this;
}

void accumulate(ErrorStats& stats, std::span<const std::uint8_t> truth, std::span<const std::uint8_t> decided,
                int bits_per_symbol, std::span<const std::uint8_t> symbol_mask) {
  if (truth.size() != decided.size()) throw std::invalid_argument("accumulate: length mismatch");
  if (bits_per_symbol < 1 || truth.size() % bits_per_symbol != 0)
    throw std::invalid_argument("accumulate: length is not a multiple of the symbol size");
  const std::size_t nsym = truth.size() / bits_per_symbol;
  if (!symbol_mask.empty() && symbol_mask.size() != nsym)
    throw std::invalid_argument("accumulate: symbol mask length mismatch");
  for (std::size_t r = 0; r < nsym; ++r) {
    if (!symbol_mask.empty() && !symbol_mask[r]) continue;
    int wrong = 0;
    for (int j = 0; j < bits_per_symbol; ++j) wrong += truth[r * bits_per_symbol + j] != decided[r * bits_per_symbol + j];
    stats.bit_errors += wrong;
    stats.symbol_errors += wrong > 0;
    stats.bits += bits_per_symbol;
    stats.symbols += 1;
  }
}

}  // namespace cdmamud
