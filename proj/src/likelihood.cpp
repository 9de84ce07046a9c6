#include <limits>
#include <stdexcept>
#include <string>

#include "cdmamud/detectors.hpp"

namespace cdmamud {

LlfContext::LlfContext(const DespreadObservation& obs, std::vector<CorrelationStructure> correlations,
                       const ChannelEstimate& estimate, std::span<const double> amplitudes, const Constellation& c)
    : users_(obs.users),
      symbols_(obs.symbols),
      fingers_(obs.fingers),
      constellation_(c),
      y_(obs.y),
      correlations_(std::move(correlations)) {
  const int Q = obs.antennas();
  if (correlations_.size() != 1 && static_cast<int>(correlations_.size()) != Q)
    throw std::invalid_argument("LlfContext: need one correlation structure or one per antenna");
  const Eigen::Index n = obs.dimension();
  for (const auto& cs : correlations_)
    if (cs.R.rows() != n) throw std::invalid_argument("LlfContext: correlation matrix is not KID x KID");
  if (estimate.coefficients.antennas() != Q)
    throw std::invalid_argument("LlfContext: estimate antenna count mismatch");
  gains_.reserve(Q);
  for (int q = 0; q < Q; ++q)
    gains_.push_back(effective_gains(amplitudes, c.energy_scale(), estimate.coefficients, q, fingers_));
}

Eigen::VectorXd LlfContext::y_real(int q) const {
  const auto& v = y_[q];
  Eigen::VectorXd out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

Eigen::MatrixXd LlfContext::W(int q) const { return real_effective_matrix(gains_[q]); }

Eigen::MatrixXd LlfContext::R_real(int q) const {
  return correlations_[correlations_.size() == 1 ? 0 : q].real_extension();
}

Eigen::VectorXd LlfContext::expand(const Eigen::MatrixXcd& grid_symbols) const {
  if (grid_symbols.rows() != users_ || grid_symbols.cols() != symbols_)
    throw std::invalid_argument("LlfContext::expand: expected a K x I symbol matrix");
  std::vector<std::complex<double>> dp;
  dp.reserve(static_cast<std::size_t>(users_) * symbols_ * fingers_);
  for (int i = 0; i < symbols_; ++i)
    for (int k = 0; k < users_; ++k)
      for (int l = 0; l < fingers_; ++l) dp.push_back(grid_symbols(k, i));
  return constellation_.decompose_real(dp);
}

double llf(const Eigen::VectorXd& candidate, const LlfContext& ctx) {
  if (candidate.size() != ctx.real_dimension())
    throw std::invalid_argument("llf: candidate length " + std::to_string(candidate.size()) + " != 2KID = " +
                                std::to_string(ctx.real_dimension()));
  double total = 0.0;
  for (int q = 0; q < ctx.antennas(); ++q) {
    const Eigen::MatrixXd W = ctx.W(q);
    const Eigen::VectorXd x = W * candidate;
    total += 2.0 * x.dot(ctx.y_real(q)) - x.dot(ctx.R_real(q) * x);
  }
  return total;
}

LikelihoodModel::LikelihoodModel(const LlfContext& ctx)
    : users_(ctx.users()), symbols_(ctx.symbols()), constellation_(ctx.constellation()) {
  const int D = ctx.fingers();
  const Eigen::Index n = static_cast<Eigen::Index>(users_) * symbols_;
  const Eigen::Index nv = n * D;

  // Complex form: Omega(z) = sum_q 2 Re(z^H c_q) - z^H H_q z with
  // c = P^T conj(x) .* y and H = P^T diag(conj x) R diag(x) P, P replicating
  // each block symbol over its D fingers.
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
  for (int q = 0; q < ctx.antennas(); ++q) {
    const auto& x = ctx.gains(q);
    const auto& y = ctx.despread(q);
    const auto& R = ctx.correlation(q);
    for (Eigen::Index a = 0; a < nv; ++a) {
      c[a / D] += std::conj(x[a]) * y[a];
      for (Eigen::Index b = 0; b < nv; ++b) {
        const double r = R(a, b);
        if (r != 0.0) H(a / D, b / D) += std::conj(x[a]) * r * x[b];
      }
    }
  }

  if (constellation_.real_only()) {
    linear_ = c.real();
    quadratic_ = H.real();
  } else {
    linear_.resize(2 * n);
    linear_ << c.real(), c.imag();
    quadratic_.resize(2 * n, 2 * n);
    quadratic_ << H.real(), -H.imag(), H.imag(), H.real();
  }
}

double LikelihoodModel::evaluate(const Eigen::VectorXd& s) const {
  return 2.0 * s.dot(linear_) - s.dot(quadratic_ * s);
}

double LikelihoodModel::fitness(std::span<const std::uint8_t> bits) const {
  const int m = constellation_.bits_per_symbol();
  if (bits.size() != static_cast<std::size_t>(bit_count()))
    throw std::invalid_argument("fitness: expected " + std::to_string(bit_count()) + " bits");
  const Eigen::Index n = static_cast<Eigen::Index>(users_) * symbols_;
  const bool real_only = constellation_.real_only();
  Eigen::VectorXd s(real_only ? n : 2 * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto d = constellation_.grid_point(constellation_.bits_to_label(bits.subspan(r * m, m)));
    s[r] = d.real();
    if (!real_only) s[n + r] = d.imag();
  }
  return evaluate(s);
}

double LikelihoodModel::fitness(const Eigen::MatrixXcd& grid_symbols) const {
  return fitness(grid_symbols_to_bits(grid_symbols, constellation_));
}

Detection omud_exhaustive(const LikelihoodModel& model, std::uint64_t cap) {
  const int nbits = model.bit_count();
  if (nbits >= 63 || (std::uint64_t{1} << nbits) > cap)
    throw std::length_error("omud_exhaustive: search space 2^" + std::to_string(nbits) + " exceeds the cap of " +
                            std::to_string(cap) + " candidates");
  const std::uint64_t count = std::uint64_t{1} << nbits;

  Bits bits(nbits), best_bits;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    for (int j = 0; j < nbits; ++j) bits[j] = static_cast<std::uint8_t>((idx >> (nbits - 1 - j)) & 1u);
    const double f = model.fitness(bits);
    if (f > best) {
      best = f;
      best_bits = bits;
    }
  }
  Detection out;
  out.symbols = bits_to_grid_symbols(best_bits, model.constellation(), model.users(), model.symbols());
  out.bits = std::move(best_bits);
  out.fitness = best;
  return out;
}

}  // namespace cdmamud
