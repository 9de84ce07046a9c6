#include "cdmamud/modem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cdmamud {

Modulation modulation_from_name(std::string_view name) {
  if (name == "bpsk") return Modulation::bpsk;
  if (name == "qpsk") return Modulation::qpsk;
  if (name == "16qam") return Modulation::qam16;
  throw std::invalid_argument("unknown modulation '" + std::string(name) + "'");
}

std::string_view modulation_name(Modulation mod) {
  switch (mod) {
    case Modulation::bpsk: return "bpsk";
    case Modulation::qpsk: return "qpsk";
    case Modulation::qam16: return "16qam";
  }
  return "?";
}

Constellation::Constellation(Modulation mod) : mod_(mod) {
  switch (mod) {
    case Modulation::bpsk:
      order_ = 2;
      bits_ = 1;
      levels_ = {-1, 1};
      axis_gray_ = {0, 1};
      scale_ = 1.0;
      break;
    case Modulation::qpsk:
      order_ = 4;
      bits_ = 2;
      levels_ = {-1, 1};
      axis_gray_ = {0, 1};
      scale_ = 1.0 / std::sqrt(2.0);
      break;
    case Modulation::qam16:
      order_ = 16;
      bits_ = 4;
      levels_ = {-3, -1, 1, 3};
      axis_gray_ = {0b00, 0b01, 0b11, 0b10};
      scale_ = 1.0 / std::sqrt(10.0);
      break;
  }

  // Invert the per-axis Gray table once: code -> level index.
  std::vector<int> code_to_level(levels_.size());
  for (std::size_t i = 0; i < axis_gray_.size(); ++i) code_to_level[axis_gray_[i]] = static_cast<int>(i);

  grid_.resize(order_);
  const int ab = axis_bits();
  for (unsigned label = 0; label < static_cast<unsigned>(order_); ++label) {
    if (real_only()) {
      grid_[label] = {static_cast<double>(levels_[code_to_level[label]]), 0.0};
    } else {
      const unsigned i_code = label >> ab;
      const unsigned q_code = label & ((1u << ab) - 1);
      grid_[label] = {static_cast<double>(levels_[code_to_level[i_code]]),
                      static_cast<double>(levels_[code_to_level[q_code]])};
    }
  }
}

int Constellation::quantize_level(double x) const {
  int best = levels_.front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (int level : levels_) {
    const double dist = std::abs(x - level);
    if (dist < best_dist) {
      best_dist = dist;
      best = level;
    }
  }
  return best;
}

std::complex<double> Constellation::quantize(std::complex<double> grid_value) const {
  if (real_only()) return {static_cast<double>(quantize_level(grid_value.real())), 0.0};
  return {static_cast<double>(quantize_level(grid_value.real())),
          static_cast<double>(quantize_level(grid_value.imag()))};
}

bool Constellation::on_alphabet(double x) const {
  for (int level : levels_)
    if (x == level) return true;
  return false;
}

unsigned Constellation::label_of(std::complex<double> grid_symbol) const {
  for (unsigned label = 0; label < grid_.size(); ++label)
    if (grid_[label] == grid_symbol) return label;
  throw std::invalid_argument("symbol is not a constellation grid point");
}

unsigned Constellation::bits_to_label(std::span<const std::uint8_t> bits) const {
  if (bits.size() != static_cast<std::size_t>(bits_))
    throw std::invalid_argument("expected " + std::to_string(bits_) + " bits, got " +
                                std::to_string(bits.size()));
  unsigned label = 0;
  for (std::uint8_t b : bits) label = (label << 1) | (b & 1u);
  return label;
}

void Constellation::label_to_bits(unsigned label, std::span<std::uint8_t> out) const {
  for (int j = 0; j < bits_; ++j) out[j] = static_cast<std::uint8_t>((label >> (bits_ - 1 - j)) & 1u);
}

std::complex<double> Constellation::bits_to_symbol(std::span<const std::uint8_t> bits) const {
  return grid_[bits_to_label(bits)] * scale_;
}

Bits Constellation::symbol_to_bits(std::complex<double> symbol) const {
  Bits out(bits_);
  label_to_bits(label_of(quantize(symbol / scale_)), out);
  return out;
}

Eigen::VectorXd Constellation::decompose_real(std::span<const std::complex<double>> grid_symbols) const {
  const auto n = static_cast<Eigen::Index>(grid_symbols.size());
  Eigen::VectorXd out(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = grid_symbols[i];
    const bool ok = on_alphabet(d.real()) && (real_only() ? d.imag() == 0.0 : on_alphabet(d.imag()));
    if (!ok) throw std::invalid_argument("component " + std::to_string(i) + " is off the alphabet");
    out[i] = d.real();
    out[n + i] = d.imag();
  }
  return out;
}

std::vector<std::complex<double>> Constellation::recompose_real(const Eigen::VectorXd& stacked) const {
  if (stacked.size() % 2 != 0) throw std::invalid_argument("stacked vector must have even length");
  const Eigen::Index n = stacked.size() / 2;
  std::vector<std::complex<double>> out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = {stacked[i], stacked[n + i]};
  return out;
}

Bits grid_symbols_to_bits(const Eigen::MatrixXcd& grid_symbols, const Constellation& c) {
  const int K = static_cast<int>(grid_symbols.rows());
  const int I = static_cast<int>(grid_symbols.cols());
  const int m = c.bits_per_symbol();
  Bits out(static_cast<std::size_t>(m) * K * I);
  for (int i = 0; i < I; ++i)
    for (int k = 0; k < K; ++k)
      c.label_to_bits(c.label_of(grid_symbols(k, i)), std::span(out).subspan(static_cast<std::size_t>(i * K + k) * m, m));
  return out;
}

Eigen::MatrixXcd bits_to_grid_symbols(std::span<const std::uint8_t> bits, const Constellation& c, int users,
                                      int symbols) {
  const int m = c.bits_per_symbol();
  if (bits.size() != static_cast<std::size_t>(m) * users * symbols)
    throw std::invalid_argument("bit vector length does not match m * K * I");
  Eigen::MatrixXcd out(users, symbols);
  for (int i = 0; i < symbols; ++i)
    for (int k = 0; k < users; ++k)
      out(k, i) = c.grid_point(c.bits_to_label(bits.subspan(static_cast<std::size_t>(i * users + k) * m, m)));
  return out;
}

}  // namespace cdmamud
