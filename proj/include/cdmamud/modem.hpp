#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cdmamud {

using Bits = std::vector<std::uint8_t>;

enum class Modulation { bpsk, qpsk, qam16 };

Modulation modulation_from_name(std::string_view name);
std::string_view modulation_name(Modulation mod);

// Square constellation with Gray labelling.
//
// Points are kept on the integer grid (real and imaginary parts drawn from
// levels()); the transmitted symbol is grid_point * energy_scale(), which has
// unit mean energy. Labels are MSB-first: bit 0 of a label vector is the most
// significant bit. For QPSK and 16-QAM the leading m/2 bits select the
// in-phase level and the trailing m/2 bits the quadrature level, each axis
// Gray coded. BPSK maps bit 0 -> -1 and bit 1 -> +1 on the real axis.
class Constellation {
 public:
  explicit Constellation(Modulation mod);
  static Constellation from_name(std::string_view name) {
    return Constellation(modulation_from_name(name));
  }

  Modulation modulation() const { return mod_; }
  int order() const { return order_; }
  int bits_per_symbol() const { return bits_; }
  // Levels per axis (sqrt(M) of them); BPSK has a single real axis.
  int axis_bits() const { return mod_ == Modulation::bpsk ? 1 : bits_ / 2; }
  bool real_only() const { return mod_ == Modulation::bpsk; }

  std::span<const int> levels() const { return levels_; }
  // Indexed by label.
  std::span<const std::complex<double>> grid_points() const { return grid_; }
  double energy_scale() const { return scale_; }

  std::complex<double> grid_point(unsigned label) const { return grid_[label]; }
  unsigned label_of(std::complex<double> grid_symbol) const;

  std::complex<double> bits_to_symbol(std::span<const std::uint8_t> bits) const;
  // Nearest constellation point (scaled domain) to an arbitrary input.
  Bits symbol_to_bits(std::complex<double> symbol) const;

  // Nearest level of the real alphabet to x (grid units).
  int quantize_level(double x) const;
  // Per-axis nearest-level decision in grid units.
  std::complex<double> quantize(std::complex<double> grid_value) const;

  unsigned bits_to_label(std::span<const std::uint8_t> bits) const;
  void label_to_bits(unsigned label, std::span<std::uint8_t> out) const;

  // Real-valued stacking [Re(d); Im(d)] of a grid-unit symbol vector.
  // Throws if a component is off the alphabet.
  Eigen::VectorXd decompose_real(std::span<const std::complex<double>> grid_symbols) const;
  std::vector<std::complex<double>> recompose_real(const Eigen::VectorXd& stacked) const;

 private:
  bool on_alphabet(double x) const;

  Modulation mod_;
  int order_;
  int bits_;
  double scale_;
  std::vector<int> levels_;
  std::vector<int> axis_gray_;  // level index -> axis code
  std::vector<std::complex<double>> grid_;
};

// Block bit layout: symbol r = i * K + k (symbol-major, user within symbol)
// occupies bits [r * m, (r + 1) * m). Symbols are K x I matrices in grid units.
Bits grid_symbols_to_bits(const Eigen::MatrixXcd& grid_symbols, const Constellation& c);
Eigen::MatrixXcd bits_to_grid_symbols(std::span<const std::uint8_t> bits, const Constellation& c, int users,
                                      int symbols);

}  // namespace cdmamud
