#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <random>

#include "cdmamud/modem.hpp"

using namespace cdmamud;
using Catch::Approx;

namespace {

const Modulation kAll[] = {Modulation::bpsk, Modulation::qpsk, Modulation::qam16};

Bits label_bits(unsigned label, int m) {
  Bits b(m);
  for (int j = 0; j < m; ++j) b[j] = (label >> (m - 1 - j)) & 1u;
  return b;
}

}  // namespace

TEST_CASE("bpsk sign convention") {
  Constellation c(Modulation::bpsk);
  CHECK(c.bits_to_symbol(Bits{0}) == std::complex<double>(-1, 0));
  CHECK(c.bits_to_symbol(Bits{1}) == std::complex<double>(1, 0));
  CHECK(c.symbol_to_bits({0.3, 0.0}) == Bits{1});
  CHECK(c.symbol_to_bits({-0.01, 5.0}) == Bits{0});
}

TEST_CASE("labels are unique and points have unit mean energy") {
  for (auto mod : kAll) {
    Constellation c(mod);
    const int M = c.order(), m = c.bits_per_symbol();
    REQUIRE(M == 1 << m);
    double energy = 0;
    std::vector<std::complex<double>> seen;
    for (unsigned label = 0; label < static_cast<unsigned>(M); ++label) {
      const auto s = c.bits_to_symbol(label_bits(label, m));
      for (auto other : seen) CHECK(other != s);
      seen.push_back(s);
      energy += std::norm(s);
      if (mod == Modulation::bpsk) CHECK(s.imag() == 0.0);
    }
    CHECK(std::abs(energy / M - 1.0) < 1e-12);
  }
}

TEST_CASE("16qam grid and scale") {
  Constellation c(Modulation::qam16);
  CHECK(c.energy_scale() == Approx(1 / std::sqrt(10.0)).epsilon(1e-15));
  for (unsigned label = 0; label < 16; ++label) {
    const auto g = c.bits_to_symbol(label_bits(label, 4)) / c.energy_scale();
    for (double x : {g.real(), g.imag()}) {
      const double r = std::round(x);
      CHECK(std::abs(x - r) < 1e-12);
      CHECK((r == -3 || r == -1 || r == 1 || r == 3));
    }
  }
}

// Axis neighbours (distance 2 on the integer grid) must differ in one bit.
TEST_CASE("gray property by exhaustive adjacency check") {
  for (auto mod : kAll) {
    Constellation c(mod);
    const int M = c.order(), m = c.bits_per_symbol();
    int pairs = 0;
    for (unsigned a = 0; a < static_cast<unsigned>(M); ++a)
      for (unsigned b = a + 1; b < static_cast<unsigned>(M); ++b) {
        const auto da = c.bits_to_symbol(label_bits(a, m)) / c.energy_scale();
        const auto db = c.bits_to_symbol(label_bits(b, m)) / c.energy_scale();
        const auto d = da - db;
        const bool horizontal = std::abs(std::abs(d.real()) - 2) < 1e-9 && std::abs(d.imag()) < 1e-9;
        const bool vertical = std::abs(std::abs(d.imag()) - 2) < 1e-9 && std::abs(d.real()) < 1e-9;
        if (horizontal || vertical) {
          ++pairs;
          CHECK(std::popcount(a ^ b) == 1);
        }
      }
    // 2 * side * (side - 1) neighbour pairs on a square grid
    const int expected = mod == Modulation::bpsk ? 1 : mod == Modulation::qpsk ? 4 : 24;
    CHECK(pairs == expected);
  }
}

TEST_CASE("bits round trip") {
  for (auto mod : kAll) {
    Constellation c(mod);
    for (unsigned label = 0; label < static_cast<unsigned>(c.order()); ++label) {
      const Bits b = label_bits(label, c.bits_per_symbol());
      CHECK(c.symbol_to_bits(c.bits_to_symbol(b)) == b);
    }
  }
}

TEST_CASE("wrong bit count is rejected") {
  Constellation c(Modulation::qpsk);
  CHECK_THROWS_AS(c.bits_to_symbol(Bits{1}), std::invalid_argument);
  CHECK_THROWS_AS(c.bits_to_symbol(Bits{1, 0, 1}), std::invalid_argument);
}

TEST_CASE("nearest point matches brute-force search on noisy 16qam") {
  Constellation c(Modulation::qam16);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> noise(0.0, 0.4);
  std::uniform_int_distribution<unsigned> pick(0, 15);
  for (int t = 0; t < 1000; ++t) {
    const auto clean = c.bits_to_symbol(label_bits(pick(rng), 4));
    const std::complex<double> r = clean + std::complex<double>(noise(rng), noise(rng));
    unsigned best = 0;
    double best_d = 1e300;
    for (unsigned label = 0; label < 16; ++label) {
      const double d = std::norm(r - c.bits_to_symbol(label_bits(label, 4)));
      if (d < best_d) best_d = d, best = label;
    }
    CHECK(c.symbol_to_bits(r) == label_bits(best, 4));
  }
}

TEST_CASE("decompose_real stacks real then imaginary parts") {
  Constellation qpsk(Modulation::qpsk), bpsk(Modulation::bpsk), qam(Modulation::qam16);
  const std::vector<std::complex<double>> q{{1, 1}};
  CHECK(qpsk.decompose_real(q) == Eigen::Vector2d(1, 1));
  const std::vector<std::complex<double>> b{{-1, 0}, {1, 0}};
  Eigen::VectorXd expected(4);
  expected << -1, 1, 0, 0;
  CHECK(bpsk.decompose_real(b) == expected);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> lvl(0, 3);
  const int levels[] = {-3, -1, 1, 3};
  std::vector<std::complex<double>> d(20);
  for (auto& x : d) x = {double(levels[lvl(rng)]), double(levels[lvl(rng)])};
  CHECK(qam.recompose_real(qam.decompose_real(d)) == d);

  const std::vector<std::complex<double>> off{{2, 1}};
  CHECK_THROWS(qam.decompose_real(off));
  const std::vector<std::complex<double>> imag_bpsk{{1, 1}};
  CHECK_THROWS(bpsk.decompose_real(imag_bpsk));
}

TEST_CASE("block bit layout") {
  Constellation c(Modulation::qpsk);
  Eigen::MatrixXcd grid(2, 2);  // K = 2, I = 2
  grid << std::complex<double>(1, 1), std::complex<double>(-1, 1), std::complex<double>(1, -1),
      std::complex<double>(-1, -1);
  const Bits bits = grid_symbols_to_bits(grid, c);
  REQUIRE(bits.size() == 8);
  // symbol r = i K + k occupies bits [2r, 2r + 2)
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      const Bits expect = c.symbol_to_bits(grid(k, i) * c.energy_scale());
      CHECK(bits[(i * 2 + k) * 2] == expect[0]);
      CHECK(bits[(i * 2 + k) * 2 + 1] == expect[1]);
    }
  CHECK(bits_to_grid_symbols(bits, c, 2, 2) == grid);
}
