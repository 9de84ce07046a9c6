#pragma once

#include <cstdint>
#include <span>

namespace cdmamud {

// Average SER of a single M-QAM user (M = 4 or 16) over L Rayleigh branches
// with MRC, closed form for pairwise distinct mean symbol SNRs nu[l].
// All-zero SNRs give the limit 1 - 1/M. Throws std::invalid_argument for other
// M, std::domain_error for repeated nonzero nu.
double sub_ser(int M, std::span<const double> nu);

// BPSK counterpart: 1/2 sum_l p_l (1 - sqrt(nu_l / (1 + nu_l))).
double sub_ber_bpsk(std::span<const double> nu);

// Same bounds for arbitrary branch sets (repeated SNRs allowed, e.g. several
// antennas with one profile), from the MGF integral form. M = 2 yields the
// BPSK bit error rate.
double sub_ser_mgf(int M, std::span<const double> nu);

// Conditional SER of square M-QAM (M = 4, 16) or BPSK (M = 2) at symbol SNR nu.
double awgn_ser(int M, double nu);

// ceil(n_errors / rate)
std::uint64_t min_trials(double rate, double n_errors = 100.0);

// Multiplicative 95% band of an error-rate estimate backed by >= 100 errors.
inline constexpr double kConfidenceLow = 0.823;
inline constexpr double kConfidenceHigh = 1.215;
inline constexpr long kReliableErrors = 100;

struct ErrorStats {
  long long bit_errors = 0;
  long long symbol_errors = 0;
  long long bits = 0;
  long long symbols = 0;
  long long trials = 0;

  double ber() const { return bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0; }
  double ser() const { return symbols ? static_cast<double>(symbol_errors) / static_cast<double>(symbols) : 0.0; }
  bool reliable() const { return bit_errors >= kReliableErrors; }

  ErrorStats& merge(const ErrorStats& other);
  bool operator==(const ErrorStats&) const = default;
};

// Adds the Hamming distance of two bit vectors and the number of m-bit
// symbols that differ. `symbol_mask` (one entry per symbol, 1 = counted) drops
// guard symbols and users excluded from the statistics; empty counts all.
void accumulate(ErrorStats& stats, std::span<const std::uint8_t> truth, std::span<const std::uint8_t> decided,
                int bits_per_symbol, std::span<const std::uint8_t> symbol_mask = {});

}  // namespace cdmamud
