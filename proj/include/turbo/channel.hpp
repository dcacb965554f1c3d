#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "turbo/rng.hpp"

namespace turbo {

enum class Modulation { bpsk, qpsk, qam16 };

const char* to_string(Modulation m);
Modulation modulation_from_string(const std::string& s);

/// Gray-labeled unit-average-energy constellation. Point index equals the
/// label bits read MSB-first, so constellation[b0 b1 ...] is the symbol
/// for that bit group.
struct ModScheme {
  Modulation kind;
  int bits_per_symbol;
  std::vector<std::complex<double>> constellation;

  static ModScheme make(Modulation kind);
};

struct ModulatedFrame {
  std::vector<std::complex<double>> symbols;
  int pad_bits = 0;  // zero bits appended to fill the last symbol
};

ModulatedFrame modulate(std::span<const std::uint8_t> bits, const ModScheme& scheme);

/// Adds independent Gaussian noise of variance sigma2 per real dimension.
void apply_awgn(std::span<std::complex<double>> symbols, double sigma2, Rng& rng);

/// Max-log bit LLRs, log(P(bit=1)/P(bit=0)); output length is
/// symbols.size() * bits_per_symbol (drop any padding bits yourself).
std::vector<double> demap_llr(std::span<const std::complex<double>> received,
                              const ModScheme& scheme, double sigma2);

/// Per-dimension noise variance for a given Eb/N0, with unit-energy
/// symbols: sigma2 = 1 / (2 * rate * bits_per_symbol * 10^(ebno/10)).
double ebno_to_sigma2(double ebno_db, double rate, int bits_per_symbol);

}  // namespace turbo
