#include "turbo/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace turbo {

const char* to_string(Modulation m) {
  switch (m) {
    case Modulation::bpsk: return "bpsk";
    case Modulation::qpsk: return "qpsk";
    case Modulation::qam16: return "qam16";
  }
  return "?";
}

Modulation modulation_from_string(const std::string& s) {
  if (s == "bpsk") return Modulation::bpsk;
  if (s == "qpsk") return Modulation::qpsk;
  if (s == "qam16") return Modulation::qam16;
  throw std::invalid_argument("unknown modulation '" + s + "'");
}

namespace {

// Gray code per axis, two bits: 00 01 11 10 -> -3 -1 +1 +3
constexpr double kQamLevels[4] = {-3.0, -1.0, +1.0, +3.0};
constexpr int kQamGray[4] = {0, 1, 3, 2};  // kQamGray[level index] = bit pair

int axis_level_for_bits(int b) {
  for (int lvl = 0; lvl < 4; ++lvl)
    if (kQamGray[lvl] == b) return lvl;
  return 0;
}

}  // namespace

ModScheme ModScheme::make(Modulation kind) {
  ModScheme s;
  s.kind = kind;
  switch (kind) {
    case Modulation::bpsk: {
      s.bits_per_symbol = 1;
      s.constellation = {{-1.0, 0.0}, {+1.0, 0.0}};
      break;
    }
    case Modulation::qpsk: {
      s.bits_per_symbol = 2;
      const double a = 1.0 / std::sqrt(2.0);
      s.constellation.resize(4);
      for (int idx = 0; idx < 4; ++idx) {
        const int b0 = (idx >> 1) & 1;  // I
        const int b1 = idx & 1;         // Q
        s.constellation[idx] = {a * (2 * b0 - 1), a * (2 * b1 - 1)};
      }
      break;
    }
    case Modulation::qam16: {
      s.bits_per_symbol = 4;
      const double a = 1.0 / std::sqrt(10.0);
      s.constellation.resize(16);
      for (int idx = 0; idx < 16; ++idx) {
        const int bi = (idx >> 2) & 3;  // bits (b0, b1) -> I axis
        const int bq = idx & 3;         // bits (b2, b3) -> Q axis
        s.constellation[idx] = {a * kQamLevels[axis_level_for_bits(bi)],
                                a * kQamLevels[axis_level_for_bits(bq)]};
      }
      break;
    }
  }
  return s;
}

ModulatedFrame modulate(std::span<const std::uint8_t> bits, const ModScheme& scheme) {
  const int bps = scheme.bits_per_symbol;
  ModulatedFrame out;
  out.pad_bits = static_cast<int>((bps - bits.size() % bps) % bps);
  const std::size_t n_sym = (bits.size() + out.pad_bits) / bps;
  out.symbols.resize(n_sym);
  for (std::size_t s = 0; s < n_sym; ++s) {
    int idx = 0;
    for (int j = 0; j < bps; ++j) {
      const std::size_t pos = s * bps + j;
      const int bit = pos < bits.size() ? (bits[pos] & 1) : 0;
      idx = (idx << 1) | bit;
    }
    out.symbols[s] = scheme.constellation[idx];
  }
  return out;
}

void apply_awgn(std::span<std::complex<double>> symbols, double sigma2, Rng& rng) {
  if (sigma2 < 0.0) throw std::invalid_argument("apply_awgn: negative variance");
  if (sigma2 == 0.0) return;
  const double sd = std::sqrt(sigma2);
  for (auto& y : symbols) {
    const double nr = rng.gaussian();
    const double ni = rng.gaussian();
    y += std::complex<double>(sd * nr, sd * ni);
  }
}

std::vector<double> demap_llr(std::span<const std::complex<double>> received,
                              const ModScheme& scheme, double sigma2) {
  if (sigma2 <= 0.0)
    throw std::invalid_argument("demap_llr: sigma2 must be positive");
  const int bps = scheme.bits_per_symbol;
  const int n_points = static_cast<int>(scheme.constellation.size());
  std::vector<double> llrs(received.size() * bps);

  std::vector<double> d2(n_points);
  for (std::size_t s = 0; s < received.size(); ++s) {
    for (int p = 0; p < n_points; ++p) {
      const std::complex<double> diff = received[s] - scheme.constellation[p];
      d2[p] = diff.real() * diff.real() + diff.imag() * diff.imag();
    }
    for (int j = 0; j < bps; ++j) {
      const int mask = 1 << (bps - 1 - j);  // bit j is MSB-first in the label
      double min0 = std::numeric_limits<double>::infinity();
      double min1 = std::numeric_limits<double>::infinity();
      for (int p = 0; p < n_points; ++p) {
        if (p & mask)
          min1 = std::min(min1, d2[p]);
        else
          min0 = std::min(min0, d2[p]);
      }
      llrs[s * bps + j] = (min0 - min1) / (2.0 * sigma2);
    }
  }
  return llrs;
}

double ebno_to_sigma2(double ebno_db, double rate, int bits_per_symbol) {
  if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("ebno_to_sigma2: bad rate");
  if (bits_per_symbol < 1) throw std::invalid_argument("ebno_to_sigma2: bad bits_per_symbol");
  const double ebno = std::pow(10.0, ebno_db / 10.0);
  return 1.0 / (2.0 * rate * bits_per_symbol * ebno);
}

}  // namespace turbo
