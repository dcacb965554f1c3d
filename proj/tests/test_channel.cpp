#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "turbo/channel.hpp"

using namespace turbo;

namespace {

// test-only exact demapper: full log-sum over the constellation
std::vector<double> exact_demap(std::span<const std::complex<double>> rx, const ModScheme& s,
                                double sigma2) {
  const int bps = s.bits_per_symbol;
  std::vector<double> llrs(rx.size() * bps);
  for (std::size_t i = 0; i < rx.size(); ++i) {
    for (int j = 0; j < bps; ++j) {
      const int mask = 1 << (bps - 1 - j);
      double lse0 = -1e300, lse1 = -1e300;
      for (int p = 0; p < static_cast<int>(s.constellation.size()); ++p) {
        const auto d = rx[i] - s.constellation[p];
        const double logp = -(d.real() * d.real() + d.imag() * d.imag()) / (2.0 * sigma2);
        double& acc = (p & mask) ? lse1 : lse0;
        const double m = std::max(acc, logp);
        acc = m + std::log1p(std::exp(-std::abs(acc - logp) ));
      }
      llrs[i * bps + j] = lse1 - lse0;
    }
  }
  return llrs;
}

double mean_energy(const ModScheme& s) {
  double e = 0.0;
  for (const auto& p : s.constellation) e += std::norm(p);
  return e / static_cast<double>(s.constellation.size());
}

}  // namespace

TEST_CASE("constellations are unit energy with Gray labeling") {
  for (auto kind : {Modulation::bpsk, Modulation::qpsk, Modulation::qam16}) {
    const ModScheme s = ModScheme::make(kind);
    CHECK(mean_energy(s) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const ModScheme qam = ModScheme::make(Modulation::qam16);
  // adjacent points along each axis differ in exactly one label bit
  for (int row = 0; row < 4; ++row) {
    std::vector<std::pair<double, int>> by_i, by_q;
    for (int idx = 0; idx < 16; ++idx) {
      if ((idx & 3) == row) by_i.push_back({qam.constellation[idx].real(), idx});
      if (((idx >> 2) & 3) == row) by_q.push_back({qam.constellation[idx].imag(), idx});
    }
    std::sort(by_i.begin(), by_i.end());
    std::sort(by_q.begin(), by_q.end());
    for (int i = 0; i + 1 < 4; ++i) {
      CHECK(std::popcount(static_cast<unsigned>(by_i[i].second ^ by_i[i + 1].second)) == 1);
      CHECK(std::popcount(static_cast<unsigned>(by_q[i].second ^ by_q[i + 1].second)) == 1);
    }
  }
  // per-axis scale for 16-QAM levels {1,3}
  const double a = 1.0 / std::sqrt(10.0);
  double max_abs = 0.0;
  for (const auto& p : qam.constellation) max_abs = std::max(max_abs, std::abs(p.real()));
  CHECK(max_abs == doctest::Approx(3.0 * a));
}

TEST_CASE("bpsk maps 0 to -1") {
  const ModScheme s = ModScheme::make(Modulation::bpsk);
  const std::vector<std::uint8_t> zeros(8, 0);
  const auto m = modulate(zeros, s);
  CHECK(m.pad_bits == 0);
  for (const auto& sym : m.symbols) CHECK(sym == std::complex<double>(-1.0, 0.0));
}

TEST_CASE("modulate pads to the symbol boundary") {
  const ModScheme s = ModScheme::make(Modulation::qam16);
  const std::vector<std::uint8_t> bits(10, 1);
  const auto m = modulate(bits, s);
  CHECK(m.pad_bits == 2);
  CHECK(m.symbols.size() == 3);
}

TEST_CASE("awgn: zero variance passes through, fixed seed reproduces") {
  const ModScheme s = ModScheme::make(Modulation::qpsk);
  std::vector<std::uint8_t> bits(64, 1);
  auto a = modulate(bits, s);
  auto b = a;
  Rng rng(9);
  apply_awgn(std::span<std::complex<double>>(a.symbols), 0.0, rng);
  CHECK(a.symbols == b.symbols);

  auto c = b;
  Rng r1(123), r2(123);
  apply_awgn(std::span<std::complex<double>>(b.symbols), 0.7, r1);
  apply_awgn(std::span<std::complex<double>>(c.symbols), 0.7, r2);
  CHECK(b.symbols == c.symbols);
}

TEST_CASE("awgn sample variance matches sigma2 within 1%") {
  const double sigma2 = 0.5;
  std::vector<std::complex<double>> sym(500000, {0.0, 0.0});
  Rng rng(2024);
  apply_awgn(std::span<std::complex<double>>(sym), sigma2, rng);
  double var = 0.0;
  for (const auto& y : sym) var += y.real() * y.real() + y.imag() * y.imag();
  var /= 2.0 * static_cast<double>(sym.size());
  CHECK(var == doctest::Approx(sigma2).epsilon(0.01));
}

TEST_CASE("bpsk demap formula 2y/sigma2") {
  const ModScheme s = ModScheme::make(Modulation::bpsk);
  const std::vector<std::complex<double>> rx = {{1.0, 0.0}};
  const auto llrs = demap_llr(rx, s, 1.0);
  CHECK(llrs[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("llr sign matches the transmitted bit on a clean point") {
  for (auto kind : {Modulation::bpsk, Modulation::qpsk, Modulation::qam16}) {
    const ModScheme s = ModScheme::make(kind);
    const int bps = s.bits_per_symbol;
    for (int idx = 0; idx < static_cast<int>(s.constellation.size()); ++idx) {
      const std::vector<std::complex<double>> rx = {s.constellation[idx]};
      const auto llrs = demap_llr(rx, s, 0.3);
      for (int j = 0; j < bps; ++j) {
        const bool bit = (idx >> (bps - 1 - j)) & 1;
        if (bit)
          CHECK(llrs[j] > 0.0);
        else
          CHECK(llrs[j] < 0.0);
      }
    }
  }
}

TEST_CASE("max-log 16-QAM demap is close to the exact demapper") {
  // envelope computed with the exact log-sum oracle over 5000 received
  // points at sigma2 = 0.5: worst observed gap 0.5093, mean far below
  const ModScheme s = ModScheme::make(Modulation::qam16);
  const double sigma2 = 0.5;
  Rng rng(5);
  std::vector<std::complex<double>> rx(2000);
  for (auto& y : rx)
    y = s.constellation[rng.uniform_below(16)] +
        std::complex<double>(std::sqrt(sigma2) * rng.gaussian(),
                             std::sqrt(sigma2) * rng.gaussian());
  const auto approx = demap_llr(rx, s, sigma2);
  const auto exact = exact_demap(rx, s, sigma2);
  double mean_gap = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    const double gap = std::abs(approx[i] - exact[i]);
    CHECK(gap < 0.55);
    mean_gap += gap;
  }
  mean_gap /= static_cast<double>(approx.size());
  CHECK(mean_gap < 0.25);
}

TEST_CASE("hard decisions from LLRs equal per-bit minimum distance") {
  for (auto kind : {Modulation::qpsk, Modulation::qam16}) {
    const ModScheme s = ModScheme::make(kind);
    const int bps = s.bits_per_symbol;
    for (double re = -1.4; re <= 1.4; re += 0.09) {
      for (double im = -1.4; im <= 1.4; im += 0.09) {
        const std::vector<std::complex<double>> rx = {{re, im}};
        const auto llrs = demap_llr(rx, s, 0.25);
        // brute-force per-bit nearest-subset decision
        for (int j = 0; j < bps; ++j) {
          const int mask = 1 << (bps - 1 - j);
          double d0 = 1e300, d1 = 1e300;
          for (int p = 0; p < static_cast<int>(s.constellation.size()); ++p) {
            const double d = std::norm(rx[0] - s.constellation[p]);
            if (p & mask)
              d1 = std::min(d1, d);
            else
              d0 = std::min(d0, d);
          }
          if (d1 < d0) CHECK(llrs[j] > 0.0);
          if (d0 < d1) CHECK(llrs[j] < 0.0);
        }
      }
    }
  }
}

TEST_CASE("bpsk symmetry: negating symbols negates LLRs") {
  const ModScheme s = ModScheme::make(Modulation::bpsk);
  Rng rng(8);
  std::vector<std::complex<double>> rx(64);
  for (auto& y : rx) y = {rng.gaussian(), rng.gaussian()};
  auto neg = rx;
  for (auto& y : neg) y = -y;
  const auto a = demap_llr(rx, s, 0.8);
  const auto b = demap_llr(neg, s, 0.8);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == -b[i]);
}

TEST_CASE("ebno_to_sigma2") {
  CHECK(ebno_to_sigma2(0.0, 0.5, 1) == doctest::Approx(1.0));
  const double s0 = ebno_to_sigma2(1.0, 0.5, 2);
  const double s3 = ebno_to_sigma2(1.0 + 10.0 * std::log10(2.0), 0.5, 2);
  CHECK(s3 == doctest::Approx(s0 / 2.0).epsilon(1e-12));
  const double r13 = ebno_to_sigma2(2.0, 1.0 / 3.0, 1);
  const double r12 = ebno_to_sigma2(2.0, 1.0 / 2.0, 1);
  CHECK(r13 / r12 == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS((void)demap_llr(std::vector<std::complex<double>>{}, ModScheme::make(Modulation::bpsk), 0.0),
                  std::invalid_argument);
}
