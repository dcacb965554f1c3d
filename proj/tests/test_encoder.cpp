#include <doctest.h>

#include <algorithm>

#include "turbo/encoder.hpp"
#include "turbo/rng.hpp"

using namespace turbo;

TEST_CASE("all-zero input keeps the zero state") {
  const TrellisTable t = build_trellis();
  std::vector<std::uint8_t> zeros(40, 0);
  const auto r = rsc_encode(zeros, t);
  CHECK(std::all_of(r.parity.begin(), r.parity.end(), [](auto b) { return b == 0; }));
  CHECK(r.tail_sys == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(r.tail_parity == std::array<std::uint8_t, 3>{0, 0, 0});
  CHECK(r.final_state == 0);
}

TEST_CASE("impulse response of the parity branch") {
  // long division of (1+D+D^3)/(1+D^2+D^3) over GF(2), first 8 terms
  const TrellisTable t = build_trellis();
  std::vector<std::uint8_t> impulse(8, 0);
  impulse[0] = 1;
  const auto r = rsc_encode(impulse, t);
  const std::vector<std::uint8_t> expected = {1, 1, 1, 1, 0, 0, 1, 0};
  CHECK(r.parity == expected);
}

TEST_CASE("termination reaches state 0 for random inputs") {
  const TrellisTable t = build_trellis();
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::uint8_t> bits(40);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.bit());
    CHECK(rsc_encode(bits, t).final_state == 0);
  }
}

TEST_CASE("turbo codeword lengths") {
  const TrellisTable t = build_trellis();
  const Interleaver il40 = Interleaver::qpp(40);
  std::vector<std::uint8_t> info(40, 0);
  const auto mother = turbo_encode(info, il40, t);
  CHECK(mother.size() == 132);
  CHECK(std::all_of(mother.begin(), mother.end(), [](auto b) { return b == 0; }));
  CHECK(rate_match(mother, CodeConfig{40, CodeRate::one_third}).size() == 132);
  CHECK(rate_match(mother, CodeConfig{40, CodeRate::one_half}).size() == 92);

  const Interleaver il64 = Interleaver::qpp(64);
  std::vector<std::uint8_t> info64(64, 1);
  const auto mother64 = turbo_encode(info64, il64, t);
  CHECK(mother64.size() == 204);
  CHECK(rate_match(mother64, CodeConfig{64, CodeRate::one_half}).size() == 140);
}

TEST_CASE("interleaver length mismatch is a configuration error") {
  const TrellisTable t = build_trellis();
  std::vector<std::uint8_t> info(40, 0);
  const Interleaver il = Interleaver::qpp(48);
  CHECK_THROWS_AS(turbo_encode(info, il, t), std::invalid_argument);
}

TEST_CASE("depuncture restores surviving positions exactly, zeros elsewhere") {
  const CodeConfig cfg{40, CodeRate::one_half};
  // tx LLRs with unique values so positions are traceable
  std::vector<double> tx_llrs(cfg.codeword_len());
  for (std::size_t i = 0; i < tx_llrs.size(); ++i) tx_llrs[i] = static_cast<double>(i) + 1.0;
  const LlrFrame f = depuncture(tx_llrs, cfg);

  // systematic survives whole
  for (int i = 0; i < 40; ++i) CHECK(f.ys[i] == tx_llrs[i]);
  // p1 kept at odd stages (0-based even), p2 at even stages (0-based odd)
  std::size_t pos = 40;
  for (int i = 0; i < 40; ++i) {
    if (i % 2 == 0) {
      CHECK(f.y1p[i] == tx_llrs[pos]);
      ++pos;
    } else {
      CHECK(f.y1p[i] == 0.0);
    }
  }
  for (int i = 0; i < 40; ++i) {
    if (i % 2 == 1) {
      CHECK(f.y2p[i] == tx_llrs[pos]);
      ++pos;
    } else {
      CHECK(f.y2p[i] == 0.0);
    }
  }
  // 12 tail LLRs, never punctured
  for (int t = 0; t < 3; ++t) CHECK(f.tail1_sys[t] == tx_llrs[pos + t]);
  for (int t = 0; t < 3; ++t) CHECK(f.tail1_par[t] == tx_llrs[pos + 3 + t]);
  for (int t = 0; t < 3; ++t) CHECK(f.tail2_sys[t] == tx_llrs[pos + 6 + t]);
  for (int t = 0; t < 3; ++t) CHECK(f.tail2_par[t] == tx_llrs[pos + 9 + t]);
}

TEST_CASE("rate match / depuncture agree on surviving bit positions") {
  const TrellisTable t = build_trellis();
  const Interleaver il = Interleaver::qpp(40);
  const CodeConfig cfg{40, CodeRate::one_half};
  Rng rng(11);
  std::vector<std::uint8_t> info(40);
  for (auto& b : info) b = static_cast<std::uint8_t>(rng.bit());
  const auto mother = turbo_encode(info, il, t);
  const auto tx = rate_match(mother, cfg);
  REQUIRE(tx.size() == 92);

  std::vector<double> llrs(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) llrs[i] = tx[i] ? 5.0 : -5.0;
  const LlrFrame f = depuncture(llrs, cfg);
  for (int i = 0; i < 40; ++i) {
    CHECK(f.ys[i] == (info[i] ? 5.0 : -5.0));
    if (i % 2 == 0)
      CHECK(f.y1p[i] == (mother[40 + i] ? 5.0 : -5.0));
    else
      CHECK(f.y2p[i] == (mother[80 + i] ? 5.0 : -5.0));
  }
}

TEST_CASE("unsupported depuncture length is rejected") {
  const CodeConfig cfg{40, CodeRate::one_half};
  std::vector<double> short_llrs(91, 0.0);
  CHECK_THROWS_AS(depuncture(short_llrs, cfg), std::invalid_argument);
}
