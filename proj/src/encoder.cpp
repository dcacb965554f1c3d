#include "turbo/encoder.hpp"

#include <stdexcept>
#include <string>

namespace turbo {

RscEncodeResult rsc_encode(std::span<const std::uint8_t> info_bits, const TrellisTable& trellis) {
  RscEncodeResult out;
  out.parity.resize(info_bits.size());
  int state = 0;
  for (std::size_t i = 0; i < info_bits.size(); ++i) {
    const int u = info_bits[i] & 1;
    out.parity[i] = static_cast<std::uint8_t>(trellis.parity[u][state]);
    state = trellis.next_state[u][state];
  }
  // termination: feed the input that zeroes the feedback, three times
  for (int t = 0; t < kTailSteps; ++t) {
    const int d2 = (state >> 1) & 1;
    const int d3 = state & 1;
    const int u = d2 ^ d3;
    out.tail_sys[t] = static_cast<std::uint8_t>(u);
    out.tail_parity[t] = static_cast<std::uint8_t>(trellis.parity[u][state]);
    state = trellis.next_state[u][state];
  }
  out.final_state = state;
  return out;
}

std::vector<std::uint8_t> turbo_encode(std::span<const std::uint8_t> info_bits,
                                       const Interleaver& interleaver,
                                       const TrellisTable& trellis) {
  const int k = static_cast<int>(info_bits.size());
  if (interleaver.size() != k)
    throw std::invalid_argument("turbo_encode: interleaver length " +
                                std::to_string(interleaver.size()) +
                                " does not match info length " + std::to_string(k));

  const RscEncodeResult e1 = rsc_encode(info_bits, trellis);
  const std::vector<std::uint8_t> permuted = interleaver.interleave(info_bits);
  const RscEncodeResult e2 = rsc_encode(permuted, trellis);

  std::vector<std::uint8_t> codeword;
  codeword.reserve(3 * k + CodeConfig::tail_bits);
  codeword.insert(codeword.end(), info_bits.begin(), info_bits.end());
  codeword.insert(codeword.end(), e1.parity.begin(), e1.parity.end());
  codeword.insert(codeword.end(), e2.parity.begin(), e2.parity.end());
  codeword.insert(codeword.end(), e1.tail_sys.begin(), e1.tail_sys.end());
  codeword.insert(codeword.end(), e1.tail_parity.begin(), e1.tail_parity.end());
  codeword.insert(codeword.end(), e2.tail_sys.begin(), e2.tail_sys.end());
  codeword.insert(codeword.end(), e2.tail_parity.begin(), e2.tail_parity.end());
  return codeword;
}

namespace {

// 1-based stage index k keeps p1 when odd, p2 when even.
inline bool keep_p1(int stage0) { return stage0 % 2 == 0; }
inline bool keep_p2(int stage0) { return stage0 % 2 == 1; }

}  // namespace

std::vector<std::uint8_t> rate_match(std::span<const std::uint8_t> mother,
                                     const CodeConfig& cfg) {
  if (static_cast<int>(mother.size()) != cfg.mother_len())
    throw std::invalid_argument("rate_match: mother codeword length mismatch");
  if (cfg.rate == CodeRate::one_third)
    return std::vector<std::uint8_t>(mother.begin(), mother.end());

  const int k = cfg.k;
  std::vector<std::uint8_t> out;
  out.reserve(cfg.codeword_len());
  for (int i = 0; i < k; ++i) out.push_back(mother[i]);
  for (int i = 0; i < k; ++i)
    if (keep_p1(i)) out.push_back(mother[k + i]);
  for (int i = 0; i < k; ++i)
    if (keep_p2(i)) out.push_back(mother[2 * k + i]);
  for (int i = 3 * k; i < cfg.mother_len(); ++i) out.push_back(mother[i]);
  return out;
}

LlrFrame depuncture(std::span<const double> channel_llrs, const CodeConfig& cfg) {
  if (static_cast<int>(channel_llrs.size()) != cfg.codeword_len())
    throw std::invalid_argument("depuncture: expected " + std::to_string(cfg.codeword_len()) +
                                " LLRs, got " + std::to_string(channel_llrs.size()));
  const int k = cfg.k;
  LlrFrame f;
  f.k = k;
  f.ys.assign(k, 0.0);
  f.y1p.assign(k, 0.0);
  f.y2p.assign(k, 0.0);

  std::size_t pos = 0;
  for (int i = 0; i < k; ++i) f.ys[i] = channel_llrs[pos++];
  if (cfg.rate == CodeRate::one_third) {
    for (int i = 0; i < k; ++i) f.y1p[i] = channel_llrs[pos++];
    for (int i = 0; i < k; ++i) f.y2p[i] = channel_llrs[pos++];
  } else {
    for (int i = 0; i < k; ++i)
      if (keep_p1(i)) f.y1p[i] = channel_llrs[pos++];
    for (int i = 0; i < k; ++i)
      if (keep_p2(i)) f.y2p[i] = channel_llrs[pos++];
  }
  for (int t = 0; t < 3; ++t) f.tail1_sys[t] = channel_llrs[pos++];
  for (int t = 0; t < 3; ++t) f.tail1_par[t] = channel_llrs[pos++];
  for (int t = 0; t < 3; ++t) f.tail2_sys[t] = channel_llrs[pos++];
  for (int t = 0; t < 3; ++t) f.tail2_par[t] = channel_llrs[pos++];
  return f;
}

}  // namespace turbo
