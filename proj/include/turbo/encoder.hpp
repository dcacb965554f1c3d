#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "turbo/interleaver.hpp"
#include "turbo/llr_frame.hpp"
#include "turbo/trellis.hpp"

namespace turbo {

struct RscEncodeResult {
  std::vector<std::uint8_t> parity;  // length k
  std::array<std::uint8_t, 3> tail_sys;
  std::array<std::uint8_t, 3> tail_parity;
  int final_state;  // 0 after termination
};

/// Runs one constituent encoder from state 0 and appends the three
/// termination steps that drive the register back to 0.
RscEncodeResult rsc_encode(std::span<const std::uint8_t> info_bits, const TrellisTable& trellis);

/// Mother codeword x^s || x^1p || x^2p || 12 tail bits, where the tail
/// block is e1_sys[3], e1_par[3], e2_sys[3], e2_par[3].
std::vector<std::uint8_t> turbo_encode(std::span<const std::uint8_t> info_bits,
                                       const Interleaver& interleaver,
                                       const TrellisTable& trellis);

/// Puncture the mother codeword down to the transmitted length. Rate 1/3
/// is the identity. Rate 1/2 keeps p1 at odd stages and p2 at even stages
/// (1-based, alternating); systematic and tail bits always survive.
std::vector<std::uint8_t> rate_match(std::span<const std::uint8_t> mother, const CodeConfig& cfg);

/// Scatter channel LLRs for the transmitted bits back onto the mother
/// layout, zeros at punctured positions.
LlrFrame depuncture(std::span<const double> channel_llrs, const CodeConfig& cfg);

}  // namespace turbo
