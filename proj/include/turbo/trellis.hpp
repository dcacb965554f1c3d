#pragma once

#include <array>
#include <cstdint>

namespace turbo {

inline constexpr int kNumStates = 8;
inline constexpr int kNumBranches = 16;  // two input bits x eight states
inline constexpr int kTailSteps = 3;
inline constexpr double kLogZero = -128.0;  // stand-in for -inf in log metrics

// One trellis edge s' -> s taken under input bit u, with its parity output.
struct Transition {
  int from;
  int to;
  int parity;
};

/// 8-state transition structure of the rate-1/2 RSC constituent encoder
/// with feedback polynomial 1+D^2+D^3 and feedforward polynomial 1+D+D^3.
struct TrellisTable {
  // next_state[u][s'] and parity[u][s'] for input bit u in {0,1}
  std::array<std::array<int, kNumStates>, 2> next_state;
  std::array<std::array<int, kNumStates>, 2> parity;
  // prev_state[u][s] = the unique s' with next_state[u][s'] == s
  std::array<std::array<int, kNumStates>, 2> prev_state;
  // the 8 transitions taken under u=1 / u=0, ordered by from-state
  std::array<Transition, kNumStates> transitions_s1;
  std::array<Transition, kNumStates> transitions_s0;

  // Branches carry a canonical index b = u*8 + s' used for metric storage.
  static constexpr int branch_index(int u, int from) { return u * kNumStates + from; }
  static constexpr int branch_input(int b) { return b / kNumStates; }
  static constexpr int branch_from(int b) { return b % kNumStates; }
};

/// Derives the transition table from the shift-register recursion.
TrellisTable build_trellis();

/// Shared immutable instance (the table is a constant of the code).
const TrellisTable& lte_trellis();

enum class CodeRate { one_third, one_half };

inline const char* to_string(CodeRate r) {
  return r == CodeRate::one_third ? "1/3" : "1/2";
}

/// Block-level code parameters. Twelve tail bits terminate both constituents.
struct CodeConfig {
  int k = 0;
  CodeRate rate = CodeRate::one_third;

  static constexpr int tail_bits = 12;

  int mother_len() const { return 3 * k + tail_bits; }
  int codeword_len() const {
    return rate == CodeRate::one_third ? 3 * k + tail_bits : 2 * k + tail_bits;
  }
  // transmitted-energy rate, counting tail overhead
  double effective_rate() const { return static_cast<double>(k) / codeword_len(); }
};

}  // namespace turbo
