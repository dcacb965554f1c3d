#include "turbo/trellis.hpp"

namespace turbo {

namespace {

// Register state packs as s = 4*d1 + 2*d2 + d3 with d1 the newest bit.
// Feedback taps D^2, D^3; feedforward taps 1, D, D^3.
struct Step {
  int next;
  int parity;
};

Step step_register(int state, int u) {
  const int d1 = (state >> 2) & 1;
  const int d2 = (state >> 1) & 1;
  const int d3 = state & 1;
  const int in = u ^ d2 ^ d3;
  const int parity = in ^ d1 ^ d3;
  return {(in << 2) | (d1 << 1) | d2, parity};
}

}  // namespace

TrellisTable build_trellis() {
  TrellisTable t{};
  for (int u = 0; u < 2; ++u) {
    for (int s = 0; s < kNumStates; ++s) {
      const Step st = step_register(s, u);
      t.next_state[u][s] = st.next;
      t.parity[u][s] = st.parity;
      t.prev_state[u][st.next] = s;
      Transition tr{s, st.next, st.parity};
      (u == 1 ? t.transitions_s1 : t.transitions_s0)[s] = tr;
    }
  }
  return t;
}

const TrellisTable& lte_trellis() {
  static const TrellisTable table = build_trellis();
  return table;
}

}  // namespace turbo
