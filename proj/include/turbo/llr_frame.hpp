#pragma once

#include <array>
#include <vector>

namespace turbo {

/// Channel LLRs for one codeword, already depunctured: punctured
/// positions hold exactly 0. Sign convention log(P(bit=1)/P(bit=0)).
struct LlrFrame {
  int k = 0;
  std::vector<double> ys;   // systematic, length k
  std::vector<double> y1p;  // constituent-1 parity, length k
  std::vector<double> y2p;  // constituent-2 parity, length k
  std::array<double, 3> tail1_sys{}, tail1_par{};  // E1 termination stages
  std::array<double, 3> tail2_sys{}, tail2_par{};  // E2 termination stages
};

}  // namespace turbo
