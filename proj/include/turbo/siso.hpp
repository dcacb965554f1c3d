#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "turbo/interleaver.hpp"
#include "turbo/llr_frame.hpp"
#include "turbo/trellis.hpp"

namespace turbo {

enum class MaxStarMode {
  exact,    // max(x,y) + log(1+e^-|x-y|)  (log-MAP)
  max_only  // max(x,y)                    (max-log-MAP)
};

double max_star(double x, double y, MaxStarMode mode);

/// Channel view of one constituent code: systematic and parity LLRs for
/// the k information stages plus the three termination stages.
struct ConstituentInput {
  std::span<const double> sys;
  std::span<const double> par;
  std::array<double, 3> tail_sys{};
  std::array<double, 3> tail_par{};
};

/// Log-domain metrics over the k+3 trellis stages. Stage index t runs
/// 1..k+3; alpha[t]/beta[t] live at t = 0..k+3 and gamma for stage t is
/// stored at gamma[t-1]. Branch order inside a stage is b = u*8 + s'.
struct SisoState {
  int k = 0;
  std::vector<std::array<double, kNumStates>> alpha;
  std::vector<std::array<double, kNumStates>> beta;
  std::vector<std::array<double, kNumBranches>> gamma;
};

/// All 16 branch metrics of one stage:
///   gamma(s',s) = 1/2 u (apriori + ys) + 1/2 parity yp   with u, parity in {0,1}.
std::array<double, kNumBranches> branch_metrics(double ys_k, double yp_k, double apriori,
                                                const TrellisTable& trellis);

/// Forward/backward recursions with boundary state 0 pinned on both ends.
/// Per-stage normalization subtracts the stage maximum from all 8 states
/// (disable only to test normalization invariance).
SisoState forward_backward(const ConstituentInput& in, std::span<const double> aprioris,
                           const TrellisTable& trellis, MaxStarMode mode,
                           bool normalize = true);

struct SisoResult {
  std::vector<double> posterior;  // L(u_k | y), length k
  std::vector<double> extrinsic;  // L(u_k | y) - ys_k - apriori_k
};

SisoResult siso_decode(const ConstituentInput& in, std::span<const double> aprioris,
                       const TrellisTable& trellis, MaxStarMode mode);

struct TurboDecodeResult {
  std::vector<double> posterior;  // deinterleaved D2 posterior, length k
  std::vector<std::uint8_t> bits; // 1 iff posterior >= 0
};

/// Iterative two-decoder exchange; a-prioris start at zero.
class TurboDecoder {
 public:
  TurboDecoder(const TrellisTable& trellis, const Interleaver& interleaver, MaxStarMode mode,
               int iterations);

  void decode(const LlrFrame& frame, TurboDecodeResult& out);

 private:
  const TrellisTable& trellis_;
  const Interleaver& interleaver_;
  MaxStarMode mode_;
  int iterations_;

  // per-frame scratch, reused across calls
  std::vector<double> ys_perm_, la_, la2_, post_, ext_;
  SisoState state_;
};

TurboDecodeResult turbo_decode(const LlrFrame& frame, const Interleaver& interleaver,
                               const TrellisTable& trellis, int iterations, MaxStarMode mode);

/// Exact posteriors by enumerating all 2^k terminated paths; k <= 12.
/// Independent of the forward/backward recursions above.
std::vector<double> exhaustive_map_oracle(const ConstituentInput& in,
                                          std::span<const double> aprioris,
                                          const TrellisTable& trellis);

}  // namespace turbo
