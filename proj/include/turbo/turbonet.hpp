#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "turbo/channel.hpp"
#include "turbo/interleaver.hpp"
#include "turbo/llr_frame.hpp"
#include "turbo/siso.hpp"
#include "turbo/trellis.hpp"

namespace turbo {

// Pruning scenarios: which weight families stay trainable. elw_only is
// the pruned decoder, full keeps every family.
enum class WeightVariant { gw_only, elw_only, gw_elw, full };

const char* to_string(WeightVariant v);
WeightVariant variant_from_string(const std::string& s);

constexpr bool variant_has_gw(WeightVariant v) {
  return v == WeightVariant::gw_only || v == WeightVariant::gw_elw || v == WeightVariant::full;
}
constexpr bool variant_has_plw(WeightVariant v) { return v == WeightVariant::full; }
constexpr bool variant_has_elw(WeightVariant v) { return v != WeightVariant::gw_only; }

enum class WeightFamily { gw, plw, elw };

/// Branch-metric weight slots: 0 = a-priori term, 1 = systematic term,
/// 2 = parity term. A slot exists only where the underlying term is
/// nonzero (u = 1 for slots 0/1, parity = 1 for slot 2); absent slots
/// stay fixed at 1 and are skipped by packing/counting.
bool gw_slot_present(int branch, int slot);

/// Per-stage trainable weights of one subnet. gw[k][b][slot] with branch
/// b = u*8 + s'; plw[k][f][i] with families f = 0..2 weighting the
/// alpha/gamma/beta terms of the u=1 fold (indexed by s', s', s) and
/// f = 3..5 the u=0 fold; elw[k][0..2] weighting posterior, systematic
/// and a-priori in the extrinsic combination.
struct SubnetWeights {
  std::vector<std::array<std::array<double, 3>, kNumBranches>> gw;
  std::vector<std::array<std::array<double, kNumStates>, 6>> plw;
  std::vector<std::array<double, 3>> elw;

  void init(int k, double value);
};

struct UnitWeights {
  SubnetWeights sn1, sn2;
};

struct InterleaverSpec {
  InterleaverKind kind = InterleaverKind::qpp;
  std::optional<std::uint64_t> seed;
};

struct TrainingProvenance {
  double train_snr_db = 0.0;
  int epochs = 0;
  int batch = 0;
  double learning_rate = 0.0;
  int target_iters = 0;
  std::uint64_t master_seed = 0;
  std::string optimizer = "adam(beta1=0.9,beta2=0.999,eps=1e-8)";
};

struct WeightSet {
  int k = 0;
  int units_m = 0;
  WeightVariant variant = WeightVariant::full;
  CodeRate rate = CodeRate::one_third;
  Modulation modulation = Modulation::bpsk;
  InterleaverSpec interleaver;
  std::optional<TrainingProvenance> training;
  std::vector<UnitWeights> units;

  std::size_t trainable_count() const;
  std::vector<double> pack_trainable() const;
  void unpack_trainable(std::span<const double> values);
};

/// All weights 1: the network computes exactly max-log-MAP with M iterations.
WeightSet init_weights(int k, int units_m, WeightVariant variant);

/// Gradient accumulator with the same array layout as the weights.
struct WeightGrad {
  std::vector<UnitWeights> units;

  static WeightGrad zeros_like(const WeightSet& ws);
  void zero();
  void add(const WeightGrad& other);
  void scale(double factor);
  std::vector<double> pack_trainable(WeightVariant variant) const;
};

/// Recorded forward pass of one subnet: every metric value plus the
/// argmax choice of every max node, enough to replay gradients exactly.
struct SubnetTape {
  std::vector<double> la, sys, par;                       // stage inputs, length k
  std::array<double, 3> tail_sys{}, tail_par{};
  std::vector<std::array<double, kNumBranches>> gamma;    // k+3
  std::vector<std::array<double, kNumStates>> alpha;      // k+4, normalized
  std::vector<std::array<double, kNumStates>> beta;       // k+4, normalized
  std::vector<std::array<std::uint8_t, kNumStates>> alpha_sel;  // k+3: winning u
  std::vector<std::array<std::uint8_t, kNumStates>> beta_sel;   // k+3
  std::vector<std::uint8_t> alpha_norm_arg;               // k+3, stage t at [t-1]
  std::vector<std::uint8_t> beta_norm_arg;                // k+3, stage t at [t]
  std::vector<std::uint8_t> sel_s1, sel_s0;               // k: winning s' per fold
  std::vector<double> posterior, extrinsic;               // k
  double min_margin = 0.0;  // smallest winner-runner-up gap seen in this pass
};

struct UnitTape {
  SubnetTape sn1, sn2;
};

struct DecodeTape {
  int k = 0;
  std::vector<UnitTape> units;
  std::vector<double> output;  // deinterleaved final posterior

  bool selections_equal(const DecodeTape& other) const;
  double min_selection_margin() const;  // smallest gap at any max node
};

struct ForwardResult {
  std::vector<double> posterior;  // L^M(u|y)
  std::vector<double> prob;       // sigmoid(posterior)
};

/// Unfolded weighted max-log-MAP decoder. Holds per-frame scratch, so
/// use one instance per thread.
class TurboNetDecoder {
 public:
  TurboNetDecoder(const TrellisTable& trellis, const Interleaver& interleaver);

  void forward(const LlrFrame& frame, const WeightSet& weights, ForwardResult& out,
               DecodeTape* tape = nullptr);

  /// Accumulates d(loss)/d(weight) into grad for every weight slot given
  /// d(loss)/d(output). Gradients of max nodes follow the recorded argmax.
  void backward(const DecodeTape& tape, const WeightSet& weights,
                std::span<const double> output_grad, WeightGrad& grad);

 private:
  struct SubnetIo;
  void run_subnet(const SubnetIo& io, const SubnetWeights& w, SubnetTape* tape);
  void backward_subnet(const SubnetTape& tape, const SubnetWeights& w,
                       std::span<const double> posterior_adj_in,
                       std::span<const double> extrinsic_adj,
                       SubnetWeights& grad, std::vector<double>& la_adj);

  const TrellisTable& trellis_;
  const Interleaver& interleaver_;

  // scratch
  std::vector<double> ys_perm_, la_, la2_, post_, ext_;
  SubnetTape scratch_tape_;
  std::vector<std::array<double, kNumStates>> alpha_adj_, beta_adj_;
  std::vector<std::array<double, kNumBranches>> gamma_adj_;
  std::vector<double> post_adj_, ext_adj_, buf_;
};

/// Mean squared error between posterior LLR vectors.
double loss_mse(std::span<const double> predicted, std::span<const double> target);

/// Seed gradient of loss_mse w.r.t. predicted.
void loss_mse_grad(std::span<const double> predicted, std::span<const double> target,
                   std::vector<double>& grad);

/// Hard decision: bit = 1 iff probability >= 0.5.
std::vector<std::uint8_t> decide(std::span<const double> probs);

}  // namespace turbo
