#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "turbo/channel.hpp"
#include "turbo/encoder.hpp"
#include "turbo/siso.hpp"
#include "turbo/turbonet.hpp"

namespace turbo {

/// One supervised example: channel LLRs, the log-MAP posterior target,
/// and the true bits for BER accounting.
struct Sample {
  LlrFrame frame;
  std::vector<double> target_llrs;
  std::vector<std::uint8_t> info_bits;
};

/// Random info bits -> encode -> modulate -> AWGN -> demap -> depuncture.
/// Everything after the rng argument is pure, so the frame is fully
/// determined by the rng stream.
void simulate_frame(const CodeConfig& code, const ModScheme& scheme,
                    const Interleaver& interleaver, const TrellisTable& trellis, double sigma2,
                    Rng& rng, std::vector<std::uint8_t>& info_bits, LlrFrame& frame);

/// Sample i is generated from seed derive_seed(seed, i); identical for
/// any worker count. Targets come from log-MAP with target_iters.
std::vector<Sample> generate_dataset(std::size_t n, const CodeConfig& code, Modulation mod,
                                     const Interleaver& interleaver, const TrellisTable& trellis,
                                     double snr_db, int target_iters, std::uint64_t seed,
                                     int workers);

struct DatasetHeader {
  int k = 0;
  CodeRate rate = CodeRate::one_third;
  Modulation modulation = Modulation::bpsk;
  double snr_db = 0.0;
  int target_iters = 6;
  std::uint64_t seed = 0;
  std::uint64_t n = 0;
};

/// Record-oriented little-endian binary cache (layout in README).
void save_dataset(const std::string& path, const DatasetHeader& header,
                  std::span<const Sample> samples);
std::pair<DatasetHeader, std::vector<Sample>> load_dataset(const std::string& path);

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 8e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-weight state for SGD/Adam over the packed trainable vector.
class Optimizer {
 public:
  Optimizer(const OptimizerConfig& cfg, std::size_t n_weights);
  void step(std::span<double> weights, std::span<const double> gradients);

 private:
  OptimizerConfig cfg_;
  std::vector<double> m_, v_;
  long step_count_ = 0;
};

struct TrainConfig {
  double train_snr_db = 0.0;
  int epochs_max = 10;
  int batch_size = 500;
  OptimizerConfig optimizer{};
  double split_train = 3.0;  // train : validation proportion
  double split_val = 1.0;
  int target_iters = 6;
  int units_m = 3;
  WeightVariant variant = WeightVariant::elw_only;
  std::uint64_t master_seed = 1;
  int workers = 1;
};

struct TrainResult {
  WeightSet best;
  std::vector<double> val_ber_history;    // index 0 = initial weights
  std::vector<double> train_loss_history; // mean sample loss per epoch
  int best_epoch = 0;                     // 0 means init weights were never beaten
  int epochs_run = 0;
};

/// Mini-batch training with the early-stopping schedule: evaluate
/// validation BER after each epoch, keep the best checkpoint, stop on
/// the first increase or at epochs_max.
TrainResult train_early_stopping(std::span<const Sample> dataset, const TrainConfig& cfg,
                                 const CodeConfig& code, Modulation mod,
                                 const Interleaver& interleaver, const TrellisTable& trellis);

/// Normalized validation error: mean of BER_dnn / BER_map over SNR points.
double nve(std::span<const double> ber_dnn, std::span<const double> ber_map);

/// BPSK training-SNR rule: min(test_snr, 10 log10(2^(2R) - 1)).
double heuristic_train_snr(double test_snr_db, double rate);

}  // namespace turbo
