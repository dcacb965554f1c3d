#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "turbo/channel.hpp"
#include "turbo/interleaver.hpp"
#include "turbo/trellis.hpp"
#include "turbo/turbonet.hpp"

namespace turbo {

enum class DecoderKind { max_log_map, log_map, turbonet, turbonet_plus };

const char* to_string(DecoderKind k);

/// One decoder entry of a sweep. Classical kinds use `iterations`;
/// neural kinds take their unit count and weights from `weights`.
struct DecoderSpec {
  DecoderKind kind = DecoderKind::max_log_map;
  int iterations = 3;
  const WeightSet* weights = nullptr;

  static DecoderSpec classical(DecoderKind kind, int iterations);
  static DecoderSpec neural(const WeightSet& weights);

  int iterations_or_units() const;
};

struct BerRecord {
  double ebno_db = 0.0;
  DecoderKind decoder = DecoderKind::max_log_map;
  int iterations_or_units = 0;
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  std::uint64_t seed = 0;
};

struct SweepConfig {
  CodeConfig code;
  Modulation modulation = Modulation::bpsk;
  std::vector<double> ebno_db;
  std::uint64_t max_frames = 10000;
  std::uint64_t max_errors = 200;  // 0 disables the early stop
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Monte-Carlo sweep. All decoders see the same noisy frames; a point
/// stops once every decoder has collected max_errors bit errors or at
/// max_frames. Output rows are in (snr, decoder) order and the ensemble
/// is identical for any worker count.
std::vector<BerRecord> ber_sweep(const SweepConfig& cfg, std::span<const DecoderSpec> decoders,
                                 const Interleaver& interleaver, const TrellisTable& trellis);

/// Header + one row per record; `config_comment` lands in a leading
/// '#' line so the file is self-describing.
void write_ber_csv(std::ostream& os, std::span<const BerRecord> records,
                   const std::string& config_comment);

}  // namespace turbo
