#include "turbo/ber.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "turbo/parallel.hpp"
#include "turbo/training.hpp"
#include "turbo/weight_io.hpp"

namespace turbo {

const char* to_string(DecoderKind k) {
  switch (k) {
    case DecoderKind::max_log_map: return "max_log_map";
    case DecoderKind::log_map: return "log_map";
    case DecoderKind::turbonet: return "turbonet";
    case DecoderKind::turbonet_plus: return "turbonet_plus";
  }
  return "?";
}

DecoderSpec DecoderSpec::classical(DecoderKind kind, int iterations) {
  if (kind != DecoderKind::max_log_map && kind != DecoderKind::log_map)
    throw std::invalid_argument("classical decoder spec needs a classical kind");
  return DecoderSpec{kind, iterations, nullptr};
}

DecoderSpec DecoderSpec::neural(const WeightSet& weights) {
  const DecoderKind kind = weights.variant == WeightVariant::elw_only
                               ? DecoderKind::turbonet_plus
                               : DecoderKind::turbonet;
  return DecoderSpec{kind, weights.units_m, &weights};
}

int DecoderSpec::iterations_or_units() const { return iterations; }

namespace {

void check_weights_match(const SweepConfig& cfg, const WeightSet& ws) {
  std::ostringstream diff;
  if (ws.k != cfg.code.k) diff << " k: file=" << ws.k << " requested=" << cfg.code.k << ";";
  if (ws.rate != cfg.code.rate)
    diff << " rate: file=" << to_string(ws.rate) << " requested=" << to_string(cfg.code.rate)
         << ";";
  if (ws.modulation != cfg.modulation)
    diff << " modulation: file=" << to_string(ws.modulation)
         << " requested=" << to_string(cfg.modulation) << ";";
  const std::string d = diff.str();
  if (!d.empty())
    throw std::invalid_argument("weight file does not match the requested configuration:" + d +
                                " (file metadata: " + describe_weights(ws) + ")");
}

// decoders owned by one worker chunk
struct ChunkDecoders {
  std::vector<TurboDecoder> classical;
  std::vector<TurboNetDecoder> neural;
  std::vector<int> classical_index, neural_index;  // per decoder spec

  ChunkDecoders(std::span<const DecoderSpec> specs, const TrellisTable& trellis,
                const Interleaver& interleaver) {
    for (const auto& spec : specs) {
      if (spec.weights) {
        neural_index.push_back(static_cast<int>(neural.size()));
        classical_index.push_back(-1);
        neural.emplace_back(trellis, interleaver);
      } else {
        classical_index.push_back(static_cast<int>(classical.size()));
        neural_index.push_back(-1);
        classical.emplace_back(trellis, interleaver,
                               spec.kind == DecoderKind::log_map ? MaxStarMode::exact
                                                                 : MaxStarMode::max_only,
                               spec.iterations);
      }
    }
  }
};

}  // namespace

std::vector<BerRecord> ber_sweep(const SweepConfig& cfg, std::span<const DecoderSpec> decoders,
                                 const Interleaver& interleaver, const TrellisTable& trellis) {
  for (const auto& spec : decoders)
    if (spec.weights) check_weights_match(cfg, *spec.weights);
  if (interleaver.size() != cfg.code.k)
    throw std::invalid_argument("ber_sweep: interleaver length does not match k");

  const ModScheme scheme = ModScheme::make(cfg.modulation);
  const int n_dec = static_cast<int>(decoders.size());
  const int k = cfg.code.k;
  std::vector<BerRecord> records;
  if (cfg.max_frames == 0) return records;

  constexpr std::uint64_t kChunk = 64;
  const std::uint64_t block = std::max<std::uint64_t>(
      kChunk, std::min<std::uint64_t>(cfg.max_frames, 8192));

  for (std::size_t pt = 0; pt < cfg.ebno_db.size(); ++pt) {
    const double snr = cfg.ebno_db[pt];
    const double sigma2 =
        ebno_to_sigma2(snr, cfg.code.effective_rate(), scheme.bits_per_symbol);
    const std::uint64_t point_seed = derive_seed(cfg.seed, 0xb2e5u, pt);

    std::vector<std::uint64_t> errors(n_dec, 0);
    std::uint64_t frames_done = 0;

    while (frames_done < cfg.max_frames) {
      const std::uint64_t this_block = std::min<std::uint64_t>(block, cfg.max_frames - frames_done);
      const std::size_t n_chunks = (this_block + kChunk - 1) / kChunk;
      std::vector<std::uint64_t> chunk_errors(n_chunks * n_dec, 0);

      parallel_chunks(this_block, kChunk, cfg.workers,
                      [&](std::size_t c, std::size_t begin, std::size_t end) {
                        ChunkDecoders dec(decoders, trellis, interleaver);
                        std::vector<std::uint8_t> info;
                        LlrFrame frame;
                        TurboDecodeResult res;
                        ForwardResult fwd;
                        std::vector<std::uint64_t> errs(n_dec, 0);
                        for (std::size_t f = begin; f < end; ++f) {
                          Rng rng(derive_seed(point_seed, frames_done + f));
                          simulate_frame(cfg.code, scheme, interleaver, trellis, sigma2, rng,
                                         info, frame);
                          for (int d = 0; d < n_dec; ++d) {
                            if (decoders[d].weights) {
                              dec.neural[dec.neural_index[d]].forward(
                                  frame, *decoders[d].weights, fwd);
                              for (int j = 0; j < k; ++j)
                                errs[d] += (fwd.posterior[j] >= 0.0 ? 1 : 0) != info[j];
                            } else {
                              dec.classical[dec.classical_index[d]].decode(frame, res);
                              for (int j = 0; j < k; ++j) errs[d] += res.bits[j] != info[j];
                            }
                          }
                        }
                        for (int d = 0; d < n_dec; ++d) chunk_errors[c * n_dec + d] = errs[d];
                      });

      for (std::size_t c = 0; c < n_chunks; ++c)
        for (int d = 0; d < n_dec; ++d) errors[d] += chunk_errors[c * n_dec + d];
      frames_done += this_block;

      if (cfg.max_errors > 0) {
        const std::uint64_t slowest = *std::min_element(errors.begin(), errors.end());
        if (slowest >= cfg.max_errors) break;
      }
    }

    for (int d = 0; d < n_dec; ++d) {
      BerRecord rec;
      rec.ebno_db = snr;
      rec.decoder = decoders[d].kind;
      rec.iterations_or_units = decoders[d].iterations_or_units();
      rec.frames = frames_done;
      rec.bit_errors = errors[d];
      rec.ber = frames_done == 0
                    ? 0.0
                    : static_cast<double>(errors[d]) /
                          (static_cast<double>(frames_done) * static_cast<double>(k));
      rec.seed = cfg.seed;
      records.push_back(rec);
    }
  }
  return records;
}

void write_ber_csv(std::ostream& os, std::span<const BerRecord> records,
                   const std::string& config_comment) {
  os << "# " << config_comment << "\n";
  os << "ebno_db,decoder,iterations,frames,bit_errors,ber,seed\n";
  for (const auto& r : records) {
    os << r.ebno_db << ',' << to_string(r.decoder) << ',' << r.iterations_or_units << ','
       << r.frames << ',' << r.bit_errors << ',';
    const auto old_prec = os.precision(12);
    os << r.ber;
    os.precision(old_prec);
    os << ',' << r.seed << "\n";
  }
}

}  // namespace turbo
