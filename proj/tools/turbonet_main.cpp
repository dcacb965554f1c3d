// Command-line front end: encoding, decoding, BER sweeps, dataset
// generation, training and weight reports for the turbo decoding toolkit.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "turbo/ber.hpp"
#include "turbo/channel.hpp"
#include "turbo/encoder.hpp"
#include "turbo/io_text.hpp"
#include "turbo/parallel.hpp"
#include "turbo/siso.hpp"
#include "turbo/training.hpp"
#include "turbo/trellis.hpp"
#include "turbo/turbonet.hpp"
#include "turbo/weight_io.hpp"

namespace {

using namespace turbo;

CodeRate parse_rate(const std::string& s) {
  if (s == "1/3") return CodeRate::one_third;
  if (s == "1/2") return CodeRate::one_half;
  throw CLI::ValidationError("--rate", "rate must be 1/3 or 1/2");
}

std::vector<double> parse_snr_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("--snr-db", "no SNR points given");
  return out;
}

struct InterleaverOpts {
  std::string kind = "auto";  // auto | qpp | random
  std::uint64_t seed = 0;
};

Interleaver resolve_interleaver(int k, const InterleaverOpts& opts, std::ostream& log) {
  if (opts.kind == "qpp") return Interleaver::qpp(k);
  if (opts.kind == "random") return Interleaver::seeded_random(k, opts.seed);
  if (opts.kind != "auto")
    throw CLI::ValidationError("--interleaver", "must be auto, qpp or random");
  if (qpp_supported(k)) return Interleaver::qpp(k);
  log << "note: k=" << k << " has no QPP parameters, using seeded_random(seed=" << opts.seed
      << ")\n";
  return Interleaver::seeded_random(k, opts.seed);
}

Interleaver interleaver_from_spec(int k, const InterleaverSpec& spec) {
  if (spec.kind == InterleaverKind::qpp) return Interleaver::qpp(k);
  return Interleaver::seeded_random(k, spec.seed.value_or(0));
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file: " + path);
  return os;
}

int cmd_encode(const std::string& in_path, const std::string& out_path, int k,
               const std::string& rate_str, const InterleaverOpts& il_opts) {
  CodeConfig code{k, parse_rate(rate_str)};
  const Interleaver il = resolve_interleaver(k, il_opts, std::cerr);
  const TrellisTable& trellis = lte_trellis();
  const auto blocks = read_bit_file(in_path, k);
  std::vector<std::vector<std::uint8_t>> out;
  out.reserve(blocks.size());
  for (const auto& info : blocks)
    out.push_back(rate_match(turbo_encode(info, il, trellis), code));
  auto os = open_out(out_path);
  write_bit_blocks(os, out);
  return 0;
}

struct DecodeOpts {
  std::string in_path, out_path, llr_out_path;
  int k = 40;
  std::string rate = "1/3";
  std::string decoder = "max-log-map";
  int iters = 3;
  std::string weights_path;
  InterleaverOpts il_opts;
};

int cmd_decode(const DecodeOpts& o) {
  CodeConfig code{o.k, parse_rate(o.rate)};
  const TrellisTable& trellis = lte_trellis();
  const auto blocks = read_llr_file(o.in_path, code.codeword_len());

  std::vector<std::vector<std::uint8_t>> bit_blocks;
  std::vector<std::vector<double>> llr_blocks;

  if (!o.weights_path.empty()) {
    const WeightSet ws = load_weights_file(o.weights_path);
    if (ws.k != o.k || ws.rate != code.rate)
      throw std::runtime_error("weight file mismatch: file has " + describe_weights(ws) +
                               ", requested k=" + std::to_string(o.k) + " rate=" + o.rate);
    const Interleaver il = interleaver_from_spec(o.k, ws.interleaver);
    TurboNetDecoder dec(trellis, il);
    ForwardResult fwd;
    for (const auto& llrs : blocks) {
      const LlrFrame frame = depuncture(llrs, code);
      dec.forward(frame, ws, fwd);
      bit_blocks.push_back(decide(fwd.prob));
      llr_blocks.push_back(fwd.posterior);
    }
  } else {
    MaxStarMode mode;
    if (o.decoder == "max-log-map")
      mode = MaxStarMode::max_only;
    else if (o.decoder == "log-map")
      mode = MaxStarMode::exact;
    else
      throw CLI::ValidationError("--decoder", "must be max-log-map or log-map (or use --weights)");
    const Interleaver il = resolve_interleaver(o.k, o.il_opts, std::cerr);
    TurboDecoder dec(trellis, il, mode, o.iters);
    TurboDecodeResult res;
    for (const auto& llrs : blocks) {
      const LlrFrame frame = depuncture(llrs, code);
      dec.decode(frame, res);
      bit_blocks.push_back(res.bits);
      llr_blocks.push_back(res.posterior);
    }
  }

  auto os = open_out(o.out_path);
  write_bit_blocks(os, bit_blocks);
  if (!o.llr_out_path.empty()) {
    auto los = open_out(o.llr_out_path);
    write_llr_blocks(los, llr_blocks);
  }
  return 0;
}

struct SweepOpts {
  int k = 40;
  std::string rate = "1/3";
  std::string mod = "bpsk";
  std::string snr_list = "0,1,2";
  std::uint64_t frames = 10000;
  std::uint64_t max_errors = 200;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::vector<std::string> decoders;
  std::string out_path;
  InterleaverOpts il_opts;
};

int cmd_ber_sweep(const SweepOpts& o) {
  SweepConfig cfg;
  cfg.code = CodeConfig{o.k, parse_rate(o.rate)};
  cfg.modulation = modulation_from_string(o.mod);
  cfg.ebno_db = parse_snr_list(o.snr_list);
  cfg.max_frames = o.frames;
  cfg.max_errors = o.max_errors;
  cfg.seed = o.seed;
  cfg.workers = o.workers;

  if (o.decoders.empty())
    throw CLI::ValidationError("--decoder", "give at least one decoder");

  // decoder entries: max-log-map[:iters], log-map[:iters], turbonet:weights.json
  std::vector<WeightSet> loaded;
  std::optional<Interleaver> il;
  std::vector<DecoderSpec> specs;
  loaded.reserve(o.decoders.size());
  for (const auto& d : o.decoders) {
    const auto colon = d.find(':');
    const std::string name = d.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : d.substr(colon + 1);
    if (name == "max-log-map" || name == "log-map") {
      const int iters = arg.empty() ? (name == "log-map" ? 6 : 3) : std::stoi(arg);
      specs.push_back(DecoderSpec::classical(
          name == "log-map" ? DecoderKind::log_map : DecoderKind::max_log_map, iters));
    } else if (name == "turbonet") {
      if (arg.empty()) throw CLI::ValidationError("--decoder", "turbonet needs :weights.json");
      loaded.push_back(load_weights_file(arg));
      const WeightSet& ws = loaded.back();
      if (!il) il = interleaver_from_spec(o.k, ws.interleaver);
      specs.push_back(DecoderSpec::neural(ws));
    } else {
      throw CLI::ValidationError("--decoder", "unknown decoder '" + name + "'");
    }
  }
  // pointers into `loaded` must survive reallocation-free
  {
    std::size_t li = 0;
    for (auto& s : specs)
      if (s.weights) s.weights = &loaded[li++];
  }
  if (!il) il = resolve_interleaver(o.k, o.il_opts, std::cerr);

  const auto records = ber_sweep(cfg, specs, *il, lte_trellis());

  std::ostringstream comment;
  comment << "k=" << o.k << " rate=" << o.rate << " mod=" << o.mod
          << " interleaver=" << to_string(il->kind())
          << " frames<=" << o.frames << " max_errors=" << o.max_errors << " seed=" << o.seed
          << " workers=" << o.workers;
  if (o.out_path.empty()) {
    write_ber_csv(std::cout, records, comment.str());
  } else {
    auto os = open_out(o.out_path);
    write_ber_csv(os, records, comment.str());
  }
  return 0;
}

struct DatasetOpts {
  int k = 40;
  std::string rate = "1/3";
  std::string mod = "bpsk";
  double snr_db = 0.0;
  int target_iters = 6;
  std::uint64_t n = 80000;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::string out_path;
  InterleaverOpts il_opts;
};

int cmd_gen_dataset(const DatasetOpts& o) {
  CodeConfig code{o.k, parse_rate(o.rate)};
  const Modulation mod = modulation_from_string(o.mod);
  const Interleaver il = resolve_interleaver(o.k, o.il_opts, std::cerr);
  const auto samples = generate_dataset(o.n, code, mod, il, lte_trellis(), o.snr_db,
                                        o.target_iters, o.seed, o.workers);
  DatasetHeader h;
  h.k = o.k;
  h.rate = code.rate;
  h.modulation = mod;
  h.snr_db = o.snr_db;
  h.target_iters = o.target_iters;
  h.seed = o.seed;
  h.n = o.n;
  save_dataset(o.out_path, h, samples);
  return 0;
}

struct TrainOpts {
  int k = 40;
  std::string rate = "1/3";
  std::string mod = "bpsk";
  std::string variant = "elw_only";
  int units = 3;
  int target_iters = 6;
  double train_snr = 0.0;
  int epochs = 10;
  int batch = 500;
  double lr = 8e-4;
  std::string optimizer = "adam";
  std::uint64_t n_train = 60000;
  std::uint64_t n_val = 20000;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::string out_path;
  std::string history_path;
  std::string dataset_path;  // load instead of generating
  InterleaverOpts il_opts;
};

int cmd_train(const TrainOpts& o) {
  CodeConfig code{o.k, parse_rate(o.rate)};
  const Modulation mod = modulation_from_string(o.mod);
  const Interleaver il = resolve_interleaver(o.k, o.il_opts, std::cerr);
  const TrellisTable& trellis = lte_trellis();

  TrainConfig cfg;
  cfg.train_snr_db = o.train_snr;
  cfg.epochs_max = o.epochs;
  cfg.batch_size = o.batch;
  cfg.optimizer.kind = o.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
  cfg.optimizer.learning_rate = o.lr;
  cfg.split_train = static_cast<double>(o.n_train);
  cfg.split_val = static_cast<double>(o.n_val);
  cfg.target_iters = o.target_iters;
  cfg.units_m = o.units;
  cfg.variant = variant_from_string(o.variant);
  cfg.master_seed = o.seed;
  cfg.workers = o.workers;

  std::vector<Sample> samples;
  if (!o.dataset_path.empty()) {
    auto [header, loaded] = load_dataset(o.dataset_path);
    if (header.k != o.k || header.rate != code.rate || header.modulation != mod)
      throw std::runtime_error("dataset file does not match requested configuration");
    samples = std::move(loaded);
    std::cerr << "loaded " << samples.size() << " samples from " << o.dataset_path << "\n";
  } else {
    const std::uint64_t total = o.n_train + o.n_val;
    std::cerr << "generating " << total << " samples at " << o.train_snr << " dB...\n";
    samples = generate_dataset(total, code, mod, il, trellis, o.train_snr, o.target_iters,
                               derive_seed(o.seed, 0xda7aULL), o.workers);
  }

  const auto res = train_early_stopping(samples, cfg, code, mod, il, trellis);
  save_weights_file(o.out_path, res.best);
  std::cerr << "best epoch " << res.best_epoch << " (validation BER "
            << res.val_ber_history[res.best_epoch] << "), ran " << res.epochs_run
            << " epoch(s); weights written to " << o.out_path << "\n";

  if (!o.history_path.empty()) {
    auto os = open_out(o.history_path);
    os << "# train k=" << o.k << " rate=" << o.rate << " mod=" << o.mod << " variant="
       << o.variant << " units=" << o.units << " T=" << o.target_iters << " train_snr_db="
       << o.train_snr << " batch=" << o.batch << " lr=" << o.lr << " optimizer=" << o.optimizer
       << " seed=" << o.seed << "\n";
    os << "epoch,val_ber,train_loss\n";
    for (std::size_t e = 0; e < res.val_ber_history.size(); ++e) {
      os << e << ',' << res.val_ber_history[e] << ',';
      if (e >= 1 && e - 1 < res.train_loss_history.size()) os << res.train_loss_history[e - 1];
      os << "\n";
    }
  }
  return 0;
}

int cmd_weight_report(const std::string& weights_path, const std::string& out_path) {
  const WeightSet ws = load_weights_file(weights_path);
  // histogram bins of width 0.01, relative frequency per (unit, family)
  constexpr double kBin = 0.01;
  std::ostringstream body;
  body << "unit,family,bin_lo,bin_hi,frequency\n";
  for (int m = 0; m < ws.units_m; ++m) {
    const auto collect = [&](WeightFamily fam, const char* name) {
      std::map<long, std::uint64_t> hist;
      std::uint64_t total = 0;
      for (const auto* sn : {&ws.units[m].sn1, &ws.units[m].sn2}) {
        const int k = ws.k;
        if (fam == WeightFamily::gw && variant_has_gw(ws.variant)) {
          for (int t = 0; t < k; ++t)
            for (int b = 0; b < kNumBranches; ++b)
              for (int slot = 0; slot < 3; ++slot)
                if (gw_slot_present(b, slot)) {
                  ++hist[static_cast<long>(std::floor(sn->gw[t][b][slot] / kBin))];
                  ++total;
                }
        } else if (fam == WeightFamily::plw && variant_has_plw(ws.variant)) {
          for (int t = 0; t < k; ++t)
            for (int f = 0; f < 6; ++f)
              for (int i = 0; i < kNumStates; ++i) {
                ++hist[static_cast<long>(std::floor(sn->plw[t][f][i] / kBin))];
                ++total;
              }
        } else if (fam == WeightFamily::elw && variant_has_elw(ws.variant)) {
          for (int t = 0; t < k; ++t)
            for (int slot = 0; slot < 3; ++slot) {
              ++hist[static_cast<long>(std::floor(sn->elw[t][slot] / kBin))];
              ++total;
            }
        }
      }
      for (const auto& [bin, count] : hist)
        body << (m + 1) << ',' << name << ',' << bin * kBin << ',' << (bin + 1) * kBin << ','
             << static_cast<double>(count) / static_cast<double>(total) << "\n";
    };
    collect(WeightFamily::gw, "gw");
    collect(WeightFamily::plw, "plw");
    collect(WeightFamily::elw, "elw");
  }

  std::ostringstream head;
  head << "# " << describe_weights(ws) << "\n";
  if (out_path.empty()) {
    std::cout << head.str() << body.str();
  } else {
    auto os = open_out(out_path);
    os << head.str() << body.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"turbo encode/decode toolkit with a trainable unfolded max-log-MAP decoder"};
  app.require_subcommand(1);
  app.set_config("--config");

  // encode
  auto* enc = app.add_subcommand("encode", "encode info-bit blocks to transmitted bits");
  std::string enc_in, enc_out;
  int enc_k = 40;
  std::string enc_rate = "1/3";
  InterleaverOpts enc_il;
  enc->add_option("--in", enc_in, "input bit file, one block of k bits per line")->required();
  enc->add_option("--out", enc_out, "output bit file")->required();
  enc->add_option("--k", enc_k, "information bits per block");
  enc->add_option("--rate", enc_rate, "code rate, 1/3 or 1/2");
  enc->add_option("--interleaver", enc_il.kind, "auto|qpp|random");
  enc->add_option("--interleaver-seed", enc_il.seed, "seed for the random interleaver");

  // decode
  auto* dec = app.add_subcommand("decode", "decode channel-LLR blocks to hard bits");
  DecodeOpts dopts;
  dec->add_option("--in", dopts.in_path, "LLR file, one codeword per line")->required();
  dec->add_option("--out", dopts.out_path, "output bit file")->required();
  dec->add_option("--llr-out", dopts.llr_out_path, "optional posterior-LLR output file");
  dec->add_option("--k", dopts.k, "information bits per block");
  dec->add_option("--rate", dopts.rate, "code rate");
  dec->add_option("--decoder", dopts.decoder, "max-log-map|log-map");
  dec->add_option("--iters", dopts.iters, "decoder iterations");
  dec->add_option("--weights", dopts.weights_path, "weight file for the trained decoder");
  dec->add_option("--interleaver", dopts.il_opts.kind, "auto|qpp|random");
  dec->add_option("--interleaver-seed", dopts.il_opts.seed, "");

  // ber-sweep
  auto* ber = app.add_subcommand("ber-sweep", "Monte-Carlo BER sweep to CSV");
  SweepOpts sopts;
  ber->add_option("--k", sopts.k, "information bits per block");
  ber->add_option("--rate", sopts.rate, "code rate");
  ber->add_option("--mod", sopts.mod, "bpsk|qpsk|qam16");
  ber->add_option("--snr-db", sopts.snr_list, "comma-separated Eb/N0 points");
  ber->add_option("--frames", sopts.frames, "frame cap per point");
  ber->add_option("--max-errors", sopts.max_errors, "stop after this many bit errors (0 = off)");
  ber->add_option("--seed", sopts.seed, "master seed");
  ber->add_option("--workers", sopts.workers, "worker threads");
  ber->add_option("--decoder", sopts.decoders,
                  "decoder entry: max-log-map[:iters], log-map[:iters], turbonet:weights.json "
                  "(repeatable)");
  ber->add_option("--out", sopts.out_path, "CSV path (default stdout)");
  ber->add_option("--interleaver", sopts.il_opts.kind, "auto|qpp|random");
  ber->add_option("--interleaver-seed", sopts.il_opts.seed, "");

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "generate a training corpus cache");
  DatasetOpts gopts;
  gen->add_option("--k", gopts.k, "information bits per block");
  gen->add_option("--rate", gopts.rate, "code rate");
  gen->add_option("--mod", gopts.mod, "modulation");
  gen->add_option("--snr-db", gopts.snr_db, "Eb/N0 of the corpus");
  gen->add_option("--target-iters", gopts.target_iters, "log-MAP iterations for targets");
  gen->add_option("--n", gopts.n, "number of samples");
  gen->add_option("--seed", gopts.seed, "dataset seed");
  gen->add_option("--workers", gopts.workers, "worker threads");
  gen->add_option("--out", gopts.out_path, "output cache file")->required();
  gen->add_option("--interleaver", gopts.il_opts.kind, "auto|qpp|random");
  gen->add_option("--interleaver-seed", gopts.il_opts.seed, "");

  // train
  auto* tr = app.add_subcommand("train", "train the unfolded decoder");
  TrainOpts topts;
  tr->add_option("--k", topts.k, "information bits per block");
  tr->add_option("--rate", topts.rate, "code rate");
  tr->add_option("--mod", topts.mod, "modulation");
  tr->add_option("--variant", topts.variant, "gw_only|elw_only|gw_elw|full");
  tr->add_option("--units", topts.units, "decoding units M");
  tr->add_option("--target-iters", topts.target_iters, "log-MAP iterations for targets");
  tr->add_option("--train-snr", topts.train_snr, "training Eb/N0 in dB");
  tr->add_option("--epochs", topts.epochs, "maximum epochs");
  tr->add_option("--batch", topts.batch, "batch size");
  tr->add_option("--lr", topts.lr, "learning rate");
  tr->add_option("--optimizer", topts.optimizer, "adam|sgd");
  tr->add_option("--n-train", topts.n_train, "training samples");
  tr->add_option("--n-val", topts.n_val, "validation samples");
  tr->add_option("--seed", topts.seed, "master seed");
  tr->add_option("--workers", topts.workers, "worker threads");
  tr->add_option("--out", topts.out_path, "output weight file")->required();
  tr->add_option("--history", topts.history_path, "per-epoch history CSV");
  tr->add_option("--dataset", topts.dataset_path, "load a dataset cache instead of generating");
  tr->add_option("--interleaver", topts.il_opts.kind, "auto|qpp|random");
  tr->add_option("--interleaver-seed", topts.il_opts.seed, "");

  // weight-report
  auto* rep = app.add_subcommand("weight-report", "histogram of trained weight values");
  std::string rep_weights, rep_out;
  rep->add_option("--weights", rep_weights, "weight file")->required();
  rep->add_option("--out", rep_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (enc->parsed()) return cmd_encode(enc_in, enc_out, enc_k, enc_rate, enc_il);
    if (dec->parsed()) return cmd_decode(dopts);
    if (ber->parsed()) return cmd_ber_sweep(sopts);
    if (gen->parsed()) return cmd_gen_dataset(gopts);
    if (tr->parsed()) return cmd_train(topts);
    if (rep->parsed()) return cmd_weight_report(rep_weights, rep_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
