#include "turbo/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "turbo/parallel.hpp"

namespace turbo {

void simulate_frame(const CodeConfig& code, const ModScheme& scheme,
                    const Interleaver& interleaver, const TrellisTable& trellis, double sigma2,
                    Rng& rng, std::vector<std::uint8_t>& info_bits, LlrFrame& frame) {
  info_bits.resize(code.k);
  for (auto& b : info_bits) b = static_cast<std::uint8_t>(rng.bit());
  const std::vector<std::uint8_t> mother = turbo_encode(info_bits, interleaver, trellis);
  const std::vector<std::uint8_t> tx = rate_match(mother, code);
  ModulatedFrame mf = modulate(tx, scheme);
  apply_awgn(std::span<std::complex<double>>(mf.symbols), sigma2, rng);
  std::vector<double> llrs = demap_llr(mf.symbols, scheme, sigma2);
  llrs.resize(tx.size());  // drop LLRs of the zero padding bits
  frame = depuncture(llrs, code);
}

std::vector<Sample> generate_dataset(std::size_t n, const CodeConfig& code, Modulation mod,
                                     const Interleaver& interleaver, const TrellisTable& trellis,
                                     double snr_db, int target_iters, std::uint64_t seed,
                                     int workers) {
  const ModScheme scheme = ModScheme::make(mod);
  const double sigma2 = ebno_to_sigma2(snr_db, code.effective_rate(), scheme.bits_per_symbol);
  std::vector<Sample> samples(n);
  parallel_chunks(n, 256, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    TurboDecoder target_dec(trellis, interleaver, MaxStarMode::exact, target_iters);
    TurboDecodeResult res;
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(seed, i));
      Sample& s = samples[i];
      simulate_frame(code, scheme, interleaver, trellis, sigma2, rng, s.info_bits, s.frame);
      target_dec.decode(s.frame, res);
      s.target_llrs = res.posterior;
    }
  });
  return samples;
}

namespace {

template <typename T>
void write_pod(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void write_doubles(std::ostream& os, std::span<const double> v) {
  os.write(reinterpret_cast<const char*>(v.data()),
           static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::istream& is, std::span<double> v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
}

constexpr char kDatasetMagic[4] = {'T', 'N', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

}  // namespace

void save_dataset(const std::string& path, const DatasetHeader& header,
                  std::span<const Sample> samples) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open dataset file for writing: " + path);
  os.write(kDatasetMagic, 4);
  write_pod(os, kDatasetVersion);
  write_pod(os, static_cast<std::int32_t>(header.k));
  write_pod(os, static_cast<std::uint8_t>(header.rate));
  write_pod(os, static_cast<std::uint8_t>(header.modulation));
  write_pod(os, static_cast<std::uint16_t>(0));
  write_pod(os, header.snr_db);
  write_pod(os, static_cast<std::int32_t>(header.target_iters));
  write_pod(os, header.seed);
  write_pod(os, static_cast<std::uint64_t>(samples.size()));
  for (const auto& s : samples) {
    os.write(reinterpret_cast<const char*>(s.info_bits.data()),
             static_cast<std::streamsize>(s.info_bits.size()));
    write_doubles(os, s.frame.ys);
    write_doubles(os, s.frame.y1p);
    write_doubles(os, s.frame.y2p);
    write_doubles(os, s.frame.tail1_sys);
    write_doubles(os, s.frame.tail1_par);
    write_doubles(os, s.frame.tail2_sys);
    write_doubles(os, s.frame.tail2_par);
    write_doubles(os, s.target_llrs);
  }
  if (!os) throw std::runtime_error("write error on dataset file: " + path);
}

std::pair<DatasetHeader, std::vector<Sample>> load_dataset(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open dataset file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kDatasetMagic, 4) != 0)
    throw std::runtime_error("not a dataset file: " + path);
  std::uint32_t version;
  read_pod(is, version);
  if (version != kDatasetVersion)
    throw std::runtime_error("dataset file: unsupported version " + std::to_string(version));
  DatasetHeader h;
  std::int32_t k, target_iters;
  std::uint8_t rate, mod;
  std::uint16_t pad;
  read_pod(is, k);
  read_pod(is, rate);
  read_pod(is, mod);
  read_pod(is, pad);
  read_pod(is, h.snr_db);
  read_pod(is, target_iters);
  read_pod(is, h.seed);
  std::uint64_t n;
  read_pod(is, n);
  h.k = k;
  h.rate = static_cast<CodeRate>(rate);
  h.modulation = static_cast<Modulation>(mod);
  h.target_iters = target_iters;
  h.n = n;
  std::vector<Sample> samples(n);
  for (auto& s : samples) {
    s.info_bits.resize(k);
    is.read(reinterpret_cast<char*>(s.info_bits.data()), k);
    s.frame.k = k;
    s.frame.ys.resize(k);
    s.frame.y1p.resize(k);
    s.frame.y2p.resize(k);
    s.target_llrs.resize(k);
    read_doubles(is, s.frame.ys);
    read_doubles(is, s.frame.y1p);
    read_doubles(is, s.frame.y2p);
    read_doubles(is, s.frame.tail1_sys);
    read_doubles(is, s.frame.tail1_par);
    read_doubles(is, s.frame.tail2_sys);
    read_doubles(is, s.frame.tail2_par);
    read_doubles(is, s.target_llrs);
    if (!is) throw std::runtime_error("dataset file truncated: " + path);
  }
  return {h, std::move(samples)};
}

Optimizer::Optimizer(const OptimizerConfig& cfg, std::size_t n_weights)
    : cfg_(cfg), m_(n_weights, 0.0), v_(n_weights, 0.0) {}

void Optimizer::step(std::span<double> weights, std::span<const double> gradients) {
  if (weights.size() != m_.size() || gradients.size() != m_.size())
    throw std::invalid_argument("optimizer step: shape mismatch");
  if (cfg_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < weights.size(); ++i)
      weights[i] -= cfg_.learning_rate * gradients[i];
    return;
  }
  ++step_count_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * gradients[i];
    v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * gradients[i] * gradients[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    weights[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
  }
}

namespace {

double validation_ber(std::span<const Sample> val, const WeightSet& ws,
                      const TrellisTable& trellis, const Interleaver& interleaver, int workers) {
  const int k = ws.k;
  const std::size_t n_chunks = (val.size() + 255) / 256;
  std::vector<std::uint64_t> chunk_errors(n_chunks, 0);
  parallel_chunks(val.size(), 256, workers,
                  [&](std::size_t c, std::size_t begin, std::size_t end) {
                    TurboNetDecoder dec(trellis, interleaver);
                    ForwardResult out;
                    std::uint64_t errs = 0;
                    for (std::size_t i = begin; i < end; ++i) {
                      dec.forward(val[i].frame, ws, out);
                      for (int j = 0; j < k; ++j) {
                        const std::uint8_t bit = out.posterior[j] >= 0.0 ? 1 : 0;
                        errs += bit != val[i].info_bits[j];
                      }
                    }
                    chunk_errors[c] = errs;
                  });
  const std::uint64_t total =
      std::accumulate(chunk_errors.begin(), chunk_errors.end(), std::uint64_t{0});
  return static_cast<double>(total) / (static_cast<double>(val.size()) * k);
}

}  // namespace

TrainResult train_early_stopping(std::span<const Sample> dataset, const TrainConfig& cfg,
                                 const CodeConfig& code, Modulation mod,
                                 const Interleaver& interleaver, const TrellisTable& trellis) {
  const std::size_t n = dataset.size();
  if (n == 0) throw std::invalid_argument("train_early_stopping: empty dataset");
  const double frac = cfg.split_train / (cfg.split_train + cfg.split_val);
  const std::size_t n_train = static_cast<std::size_t>(static_cast<double>(n) * frac);
  if (n_train == 0 || n_train == n)
    throw std::invalid_argument("train_early_stopping: split leaves an empty set");
  std::span<const Sample> train = dataset.subspan(0, n_train);
  std::span<const Sample> val = dataset.subspan(n_train);
  if (static_cast<int>(train.size()) < cfg.batch_size)
    throw std::invalid_argument("train_early_stopping: training set smaller than one batch");

  WeightSet ws = init_weights(code.k, cfg.units_m, cfg.variant);
  ws.rate = code.rate;
  ws.modulation = mod;
  ws.interleaver.kind = interleaver.kind();
  ws.interleaver.seed = interleaver.seed();
  TrainingProvenance prov;
  prov.train_snr_db = cfg.train_snr_db;
  prov.epochs = cfg.epochs_max;
  prov.batch = cfg.batch_size;
  prov.learning_rate = cfg.optimizer.learning_rate;
  prov.target_iters = cfg.target_iters;
  prov.master_seed = cfg.master_seed;
  if (cfg.optimizer.kind == OptimizerKind::sgd) {
    prov.optimizer = "sgd";
  } else {
    std::ostringstream opt;
    opt << "adam(beta1=" << cfg.optimizer.beta1 << ",beta2=" << cfg.optimizer.beta2
        << ",eps=" << cfg.optimizer.epsilon << ")";
    prov.optimizer = opt.str();
  }
  ws.training = prov;

  std::vector<double> weights = ws.pack_trainable();
  Optimizer opt(cfg.optimizer, weights.size());

  TrainResult result;
  result.best = ws;
  double best_ber = validation_ber(val, ws, trellis, interleaver, cfg.workers);
  result.val_ber_history.push_back(best_ber);
  double prev_ber = best_ber;
  result.best_epoch = 0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  constexpr std::size_t kGradChunk = 16;
  std::vector<WeightGrad> chunk_grads;
  std::vector<double> chunk_losses;

  for (int epoch = 1; epoch <= cfg.epochs_max; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.master_seed, 0x73687566666c65ULL, epoch));
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    double epoch_loss = 0.0;
    for (std::size_t base = 0; base < train.size(); base += cfg.batch_size) {
      const std::size_t batch_n = std::min<std::size_t>(cfg.batch_size, train.size() - base);
      const std::size_t n_chunks = (batch_n + kGradChunk - 1) / kGradChunk;
      chunk_grads.resize(n_chunks);
      chunk_losses.assign(n_chunks, 0.0);
      parallel_chunks(batch_n, kGradChunk, cfg.workers,
                      [&](std::size_t c, std::size_t begin, std::size_t end) {
                        WeightGrad& g = chunk_grads[c];
                        if (g.units.empty())
                          g = WeightGrad::zeros_like(ws);
                        else
                          g.zero();
                        TurboNetDecoder dec(trellis, interleaver);
                        ForwardResult out;
                        DecodeTape tape;
                        std::vector<double> seed_grad;
                        double loss_sum = 0.0;
                        for (std::size_t i = begin; i < end; ++i) {
                          const Sample& s = train[order[base + i]];
                          dec.forward(s.frame, ws, out, &tape);
                          loss_sum += loss_mse(out.posterior, s.target_llrs);
                          loss_mse_grad(out.posterior, s.target_llrs, seed_grad);
                          dec.backward(tape, ws, seed_grad, g);
                        }
                        chunk_losses[c] = loss_sum;
                      });
      WeightGrad& batch_grad = chunk_grads[0];
      for (std::size_t c = 1; c < n_chunks; ++c) batch_grad.add(chunk_grads[c]);
      batch_grad.scale(1.0 / static_cast<double>(batch_n));
      const std::vector<double> g = batch_grad.pack_trainable(ws.variant);
      opt.step(weights, g);
      ws.unpack_trainable(weights);
      for (double l : chunk_losses) epoch_loss += l;
    }
    result.train_loss_history.push_back(epoch_loss / static_cast<double>(train.size()));

    const double val_ber = validation_ber(val, ws, trellis, interleaver, cfg.workers);
    result.val_ber_history.push_back(val_ber);
    result.epochs_run = epoch;
    if (val_ber < best_ber) {
      best_ber = val_ber;
      result.best = ws;
      result.best_epoch = epoch;
    }
    if (val_ber > prev_ber) break;  // first increase stops training
    prev_ber = val_ber;
  }
  return result;
}

double nve(std::span<const double> ber_dnn, std::span<const double> ber_map) {
  if (ber_dnn.size() != ber_map.size() || ber_dnn.empty())
    throw std::invalid_argument("nve: lists must be equal-length and nonempty");
  double sum = 0.0;
  for (std::size_t i = 0; i < ber_dnn.size(); ++i) {
    if (ber_map[i] == 0.0) throw std::invalid_argument("nve: reference BER of 0 is undefined");
    sum += ber_dnn[i] / ber_map[i];
  }
  return sum / static_cast<double>(ber_dnn.size());
}

double heuristic_train_snr(double test_snr_db, double rate) {
  if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("heuristic_train_snr: bad rate");
  const double cap = 10.0 * std::log10(std::pow(2.0, 2.0 * rate) - 1.0);
  return std::min(test_snr_db, cap);
}

}  // namespace turbo
