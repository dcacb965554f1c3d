#include "turbo/siso.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace turbo {

double max_star(double x, double y, MaxStarMode mode) {
  const double m = x > y ? x : y;
  if (mode == MaxStarMode::max_only) return m;
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

std::array<double, kNumBranches> branch_metrics(double ys_k, double yp_k, double apriori,
                                                const TrellisTable& trellis) {
  // x, u in {0,1}; equals the antipodal half-LLR form up to a
  // branch-independent per-stage constant, which cancels in the
  // S1/S0 posterior difference
  std::array<double, kNumBranches> g;
  for (int u = 0; u < 2; ++u) {
    for (int sp = 0; sp < kNumStates; ++sp) {
      double sum = 0.0;
      if (u) {
        sum += apriori;
        sum += ys_k;
      }
      if (trellis.parity[u][sp]) sum += yp_k;
      g[TrellisTable::branch_index(u, sp)] = sum;
    }
  }
  return g;
}

namespace {

void stage_inputs(const ConstituentInput& in, std::span<const double> aprioris, int k, int t,
                  double& ys, double& yp, double& la) {
  if (t <= k) {
    ys = in.sys[t - 1];
    yp = in.par[t - 1];
    la = aprioris[t - 1];
  } else {
    ys = in.tail_sys[t - k - 1];
    yp = in.tail_par[t - k - 1];
    la = 0.0;  // tail stages carry no a-priori
  }
}

void normalize_stage(std::array<double, kNumStates>& v) {
  double m = v[0];
  for (int s = 1; s < kNumStates; ++s)
    if (v[s] > m) m = v[s];
  for (int s = 0; s < kNumStates; ++s) v[s] -= m;
}

}  // namespace

SisoState forward_backward(const ConstituentInput& in, std::span<const double> aprioris,
                           const TrellisTable& trellis, MaxStarMode mode, bool normalize) {
  const int k = static_cast<int>(in.sys.size());
  if (static_cast<int>(aprioris.size()) != k)
    throw std::invalid_argument("forward_backward: apriori length mismatch");
  const int stages = k + kTailSteps;

  SisoState st;
  st.k = k;
  st.alpha.assign(stages + 1, {});
  st.beta.assign(stages + 1, {});
  st.gamma.assign(stages, {});

  for (int t = 1; t <= stages; ++t) {
    double ys, yp, la;
    stage_inputs(in, aprioris, k, t, ys, yp, la);
    st.gamma[t - 1] = branch_metrics(ys, yp, la, trellis);
  }

  st.alpha[0][0] = 0.0;
  for (int s = 1; s < kNumStates; ++s) st.alpha[0][s] = kLogZero;
  for (int t = 1; t <= stages; ++t) {
    const auto& g = st.gamma[t - 1];
    const auto& prev = st.alpha[t - 1];
    auto& cur = st.alpha[t];
    for (int s = 0; s < kNumStates; ++s) {
      const int p0 = trellis.prev_state[0][s];
      const int p1 = trellis.prev_state[1][s];
      const double v0 = prev[p0] + g[TrellisTable::branch_index(0, p0)];
      const double v1 = prev[p1] + g[TrellisTable::branch_index(1, p1)];
      cur[s] = max_star(v0, v1, mode);
    }
    if (normalize) normalize_stage(cur);
  }

  st.beta[stages][0] = 0.0;
  for (int s = 1; s < kNumStates; ++s) st.beta[stages][s] = kLogZero;
  for (int t = stages; t >= 1; --t) {
    const auto& g = st.gamma[t - 1];
    const auto& next = st.beta[t];
    auto& cur = st.beta[t - 1];
    for (int sp = 0; sp < kNumStates; ++sp) {
      const double v0 = next[trellis.next_state[0][sp]] + g[TrellisTable::branch_index(0, sp)];
      const double v1 = next[trellis.next_state[1][sp]] + g[TrellisTable::branch_index(1, sp)];
      cur[sp] = max_star(v0, v1, mode);
    }
    if (normalize) normalize_stage(cur);
  }
  return st;
}

namespace {

void posteriors_from_state(const SisoState& st, const ConstituentInput& in,
                           std::span<const double> aprioris, const TrellisTable& trellis,
                           MaxStarMode mode, std::vector<double>& posterior,
                           std::vector<double>& extrinsic) {
  const int k = st.k;
  posterior.resize(k);
  extrinsic.resize(k);
  for (int t = 1; t <= k; ++t) {
    const auto& g = st.gamma[t - 1];
    const auto& a = st.alpha[t - 1];
    const auto& b = st.beta[t];
    double fold1 = 0.0, fold0 = 0.0;
    for (int sp = 0; sp < kNumStates; ++sp) {
      const double v1 = a[sp] + g[TrellisTable::branch_index(1, sp)] +
                        b[trellis.next_state[1][sp]];
      const double v0 = a[sp] + g[TrellisTable::branch_index(0, sp)] +
                        b[trellis.next_state[0][sp]];
      fold1 = sp == 0 ? v1 : max_star(fold1, v1, mode);
      fold0 = sp == 0 ? v0 : max_star(fold0, v0, mode);
    }
    posterior[t - 1] = fold1 - fold0;
    extrinsic[t - 1] = posterior[t - 1] - in.sys[t - 1] - aprioris[t - 1];
  }
}

}  // namespace

SisoResult siso_decode(const ConstituentInput& in, std::span<const double> aprioris,
                       const TrellisTable& trellis, MaxStarMode mode) {
  const SisoState st = forward_backward(in, aprioris, trellis, mode);
  SisoResult res;
  posteriors_from_state(st, in, aprioris, trellis, mode, res.posterior, res.extrinsic);
  return res;
}

TurboDecoder::TurboDecoder(const TrellisTable& trellis, const Interleaver& interleaver,
                           MaxStarMode mode, int iterations)
    : trellis_(trellis), interleaver_(interleaver), mode_(mode), iterations_(iterations) {
  if (iterations < 1) throw std::invalid_argument("turbo decoder needs at least one iteration");
}

void TurboDecoder::decode(const LlrFrame& frame, TurboDecodeResult& out) {
  const int k = frame.k;
  if (interleaver_.size() != k)
    throw std::invalid_argument("turbo decoder: frame length does not match interleaver");

  ys_perm_.resize(k);
  interleaver_.interleave_into(std::span<const double>(frame.ys), std::span<double>(ys_perm_));
  la_.assign(k, 0.0);
  la2_.resize(k);

  const ConstituentInput in1{frame.ys, frame.y1p, frame.tail1_sys, frame.tail1_par};
  const ConstituentInput in2{ys_perm_, frame.y2p, frame.tail2_sys, frame.tail2_par};

  for (int it = 0; it < iterations_; ++it) {
    state_ = forward_backward(in1, la_, trellis_, mode_);
    posteriors_from_state(state_, in1, la_, trellis_, mode_, post_, ext_);
    interleaver_.interleave_into(std::span<const double>(ext_), std::span<double>(la2_));

    state_ = forward_backward(in2, la2_, trellis_, mode_);
    posteriors_from_state(state_, in2, la2_, trellis_, mode_, post_, ext_);
    interleaver_.deinterleave_into(std::span<const double>(ext_), std::span<double>(la_));
  }

  out.posterior.resize(k);
  interleaver_.deinterleave_into(std::span<const double>(post_), std::span<double>(out.posterior));
  out.bits.resize(k);
  for (int i = 0; i < k; ++i) out.bits[i] = out.posterior[i] >= 0.0 ? 1 : 0;
}

TurboDecodeResult turbo_decode(const LlrFrame& frame, const Interleaver& interleaver,
                               const TrellisTable& trellis, int iterations, MaxStarMode mode) {
  TurboDecoder dec(trellis, interleaver, mode, iterations);
  TurboDecodeResult out;
  dec.decode(frame, out);
  return out;
}

std::vector<double> exhaustive_map_oracle(const ConstituentInput& in,
                                          std::span<const double> aprioris,
                                          const TrellisTable& trellis) {
  const int k = static_cast<int>(in.sys.size());
  if (k > 12) throw std::invalid_argument("exhaustive_map_oracle: k > 12 refused");
  if (static_cast<int>(aprioris.size()) != k)
    throw std::invalid_argument("exhaustive_map_oracle: apriori length mismatch");

  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> lse1(k, neg_inf), lse0(k, neg_inf);
  auto lse_add = [](double acc, double v) {
    if (acc == -std::numeric_limits<double>::infinity()) return v;
    const double m = acc > v ? acc : v;
    return m + std::log1p(std::exp(-std::abs(acc - v)));
  };

  for (std::uint32_t word = 0; word < (1u << k); ++word) {
    double metric = 0.0;
    int state = 0;
    for (int j = 0; j < k; ++j) {
      const int u = (word >> j) & 1;
      const int p = trellis.parity[u][state];
      metric += u * (in.sys[j] + aprioris[j]) + p * in.par[j];
      state = trellis.next_state[u][state];
    }
    for (int t = 0; t < kTailSteps; ++t) {
      const int d2 = (state >> 1) & 1;
      const int d3 = state & 1;
      const int u = d2 ^ d3;  // terminating input
      const int p = trellis.parity[u][state];
      metric += u * in.tail_sys[t] + p * in.tail_par[t];
      state = trellis.next_state[u][state];
    }
    for (int j = 0; j < k; ++j) {
      if ((word >> j) & 1)
        lse1[j] = lse_add(lse1[j], metric);
      else
        lse0[j] = lse_add(lse0[j], metric);
    }
  }

  std::vector<double> llr(k);
  for (int j = 0; j < k; ++j) llr[j] = lse1[j] - lse0[j];
  return llr;
}

}  // namespace turbo
