#include "turbo/turbonet.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace turbo {

const char* to_string(WeightVariant v) {
  switch (v) {
    case WeightVariant::gw_only: return "gw_only";
    case WeightVariant::elw_only: return "elw_only";
    case WeightVariant::gw_elw: return "gw_elw";
    case WeightVariant::full: return "full";
  }
  return "?";
}

WeightVariant variant_from_string(const std::string& s) {
  if (s == "gw_only") return WeightVariant::gw_only;
  if (s == "elw_only") return WeightVariant::elw_only;
  if (s == "gw_elw") return WeightVariant::gw_elw;
  if (s == "full") return WeightVariant::full;
  throw std::invalid_argument("unknown weight variant '" + s + "'");
}

bool gw_slot_present(int branch, int slot) {
  const int u = TrellisTable::branch_input(branch);
  const int sp = TrellisTable::branch_from(branch);
  if (slot == 0 || slot == 1) return u == 1;
  return lte_trellis().parity[u][sp] == 1;
}

void SubnetWeights::init(int k, double value) {
  gw.assign(k, {});
  plw.assign(k, {});
  elw.assign(k, {});
  for (int t = 0; t < k; ++t) {
    for (auto& branch : gw[t])
      branch.fill(value);
    for (auto& fam : plw[t]) fam.fill(value);
    elw[t].fill(value);
  }
}

namespace {

// Enumeration order shared by packing, gradients and the weight file:
// gw (stage, branch, present slot), plw (stage, family, index),
// elw (stage, slot).
template <typename SW, typename Fn>
void visit_subnet(SW& sw, WeightVariant v, Fn&& fn) {
  const int k = static_cast<int>(sw.elw.size());
  if (variant_has_gw(v)) {
    for (int t = 0; t < k; ++t)
      for (int b = 0; b < kNumBranches; ++b)
        for (int slot = 0; slot < 3; ++slot)
          if (gw_slot_present(b, slot)) fn(sw.gw[t][b][slot]);
  }
  if (variant_has_plw(v)) {
    for (int t = 0; t < k; ++t)
      for (int f = 0; f < 6; ++f)
        for (int i = 0; i < kNumStates; ++i) fn(sw.plw[t][f][i]);
  }
  if (variant_has_elw(v)) {
    for (int t = 0; t < k; ++t)
      for (int slot = 0; slot < 3; ++slot) fn(sw.elw[t][slot]);
  }
}

template <typename Units, typename Fn>
void visit_units(Units& units, WeightVariant v, Fn&& fn) {
  for (auto& u : units) {
    visit_subnet(u.sn1, v, fn);
    visit_subnet(u.sn2, v, fn);
  }
}

}  // namespace

std::size_t WeightSet::trainable_count() const {
  std::size_t n = 0;
  visit_units(units, variant, [&](const double&) { ++n; });
  return n;
}

std::vector<double> WeightSet::pack_trainable() const {
  std::vector<double> out;
  out.reserve(trainable_count());
  visit_units(units, variant, [&](const double& w) { out.push_back(w); });
  return out;
}

void WeightSet::unpack_trainable(std::span<const double> values) {
  std::size_t i = 0;
  visit_units(units, variant, [&](double& w) {
    if (i >= values.size()) throw std::invalid_argument("unpack_trainable: too few values");
    w = values[i++];
  });
  if (i != values.size()) throw std::invalid_argument("unpack_trainable: too many values");
}

WeightSet init_weights(int k, int units_m, WeightVariant variant) {
  if (k < 1 || units_m < 1) throw std::invalid_argument("init_weights: k and M must be >= 1");
  WeightSet ws;
  ws.k = k;
  ws.units_m = units_m;
  ws.variant = variant;
  ws.units.resize(units_m);
  for (auto& u : ws.units) {
    u.sn1.init(k, 1.0);
    u.sn2.init(k, 1.0);
  }
  return ws;
}

WeightGrad WeightGrad::zeros_like(const WeightSet& ws) {
  WeightGrad g;
  g.units.resize(ws.units.size());
  for (auto& u : g.units) {
    u.sn1.init(ws.k, 0.0);
    u.sn2.init(ws.k, 0.0);
  }
  return g;
}

void WeightGrad::zero() {
  for (auto& u : units) {
    const int k = static_cast<int>(u.sn1.elw.size());
    u.sn1.init(k, 0.0);
    u.sn2.init(k, 0.0);
  }
}

void WeightGrad::add(const WeightGrad& other) {
  for (std::size_t m = 0; m < units.size(); ++m) {
    for (int sn = 0; sn < 2; ++sn) {
      auto& dst = sn == 0 ? units[m].sn1 : units[m].sn2;
      const auto& src = sn == 0 ? other.units[m].sn1 : other.units[m].sn2;
      for (std::size_t t = 0; t < dst.gw.size(); ++t) {
        for (int b = 0; b < kNumBranches; ++b)
          for (int s = 0; s < 3; ++s) dst.gw[t][b][s] += src.gw[t][b][s];
        for (int f = 0; f < 6; ++f)
          for (int i = 0; i < kNumStates; ++i) dst.plw[t][f][i] += src.plw[t][f][i];
        for (int s = 0; s < 3; ++s) dst.elw[t][s] += src.elw[t][s];
      }
    }
  }
}

void WeightGrad::scale(double factor) {
  for (auto& u : units)
    for (int sn = 0; sn < 2; ++sn) {
      auto& sw = sn == 0 ? u.sn1 : u.sn2;
      for (std::size_t t = 0; t < sw.gw.size(); ++t) {
        for (auto& branch : sw.gw[t])
          for (auto& w : branch) w *= factor;
        for (auto& fam : sw.plw[t])
          for (auto& w : fam) w *= factor;
        for (auto& w : sw.elw[t]) w *= factor;
      }
    }
}

std::vector<double> WeightGrad::pack_trainable(WeightVariant variant) const {
  std::vector<double> out;
  visit_units(units, variant, [&](const double& w) { out.push_back(w); });
  return out;
}

bool DecodeTape::selections_equal(const DecodeTape& other) const {
  if (units.size() != other.units.size()) return false;
  for (std::size_t m = 0; m < units.size(); ++m)
    for (int sn = 0; sn < 2; ++sn) {
      const auto& a = sn == 0 ? units[m].sn1 : units[m].sn2;
      const auto& b = sn == 0 ? other.units[m].sn1 : other.units[m].sn2;
      if (a.alpha_sel != b.alpha_sel || a.beta_sel != b.beta_sel ||
          a.alpha_norm_arg != b.alpha_norm_arg || a.beta_norm_arg != b.beta_norm_arg ||
          a.sel_s1 != b.sel_s1 || a.sel_s0 != b.sel_s0)
        return false;
    }
  return true;
}

double DecodeTape::min_selection_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& u : units) {
    m = std::min(m, u.sn1.min_margin);
    m = std::min(m, u.sn2.min_margin);
  }
  return m;
}

struct TurboNetDecoder::SubnetIo {
  std::span<const double> sys, par, la;
  const std::array<double, 3>* tail_sys;
  const std::array<double, 3>* tail_par;
};

TurboNetDecoder::TurboNetDecoder(const TrellisTable& trellis, const Interleaver& interleaver)
    : trellis_(trellis), interleaver_(interleaver) {}

void TurboNetDecoder::run_subnet(const SubnetIo& io, const SubnetWeights& w, SubnetTape* tape) {
  const int k = static_cast<int>(io.sys.size());
  const int stages = k + kTailSteps;
  SubnetTape& t = *tape;

  t.la.assign(io.la.begin(), io.la.end());
  t.sys.assign(io.sys.begin(), io.sys.end());
  t.par.assign(io.par.begin(), io.par.end());
  t.tail_sys = *io.tail_sys;
  t.tail_par = *io.tail_par;
  t.gamma.resize(stages);
  t.alpha.resize(stages + 1);
  t.beta.resize(stages + 1);
  t.alpha_sel.resize(stages);
  t.beta_sel.resize(stages);
  t.alpha_norm_arg.resize(stages);
  t.beta_norm_arg.resize(stages);
  t.sel_s1.resize(k);
  t.sel_s0.resize(k);
  t.posterior.resize(k);
  t.extrinsic.resize(k);
  double min_margin = std::numeric_limits<double>::infinity();

  // hidden layer 1: weighted branch metrics for the info stages
  for (int st = 1; st <= k; ++st) {
    const double la = io.la[st - 1];
    const double ys = io.sys[st - 1];
    const double yp = io.par[st - 1];
    const auto& gw = w.gw[st - 1];
    auto& g = t.gamma[st - 1];
    for (int u = 0; u < 2; ++u)
      for (int sp = 0; sp < kNumStates; ++sp) {
        const int b = TrellisTable::branch_index(u, sp);
        double sum = 0.0;
        if (u) {
          sum += gw[b][0] * la;
          sum += gw[b][1] * ys;
        }
        if (trellis_.parity[u][sp]) sum += gw[b][2] * yp;
        g[b] = sum;
      }
  }
  // tail stages carry no weights and no a-priori
  for (int st = k + 1; st <= stages; ++st)
    t.gamma[st - 1] =
        branch_metrics((*io.tail_sys)[st - k - 1], (*io.tail_par)[st - k - 1], 0.0, trellis_);

  auto normalize_rec = [&](std::array<double, kNumStates>& v, std::uint8_t& arg) {
    int a = 0;
    for (int s = 1; s < kNumStates; ++s)
      if (v[s] > v[a]) a = s;
    arg = static_cast<std::uint8_t>(a);
    const double m = v[a];
    double second = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < kNumStates; ++s)
      if (s != a && v[s] > second) second = v[s];
    min_margin = std::min(min_margin, m - second);
    for (int s = 0; s < kNumStates; ++s) v[s] -= m;
  };

  t.alpha[0][0] = 0.0;
  for (int s = 1; s < kNumStates; ++s) t.alpha[0][s] = kLogZero;
  for (int st = 1; st <= stages; ++st) {
    const auto& g = t.gamma[st - 1];
    const auto& prev = t.alpha[st - 1];
    auto& cur = t.alpha[st];
    for (int s = 0; s < kNumStates; ++s) {
      const int p0 = trellis_.prev_state[0][s];
      const int p1 = trellis_.prev_state[1][s];
      const double v0 = prev[p0] + g[TrellisTable::branch_index(0, p0)];
      const double v1 = prev[p1] + g[TrellisTable::branch_index(1, p1)];
      const int sel = v1 > v0 ? 1 : 0;
      t.alpha_sel[st - 1][s] = static_cast<std::uint8_t>(sel);
      cur[s] = sel ? v1 : v0;
      min_margin = std::min(min_margin, std::abs(v1 - v0));
    }
    normalize_rec(cur, t.alpha_norm_arg[st - 1]);
  }

  t.beta[stages][0] = 0.0;
  for (int s = 1; s < kNumStates; ++s) t.beta[stages][s] = kLogZero;
  for (int st = stages; st >= 1; --st) {
    const auto& g = t.gamma[st - 1];
    const auto& next = t.beta[st];
    auto& cur = t.beta[st - 1];
    for (int sp = 0; sp < kNumStates; ++sp) {
      const double v0 = next[trellis_.next_state[0][sp]] + g[TrellisTable::branch_index(0, sp)];
      const double v1 = next[trellis_.next_state[1][sp]] + g[TrellisTable::branch_index(1, sp)];
      const int sel = v1 > v0 ? 1 : 0;
      t.beta_sel[st - 1][sp] = static_cast<std::uint8_t>(sel);
      cur[sp] = sel ? v1 : v0;
      min_margin = std::min(min_margin, std::abs(v1 - v0));
    }
    normalize_rec(cur, t.beta_norm_arg[st - 1]);
  }

  // hidden layer K+1 (weighted max-diff) and output layer (weighted extrinsic)
  for (int st = 1; st <= k; ++st) {
    const auto& g = t.gamma[st - 1];
    const auto& a = t.alpha[st - 1];
    const auto& bt = t.beta[st];
    const auto& plw = w.plw[st - 1];
    double best1 = 0.0, best0 = 0.0, second1 = 0.0, second0 = 0.0;
    int arg1 = 0, arg0 = 0;
    for (int sp = 0; sp < kNumStates; ++sp) {
      const int s1 = trellis_.next_state[1][sp];
      const int s0 = trellis_.next_state[0][sp];
      const double v1 = plw[0][sp] * a[sp] + plw[1][sp] * g[TrellisTable::branch_index(1, sp)] +
                        plw[2][s1] * bt[s1];
      const double v0 = plw[3][sp] * a[sp] + plw[4][sp] * g[TrellisTable::branch_index(0, sp)] +
                        plw[5][s0] * bt[s0];
      if (sp == 0) {
        best1 = v1;
        best0 = v0;
        second1 = second0 = -std::numeric_limits<double>::infinity();
      } else {
        if (v1 > best1) {
          second1 = best1;
          best1 = v1;
          arg1 = sp;
        } else if (v1 > second1) {
          second1 = v1;
        }
        if (v0 > best0) {
          second0 = best0;
          best0 = v0;
          arg0 = sp;
        } else if (v0 > second0) {
          second0 = v0;
        }
      }
    }
    min_margin = std::min(min_margin, std::min(best1 - second1, best0 - second0));
    t.sel_s1[st - 1] = static_cast<std::uint8_t>(arg1);
    t.sel_s0[st - 1] = static_cast<std::uint8_t>(arg0);
    t.posterior[st - 1] = best1 - best0;

    const auto& elw = w.elw[st - 1];
    t.extrinsic[st - 1] =
        elw[0] * t.posterior[st - 1] - elw[1] * io.sys[st - 1] - elw[2] * io.la[st - 1];
  }
  t.min_margin = min_margin;
}

void TurboNetDecoder::forward(const LlrFrame& frame, const WeightSet& weights, ForwardResult& out,
                              DecodeTape* tape) {
  const int k = frame.k;
  if (weights.k != k)
    throw std::invalid_argument("turbonet forward: weight set is for k=" +
                                std::to_string(weights.k) + ", frame has k=" + std::to_string(k));
  if (interleaver_.size() != k)
    throw std::invalid_argument("turbonet forward: interleaver length mismatch");
  const int m_units = weights.units_m;

  if (tape) {
    tape->k = k;
    tape->units.resize(m_units);
  }

  ys_perm_.resize(k);
  interleaver_.interleave_into(std::span<const double>(frame.ys), std::span<double>(ys_perm_));
  la_.assign(k, 0.0);
  la2_.resize(k);

  for (int m = 0; m < m_units; ++m) {
    SubnetTape& t1 = tape ? tape->units[m].sn1 : scratch_tape_;
    run_subnet(SubnetIo{frame.ys, frame.y1p, la_, &frame.tail1_sys, &frame.tail1_par},
               weights.units[m].sn1, &t1);
    interleaver_.interleave_into(std::span<const double>(t1.extrinsic), std::span<double>(la2_));

    SubnetTape& t2 = tape ? tape->units[m].sn2 : scratch_tape_;
    run_subnet(SubnetIo{ys_perm_, frame.y2p, la2_, &frame.tail2_sys, &frame.tail2_par},
               weights.units[m].sn2, &t2);

    if (m + 1 < m_units) {
      interleaver_.deinterleave_into(std::span<const double>(t2.extrinsic), std::span<double>(la_));
    } else {
      out.posterior.resize(k);
      interleaver_.deinterleave_into(std::span<const double>(t2.posterior),
                                     std::span<double>(out.posterior));
    }
  }

  out.prob.resize(k);
  for (int i = 0; i < k; ++i) out.prob[i] = 1.0 / (1.0 + std::exp(-out.posterior[i]));
  if (tape) tape->output = out.posterior;
}

void TurboNetDecoder::backward_subnet(const SubnetTape& t, const SubnetWeights& w,
                                      std::span<const double> posterior_adj_in,
                                      std::span<const double> extrinsic_adj, SubnetWeights& grad,
                                      std::vector<double>& la_adj) {
  const int k = static_cast<int>(t.posterior.size());
  const int stages = k + kTailSteps;

  alpha_adj_.assign(stages + 1, {});
  beta_adj_.assign(stages + 1, {});
  gamma_adj_.assign(stages, {});
  la_adj.assign(k, 0.0);
  post_adj_.assign(k, 0.0);
  if (!posterior_adj_in.empty())
    for (int i = 0; i < k; ++i) post_adj_[i] = posterior_adj_in[i];

  // output layer
  if (!extrinsic_adj.empty()) {
    for (int i = 0; i < k; ++i) {
      const double g = extrinsic_adj[i];
      if (g == 0.0) continue;
      grad.elw[i][0] += g * t.posterior[i];
      grad.elw[i][1] -= g * t.sys[i];
      grad.elw[i][2] -= g * t.la[i];
      post_adj_[i] += g * w.elw[i][0];
      la_adj[i] -= g * w.elw[i][2];
    }
  }

  // hidden layer K+1: gradient follows the recorded argmax branch
  for (int st = 1; st <= k; ++st) {
    const double g = post_adj_[st - 1];
    if (g == 0.0) continue;
    const auto& gm = t.gamma[st - 1];
    const auto& a = t.alpha[st - 1];
    const auto& bt = t.beta[st];
    const auto& plw = w.plw[st - 1];

    const int j1 = t.sel_s1[st - 1];
    const int b1 = TrellisTable::branch_index(1, j1);
    const int s1 = trellis_.next_state[1][j1];
    grad.plw[st - 1][0][j1] += g * a[j1];
    grad.plw[st - 1][1][j1] += g * gm[b1];
    grad.plw[st - 1][2][s1] += g * bt[s1];
    alpha_adj_[st - 1][j1] += g * plw[0][j1];
    gamma_adj_[st - 1][b1] += g * plw[1][j1];
    beta_adj_[st][s1] += g * plw[2][s1];

    const int j0 = t.sel_s0[st - 1];
    const int b0 = TrellisTable::branch_index(0, j0);
    const int s0 = trellis_.next_state[0][j0];
    grad.plw[st - 1][3][j0] -= g * a[j0];
    grad.plw[st - 1][4][j0] -= g * gm[b0];
    grad.plw[st - 1][5][s0] -= g * bt[s0];
    alpha_adj_[st - 1][j0] -= g * plw[3][j0];
    gamma_adj_[st - 1][b0] -= g * plw[4][j0];
    beta_adj_[st][s0] -= g * plw[5][s0];
  }

  // forward recursion chain, walked backwards; alpha_t for t >= k is
  // never consumed by the outputs, so adjoints start at t = k-1
  for (int st = k - 1; st >= 1; --st) {
    auto& adj = alpha_adj_[st];
    double total = 0.0;
    bool any = false;
    for (int s = 0; s < kNumStates; ++s) {
      total += adj[s];
      any = any || adj[s] != 0.0;
    }
    if (!any) continue;
    adj[t.alpha_norm_arg[st - 1]] -= total;
    for (int s = 0; s < kNumStates; ++s) {
      const double g = adj[s];
      if (g == 0.0) continue;
      const int u = t.alpha_sel[st - 1][s];
      const int sp = trellis_.prev_state[u][s];
      alpha_adj_[st - 1][sp] += g;
      gamma_adj_[st - 1][TrellisTable::branch_index(u, sp)] += g;
    }
  }

  // backward recursion chain, walked forwards; beta_t feeds beta_{t-1},
  // so adjoints propagate upward until stage k
  for (int st = 1; st <= k - 1; ++st) {
    auto& adj = beta_adj_[st];
    double total = 0.0;
    bool any = false;
    for (int s = 0; s < kNumStates; ++s) {
      total += adj[s];
      any = any || adj[s] != 0.0;
    }
    if (!any) continue;
    adj[t.beta_norm_arg[st]] -= total;
    for (int sp = 0; sp < kNumStates; ++sp) {
      const double g = adj[sp];
      if (g == 0.0) continue;
      const int u = t.beta_sel[st][sp];
      beta_adj_[st + 1][trellis_.next_state[u][sp]] += g;
      gamma_adj_[st][TrellisTable::branch_index(u, sp)] += g;
    }
  }

  // hidden layer 1
  for (int st = 1; st <= k; ++st) {
    const auto& gw = w.gw[st - 1];
    for (int b = 0; b < kNumBranches; ++b) {
      const double g = gamma_adj_[st - 1][b];
      if (g == 0.0) continue;
      const int u = TrellisTable::branch_input(b);
      const int sp = TrellisTable::branch_from(b);
      if (u) {
        grad.gw[st - 1][b][0] += g * t.la[st - 1];
        grad.gw[st - 1][b][1] += g * t.sys[st - 1];
        la_adj[st - 1] += g * gw[b][0];
      }
      if (trellis_.parity[u][sp]) grad.gw[st - 1][b][2] += g * t.par[st - 1];
    }
  }
}

void TurboNetDecoder::backward(const DecodeTape& tape, const WeightSet& weights,
                               std::span<const double> output_grad, WeightGrad& grad) {
  const int k = tape.k;
  if (static_cast<int>(output_grad.size()) != k)
    throw std::invalid_argument("turbonet backward: output gradient length mismatch");
  if (tape.units.size() != weights.units.size())
    throw std::invalid_argument("turbonet backward: tape/weights unit count mismatch");
  const int m_units = static_cast<int>(tape.units.size());
  const auto& pi = interleaver_.pi();
  const auto& pi_inv = interleaver_.pi_inv();

  // adjoint of the final deinterleave: output[i] = posterior2[pi_inv[i]]
  std::vector<double>& post2_adj = buf_;
  post2_adj.assign(k, 0.0);
  for (int i = 0; i < k; ++i) post2_adj[pi_inv[i]] += output_grad[i];

  std::vector<double> ext2_adj(k, 0.0), ext1_adj(k, 0.0), la_adj(k, 0.0);
  bool have_post2 = true;

  for (int m = m_units - 1; m >= 0; --m) {
    backward_subnet(tape.units[m].sn2, weights.units[m].sn2,
                    have_post2 ? std::span<const double>(post2_adj) : std::span<const double>(),
                    ext2_adj, grad.units[m].sn2, la_adj);
    have_post2 = false;
    // la2 = interleave(extrinsic1): la2[i] = ext1[pi[i]]
    std::fill(ext1_adj.begin(), ext1_adj.end(), 0.0);
    for (int i = 0; i < k; ++i) ext1_adj[pi[i]] += la_adj[i];

    backward_subnet(tape.units[m].sn1, weights.units[m].sn1, {}, ext1_adj, grad.units[m].sn1,
                    la_adj);
    if (m > 0) {
      // la1 = deinterleave(extrinsic2 of unit m-1): la1[i] = ext2[pi_inv[i]]
      std::fill(ext2_adj.begin(), ext2_adj.end(), 0.0);
      for (int i = 0; i < k; ++i) ext2_adj[pi_inv[i]] += la_adj[i];
    }
  }
}

double loss_mse(std::span<const double> predicted, std::span<const double> target) {
  if (predicted.size() != target.size())
    throw std::invalid_argument("loss_mse: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predicted.size());
}

void loss_mse_grad(std::span<const double> predicted, std::span<const double> target,
                   std::vector<double>& grad) {
  if (predicted.size() != target.size())
    throw std::invalid_argument("loss_mse_grad: length mismatch");
  const double scale = 2.0 / static_cast<double>(predicted.size());
  grad.resize(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i)
    grad[i] = scale * (predicted[i] - target[i]);
}

std::vector<std::uint8_t> decide(std::span<const double> probs) {
  std::vector<std::uint8_t> bits(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) bits[i] = probs[i] >= 0.5 ? 1 : 0;
  return bits;
}

}  // namespace turbo
