#include <doctest.h>

#include <cmath>
#include <vector>

#include "turbo/encoder.hpp"
#include "turbo/rng.hpp"
#include "turbo/siso.hpp"

using namespace turbo;

namespace {

struct RandomView {
  std::vector<double> ys, yp, la;
  std::array<double, 3> tail_sys, tail_par;

  ConstituentInput input() const { return {ys, yp, tail_sys, tail_par}; }
};

RandomView random_view(int k, Rng& rng, double scale = 2.0, bool with_apriori = true) {
  RandomView v;
  v.ys.resize(k);
  v.yp.resize(k);
  v.la.assign(k, 0.0);
  for (auto& x : v.ys) x = scale * rng.gaussian();
  for (auto& x : v.yp) x = scale * rng.gaussian();
  if (with_apriori)
    for (auto& x : v.la) x = scale * rng.gaussian();
  for (auto& x : v.tail_sys) x = scale * rng.gaussian();
  for (auto& x : v.tail_par) x = scale * rng.gaussian();
  return v;
}

// reference BCJR straight from the log-domain equations, no
// normalization; used to check normalization invariance and metric
// shift cancellation
std::vector<double> naive_posteriors(const RandomView& v, const TrellisTable& tr,
                                     MaxStarMode mode, int shift_stage = -1,
                                     double shift = 0.0) {
  const int k = static_cast<int>(v.ys.size());
  const int stages = k + 3;
  std::vector<std::array<double, 16>> gamma(stages);
  for (int t = 1; t <= stages; ++t) {
    if (t <= k)
      gamma[t - 1] = branch_metrics(v.ys[t - 1], v.yp[t - 1], v.la[t - 1], tr);
    else
      gamma[t - 1] = branch_metrics(v.tail_sys[t - k - 1], v.tail_par[t - k - 1], 0.0, tr);
    if (t - 1 == shift_stage)
      for (auto& g : gamma[t - 1]) g += shift;
  }
  std::vector<std::array<double, 8>> alpha(stages + 1), beta(stages + 1);
  alpha[0] = {0, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero};
  for (int t = 1; t <= stages; ++t)
    for (int s = 0; s < 8; ++s) {
      const int p0 = tr.prev_state[0][s];
      const int p1 = tr.prev_state[1][s];
      alpha[t][s] = max_star(alpha[t - 1][p0] + gamma[t - 1][p0],
                             alpha[t - 1][p1] + gamma[t - 1][8 + p1], mode);
    }
  beta[stages] = {0, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero, kLogZero};
  for (int t = stages; t >= 1; --t)
    for (int sp = 0; sp < 8; ++sp)
      beta[t - 1][sp] = max_star(beta[t][tr.next_state[0][sp]] + gamma[t - 1][sp],
                                 beta[t][tr.next_state[1][sp]] + gamma[t - 1][8 + sp], mode);
  std::vector<double> post(k);
  for (int t = 1; t <= k; ++t) {
    double f1 = 0.0, f0 = 0.0;
    for (int sp = 0; sp < 8; ++sp) {
      const double v1 = alpha[t - 1][sp] + gamma[t - 1][8 + sp] + beta[t][tr.next_state[1][sp]];
      const double v0 = alpha[t - 1][sp] + gamma[t - 1][sp] + beta[t][tr.next_state[0][sp]];
      f1 = sp == 0 ? v1 : max_star(f1, v1, mode);
      f0 = sp == 0 ? v0 : max_star(f0, v0, mode);
    }
    post[t - 1] = f1 - f0;
  }
  return post;
}

}  // namespace

TEST_CASE("max_star") {
  CHECK(max_star(3.0, 1.0, MaxStarMode::max_only) == 3.0);
  CHECK(max_star(0.0, 0.0, MaxStarMode::exact) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  for (double x : {0.0, 1.0, 7.5}) {
    const double corr = max_star(x, kLogZero, MaxStarMode::exact) - x;
    CHECK(corr >= 0.0);
    CHECK(corr < 1e-55);
  }
  CHECK(max_star(-2.0, 5.0, MaxStarMode::exact) ==
        doctest::Approx(5.0 + std::log1p(std::exp(-7.0))));
}

TEST_CASE("branch metric structure") {
  const TrellisTable tr = build_trellis();
  const double ys = 0.8, yp = -1.3, la = 0.4;
  const auto g = branch_metrics(ys, yp, la, tr);
  // (s'=0, u=0): no systematic, no parity -> constant 0
  CHECK(g[0] == 0.0);
  // (s'=2, u=0): parity only
  CHECK(g[2] == yp);
  // (s'=2, u=1): a-priori + systematic, no parity
  CHECK(g[8 + 2] == la + ys);
  // (s'=0, u=1): all three terms
  CHECK(g[8 + 0] == doctest::Approx(la + ys + yp).epsilon(1e-15));
}

TEST_CASE("alpha settles to symmetry on an all-zero frame") {
  const TrellisTable tr = build_trellis();
  RandomView v;
  v.ys.assign(8, 0.0);
  v.yp.assign(8, 0.0);
  v.la.assign(8, 0.0);
  v.tail_sys = {0, 0, 0};
  v.tail_par = {0, 0, 0};
  const SisoState st =
      forward_backward(v.input(), v.la, tr, MaxStarMode::max_only);
  for (int t = 3; t <= 8; ++t)
    for (int s = 0; s < 8; ++s) CHECK(st.alpha[t][s] == 0.0);
  CHECK(st.alpha[0][0] == 0.0);
  CHECK(st.alpha[0][1] == kLogZero);
}

TEST_CASE("normalization does not change posteriors") {
  const TrellisTable tr = build_trellis();
  Rng rng(17);
  for (auto mode : {MaxStarMode::exact, MaxStarMode::max_only}) {
    const RandomView v = random_view(24, rng);
    const SisoResult res = siso_decode(v.input(), v.la, tr, mode);
    const auto naive = naive_posteriors(v, tr, mode);
    REQUIRE(naive.size() == res.posterior.size());
    for (std::size_t i = 0; i < naive.size(); ++i)
      CHECK(res.posterior[i] == doctest::Approx(naive[i]).epsilon(1e-9));
  }
}

TEST_CASE("adding a constant to one stage's metrics cancels") {
  const TrellisTable tr = build_trellis();
  Rng rng(29);
  const RandomView v = random_view(16, rng);
  for (auto mode : {MaxStarMode::exact, MaxStarMode::max_only}) {
    const auto base = naive_posteriors(v, tr, mode);
    const auto shifted = naive_posteriors(v, tr, mode, 7, 3.25);
    for (std::size_t i = 0; i < base.size(); ++i)
      CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-9));
  }
}

TEST_CASE("exact-mode posteriors match the exhaustive oracle") {
  const TrellisTable tr = build_trellis();
  Rng rng(41);
  for (int k : {4, 6, 8}) {
    for (int trial = 0; trial < 25; ++trial) {
      const RandomView v = random_view(k, rng);
      const SisoResult res = siso_decode(v.input(), v.la, tr, MaxStarMode::exact);
      const auto oracle = exhaustive_map_oracle(v.input(), v.la, tr);
      for (int i = 0; i < k; ++i)
        CHECK(res.posterior[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("max-only mode deviates from the oracle (approximation gap)") {
  const TrellisTable tr = build_trellis();
  Rng rng(43);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const RandomView v = random_view(6, rng);
    const SisoResult res = siso_decode(v.input(), v.la, tr, MaxStarMode::max_only);
    const auto oracle = exhaustive_map_oracle(v.input(), v.la, tr);
    for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(res.posterior[i] - oracle[i]));
  }
  CHECK(worst > 1e-3);
}

TEST_CASE("oracle closed form for k=1") {
  const TrellisTable tr = build_trellis();
  RandomView v;
  v.ys = {0.7};
  v.yp = {-0.2};
  v.la = {0.3};
  v.tail_sys = {0.11, -0.4, 0.9};
  v.tail_par = {0.5, 1.3, -0.6};
  // u=0 path stays in state 0, metric 0. u=1 path: branch parity 1, then
  // tail inputs (0,1,1) with parities (1,0,1) from states 4 -> 2 -> 1 -> 0.
  const double m1 = (v.ys[0] + v.la[0]) + v.yp[0] + v.tail_par[0] + v.tail_sys[1] +
                    (v.tail_sys[2] + v.tail_par[2]);
  const auto oracle = exhaustive_map_oracle(v.input(), v.la, tr);
  CHECK(oracle[0] == doctest::Approx(m1).epsilon(1e-12));
}

TEST_CASE("oracle is zero on all-zero input and refuses large k") {
  const TrellisTable tr = build_trellis();
  RandomView v;
  v.ys.assign(6, 0.0);
  v.yp.assign(6, 0.0);
  v.la.assign(6, 0.0);
  v.tail_sys = {0, 0, 0};
  v.tail_par = {0, 0, 0};
  const auto oracle = exhaustive_map_oracle(v.input(), v.la, tr);
  for (double l : oracle) CHECK(l == doctest::Approx(0.0).epsilon(1e-12));

  RandomView big;
  big.ys.assign(13, 0.0);
  big.yp.assign(13, 0.0);
  big.la.assign(13, 0.0);
  CHECK_THROWS_AS(exhaustive_map_oracle(big.input(), big.la, tr), std::invalid_argument);
}

TEST_CASE("zero channel and zero a-priori give zero max-only posteriors") {
  const TrellisTable tr = build_trellis();
  const Interleaver il = Interleaver::qpp(40);
  LlrFrame f;
  f.k = 40;
  f.ys.assign(40, 0.0);
  f.y1p.assign(40, 0.0);
  f.y2p.assign(40, 0.0);
  const auto res = turbo_decode(f, il, tr, 2, MaxStarMode::max_only);
  for (double p : res.posterior) CHECK(p == 0.0);
  // posterior exactly 0 decides bit 1
  for (auto b : res.bits) CHECK(b == 1);
}

TEST_CASE("noiseless round trip for both rates and modes") {
  const TrellisTable tr = build_trellis();
  const Interleaver il = Interleaver::qpp(40);
  Rng rng(53);
  for (auto rate : {CodeRate::one_third, CodeRate::one_half}) {
    const CodeConfig cfg{40, rate};
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::uint8_t> info(40);
      for (auto& b : info) b = static_cast<std::uint8_t>(rng.bit());
      const auto tx = rate_match(turbo_encode(info, il, tr), cfg);
      std::vector<double> llrs(tx.size());
      for (std::size_t i = 0; i < tx.size(); ++i) llrs[i] = tx[i] ? 8.0 : -8.0;
      const LlrFrame frame = depuncture(llrs, cfg);
      for (auto mode : {MaxStarMode::exact, MaxStarMode::max_only}) {
        const auto res = turbo_decode(frame, il, tr, 1, mode);
        CHECK(res.bits == info);
      }
    }
  }
}

TEST_CASE("noiseless all-zero codeword gives strongly negative posteriors") {
  const TrellisTable tr = build_trellis();
  const Interleaver il = Interleaver::qpp(40);
  const CodeConfig cfg{40, CodeRate::one_third};
  std::vector<double> llrs(cfg.codeword_len(), -12.0);
  const LlrFrame frame = depuncture(llrs, cfg);
  const auto res = turbo_decode(frame, il, tr, 1, MaxStarMode::max_only);
  for (double p : res.posterior) CHECK(p < -10.0);
}
