// Acceptance run: one [PASS]/[FAIL] line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "polarmc/schemes.hpp"
#include "polarmc/simharness.hpp"
#include "test_util.hpp"

using namespace polarmc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

CodeProfile tagged(CodeProfile p, const StateChannelSpec& spec) {
  p.model_id = spec.model_id;
  p.model_params = spec.params;
  return p;
}

const StateChannelSpec& example2() {
  static const StateChannelSpec spec = make_example2(0.1, 0.5, 0.25);
  return spec;
}

double fer(const TrialSummary& s) { return static_cast<double>(s.block_errors) / static_cast<double>(s.blocks); }

// 1
Outcome sc_oracle() {
  auto r = testutil::rng(1001);
  double worst = 0.0;
  std::size_t cases = 0;
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    for (int t = 0; t < 100; ++t) {
      const std::size_t obs = 1 + r() % 4;
      std::vector<JointBase> bases;
      if (t % 2) {
        bases.assign(1, testutil::random_joint(r, obs));
      } else {
        for (std::size_t j = 0; j < n; ++j) bases.push_back(testutil::random_joint(r, obs));
      }
      const ScContext ctx = bases.size() == 1 ? ScContext(n, bases[0]) : ScContext(bases);
      const Observation o = testutil::random_obs(r, n, obs);
      const BitVec prefix = testutil::random_bits(r, r() % n);
      worst = std::max(worst, std::fabs(sc_conditional(ctx, o, prefix) - sc_bruteforce(ctx, o, prefix)));
      ++cases;
    }
  }
  return {worst <= 1e-9, fmt("%zu cases over n in {2,4,8,16}, max |diff| %.2e (tol 1e-9)", cases, worst)};
}

// 2
Outcome transform_identities() {
  auto r = testutil::rng(1002);
  std::size_t bad = 0, dense = 0;
  for (std::size_t n : {2u, 64u, 1024u, 16384u}) {
    for (int t = 0; t < 1000; ++t) {
      const BitVec u = testutil::random_bits(r, n), w = testutil::random_bits(r, n);
      BitVec s(n);
      for (std::size_t i = 0; i < n; ++i) s[i] = u[i] ^ w[i];
      const BitVec tu = polar_transform(u), tw = polar_transform(w), ts = polar_transform(s);
      bad += polar_transform(tu) != u;
      for (std::size_t i = 0; i < n; ++i)
        if (ts[i] != (tu[i] ^ tw[i])) {
          ++bad;
          break;
        }
      if (n <= 64) {
        bad += polar_transform_dense(u) != tu;
        ++dense;
      }
    }
  }
  return {bad == 0, fmt("4000 vectors over n in {2,64,1024,16384}, %zu dense comparisons, %zu mismatches", dense, bad)};
}

// 3
Outcome capacity_cross_check() {
  std::size_t points = 0;
  double gap = 0.0, aux_gap = 0.0;
  for (double a : {0.05, 0.1, 0.2})
    for (double b : {0.2, 0.5, 0.8})
      for (double B : {0.1, 0.25, 0.4}) {
        const double eps = B / (1 - b);
        if (eps > 0.5) continue;
        ++points;
        const GpGridResult g = gp_capacity_grid(make_example2(a, b, B), 1e-3);
        gap = std::max(gap, std::fabs(g.capacity - capacity_example2(a, b, B)));
        aux_gap = std::max(aux_gap, std::fabs(g.aux.v_given_s[0].p1() - eps));
        aux_gap = std::max(aux_gap, std::fabs(g.aux.v_given_s[1].p1() - eps * (1 - a) / star_convolve(eps, a)));
      }
  return {gap <= 1e-3 && aux_gap <= 2e-3,
          fmt("%zu points with eps <= 1/2, max capacity gap %.2e (tol 1e-3), max p(v|s) gap %.2e (tol 2e-3)", points,
              gap, aux_gap)};
}

// 4
Outcome degradation_identity() {
  auto r = testutil::rng(1004);
  double worst = 0.0, row_err = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double alpha = 0.5 * r.uniform01(), beta = 0.99 * r.uniform01(), eps = 0.5 * r.uniform01();
    const BinaryInputChannel w = degradation_witness(alpha, beta, eps * (1 - beta));
    for (int y = 0; y < 2; ++y) {
      row_err = std::max(row_err, std::fabs(w(0, y) + w(1, y) - 1.0));
      if (w(0, y) < 0 || w(1, y) < 0) row_err = 1.0;
    }
    const StateChannelSpec spec = make_example2(alpha, beta, eps * (1 - beta));
    const std::vector<std::vector<double>> rows{{w(0, 0), w(1, 0)}, {w(0, 1), w(1, 1)}};
    worst = std::max(worst, verify_degraded(spec.y_given_v(), spec.s_given_v(), rows));
  }
  return {worst <= 1e-12 && row_err <= 1e-12,
          fmt("100 random triples, max violation %.2e (tol 1e-12), max row-sum error %.2e", worst, row_err)};
}

// 5
Outcome entropy_bounds() {
  auto r = testutil::rng(1005);
  std::size_t bad = 0;
  double tightest = 1.0;
  for (int t = 0; t < 10000; ++t) {
    const JointBase j = testutil::random_joint(r, 1 + r() % 6, t % 3 == 0);
    const double z = bhattacharyya(j), h = conditional_entropy(j);
    bad += z * z > h + 1e-12 || h > z + 1e-12;
    tightest = std::min({tightest, h - z * z, z - h});
  }
  return {bad == 0, fmt("10000 joints, %zu violations (slack 1e-12), smallest margin %.2e", bad, tightest)};
}

// 6
Outcome polarization_trend() {
  const double C = capacity_example2(0.1, 0.5, 0.25);
  std::vector<double> rate;
  std::string detail;
  double side_last = 0.0;
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const ZProfile z = estimate_profile(example2(), n, 4000, 6);
    const CodeProfile p = select_sets(z, 0.9, 0.1);
    rate.push_back(static_cast<double>(p.message.size()) / n);
    side_last = static_cast<double>(p.side.size()) / n;
    detail += fmt("n=%zu |M|/n=%.4f |S|/n=%.4f; ", n, rate.back(), side_last);
    try {
      const CodeProfile ub = select_sets_union_bound(z, kDefaultZHigh, 0.1);
      std::printf("  info: n=%zu union-bound selection (error target 0.1) gives |M|/n=%.4f\n", n,
                  static_cast<double>(ub.message.size()) / n);
    } catch (const ProfileError&) {
      std::printf("  info: n=%zu union-bound selection (error target 0.1) leaves no message bits\n", n);
    }
  }
  const bool monotone = rate[1] >= rate[0] - 0.02 && rate[2] >= rate[1] - 0.02;
  const bool pass = monotone && rate[2] >= 0.5 * C && side_last <= 0.05;
  return {pass, detail + fmt("thresholds (0.9, 0.1), need |M|/n >= %.4f at n=4096", 0.5 * C)};
}

struct Construction2 {
  CodeProfile profile;
  TrialSummary summary;
};

const Construction2& construction2() {
  static const Construction2 c = [] {
    const double C = capacity_example2(0.1, 0.5, 0.25);
    const std::size_t n = 4096;
    const ZProfile z = estimate_profile(example2(), n, 4000, 7);
    const auto m = static_cast<std::size_t>(std::llround(0.6 * C * n));
    Construction2 out;
    out.profile = tagged(select_sets_for_rate(z, kDefaultZHigh, m), example2());
    TrialSetup setup;
    setup.trials = 500;
    setup.seed = 11;
    out.summary = run_trials(out.profile, example2(), setup);
    return out;
  }();
  return c;
}

// 7
Outcome informed_end_to_end() {
  const Construction2& c = construction2();
  const double f = fer(c.summary);
  const bool pass = f <= 0.1 && c.summary.cost_mean <= 0.27 && c.summary.wom_violations == 0;
  return {pass, fmt("n=4096 |M|=%zu (0.6 C), 500 blocks: FER %.4f (tol 0.1), cost/n %.4f (tol 0.27), "
                    "WOM violations %zu, encoder conflicts %zu",
                    c.profile.message.size(), f, c.summary.cost_mean, c.summary.wom_violations,
                    c.summary.encoder_conflicts)};
}

// 8
Outcome point_to_point_end_to_end() {
  const StateChannelSpec spec = with_optimal_aux(make_basym(0.02, 0.2), 1e-3);
  const double C = gp_capacity_grid(spec, 1e-3).capacity;
  const std::size_t n = 4096;
  const auto m = static_cast<std::size_t>(std::llround(0.6 * C * n));
  const CodeProfile p = tagged(select_sets_for_rate(estimate_profile(spec, n, 4000, 8), kDefaultZHigh, m), spec);
  TrialSetup setup;
  setup.scheme = Scheme::kPointToPoint;
  setup.trials = 500;
  setup.seed = 12;
  const TrialSummary s = run_trials(p, spec, setup);
  return {fer(s) <= 0.1, fmt("C=%.5f, p_X(1)=%.4f, n=4096 |M|=%zu (0.6 C), 500 blocks: FER %.4f (tol 0.1)", C,
                             spec.require_aux().v_given_s[0].p1(), m, fer(s))};
}

// 9
Outcome chaining() {
  const StateChannelSpec clean = make_example2(0.0, 0.5, 0.25);
  const std::size_t n = 1024;
  const ZProfile z = estimate_profile(clean, n, 200000, 9);
  const CodeProfile p = tagged(select_sets(z, 1.0, 0.01), clean);
  TrialSetup setup;
  setup.scheme = Scheme::kChained;
  setup.trials = 100;
  setup.seed = 13;
  setup.k_blocks = 8;
  const TrialSummary k8 = run_trials(p, clean, setup);
  setup.k_blocks = 1;
  const TrialSummary k1 = run_trials(p, clean, setup);

  const ChainProfile c8(8, p), c1(1, p);
  const double sigma = static_cast<double>(p.side.size());
  // Delivered payload bits minus the out-of-band side bits of each chain.
  auto measured = [&](const TrialSummary& s, const ChainProfile& c) {
    return (static_cast<double>(s.blocks) * c.message_size() - static_cast<double>(s.trials) * sigma) /
           (static_cast<double>(s.blocks) * n);
  };
  const double diff = measured(k8, c8) - measured(k1, c1);
  const double expect = 7.0 / 8.0 * sigma / n;
  const bool ledger = std::fabs(diff - expect) <= 1e-12 &&
                      std::fabs(effective_rate(c8) - effective_rate(c1) - expect) <= 1e-12;
  const bool pass = k8.block_errors == 0 && k8.blocks == 800 && ledger;
  return {pass, fmt("n=1024 k=8, 100 chains: %zu/%zu block errors; |M|=%zu |S|=%zu; rate k=8 %.6f, k=1 %.6f, "
                    "difference %.6f vs (7/8)|S|/n %.6f",
                    k8.block_errors, k8.blocks, p.message.size(), p.side.size(), measured(k8, c8),
                    measured(k1, c1), diff, expect)};
}

// 10
Outcome degenerate_state_equivalence() {
  auto r = testutil::rng(1010);
  std::size_t mismatches = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = std::size_t{1} << (2 + r() % 7);
    const std::size_t outputs = 2 + r() % 2;
    std::vector<double> row0(outputs), row1(outputs);
    double s0 = 0, s1 = 0;
    for (std::size_t y = 0; y < outputs; ++y) {
      s0 += row0[y] = r.uniform01();
      s1 += row1[y] = r.uniform01();
    }
    for (std::size_t y = 0; y < outputs; ++y) {
      row0[y] /= s0;
      row1[y] /= s1;
    }
    const AsymmetricChannel ch{BinaryPmf(0.05 + 0.9 * r.uniform01()),
                               BinaryInputChannel(FinitePmf(row0), FinitePmf(row1))};
    const StateChannelSpec spec = degenerate_state_spec(ch);
    const ZProfile z = estimate_profile(spec, n, 64, t);
    CodeProfile p;
    for (double hi = 0.5 + 0.5 * r.uniform01();; hi *= 0.8) {
      try {
        p = tagged(select_sets(z, hi, hi * r.uniform01()), spec);
        break;
      } catch (const ProfileError&) {
        if (hi < 1e-6) {
          p = tagged(select_sets_for_rate(z, 0.0, 1 + r() % n), spec);
          break;
        }
      }
    }
    for (auto& b : p.frozen_bits) b = r.bit();
    const BitVec m = testutil::random_bits(r, p.message.size());
    RngStream a(77, StreamTag::kTest, t), b(77, StreamTag::kTest, t);
    const EncodeResult e1 = c1_encode(p, ch, m, a);
    const EncodeResult e2 = c2_encode(p, spec, m, std::vector<std::uint32_t>(n, 0), b);
    RngStream noise(78, StreamTag::kTest, t);
    const auto y = simulate_channel(spec, e1.x, std::vector<std::uint32_t>(n, 0), noise);
    const DecodeResult d1 = c1_decode(p, ch, y, e1.side), d2 = c2_decode(p, spec, y, e2.side);
    mismatches += e1.u != e2.u || e1.v != e2.v || e1.x != e2.x || e1.side.bits != e2.side.bits ||
                  e1.conflict != e2.conflict || d1.u != d2.u || d1.message != d2.message || d1.status != d2.status;
  }
  return {mismatches == 0, fmt("100 random configs, %zu differ in u, v, x, side payload or decode", mismatches)};
}

// 11
Outcome frozen_search() {
  const Construction2& c = construction2();
  FrozenSearchOptions opt;
  opt.trials_budget = 20;
  opt.cost_slack = 0.02;
  opt.error_target = 0.1;
  opt.batch = 200;
  opt.seed = 21;
  const FrozenSearchResult res = search_frozen(c.profile, example2(), opt);
  CodeProfile p = c.profile;
  p.frozen_bits = res.frozen_bits;
  TrialSetup setup;
  setup.trials = 500;
  setup.seed = 22;
  const TrialSummary fresh = run_trials(p, example2(), setup);
  const bool pass = res.accepted && res.candidates <= 20 && fer(fresh) <= 0.1 && fresh.cost_mean <= 0.27;
  return {pass, fmt("%s after %zu candidates (batch FER %.4f, cost/n %.4f); fresh seed, 500 blocks: FER %.4f, "
                    "cost/n %.4f",
                    res.accepted ? "accepted" : "none accepted", res.candidates, res.fer, res.mean_cost, fer(fresh),
                    fresh.cost_mean)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"SC oracle equivalence", sc_oracle},
      {"transform involution and linearity", transform_identities},
      {"capacity closed form vs grid", capacity_cross_check},
      {"degradation identity", degradation_identity},
      {"Bhattacharyya/entropy bounds", entropy_bounds},
      {"polarization trend", polarization_trend},
      {"informed encoder end to end", informed_end_to_end},
      {"point-to-point end to end", point_to_point_end_to_end},
      {"chaining", chaining},
      {"point-to-point equals degenerate informed", degenerate_state_equivalence},
      {"frozen vector search", frozen_search},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
