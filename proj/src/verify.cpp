#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "polarmc/simharness.hpp"

namespace polarmc {

namespace {

std::string show(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

JointBase random_joint(RngStream& rng, std::size_t obs) {
  std::vector<double> w0(obs), w1(obs);
  double total = 0.0;
  for (std::size_t o = 0; o < obs; ++o) {
    w0[o] = rng.uniform01();
    w1[o] = rng.uniform01();
    total += w0[o] + w1[o];
  }
  for (std::size_t o = 0; o < obs; ++o) {
    w0[o] /= total;
    w1[o] /= total;
  }
  return JointBase(w0, w1);
}

CheckResult check_sc_oracle(std::uint64_t seed) {
  double worst = 0.0;
  std::size_t cases = 0;
  RngStream rng(seed, StreamTag::kTest, 1);
  for (std::size_t n : {2u, 4u, 8u, 16u}) {
    for (int c = 0; c < 20; ++c) {
      const std::size_t obs = 1 + rng() % 3;
      const ScContext ctx(n, random_joint(rng, obs));
      Observation o{std::vector<std::uint32_t>(n)};
      for (auto& s : o.symbols) s = rng() % obs;
      BitVec prefix(rng() % n);
      for (auto& b : prefix) b = rng.bit();
      try {
        worst = std::max(worst, std::fabs(sc_conditional(ctx, o, prefix) - sc_bruteforce(ctx, o, prefix)));
      } catch (const ZeroProbabilityError&) {
      }
      ++cases;
    }
  }
  return {"sc-vs-bruteforce", worst <= 1e-9, std::to_string(cases) + " cases, max diff " + show(worst)};
}

CheckResult check_transform(std::uint64_t seed) {
  RngStream rng(seed, StreamTag::kTest, 2);
  bool ok = true;
  for (std::size_t n : {2u, 64u, 1024u}) {
    for (int c = 0; c < 50; ++c) {
      BitVec u(n), w(n);
      for (auto& b : u) b = rng.bit();
      for (auto& b : w) b = rng.bit();
      BitVec sum(n);
      for (std::size_t i = 0; i < n; ++i) sum[i] = u[i] ^ w[i];
      const BitVec tu = polar_transform(u), tw = polar_transform(w), ts = polar_transform(sum);
      ok = ok && polar_inverse(tu) == u;
      for (std::size_t i = 0; i < n; ++i) ok = ok && ts[i] == (tu[i] ^ tw[i]);
      if (n <= 64) ok = ok && polar_transform_dense(u) == tu;
    }
  }
  return {"transform-involution", ok, "n in {2, 64, 1024}"};
}

CheckResult check_capacity() {
  const double closed = capacity_example2(0.1, 0.5, 0.25);
  const auto grid = gp_capacity_grid(make_example2(0.1, 0.5, 0.25), 1e-3);
  const double gap = std::fabs(closed - grid.capacity);
  const double bsc_gap = std::fabs(capacity_bsc_cost(0.1, 0.5) - gp_capacity_grid(make_bsc(0.1, 0.5), 1e-3).capacity);
  return {"capacity-closed-form-vs-grid", gap <= 1e-3 && bsc_gap <= 1e-3,
          "example2 gap " + show(gap) + ", bsc gap " + show(bsc_gap)};
}

CheckResult check_degradation(std::uint64_t seed) {
  RngStream rng(seed, StreamTag::kTest, 3);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const double alpha = rng.uniform01() * 0.5;
    const double beta = rng.uniform01() * 0.95;
    const double eps = rng.uniform01() * 0.5;
    const StateChannelSpec spec = make_example2(alpha, beta, eps * (1.0 - beta));
    const BinaryInputChannel w = degradation_witness(alpha, beta, eps * (1.0 - beta));
    std::vector<std::vector<double>> rows{{w(0, 0), w(1, 0)}, {w(0, 1), w(1, 1)}};
    worst = std::max(worst, verify_degraded(spec.y_given_v(), spec.s_given_v(), rows));
  }
  return {"degradation-witness", worst <= 1e-12, "max violation " + show(worst)};
}

CheckResult check_entropy_bounds(std::uint64_t seed) {
  RngStream rng(seed, StreamTag::kTest, 4);
  std::size_t bad = 0;
  for (int c = 0; c < 2000; ++c) {
    const JointBase j = random_joint(rng, 1 + rng() % 4);
    const double z = bhattacharyya(j), h = conditional_entropy(j);
    bad += z * z > h + 1e-12 || h > z + 1e-12;
  }
  return {"entropy-bhattacharyya-bounds", bad == 0, std::to_string(bad) + " violations in 2000 joints"};
}

CheckResult check_rng() {
  const auto r = philox4x32_10({0, 0, 0, 0}, {0, 0});
  const bool ok = r == std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8};
  return {"philox-known-answer", ok, kRngName};
}

}  // namespace

std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
  return {check_sc_oracle(seed), check_transform(seed), check_capacity(), check_degradation(seed),
          check_entropy_bounds(seed), check_rng()};
}

int cmd_verify(std::uint64_t seed, std::ostream& log) {
  bool ok = true;
  for (const auto& r : run_verify_suite(seed)) {
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace polarmc
