#include <doctest.h>

#include <cmath>

#include "polarmc/channel_models.hpp"
#include "test_util.hpp"

using namespace polarmc;

namespace {

double h(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

}  // namespace

TEST_SUITE("channel_models") {

TEST_CASE("example 1 transition table") {
  const StateChannelSpec spec = make_example1(0.05, 0.07, 0.3);
  CHECK(spec.state_pmf[1] == doctest::Approx(0.3));
  CHECK(spec.output_pmf(0, 0)[1] == doctest::Approx(0.05));
  CHECK(spec.output_pmf(0, 1)[1] == doctest::Approx(0.93));
  CHECK(spec.output_pmf(1, 0)[1] == doctest::Approx(0.93));
  CHECK(spec.output_pmf(1, 1)[1] == doctest::Approx(0.93));
  CHECK(spec.cost[0] == 0.0);
  CHECK(spec.cost[1] == 1.0);
  CHECK_FALSE(spec.aux.has_value());

  const StateChannelSpec wom = make_example1(0, 0, 0.4);
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 2; ++s) CHECK(wom.output_pmf(x, s)[x | s] == 1.0);
}

TEST_CASE("example 2 auxiliaries") {
  const StateChannelSpec spec = make_example2(0.1, 0.5, 0.25);
  CHECK(example2_epsilon(0.5, 0.25) == doctest::Approx(0.5));
  const AuxFunctions& aux = spec.require_aux();
  CHECK(aux.v_given_s[0].p1() == doctest::Approx(0.5));
  CHECK(aux.v_given_s[1].p1() == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(spec.x_of(1, 1) == 0);
  CHECK(spec.x_of(0, 1) == 0);
  CHECK(spec.x_of(1, 0) == 1);
  CHECK(spec.x_of(0, 0) == 0);
  CHECK(spec.output_pmf(0, 1)[1] == 1.0);
  CHECK(spec.output_pmf(1, 1)[1] == 1.0);
  CHECK(spec.output_pmf(1, 0)[0] == doctest::Approx(0.1));
  CHECK(spec.expected_cost() == doctest::Approx(0.25).epsilon(1e-14));

  const StateChannelSpec clean = make_example2(0.0, 0.5, 0.25);
  CHECK(clean.output_pmf(1, 0)[1] == 1.0);
  CHECK(clean.output_pmf(0, 0)[0] == 1.0);

  CHECK_THROWS(make_example2(0.1, 0.5, 0.3));
  CHECK_THROWS(make_example2(0.1, 1.0, 0.1));
  CHECK_THROWS(make_example2(-0.1, 0.5, 0.1));
}

TEST_CASE("example 2 capacity") {
  CHECK(capacity_example2(0.1, 0.5, 0.25) == doctest::Approx(0.265502).epsilon(2e-6));
  CHECK(capacity_example2(0.1, 0.5, 0.25) == doctest::Approx(0.5 * (1 - h(0.1))).epsilon(1e-14));
  CHECK(capacity_example2(0.0, 0.5, 0.25) == doctest::Approx(0.5));
  CHECK(capacity_example2(0.5, 0.3, 0.2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(capacity_example2(0.1, 0.5, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(capacity_bsc_cost(0.1, 0.5) == doctest::Approx(0.531004).epsilon(2e-6));
  // Capacity equals H(V|S) - H(V|Y) for the closed-form auxiliaries.
  auto r = testutil::rng(40);
  for (int t = 0; t < 50; ++t) {
    const double alpha = 0.45 * r.uniform01(), beta = 0.9 * r.uniform01(), eps = 0.5 * r.uniform01();
    const StateChannelSpec spec = make_example2(alpha, beta, eps * (1 - beta));
    CHECK(gp_rate(spec, spec.require_aux()) == doctest::Approx(capacity_example2(alpha, beta, eps * (1 - beta))).epsilon(1e-9));
  }
}

TEST_CASE("output and posterior identities") {
  auto r = testutil::rng(41);
  for (int t = 0; t < 50; ++t) {
    const double alpha = 0.45 * r.uniform01(), beta = 0.9 * r.uniform01(), eps = 0.02 + 0.48 * r.uniform01();
    const StateChannelSpec spec = make_example2(alpha, beta, eps * (1 - beta));
    const JointBase vy = spec.channel_base();
    const double py1 = vy.weight(0, 1) + vy.weight(1, 1);
    CHECK(py1 == doctest::Approx((1 - beta) * star_convolve(alpha, eps) + beta).epsilon(1e-12));
    const JointBase vs = spec.source_base();
    const double pv1_s1 = vs.weight(1, 1) / (vs.weight(0, 1) + vs.weight(1, 1));
    CHECK(pv1_s1 == doctest::Approx(eps * (1 - alpha) / star_convolve(eps, alpha)).epsilon(1e-12));
    CHECK(spec.expected_cost() == doctest::Approx(eps * (1 - beta)).epsilon(1e-12));
  }
}

TEST_CASE("degradation witness") {
  const BinaryInputChannel w = degradation_witness(0.1, 0.5, 0.25);
  CHECK(w(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(w(1, 0) == 0.0);
  CHECK(w(0, 0) == 1.0);
  const BinaryInputChannel none = degradation_witness(0.1, 0.0, 0.25);
  CHECK(none(1, 1) == 0.0);
  const StateChannelSpec spec0 = make_example2(0.1, 0.0, 0.25);
  CHECK(spec0.s_given_v()(0, 0) == 1.0);
  CHECK(spec0.s_given_v()(0, 1) == 1.0);

  auto r = testutil::rng(42);
  for (int t = 0; t < 100; ++t) {
    const double alpha = 0.5 * r.uniform01(), beta = 0.95 * r.uniform01(), eps = 0.5 * r.uniform01();
    const BinaryInputChannel wt = degradation_witness(alpha, beta, eps * (1 - beta));
    const StateChannelSpec spec = make_example2(alpha, beta, eps * (1 - beta));
    const std::vector<std::vector<double>> rows{{wt(0, 0), wt(1, 0)}, {wt(0, 1), wt(1, 1)}};
    CHECK(verify_degraded(spec.y_given_v(), spec.s_given_v(), rows) <= 1e-12);
  }
}

TEST_CASE("state and channel sampling") {
  const StateChannelSpec spec = make_example2(0.1, 0.5, 0.25);
  RngStream r(3, StreamTag::kTest, 0);
  const std::size_t n = 1000000;
  const auto s = sample_states(spec, n, r);
  BitVec x(n);
  for (auto& b : x) b = r.bit();
  const auto y = simulate_channel(spec, x, s, r);
  std::size_t states = 0, stuck_ok = 0, flips = 0, free_ones = 0;
  for (std::size_t i = 0; i < n; ++i) {
    states += s[i];
    if (s[i] == 1) {
      stuck_ok += y[i] == 1;
    } else if (x[i] == 1) {
      ++free_ones;
      flips += y[i] == 0;
    }
  }
  CHECK(stuck_ok == states);
  const double sd_s = std::sqrt(0.25 / n);
  CHECK(std::fabs(states / double(n) - 0.5) <= 3 * sd_s);
  const double fr = flips / double(free_ones);
  CHECK(std::fabs(fr - 0.1) <= 3 * std::sqrt(0.09 / free_ones));

  const StateChannelSpec clean = make_example2(0.0, 0.5, 0.25);
  const std::vector<std::uint32_t> zeros(1000, 0);
  const BitVec xs = testutil::random_bits(r, 1000);
  const auto ys = simulate_channel(clean, xs, zeros, r);
  for (std::size_t i = 0; i < 1000; ++i) CHECK(ys[i] == xs[i]);
  CHECK_THROWS(simulate_channel(clean, xs, std::vector<std::uint32_t>(10, 0), r));
}

TEST_CASE("grid search") {
  const StateChannelSpec spec = make_example2(0.1, 0.5, 0.25);
  const GpGridResult g = gp_capacity_grid(spec, 1e-3);
  CHECK(std::fabs(g.capacity - 0.265502) <= 1e-3);
  CHECK(std::fabs(g.aux.v_given_s[1].p1() - 0.9) <= 2e-3);
  CHECK(g.cost <= 0.25 + 1e-12);
  const GpGridResult serial = gp_capacity_grid_serial(spec, 1e-3);
  CHECK(serial.capacity == g.capacity);
  CHECK(serial.aux == g.aux);

  CHECK(gp_capacity_grid(make_example2(0.1, 0.5, 0.0), 1e-2).capacity == doctest::Approx(0.0).epsilon(1e-12));
  // Stateless: max over p_V of I(V;Y) for a BSC without cost limit is 1 - h(alpha).
  CHECK(std::fabs(gp_capacity_grid(make_bsc(0.1, 0.5), 1e-3).capacity - (1 - h(0.1))) <= 1e-3);
  CHECK(std::fabs(gp_capacity_grid(make_bsc(0.1, 0.5), 1e-3).capacity - capacity_bsc_cost(0.1, 0.5)) <= 1e-3);
}

TEST_CASE("registry") {
  CHECK(make_model("example2", {{"alpha", 0.1}, {"beta", 0.5}, {"B", 0.25}}).model_id == "example2");
  CHECK(make_model("basym", {{"p01", 0.02}, {"p10", 0.2}}).stateless());
  CHECK(make_model("bsc", {{"alpha", 0.1}, {"epsilon", 0.5}}).stateless());
  CHECK_FALSE(make_model("example1", {{"alpha0", 0.05}, {"alpha1", 0.05}, {"beta", 0.3}}).aux.has_value());
  CHECK_THROWS(make_model("nope", {}));
  CHECK_THROWS(make_model("example2", {{"alpha", 0.1}, {"gamma", 0.5}, {"B", 0.25}}));
  CHECK(closed_form_capacity(make_example2(0.1, 0.5, 0.25)).value() == doctest::Approx(0.265502).epsilon(2e-6));
  CHECK_FALSE(closed_form_capacity(make_basym(0.02, 0.2)).has_value());
  const StateChannelSpec filled = with_optimal_aux(make_example1(0.05, 0.05, 0.3), 1e-2);
  CHECK(filled.aux.has_value());
  CHECK_NOTHROW(filled.validate());
}

}
