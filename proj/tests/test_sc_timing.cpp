#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>

#include "polarmc/sc_engine.hpp"
#include "test_util.hpp"

using namespace polarmc;

TEST_SUITE("sc_timing") {

TEST_CASE("pass time grows like n log n") {
  struct Size {
    std::size_t n;
    std::unique_ptr<ScContext> ctx;
    std::unique_ptr<ScEngine> engine;
    Observation obs;
    ScPolicy policy;
    int reps;
    double best;
  };
  std::vector<Size> sizes;
  auto r = testutil::rng(24);
  for (int m = 10; m <= 14; ++m) {
    const std::size_t n = std::size_t{1} << m;
    Size sz{n, std::make_unique<ScContext>(n, JointBase({0.4, 0.1}, {0.1, 0.4})), nullptr,
            testutil::random_obs(r, n, 2), ScPolicy::uniform(n, Rule::kArgmax), std::max(3, (1 << 20) >> m), 1e300};
    sz.engine = std::make_unique<ScEngine>(*sz.ctx);
    sz.engine->pass(sz.obs, sz.policy, nullptr);
    sizes.push_back(std::move(sz));
  }
  // Rounds interleave the sizes so background load hits all of them alike.
  for (int round = 0; round < 9; ++round) {
    for (auto& sz : sizes) {
      const auto t0 = std::chrono::steady_clock::now();
      for (int k = 0; k < sz.reps; ++k) sz.engine->pass(sz.obs, sz.policy, nullptr);
      const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / sz.reps;
      sz.best = std::min(sz.best, t);
    }
  }
  std::vector<double> xs, ys;
  for (const auto& sz : sizes) {
    xs.push_back(std::log(std::log2(static_cast<double>(sz.n))));
    ys.push_back(std::log(sz.best / static_cast<double>(sz.n)));
    MESSAGE("n=" << sz.n << " ns per n log n: " << 1e9 * sz.best / (sz.n * std::log2(double(sz.n))));
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  MESSAGE("log-log slope of time/n against log n: " << slope);
  CHECK(slope >= 0.9);
  CHECK(slope <= 1.3);
}

}
