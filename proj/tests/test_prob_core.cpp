#include <doctest.h>

#include <cmath>

#include "polarmc/prob_core.hpp"
#include "test_util.hpp"

using namespace polarmc;

namespace {

long double h_ref(long double p) {
  if (p <= 0.0L || p >= 1.0L) return 0.0L;
  return -p * std::log2(p) - (1.0L - p) * std::log2(1.0L - p);
}

}  // namespace

TEST_SUITE("prob_core") {

TEST_CASE("pmf validation") {
  CHECK_NOTHROW(BinaryPmf(0.0));
  CHECK_NOTHROW(BinaryPmf(1.0));
  CHECK_THROWS(BinaryPmf(-0.01));
  CHECK_THROWS(BinaryPmf(1.2));
  CHECK_NOTHROW(FinitePmf({0.25, 0.75}));
  CHECK_NOTHROW(FinitePmf({0.3, 0.7 + 5e-13}));
  CHECK_THROWS(FinitePmf({0.3, 0.6}));
  CHECK_THROWS(FinitePmf({-0.1, 1.1}));
  CHECK_THROWS(JointBase({0.5, 0.1}, {0.1}));
  CHECK_THROWS(JointBase({0.5}, {0.4}));
  const FinitePmf pm = FinitePmf::point_mass(3, 2);
  CHECK(pm[2] == 1.0);
  CHECK(pm[0] == 0.0);
}

TEST_CASE("binary entropy values") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.1) == doctest::Approx(0.468996).epsilon(1e-6));
  CHECK(std::fabs(binary_entropy(0.1) - static_cast<double>(h_ref(0.1L))) < 1e-14);
  CHECK(binary_entropy(0.11) == doctest::Approx(0.499916).epsilon(1e-6));
}

TEST_CASE("star convolution") {
  for (double a : {0.0, 0.1, 0.37, 1.0}) {
    CHECK(star_convolve(0.5, a) == doctest::Approx(0.5));
    CHECK(star_convolve(0.0, a) == doctest::Approx(a));
  }
  CHECK(star_convolve(0.5, 0.1) == doctest::Approx(0.5));
  CHECK(star_convolve(0.2, 0.3) == doctest::Approx(0.2 * 0.7 + 0.8 * 0.3));
}

TEST_CASE("bhattacharyya and conditional entropy examples") {
  const JointBase independent({0.25, 0.25}, {0.25, 0.25});
  CHECK(bhattacharyya(independent) == doctest::Approx(1.0));
  CHECK(conditional_entropy(independent) == doctest::Approx(1.0));

  const JointBase noiseless({0.4, 0.0}, {0.0, 0.6});
  CHECK(bhattacharyya(noiseless) == 0.0);
  CHECK(conditional_entropy(noiseless) == 0.0);

  const JointBase skewed({0.89}, {0.11});
  CHECK(bhattacharyya(skewed) == doctest::Approx(2.0 * std::sqrt(0.11 * 0.89)));
  CHECK(bhattacharyya(skewed) == doctest::Approx(0.625780).epsilon(1e-6));
  CHECK(conditional_entropy(skewed) == doctest::Approx(0.499916).epsilon(1e-6));
  CHECK(conditional_entropy(skewed) == doctest::Approx(static_cast<double>(h_ref(0.11L))).epsilon(1e-13));
}

TEST_CASE("from_channel builds the joint") {
  const BinaryInputChannel ch(FinitePmf({0.9, 0.1}), FinitePmf({0.2, 0.8}));
  const JointBase j = JointBase::from_channel(BinaryPmf(0.3), ch);
  CHECK(j.weight(0, 0) == doctest::Approx(0.7 * 0.9));
  CHECK(j.weight(1, 1) == doctest::Approx(0.3 * 0.8));
  CHECK(j.p1() == doctest::Approx(0.3));
}

TEST_CASE("entropy is sandwiched by Z squared and Z") {
  auto r = testutil::rng(1);
  int violations = 0;
  for (int t = 0; t < 10000; ++t) {
    const JointBase j = testutil::random_joint(r, 1 + r() % 5, t % 3 == 0);
    const double z = bhattacharyya(j), h = conditional_entropy(j);
    CHECK(z >= 0.0);
    CHECK(z <= 1.0);
    violations += (z * z > h + 1e-12) || (h > z + 1e-12);
  }
  CHECK(violations == 0);
}

TEST_CASE("star convolution is commutative, associative and closed") {
  auto r = testutil::rng(2);
  for (int t = 0; t < 2000; ++t) {
    const double a = r.uniform01(), b = r.uniform01(), c = r.uniform01();
    CHECK(star_convolve(a, b) == doctest::Approx(star_convolve(b, a)).epsilon(1e-14));
    CHECK(star_convolve(star_convolve(a, b), c) == doctest::Approx(star_convolve(a, star_convolve(b, c))).epsilon(1e-12));
    const double s = star_convolve(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("binary entropy is midpoint concave") {
  auto r = testutil::rng(3);
  for (int t = 0; t < 2000; ++t) {
    const double p = r.uniform01(), q = r.uniform01();
    CHECK(binary_entropy(0.5 * (p + q)) >= 0.5 * (binary_entropy(p) + binary_entropy(q)) - 1e-15);
  }
}

TEST_CASE("verify_degraded") {
  const BinaryInputChannel w(FinitePmf({0.8, 0.1, 0.1}), FinitePmf({0.05, 0.15, 0.8}));
  const std::vector<std::vector<double>> id{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(verify_degraded(w, w, id) == 0.0);

  // BSC(0.1) followed by BSC(0.2) is BSC(0.1 * 0.2).
  const BinaryInputChannel b1(FinitePmf({0.9, 0.1}), FinitePmf({0.1, 0.9}));
  const double e = star_convolve(0.1, 0.2);
  const BinaryInputChannel b2(FinitePmf({1 - e, e}), FinitePmf({e, 1 - e}));
  CHECK(verify_degraded(b1, b2, {{0.8, 0.2}, {0.2, 0.8}}) < 1e-15);
  CHECK(verify_degraded(b1, b2, {{1, 0}, {0, 1}}) == doctest::Approx(e - 0.1));

  CHECK_THROWS(verify_degraded(b1, b2, {{0.5, 0.6}, {0.2, 0.8}}));
  CHECK_THROWS(verify_degraded(b1, b2, {{1.2, -0.2}, {0.2, 0.8}}));
  CHECK_THROWS(verify_degraded(b1, b2, {{1.0, 0.0}}));
  CHECK_THROWS(verify_degraded(w, b2, {{1, 0}, {0, 1}}));
}

}
