#include "polarmc/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace polarmc {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void check_pmf(std::span<const double> probs, const char* what) {
  if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty alphabet");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw std::invalid_argument(std::string(what) + ": negative or non-finite entry");
    total += p;
  }
  if (std::abs(total - 1.0) > kPmfTolerance)
    throw std::invalid_argument(std::string(what) + ": entries sum to " + std::to_string(total));
}

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

BinaryPmf::BinaryPmf(double p1) : p1_(p1) {
  if (!is_probability(p1)) throw std::invalid_argument("BinaryPmf: p1 outside [0,1]");
}

FinitePmf::FinitePmf(std::vector<double> probs) : probs_(std::move(probs)) {
  check_pmf(probs_, "FinitePmf");
}

FinitePmf FinitePmf::point_mass(std::size_t size, std::size_t symbol) {
  std::vector<double> p(size, 0.0);
  p.at(symbol) = 1.0;
  return FinitePmf(std::move(p));
}

BinaryInputChannel::BinaryInputChannel(FinitePmf given0, FinitePmf given1)
    : rows_{std::move(given0), std::move(given1)} {
  if (rows_[0].size() != rows_[1].size())
    throw std::invalid_argument("BinaryInputChannel: rows over different alphabets");
}

JointBase::JointBase(std::vector<double> given0_weights, std::vector<double> given1_weights)
    : w_{std::move(given0_weights), std::move(given1_weights)} {
  if (w_[0].size() != w_[1].size() || w_[0].empty())
    throw std::invalid_argument("JointBase: row size mismatch");
  double total = 0.0;
  for (const auto& row : w_)
    for (double w : row) {
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("JointBase: negative or non-finite weight");
      total += w;
    }
  if (std::abs(total - 1.0) > kPmfTolerance)
    throw std::invalid_argument("JointBase: weights sum to " + std::to_string(total));
}

JointBase JointBase::from_channel(BinaryPmf prior, const BinaryInputChannel& channel) {
  const std::size_t m = channel.output_size();
  std::vector<double> w0(m), w1(m);
  for (std::size_t o = 0; o < m; ++o) {
    w0[o] = prior.p0() * channel(o, 0);
    w1[o] = prior.p1() * channel(o, 1);
  }
  return JointBase(std::move(w0), std::move(w1));
}

double JointBase::p1() const { return std::accumulate(w_[1].begin(), w_[1].end(), 0.0); }

double binary_entropy(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

double star_convolve(double e, double a) { return e * (1.0 - a) + (1.0 - e) * a; }

double bhattacharyya(const JointBase& joint) {
  double z = 0.0;
  for (std::size_t o = 0; o < joint.observation_size(); ++o)
    z += std::sqrt(joint.weight(0, o) * joint.weight(1, o));
  return std::clamp(2.0 * z, 0.0, 1.0);
}

double conditional_entropy(const JointBase& joint) {
  // H(V|O) = sum_o P(o) h(P(V=1|o)) written as -sum p log p + sum P(o) log P(o).
  double h = 0.0;
  for (std::size_t o = 0; o < joint.observation_size(); ++o) {
    const double a = joint.weight(0, o);
    const double b = joint.weight(1, o);
    h += -xlog2x(a) - xlog2x(b) + xlog2x(a + b);
  }
  return std::max(h, 0.0);
}

double verify_degraded(const BinaryInputChannel& w2, const BinaryInputChannel& w1,
                       const std::vector<std::vector<double>>& w) {
  if (w.size() != w2.output_size())
    throw std::invalid_argument("verify_degraded: W must have one row per output of W2");
  for (const auto& row : w) {
    if (row.size() != w1.output_size())
      throw std::invalid_argument("verify_degraded: W row length differs from W1 outputs");
    check_pmf(row, "verify_degraded: W row");
  }
  double worst = 0.0;
  for (int x = 0; x < 2; ++x)
    for (std::size_t y1 = 0; y1 < w1.output_size(); ++y1) {
      double composed = 0.0;
      for (std::size_t y2 = 0; y2 < w2.output_size(); ++y2) composed += w2(y2, x) * w[y2][y1];
      worst = std::max(worst, std::abs(w1(y1, x) - composed));
    }
  return worst;
}

}  // namespace polarmc
