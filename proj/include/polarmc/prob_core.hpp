// Exact finite-probability primitives shared by every coding stage.
//
// Probabilities are plain doubles. Validation uses an absolute tolerance of
// kPmfTolerance on sums; 0 * log2(0) is taken as 0 throughout.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace polarmc {

inline constexpr double kPmfTolerance = 1e-12;

/// Bernoulli distribution, stored as P(1).
class BinaryPmf {
 public:
  BinaryPmf() = default;
  explicit BinaryPmf(double p1);

  double p1() const { return p1_; }
  double p0() const { return 1.0 - p1_; }
  double operator[](int bit) const { return bit ? p1_ : 1.0 - p1_; }

 private:
  double p1_ = 0.5;
};

/// Distribution over {0, ..., size()-1}.
class FinitePmf {
 public:
  FinitePmf() = default;
  explicit FinitePmf(std::vector<double> probs);

  /// Point mass on `symbol` in an alphabet of `size` symbols.
  static FinitePmf point_mass(std::size_t size, std::size_t symbol);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Memoryless channel with a binary input: one output pmf per input bit.
class BinaryInputChannel {
 public:
  BinaryInputChannel() = default;
  BinaryInputChannel(FinitePmf given0, FinitePmf given1);

  std::size_t output_size() const { return rows_[0].size(); }
  const FinitePmf& row(int x) const { return rows_[x ? 1 : 0]; }
  double operator()(std::size_t y, int x) const { return rows_[x ? 1 : 0][y]; }

 private:
  FinitePmf rows_[2];
};

/// Joint pmf of a binary symbol V and a finite observation O, stored as two
/// rows: weight(v, o) = P(V = v, O = o).
class JointBase {
 public:
  JointBase() = default;
  JointBase(std::vector<double> given0_weights, std::vector<double> given1_weights);

  /// Joint of V ~ prior and O drawn through `channel`.
  static JointBase from_channel(BinaryPmf prior, const BinaryInputChannel& channel);

  std::size_t observation_size() const { return w_[0].size(); }
  double weight(int v, std::size_t o) const { return w_[v ? 1 : 0][o]; }
  /// Marginal P(V = 1).
  double p1() const;

 private:
  std::vector<double> w_[2];
};

/// h(p) in bits.
double binary_entropy(double p);

/// e * a = e(1-a) + (1-e)a, the crossover of two cascaded BSCs.
double star_convolve(double e, double a);

/// Z(V|O) = 2 * sum_o sqrt(P(0,o) P(1,o)), clamped into [0, 1].
double bhattacharyya(const JointBase& joint);

/// H(V|O) in bits.
double conditional_entropy(const JointBase& joint);

/// Largest |W1(y1|x) - sum_y2 W2(y2|x) W(y1|y2)|. Zero means `w` witnesses
/// W1 being stochastically degraded with respect to W2. `w` has one row per
/// output of `w2`, each a pmf over the outputs of `w1`. Throws
/// std::invalid_argument on dimension mismatch or a non-stochastic `w`.
double verify_degraded(const BinaryInputChannel& w2, const BinaryInputChannel& w1,
                       const std::vector<std::vector<double>>& w);

}  // namespace polarmc
