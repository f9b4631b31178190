// Successive-cancellation probabilities for i.i.d. non-uniform binary sources.
//
// Model: V_1..V_n independent, (V_i, O_i) distributed per base(i), and
// U = V G_n. The engine returns P(U_i = 1 | U_[i-1], O_[n]) exactly, using
// the pairwise combine/split recursion on joint weights. Every intermediate
// pair is renormalized, which keeps values in [0, 1] at any block length.
//
// The same code path serves the encoder (observation = state) and the
// decoder (observation = channel output); only the JointBase differs.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "polarmc/polar_transform.hpp"
#include "polarmc/prob_core.hpp"
#include "polarmc/rng.hpp"

namespace polarmc {

/// Raised when the prefix/observation has probability zero under the model.
class ZeroProbabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScContext {
 public:
  /// i.i.d. case: every position shares `base`.
  ScContext(std::size_t n, JointBase base);
  explicit ScContext(std::vector<JointBase> per_position);

  std::size_t n() const { return n_; }
  int log2n() const { return log2n_; }
  const JointBase& base(std::size_t i) const { return bases_.size() == 1 ? bases_[0] : bases_[i]; }

 private:
  std::size_t n_;
  int log2n_;
  std::vector<JointBase> bases_;
};

/// Observation symbols o_[n] (states at the encoder, outputs at the decoder).
struct Observation {
  std::vector<std::uint32_t> symbols;

  static Observation constant(std::size_t n) { return {std::vector<std::uint32_t>(n, 0)}; }
  static Observation from_bits(const BitVec& bits) { return {{bits.begin(), bits.end()}}; }
};

enum class Rule : std::uint8_t { kRandomRound, kFixed, kArgmax };

struct ScPolicy {
  std::vector<Rule> rules;
  BitVec fixed;  // read where rules[i] == kFixed

  static ScPolicy uniform(std::size_t n, Rule rule);
  static ScPolicy fixed_to(const BitVec& u);
};

/// What to do when a pair of weights sums to zero.
enum class ZeroMode {
  kThrow,    // raise ZeroProbabilityError
  kNeutral,  // flag a conflict and continue with (1/2, 1/2)
};

struct PassResult {
  BitVec u;
  BitVec v;  // u G_n
  bool conflict = false;
  std::vector<double> p1;  // per-index P(U_i = 1 | past), when recorded
};

/// Reusable workspace bound to one context. Not thread-safe; use one engine
/// per worker.
class ScEngine {
 public:
  explicit ScEngine(const ScContext& ctx);

  double conditional(const Observation& obs, std::span<const std::uint8_t> prefix);

  /// One left-to-right pass. `rng` is required when any rule is kRandomRound.
  PassResult pass(const Observation& obs, const ScPolicy& policy, RngStream* rng,
                  ZeroMode mode = ZeroMode::kThrow, bool record_p1 = false);

 private:
  struct Pair {
    double p0, p1;
  };

  void load(const Observation& obs);
  void descend(int level);
  std::uint8_t decide(double p0, double p1);
  void leaves2(Pair a, Pair b, std::uint8_t* out);
  void leaves4(const Pair* a, std::uint8_t* out);
  void normalize(Pair& p);

  const ScContext* ctx_;
  std::vector<std::vector<Pair>> probs_;
  std::vector<BitVec> partial_;

  const ScPolicy* policy_ = nullptr;
  RngStream* rng_ = nullptr;
  ZeroMode mode_ = ZeroMode::kThrow;
  bool conflict_ = false;
  std::size_t next_ = 0;
  std::size_t stop_ = 0;
  bool stopped_ = false;
  double stop_p1_ = 0.0;
  BitVec* u_ = nullptr;
  std::vector<double>* record_ = nullptr;
};

double sc_conditional(const ScContext& ctx, const Observation& obs,
                      std::span<const std::uint8_t> prefix);

/// Exhaustive-summation oracle over all 2^n inputs; n <= 16.
double sc_bruteforce(const ScContext& ctx, const Observation& obs,
                     std::span<const std::uint8_t> prefix);

/// Exhaustive joint P(U = u | O = o); n <= 16.
double sc_bruteforce_joint(const ScContext& ctx, const Observation& obs, const BitVec& u);

PassResult sc_pass(const ScContext& ctx, const Observation& obs, const ScPolicy& policy,
                   RngStream* rng, ZeroMode mode = ZeroMode::kThrow);

}  // namespace polarmc
