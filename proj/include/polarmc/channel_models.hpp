// Channel-with-state models for flash rewriting, their capacities, and the
// Gelfand-Pinsker auxiliary functions p(v|s), x(v,s).

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polarmc/polar_transform.hpp"
#include "polarmc/prob_core.hpp"
#include "polarmc/rng.hpp"

namespace polarmc {

using ParamMap = std::map<std::string, double>;

struct ModelParams {
  double alpha = 0.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
};

/// Binary auxiliary V: per-state P(V = 1 | s) and a deterministic x(v, s).
struct AuxFunctions {
  std::vector<BinaryPmf> v_given_s;
  std::vector<std::array<std::uint8_t, 2>> x_map;  // x_map[s][v]

  bool operator==(const AuxFunctions& other) const;
};

/// Discrete memoryless channel with binary input x, finite state s drawn
/// i.i.d. from state_pmf, finite output y, and per-symbol cost b(x).
struct StateChannelSpec {
  std::string model_id;
  ParamMap params;
  FinitePmf state_pmf;
  std::size_t output_size = 0;
  std::vector<FinitePmf> transition;  // index x * |S| + s, pmf over y
  std::array<double, 2> cost{0.0, 1.0};
  double budget = 1.0;  // per-cell expected cost bound
  std::optional<AuxFunctions> aux;

  std::size_t state_size() const { return state_pmf.size(); }
  bool stateless() const { return state_size() == 1; }
  const FinitePmf& output_pmf(int x, std::size_t s) const { return transition[x * state_size() + s]; }
  std::uint8_t x_of(int v, std::size_t s) const { return aux->x_map[s][v]; }

  /// Throws std::invalid_argument on any broken invariant.
  void validate() const;
  const AuxFunctions& require_aux() const;

  /// Joint of (V, S): p(s) p(v|s). Encoder-side SC base.
  JointBase source_base() const;
  /// Joint of (V, Y): sum_s p(s) p(v|s) p(y | x(v,s), s). Decoder-side SC base.
  JointBase channel_base() const;
  BinaryInputChannel y_given_v() const;
  BinaryInputChannel s_given_v() const;
  /// Expected per-cell cost E[b(X)] under aux.
  double expected_cost() const;
};

/// Stateless asymmetric channel used by the point-to-point scheme.
struct AsymmetricChannel {
  BinaryPmf input;
  BinaryInputChannel transition;

  JointBase source_base() const;
  JointBase channel_base() const;
};

/// Wrap a stateless channel as a spec with a single-valued state.
StateChannelSpec degenerate_state_spec(const AsymmetricChannel& ch, std::string model_id = "asym");
/// The inverse view; requires a stateless spec with aux.
AsymmetricChannel as_asymmetric(const StateChannelSpec& spec);

StateChannelSpec make_example1(double alpha0, double alpha1, double beta);
StateChannelSpec make_example2(double alpha, double beta, double budget);
/// Binary symmetric channel with crossover alpha and cost budget epsilon <= 1/2.
StateChannelSpec make_bsc(double alpha, double epsilon);
/// Binary asymmetric channel: p01 = P(y=1|x=0), p10 = P(y=0|x=1). No cost bound.
StateChannelSpec make_basym(double p01, double p10);

/// B / (1 - beta), rejecting values outside [0, 1/2].
double example2_epsilon(double beta, double budget);
double capacity_example2(double alpha, double beta, double budget);
double capacity_bsc_cost(double alpha, double epsilon);

/// I(V;Y) - I(V;S) = H(V|S) - H(V|Y) for the given auxiliaries.
double gp_rate(const StateChannelSpec& spec, const AuxFunctions& aux);

struct GpGridResult {
  double capacity = 0.0;
  AuxFunctions aux;
  double cost = 0.0;
  std::size_t evaluations = 0;
};

/// Grid search of max (I(V;Y) - I(V;S)) over p(v|s) and all deterministic
/// x(v,s), subject to E[b(X)] <= budget. A coarse grid per map is refined
/// locally down to `resolution` / 100. Ties break on lower cost, then map
/// index, then grid coordinates. The returned V labelling is canonical:
/// x(0, .) <= x(1, .) lexicographically.
GpGridResult gp_capacity_grid(const StateChannelSpec& spec, double resolution = 1e-3,
                              int threads = 0);
/// Single-threaded reference of the same search.
GpGridResult gp_capacity_grid_serial(const StateChannelSpec& spec, double resolution = 1e-3);

/// The 2x2 channel W: Y -> S with W(1|0) = 0 and
/// W(1|1) = beta / ((eps * alpha)(1 - beta) + beta), rows indexed by y.
BinaryInputChannel degradation_witness(double alpha, double beta, double budget);

std::vector<std::uint32_t> sample_states(const StateChannelSpec& spec, std::size_t n, RngStream& rng);
std::vector<std::uint32_t> simulate_channel(const StateChannelSpec& spec, const BitVec& x,
                                            const std::vector<std::uint32_t>& s, RngStream& rng);

/// Registry: "example1" {alpha0, alpha1, beta}, "example2" {alpha, beta, B},
/// "bsc" {alpha, epsilon}, "basym" {p01, p10}.
StateChannelSpec make_model(const std::string& id, const ParamMap& params);
/// Fill in aux from the grid search when the model has no closed form.
StateChannelSpec with_optimal_aux(StateChannelSpec spec, double resolution = 1e-3, int threads = 0);
/// Closed-form capacity when the model has one.
std::optional<double> closed_form_capacity(const StateChannelSpec& spec);

}  // namespace polarmc
