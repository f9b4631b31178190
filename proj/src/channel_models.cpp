#include "polarmc/channel_models.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polarmc {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

FinitePmf bit_pmf(double p1) { return FinitePmf({1.0 - p1, p1}); }

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

bool AuxFunctions::operator==(const AuxFunctions& other) const {
  if (v_given_s.size() != other.v_given_s.size() || x_map != other.x_map) return false;
  for (std::size_t s = 0; s < v_given_s.size(); ++s)
    if (v_given_s[s].p1() != other.v_given_s[s].p1()) return false;
  return true;
}

void StateChannelSpec::validate() const {
  const std::size_t S = state_size();
  if (S == 0) throw std::invalid_argument("model has an empty state alphabet");
  if (transition.size() != 2 * S) throw std::invalid_argument("transition table must cover every (x, s)");
  for (const auto& row : transition)
    if (row.size() != output_size) throw std::invalid_argument("transition row over wrong output alphabet");
  if (!(budget >= 0.0)) throw std::invalid_argument("cost budget must be nonnegative");
  if (aux) {
    if (aux->v_given_s.size() != S || aux->x_map.size() != S)
      throw std::invalid_argument("aux tables must cover every state");
    for (const auto& row : aux->x_map)
      if (row[0] > 1 || row[1] > 1) throw std::invalid_argument("x(v,s) must be binary");
  }
}

const AuxFunctions& StateChannelSpec::require_aux() const {
  if (!aux) throw std::invalid_argument("model '" + model_id + "' has no auxiliary functions p(v|s), x(v,s)");
  return *aux;
}

JointBase StateChannelSpec::source_base() const {
  const AuxFunctions& a = require_aux();
  const std::size_t S = state_size();
  std::vector<double> w0(S), w1(S);
  for (std::size_t s = 0; s < S; ++s) {
    w0[s] = state_pmf[s] * a.v_given_s[s].p0();
    w1[s] = state_pmf[s] * a.v_given_s[s].p1();
  }
  return JointBase(std::move(w0), std::move(w1));
}

JointBase StateChannelSpec::channel_base() const {
  const AuxFunctions& a = require_aux();
  std::vector<double> w[2] = {std::vector<double>(output_size, 0.0), std::vector<double>(output_size, 0.0)};
  for (int v = 0; v < 2; ++v)
    for (std::size_t s = 0; s < state_size(); ++s) {
      const double pvs = state_pmf[s] * a.v_given_s[s][v];
      const FinitePmf& out = output_pmf(a.x_map[s][v], s);
      for (std::size_t y = 0; y < output_size; ++y) w[v][y] += pvs * out[y];
    }
  return JointBase(std::move(w[0]), std::move(w[1]));
}

BinaryInputChannel StateChannelSpec::y_given_v() const {
  const JointBase j = channel_base();
  std::vector<double> rows[2];
  for (int v = 0; v < 2; ++v) {
    double pv = 0.0;
    for (std::size_t y = 0; y < output_size; ++y) pv += j.weight(v, y);
    rows[v].resize(output_size);
    for (std::size_t y = 0; y < output_size; ++y)
      rows[v][y] = pv > 0.0 ? j.weight(v, y) / pv : (y == 0 ? 1.0 : 0.0);
  }
  return BinaryInputChannel(FinitePmf(rows[0]), FinitePmf(rows[1]));
}

BinaryInputChannel StateChannelSpec::s_given_v() const {
  const JointBase j = source_base();
  const std::size_t S = state_size();
  std::vector<double> rows[2];
  for (int v = 0; v < 2; ++v) {
    double pv = 0.0;
    for (std::size_t s = 0; s < S; ++s) pv += j.weight(v, s);
    rows[v].resize(S);
    for (std::size_t s = 0; s < S; ++s)
      rows[v][s] = pv > 0.0 ? j.weight(v, s) / pv : (s == 0 ? 1.0 : 0.0);
  }
  return BinaryInputChannel(FinitePmf(rows[0]), FinitePmf(rows[1]));
}

double StateChannelSpec::expected_cost() const {
  const AuxFunctions& a = require_aux();
  double c = 0.0;
  for (std::size_t s = 0; s < state_size(); ++s)
    for (int v = 0; v < 2; ++v) c += state_pmf[s] * a.v_given_s[s][v] * cost[a.x_map[s][v]];
  return c;
}

JointBase AsymmetricChannel::source_base() const {
  return JointBase({input.p0()}, {input.p1()});
}

JointBase AsymmetricChannel::channel_base() const {
  return JointBase::from_channel(input, transition);
}

StateChannelSpec degenerate_state_spec(const AsymmetricChannel& ch, std::string model_id) {
  StateChannelSpec spec;
  spec.model_id = std::move(model_id);
  spec.state_pmf = FinitePmf({1.0});
  spec.output_size = ch.transition.output_size();
  spec.transition = {ch.transition.row(0), ch.transition.row(1)};
  spec.cost = {0.0, 0.0};
  spec.budget = 0.0;
  spec.aux = AuxFunctions{{ch.input}, {{0, 1}}};
  spec.validate();
  return spec;
}

AsymmetricChannel as_asymmetric(const StateChannelSpec& spec) {
  if (!spec.stateless()) throw std::invalid_argument("point-to-point scheme needs a stateless model");
  const AuxFunctions& a = spec.require_aux();
  const int x0 = a.x_map[0][0], x1 = a.x_map[0][1];
  return {a.v_given_s[0], BinaryInputChannel(spec.output_pmf(x0, 0), spec.output_pmf(x1, 0))};
}

StateChannelSpec make_example1(double alpha0, double alpha1, double beta) {
  require_probability(alpha0, "alpha0");
  require_probability(alpha1, "alpha1");
  require_probability(beta, "beta");
  StateChannelSpec spec;
  spec.model_id = "example1";
  spec.params = {{"alpha0", alpha0}, {"alpha1", alpha1}, {"beta", beta}};
  spec.state_pmf = bit_pmf(beta);
  spec.output_size = 2;
  // P(y=1 | x, s): alpha0 at (0,0), 1 - alpha1 otherwise.
  spec.transition = {bit_pmf(alpha0), bit_pmf(1.0 - alpha1), bit_pmf(1.0 - alpha1), bit_pmf(1.0 - alpha1)};
  spec.cost = {0.0, 1.0};
  spec.budget = 1.0;
  spec.validate();
  return spec;
}

double example2_epsilon(double beta, double budget) {
  require_probability(beta, "beta");
  if (beta >= 1.0) throw std::invalid_argument("beta must be below 1");
  if (!(budget >= 0.0)) throw std::invalid_argument("cost budget must be nonnegative");
  const double eps = budget / (1.0 - beta);
  if (eps > 0.5)
    throw std::invalid_argument("B/(1-beta) = " + std::to_string(eps) + " exceeds 1/2");
  return eps;
}

StateChannelSpec make_example2(double alpha, double beta, double budget) {
  require_probability(alpha, "alpha");
  const double eps = example2_epsilon(beta, budget);
  StateChannelSpec spec;
  spec.model_id = "example2";
  spec.params = {{"alpha", alpha}, {"beta", beta}, {"B", budget}};
  spec.state_pmf = bit_pmf(beta);
  spec.output_size = 2;
  // P(y=1 | x, s): alpha at (0,0), 1 - alpha at (1,0), 1 when s = 1.
  spec.transition = {bit_pmf(alpha), bit_pmf(1.0), bit_pmf(1.0 - alpha), bit_pmf(1.0)};
  spec.cost = {0.0, 1.0};
  spec.budget = budget;
  const double ea = star_convolve(eps, alpha);
  const double stuck_v1 = ea > 0.0 ? eps * (1.0 - alpha) / ea : 0.0;
  spec.aux = AuxFunctions{{BinaryPmf(eps), BinaryPmf(stuck_v1)}, {{{0, 1}}, {{0, 0}}}};
  spec.validate();
  return spec;
}

StateChannelSpec make_bsc(double alpha, double epsilon) {
  require_probability(alpha, "alpha");
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in [0, 1/2]");
  StateChannelSpec spec;
  spec.model_id = "bsc";
  spec.params = {{"alpha", alpha}, {"epsilon", epsilon}};
  spec.state_pmf = FinitePmf({1.0});
  spec.output_size = 2;
  spec.transition = {bit_pmf(alpha), bit_pmf(1.0 - alpha)};
  spec.cost = {0.0, 1.0};
  spec.budget = epsilon;
  spec.aux = AuxFunctions{{BinaryPmf(epsilon)}, {{{0, 1}}}};
  spec.validate();
  return spec;
}

StateChannelSpec make_basym(double p01, double p10) {
  require_probability(p01, "p01");
  require_probability(p10, "p10");
  StateChannelSpec spec;
  spec.model_id = "basym";
  spec.params = {{"p01", p01}, {"p10", p10}};
  spec.state_pmf = FinitePmf({1.0});
  spec.output_size = 2;
  spec.transition = {bit_pmf(p01), bit_pmf(1.0 - p10)};
  spec.cost = {0.0, 0.0};
  spec.budget = 0.0;
  spec.validate();
  return spec;
}

double capacity_bsc_cost(double alpha, double epsilon) {
  require_probability(alpha, "alpha");
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw std::invalid_argument("epsilon must lie in [0, 1/2]");
  return binary_entropy(star_convolve(epsilon, alpha)) - binary_entropy(alpha);
}

double capacity_example2(double alpha, double beta, double budget) {
  require_probability(alpha, "alpha");
  const double eps = example2_epsilon(beta, budget);
  return (1.0 - beta) * (binary_entropy(star_convolve(eps, alpha)) - binary_entropy(alpha));
}

double gp_rate(const StateChannelSpec& spec, const AuxFunctions& aux) {
  StateChannelSpec copy = spec;
  copy.aux = aux;
  copy.validate();
  double h_vs = 0.0;
  for (std::size_t s = 0; s < copy.state_size(); ++s)
    h_vs += copy.state_pmf[s] * binary_entropy(aux.v_given_s[s].p1());
  return h_vs - conditional_entropy(copy.channel_base());
}

// ---------------------------------------------------------------------------
// Grid search

namespace {

struct Candidate {
  double value = -std::numeric_limits<double>::infinity();
  double cost = std::numeric_limits<double>::infinity();
  unsigned map = 0;
  std::vector<double> q;
  bool feasible = false;
};

// Strict total order: higher value, then lower cost, then lower map, then
// lexicographically smaller coordinates.
bool better(const Candidate& a, const Candidate& b) {
  if (a.feasible != b.feasible) return a.feasible;
  if (a.value != b.value) return a.value > b.value;
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.map != b.map) return a.map < b.map;
  return a.q < b.q;
}

class GridObjective {
 public:
  explicit GridObjective(const StateChannelSpec& spec) : spec_(spec), S_(spec.state_size()) {}

  std::size_t states() const { return S_; }
  unsigned map_count() const { return 1u << (2 * S_); }

  int x_of(unsigned map, int v, std::size_t s) const { return (map >> (2 * s + v)) & 1u; }

  void evaluate(Candidate& c, std::vector<double>& joint) const {
    const std::size_t Y = spec_.output_size;
    joint.assign(2 * Y, 0.0);
    double cost = 0.0, h_vs = 0.0;
    for (std::size_t s = 0; s < S_; ++s) {
      const double ps = spec_.state_pmf[s];
      const double q = c.q[s];
      h_vs += ps * binary_entropy(q);
      for (int v = 0; v < 2; ++v) {
        const double pvs = ps * (v ? q : 1.0 - q);
        const int x = x_of(c.map, v, s);
        cost += pvs * spec_.cost[x];
        const FinitePmf& out = spec_.output_pmf(x, s);
        for (std::size_t y = 0; y < Y; ++y) joint[v * Y + y] += pvs * out[y];
      }
    }
    double h_vy = 0.0;
    for (std::size_t y = 0; y < Y; ++y) {
      const double a = joint[y], b = joint[Y + y];
      h_vy += -xlog2x(a) - xlog2x(b) + xlog2x(a + b);
    }
    c.cost = cost;
    c.feasible = cost <= spec_.budget + 1e-12;
    c.value = h_vs - std::max(h_vy, 0.0);
  }

 private:
  const StateChannelSpec& spec_;
  std::size_t S_;
};

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

// Sets c.q to grid point `index` of a lattice with `points` per axis.
void decode_point(std::size_t index, std::size_t points, double step, Candidate& c) {
  for (double& q : c.q) {
    q = std::min(1.0, static_cast<double>(index % points) * step);
    index /= points;
  }
}

Candidate refine(const GridObjective& obj, Candidate best, double coarse, double finest,
                 std::size_t& evals) {
  const std::size_t S = obj.states();
  std::vector<double> joint;
  const std::size_t total = ipow(21, S);
  for (double step = coarse / 10.0; step >= finest * 0.999; step /= 10.0) {
    // Recenter until the box stops moving; optima on the cost boundary sit on
    // a slanted ridge that one box cannot follow.
    for (int pass = 0; pass < 200; ++pass) {
      const std::vector<double> center = best.q;
      Candidate c = best;
      for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t k = idx;
        for (std::size_t s = 0; s < S; ++s) {
          const int off = static_cast<int>(k % 21) - 10;
          k /= 21;
          c.q[s] = std::clamp(center[s] + off * step, 0.0, 1.0);
        }
        obj.evaluate(c, joint);
        ++evals;
        if (better(c, best)) best = c;
      }
      if (best.q == center) break;
    }
  }
  return best;
}

void canonicalize(const GridObjective& obj, Candidate& c) {
  const std::size_t S = obj.states();
  std::vector<int> row0(S), row1(S);
  for (std::size_t s = 0; s < S; ++s) {
    row0[s] = obj.x_of(c.map, 0, s);
    row1[s] = obj.x_of(c.map, 1, s);
  }
  if (row0 <= row1) return;
  unsigned swapped = 0;
  for (std::size_t s = 0; s < S; ++s) {
    swapped |= static_cast<unsigned>(row1[s]) << (2 * s);
    swapped |= static_cast<unsigned>(row0[s]) << (2 * s + 1);
  }
  c.map = swapped;
  for (double& q : c.q) q = 1.0 - q;
}

GpGridResult finish(const GridObjective& obj, Candidate best, std::size_t evals) {
  canonicalize(obj, best);
  GpGridResult r;
  r.capacity = std::max(best.value, 0.0);
  r.cost = best.cost;
  r.evaluations = evals;
  for (std::size_t s = 0; s < obj.states(); ++s) {
    r.aux.v_given_s.emplace_back(best.q[s]);
    r.aux.x_map.push_back({static_cast<std::uint8_t>(obj.x_of(best.map, 0, s)),
                           static_cast<std::uint8_t>(obj.x_of(best.map, 1, s))});
  }
  return r;
}

void check_grid_args(const StateChannelSpec& spec, double resolution) {
  spec.validate();
  if (!(resolution > 0.0 && resolution <= 0.5)) throw std::invalid_argument("grid resolution must lie in (0, 1/2]");
  if (spec.state_size() > 3) throw std::invalid_argument("grid search supports at most 3 states");
}

}  // namespace

GpGridResult gp_capacity_grid_serial(const StateChannelSpec& spec, double resolution) {
  check_grid_args(spec, resolution);
  const GridObjective obj(spec);
  const std::size_t S = obj.states();
  const double coarse = std::max(resolution, 0.01);
  const std::size_t points = static_cast<std::size_t>(std::llround(1.0 / coarse)) + 1;
  const std::size_t per_map = ipow(points, S);
  std::size_t evals = 0;
  std::vector<double> joint;

  Candidate overall;
  overall.q.assign(S, 0.0);
  for (unsigned map = 0; map < obj.map_count(); ++map) {
    Candidate best;
    best.q.assign(S, 0.0);
    Candidate c;
    c.map = map;
    c.q.assign(S, 0.0);
    for (std::size_t idx = 0; idx < per_map; ++idx) {
      decode_point(idx, points, coarse, c);
      obj.evaluate(c, joint);
      ++evals;
      if (better(c, best)) best = c;
    }
    if (!best.feasible) continue;
    best = refine(obj, best, coarse, resolution / 100.0, evals);
    if (better(best, overall)) overall = best;
  }
  if (!overall.feasible) throw std::runtime_error("no cost-feasible auxiliary found");
  return finish(obj, overall, evals);
}

GpGridResult gp_capacity_grid(const StateChannelSpec& spec, double resolution, int threads) {
  check_grid_args(spec, resolution);
  const GridObjective obj(spec);
  const std::size_t S = obj.states();
  const double coarse = std::max(resolution, 0.01);
  const std::size_t points = static_cast<std::size_t>(std::llround(1.0 / coarse)) + 1;
  const std::size_t per_map = ipow(points, S);
  const unsigned maps = obj.map_count();
  const std::size_t total = per_map * maps;
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();

  std::vector<std::vector<Candidate>> local(nthreads, std::vector<Candidate>(maps));
  std::vector<std::size_t> local_evals(nthreads, 0);

#pragma omp parallel num_threads(nthreads)
  {
    const int tid = omp_get_thread_num();
    auto& best = local[tid];
    for (auto& b : best) b.q.assign(S, 0.0);
    std::vector<double> joint;
    Candidate c;
    c.q.assign(S, 0.0);
#pragma omp for schedule(static)
    for (std::size_t flat = 0; flat < total; ++flat) {
      c.map = static_cast<unsigned>(flat / per_map);
      decode_point(flat % per_map, points, coarse, c);
      obj.evaluate(c, joint);
      ++local_evals[tid];
      if (better(c, best[c.map])) best[c.map] = c;
    }
  }

  std::vector<Candidate> per_map_best(maps);
  std::size_t evals = 0;
  for (int t = 0; t < nthreads; ++t) {
    evals += local_evals[t];
    for (unsigned m = 0; m < maps; ++m)
      if (t == 0 || better(local[t][m], per_map_best[m])) per_map_best[m] = local[t][m];
  }

  std::vector<std::size_t> refine_evals(maps, 0);
#pragma omp parallel for num_threads(nthreads) schedule(dynamic, 1)
  for (unsigned m = 0; m < maps; ++m)
    if (per_map_best[m].feasible)
      per_map_best[m] = refine(obj, per_map_best[m], coarse, resolution / 100.0, refine_evals[m]);

  Candidate overall;
  overall.q.assign(S, 0.0);
  for (unsigned m = 0; m < maps; ++m) {
    evals += refine_evals[m];
    if (better(per_map_best[m], overall)) overall = per_map_best[m];
  }
  if (!overall.feasible) throw std::runtime_error("no cost-feasible auxiliary found");
  return finish(obj, overall, evals);
}

BinaryInputChannel degradation_witness(double alpha, double beta, double budget) {
  require_probability(alpha, "alpha");
  const double eps = example2_epsilon(beta, budget);
  const double denom = star_convolve(eps, alpha) * (1.0 - beta) + beta;
  const double stuck = denom > 0.0 ? beta / denom : 0.0;
  return BinaryInputChannel(FinitePmf({1.0, 0.0}), FinitePmf({1.0 - stuck, stuck}));
}

namespace {

std::uint32_t sample_categorical(const FinitePmf& pmf, RngStream& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < pmf.size(); ++k) {
    acc += pmf[k];
    if (u < acc) return static_cast<std::uint32_t>(k);
  }
  // Skip trailing zero-probability symbols that round-off could select.
  std::size_t last = pmf.size() - 1;
  while (last > 0 && pmf[last] == 0.0) --last;
  return static_cast<std::uint32_t>(last);
}

}  // namespace

std::vector<std::uint32_t> sample_states(const StateChannelSpec& spec, std::size_t n, RngStream& rng) {
  std::vector<std::uint32_t> s(n, 0);
  if (spec.stateless()) return s;
  for (auto& si : s) si = sample_categorical(spec.state_pmf, rng);
  return s;
}

std::vector<std::uint32_t> simulate_channel(const StateChannelSpec& spec, const BitVec& x,
                                            const std::vector<std::uint32_t>& s, RngStream& rng) {
  if (x.size() != s.size()) throw std::invalid_argument("codeword and state lengths differ");
  std::vector<std::uint32_t> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (s[i] >= spec.state_size()) throw std::invalid_argument("state symbol out of range");
    y[i] = sample_categorical(spec.output_pmf(x[i] & 1, s[i]), rng);
  }
  return y;
}

namespace {

double take(const ParamMap& params, const std::string& key, std::vector<std::string>& used) {
  auto it = params.find(key);
  if (it == params.end()) throw std::invalid_argument("missing model parameter '" + key + "'");
  used.push_back(key);
  return it->second;
}

void reject_unknown(const ParamMap& params, const std::vector<std::string>& used, const std::string& id) {
  for (const auto& [k, v] : params)
    if (std::find(used.begin(), used.end(), k) == used.end())
      throw std::invalid_argument("unknown parameter '" + k + "' for model '" + id + "'");
}

}  // namespace

StateChannelSpec make_model(const std::string& id, const ParamMap& params) {
  std::vector<std::string> used;
  StateChannelSpec spec;
  if (id == "example1") {
    spec = make_example1(take(params, "alpha0", used), take(params, "alpha1", used), take(params, "beta", used));
  } else if (id == "example2") {
    spec = make_example2(take(params, "alpha", used), take(params, "beta", used), take(params, "B", used));
  } else if (id == "bsc") {
    const double alpha = take(params, "alpha", used);
    const double eps = params.count("epsilon") ? take(params, "epsilon", used) : take(params, "B", used);
    spec = make_bsc(alpha, eps);
  } else if (id == "basym") {
    spec = make_basym(take(params, "p01", used), take(params, "p10", used));
  } else {
    throw std::invalid_argument("unknown model id '" + id + "'");
  }
  reject_unknown(params, used, id);
  return spec;
}

StateChannelSpec with_optimal_aux(StateChannelSpec spec, double resolution, int threads) {
  if (!spec.aux) spec.aux = gp_capacity_grid(spec, resolution, threads).aux;
  return spec;
}

std::optional<double> closed_form_capacity(const StateChannelSpec& spec) {
  if (spec.model_id == "example2")
    return capacity_example2(spec.params.at("alpha"), spec.params.at("beta"), spec.params.at("B"));
  if (spec.model_id == "bsc") return capacity_bsc_cost(spec.params.at("alpha"), spec.params.at("epsilon"));
  return std::nullopt;
}

}  // namespace polarmc
