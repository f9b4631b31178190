#include "polarmc/sc_engine.hpp"

#include <string>

namespace polarmc {

ScContext::ScContext(std::size_t n, JointBase base)
    : n_(n), log2n_(checked_log2(n)), bases_{std::move(base)} {}

ScContext::ScContext(std::vector<JointBase> per_position)
    : n_(per_position.size()), log2n_(checked_log2(per_position.size())),
      bases_(std::move(per_position)) {}

ScPolicy ScPolicy::uniform(std::size_t n, Rule rule) {
  return {std::vector<Rule>(n, rule), BitVec(n, 0)};
}

ScPolicy ScPolicy::fixed_to(const BitVec& u) {
  return {std::vector<Rule>(u.size(), Rule::kFixed), u};
}

ScEngine::ScEngine(const ScContext& ctx) : ctx_(&ctx) {
  const int m = ctx.log2n();
  probs_.resize(m + 1);
  partial_.resize(m + 1);
  for (int level = 0; level <= m; ++level) {
    probs_[level].resize(std::size_t{1} << level);
    partial_[level].resize(std::size_t{1} << level);
  }
}

void ScEngine::normalize(Pair& p) {
  const double s = p.p0 + p.p1;
  if (s > 0.0) {
    const double inv = 1.0 / s;
    p.p0 *= inv;
    p.p1 *= inv;
    return;
  }
  if (mode_ == ZeroMode::kThrow)
    throw ZeroProbabilityError("observation/prefix has probability zero under the model");
  conflict_ = true;
  p = {0.5, 0.5};
}

void ScEngine::load(const Observation& obs) {
  const std::size_t n = ctx_->n();
  if (obs.symbols.size() != n)
    throw std::invalid_argument("observation length " + std::to_string(obs.symbols.size()) +
                                " differs from block length " + std::to_string(n));
  auto& top = probs_.back();
  for (std::size_t j = 0; j < n; ++j) {
    const JointBase& b = ctx_->base(j);
    const std::uint32_t o = obs.symbols[j];
    if (o >= b.observation_size())
      throw std::invalid_argument("observation symbol out of range at position " + std::to_string(j));
    top[j] = {b.weight(0, o), b.weight(1, o)};
    normalize(top[j]);
  }
}

std::uint8_t ScEngine::decide(double p0, double p1) {
  // Leaf pairs are not normalized; decisions compare against their sum.
  double s = p0 + p1;
  if (!(s > 0.0)) {
    Pair p{p0, p1};
    normalize(p);
    p0 = p.p0;
    p1 = p.p1;
    s = 1.0;
  }
  const std::size_t i = next_++;
  if (i == stop_) {
    stop_p1_ = p1 / s;
    stopped_ = true;
    return 0;
  }
  if (record_) (*record_)[i] = p1 / s;

  std::uint8_t bit = 0;
  switch (policy_->rules[i]) {
    case Rule::kRandomRound:
      bit = rng_->uniform01() * s < p1 ? 1 : 0;
      break;
    case Rule::kArgmax:
      bit = p1 > p0 ? 1 : 0;
      break;
    case Rule::kFixed:
      bit = policy_->fixed[i] & 1;
      if ((bit ? p1 : p0) <= 0.0) {
        if (mode_ == ZeroMode::kThrow)
          throw ZeroProbabilityError("fixed bit at index " + std::to_string(i) +
                                     " has probability zero");
        conflict_ = true;
      }
      break;
  }
  (*u_)[i] = bit;
  return bit;
}

// Two leaves under the pair (a, b); out receives the level-1 partial sums.
void ScEngine::leaves2(Pair a, Pair b, std::uint8_t* out) {
  const unsigned w = decide(a.p0 * b.p0 + a.p1 * b.p1, a.p0 * b.p1 + a.p1 * b.p0);
  if (stopped_) return;
  const double av[2] = {a.p0, a.p1};
  const unsigned t = decide(av[w] * b.p0, av[w ^ 1u] * b.p1);
  if (stopped_) return;
  out[0] = static_cast<std::uint8_t>(w ^ t);
  out[1] = static_cast<std::uint8_t>(t);
}

// Four leaves under a level-2 node, kept in registers.
void ScEngine::leaves4(const Pair* a, std::uint8_t* out) {
  auto upper = [](Pair x, Pair y) {
    return Pair{x.p0 * y.p0 + x.p1 * y.p1, x.p0 * y.p1 + x.p1 * y.p0};
  };
  std::uint8_t hi[2];
  leaves2(upper(a[0], a[2]), upper(a[1], a[3]), hi);
  if (stopped_) return;
  auto lower = [this](Pair x, Pair y, unsigned w) {
    const double xv[2] = {x.p0, x.p1};
    Pair c{xv[w & 1u] * y.p0, xv[(w & 1u) ^ 1u] * y.p1};
    normalize(c);
    return c;
  };
  std::uint8_t lo[2];
  leaves2(lower(a[0], a[2], hi[0]), lower(a[1], a[3], hi[1]), lo);
  if (stopped_) return;
  out[0] = static_cast<std::uint8_t>(hi[0] ^ lo[0]);
  out[1] = static_cast<std::uint8_t>(hi[1] ^ lo[1]);
  out[2] = lo[0];
  out[3] = lo[1];
}

void ScEngine::descend(int level) {
  if (level == 0) {
    const Pair p = probs_[0][0];
    partial_[0][0] = decide(p.p0, p.p1);
    return;
  }
  if (level == 1) {
    leaves2(probs_[1][0], probs_[1][1], partial_[1].data());
    return;
  }
  if (level == 2) {
    leaves4(probs_[2].data(), partial_[2].data());
    return;
  }
  const std::size_t h = std::size_t{1} << (level - 1);
  const Pair* parent = probs_[level].data();
  Pair* child = probs_[level - 1].data();

  // Upper half: W_j = X_j xor X_{j+h}. Normalized inputs give a normalized
  // output, so no rescaling here.
  for (std::size_t j = 0; j < h; ++j) {
    const Pair a = parent[j];
    const Pair b = parent[j + h];
    child[j] = {a.p0 * b.p0 + a.p1 * b.p1, a.p0 * b.p1 + a.p1 * b.p0};
  }
  descend(level - 1);
  if (stopped_) return;

  std::uint8_t* out = partial_[level].data();
  const std::uint8_t* sub = partial_[level - 1].data();
  for (std::size_t j = 0; j < h; ++j) out[j] = sub[j];

  // Lower half: X_{j+h} = t, X_j = W_j xor t.
  for (std::size_t j = 0; j < h; ++j) {
    const Pair a = parent[j];
    const Pair b = parent[j + h];
    const double av[2] = {a.p0, a.p1};
    const unsigned w = out[j] & 1u;
    child[j] = {av[w] * b.p0, av[w ^ 1u] * b.p1};
    normalize(child[j]);
  }
  descend(level - 1);
  if (stopped_) return;

  for (std::size_t j = 0; j < h; ++j) {
    out[j] ^= sub[j];
    out[j + h] = sub[j];
  }
}

double ScEngine::conditional(const Observation& obs, std::span<const std::uint8_t> prefix) {
  const std::size_t n = ctx_->n();
  if (prefix.size() >= n)
    throw std::invalid_argument("prefix length must be below the block length");
  ScPolicy policy = ScPolicy::uniform(n, Rule::kFixed);
  for (std::size_t i = 0; i < prefix.size(); ++i) policy.fixed[i] = prefix[i] & 1;

  BitVec u(n, 0);
  policy_ = &policy;
  rng_ = nullptr;
  mode_ = ZeroMode::kThrow;
  conflict_ = false;
  next_ = 0;
  stop_ = prefix.size();
  stopped_ = false;
  u_ = &u;
  record_ = nullptr;
  load(obs);
  descend(ctx_->log2n());
  return stop_p1_;
}

PassResult ScEngine::pass(const Observation& obs, const ScPolicy& policy, RngStream* rng,
                          ZeroMode mode, bool record_p1) {
  const std::size_t n = ctx_->n();
  if (policy.rules.size() != n || policy.fixed.size() != n)
    throw std::invalid_argument("policy size differs from block length");
  if (!rng)
    for (Rule r : policy.rules)
      if (r == Rule::kRandomRound) throw std::invalid_argument("random rounding needs an RNG stream");

  PassResult result;
  result.u.assign(n, 0);
  if (record_p1) result.p1.assign(n, 0.0);

  policy_ = &policy;
  rng_ = rng;
  mode_ = mode;
  conflict_ = false;
  next_ = 0;
  stop_ = n;
  stopped_ = false;
  u_ = &result.u;
  record_ = record_p1 ? &result.p1 : nullptr;
  load(obs);
  descend(ctx_->log2n());

  result.v = partial_.back();
  result.conflict = conflict_;
  return result;
}

double sc_conditional(const ScContext& ctx, const Observation& obs,
                      std::span<const std::uint8_t> prefix) {
  ScEngine engine(ctx);
  return engine.conditional(obs, prefix);
}

PassResult sc_pass(const ScContext& ctx, const Observation& obs, const ScPolicy& policy,
                   RngStream* rng, ZeroMode mode) {
  ScEngine engine(ctx);
  return engine.pass(obs, policy, rng, mode);
}

namespace {

constexpr std::size_t kBruteForceMaxN = 16;

// Row masks of G_n: u = v G_n is the XOR of rows[i] over set bits v_i.
std::vector<std::uint32_t> transform_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    BitVec e(n, 0);
    e[i] = 1;
    const BitVec r = polar_transform_dense(e);
    for (std::size_t c = 0; c < n; ++c)
      if (r[c]) rows[i] |= std::uint32_t{1} << c;
  }
  return rows;
}

template <class Visit>
void enumerate_inputs(const ScContext& ctx, const Observation& obs, Visit&& visit) {
  const std::size_t n = ctx.n();
  if (n > kBruteForceMaxN) throw std::invalid_argument("brute-force oracle limited to n <= 16");
  if (obs.symbols.size() != n) throw std::invalid_argument("observation length mismatch");
  for (std::size_t j = 0; j < n; ++j)
    if (obs.symbols[j] >= ctx.base(j).observation_size())
      throw std::invalid_argument("observation symbol out of range");
  const auto rows = transform_rows(n);
  for (std::uint32_t v = 0; v < (std::uint32_t{1} << n); ++v) {
    double w = 1.0;
    std::uint32_t u = 0;
    for (std::size_t j = 0; j < n; ++j) {
      const int bit = (v >> j) & 1;
      w *= ctx.base(j).weight(bit, obs.symbols[j]);
      if (bit) u ^= rows[j];
    }
    visit(u, w);
  }
}

}  // namespace

double sc_bruteforce(const ScContext& ctx, const Observation& obs,
                     std::span<const std::uint8_t> prefix) {
  const std::size_t i = prefix.size();
  if (i >= ctx.n()) throw std::invalid_argument("prefix length must be below the block length");
  std::uint32_t want = 0;
  for (std::size_t j = 0; j < i; ++j)
    if (prefix[j] & 1) want |= std::uint32_t{1} << j;
  const std::uint32_t mask = (std::uint32_t{1} << i) - 1;

  double total[2] = {0.0, 0.0};
  enumerate_inputs(ctx, obs, [&](std::uint32_t u, double w) {
    if ((u & mask) == want) total[(u >> i) & 1] += w;
  });
  const double s = total[0] + total[1];
  if (!(s > 0.0)) throw ZeroProbabilityError("prefix has probability zero under the model");
  return total[1] / s;
}

double sc_bruteforce_joint(const ScContext& ctx, const Observation& obs, const BitVec& u) {
  if (u.size() != ctx.n()) throw std::invalid_argument("u length mismatch");
  std::uint32_t want = 0;
  for (std::size_t j = 0; j < u.size(); ++j)
    if (u[j] & 1) want |= std::uint32_t{1} << j;
  double match = 0.0, total = 0.0;
  enumerate_inputs(ctx, obs, [&](std::uint32_t cand, double w) {
    total += w;
    if (cand == want) match += w;
  });
  if (!(total > 0.0)) throw ZeroProbabilityError("observation has probability zero under the model");
  return match / total;
}

}  // namespace polarmc
