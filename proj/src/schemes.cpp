#include "polarmc/schemes.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace polarmc {

namespace {

void require_size(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + " has length " + std::to_string(got) + ", expected " +
                                std::to_string(want));
}

BitVec gather(const BitVec& u, const std::vector<std::size_t>& idx) {
  BitVec out(idx.size());
  for (std::size_t t = 0; t < idx.size(); ++t) out[t] = u[idx[t]];
  return out;
}

BitVec random_bits(std::size_t count, RngStream& rng) {
  BitVec b(count);
  for (auto& x : b) x = rng.bit();
  return b;
}

const CodeProfile& checked_profile(const CodeProfile& profile, const StateChannelSpec& spec) {
  spec.validate();
  spec.require_aux();
  profile.validate();
  return profile;
}

}  // namespace

BlockCodec::BlockCodec(const CodeProfile& profile, const StateChannelSpec& spec, bool chained)
    : profile_(&checked_profile(profile, spec)),
      spec_(&spec),
      source_ctx_(profile.n, spec.source_base()),
      channel_ctx_(profile.n, spec.channel_base()),
      source_(source_ctx_),
      channel_(channel_ctx_) {
  const std::size_t n = profile.n;
  if (chained) {
    if (profile.relay.size() != profile.side.size())
      throw std::invalid_argument("chaining needs a relay set as large as the side set");
    relay_ = profile.relay;
    std::set_difference(profile.message.begin(), profile.message.end(), relay_.begin(), relay_.end(),
                        std::back_inserter(payload_));
  } else {
    payload_ = profile.message;
  }
  require_size(profile.frozen_bits.size(), profile.frozen.size(), "frozen_bits");

  encode_policy_ = ScPolicy::uniform(n, Rule::kRandomRound);
  decode_policy_ = ScPolicy::uniform(n, Rule::kFixed);
  for (auto i : profile.message) {
    encode_policy_.rules[i] = Rule::kFixed;
    decode_policy_.rules[i] = Rule::kArgmax;
  }
  for (auto i : profile.random_low) decode_policy_.rules[i] = Rule::kArgmax;
  for (std::size_t t = 0; t < profile.frozen.size(); ++t) {
    const auto i = profile.frozen[t];
    encode_policy_.rules[i] = Rule::kFixed;
    encode_policy_.fixed[i] = profile.frozen_bits[t];
    decode_policy_.fixed[i] = profile.frozen_bits[t];
  }
}

EncodeResult BlockCodec::encode(const BitVec& message, const std::vector<std::uint32_t>& s, RngStream& rng,
                                const BitVec* relay_bits) {
  require_size(message.size(), payload_.size(), "message");
  require_size(s.size(), n(), "state vector");
  for (std::size_t t = 0; t < payload_.size(); ++t) encode_policy_.fixed[payload_[t]] = message[t] & 1;
  if (!relay_.empty()) {
    if (!relay_bits) throw std::invalid_argument("chained encode needs relay bits");
    require_size(relay_bits->size(), relay_.size(), "relay bits");
    for (std::size_t t = 0; t < relay_.size(); ++t) encode_policy_.fixed[relay_[t]] = (*relay_bits)[t] & 1;
  }

  PassResult pr = source_.pass(Observation{s}, encode_policy_, &rng, ZeroMode::kNeutral);
  EncodeResult r;
  r.x.resize(n());
  for (std::size_t i = 0; i < n(); ++i) r.x[i] = spec_->x_of(pr.v[i], s[i]);
  r.side.bits = gather(pr.u, profile_->side);
  r.conflict = pr.conflict;
  r.u = std::move(pr.u);
  r.v = std::move(pr.v);
  return r;
}

DecodeResult BlockCodec::decode(const std::vector<std::uint32_t>& y, const SideChannelPayload& side) {
  require_size(y.size(), n(), "channel output");
  require_size(side.bits.size(), profile_->side.size(), "side payload");
  for (std::size_t t = 0; t < profile_->side.size(); ++t) decode_policy_.fixed[profile_->side[t]] = side.bits[t] & 1;

  PassResult pr = channel_.pass(Observation{y}, decode_policy_, nullptr, ZeroMode::kNeutral);
  DecodeResult d;
  d.message = gather(pr.u, payload_);
  d.status = pr.conflict ? DecodeStatus::kZeroProbability : DecodeStatus::kOk;
  d.u = std::move(pr.u);
  return d;
}

BitVec BlockCodec::relay_bits(const BitVec& u) const { return gather(u, relay_); }

EncodeResult c1_encode(const CodeProfile& profile, const AsymmetricChannel& channel, const BitVec& message,
                       RngStream& rng) {
  const StateChannelSpec spec = degenerate_state_spec(channel);
  BlockCodec codec(profile, spec);
  return codec.encode(message, std::vector<std::uint32_t>(profile.n, 0), rng);
}

DecodeResult c1_decode(const CodeProfile& profile, const AsymmetricChannel& channel,
                       const std::vector<std::uint32_t>& y, const SideChannelPayload& side) {
  const StateChannelSpec spec = degenerate_state_spec(channel);
  BlockCodec codec(profile, spec);
  return codec.decode(y, side);
}

EncodeResult c2_encode(const CodeProfile& profile, const StateChannelSpec& spec, const BitVec& message,
                       const std::vector<std::uint32_t>& s, RngStream& rng) {
  BlockCodec codec(profile, spec);
  return codec.encode(message, s, rng);
}

DecodeResult c2_decode(const CodeProfile& profile, const StateChannelSpec& spec,
                       const std::vector<std::uint32_t>& y, const SideChannelPayload& side) {
  BlockCodec codec(profile, spec);
  return codec.decode(y, side);
}

// ---------------------------------------------------------------------------
// Chaining

ChainProfile::ChainProfile(std::size_t k_blocks, CodeProfile p)
    : k(k_blocks), profile(std::move(p)), u0(profile.n, 0) {
  if (profile.relay.empty() && !profile.side.empty()) profile.relay = choose_relay_set(profile);
  validate();
}

void ChainProfile::validate() const {
  if (k < 1) throw std::invalid_argument("chain length k must be at least 1");
  profile.validate();
  if (profile.relay.size() != profile.side.size())
    throw std::invalid_argument("side set larger than message set; cannot chain");
  require_size(u0.size(), profile.n, "u0");
}

namespace {

ChainEncodeResult chain_encode(BlockCodec& codec, const ChainProfile& chain, const std::vector<BitVec>& messages,
                               const std::vector<std::vector<std::uint32_t>>& states, RngStream& rng) {
  require_size(messages.size(), chain.k, "message list");
  require_size(states.size(), chain.k, "state list");
  ChainEncodeResult out;
  BitVec carried = gather(chain.u0, chain.profile.side);
  for (std::size_t j = 0; j < chain.k; ++j) {
    EncodeResult r = codec.encode(messages[j], states[j], rng, &carried);
    r.side.block_index = j;
    carried = r.side.bits;
    out.conflict = out.conflict || r.conflict;
    out.blocks.push_back(std::move(r));
  }
  out.final_side = out.blocks.back().side;
  return out;
}

ChainDecodeResult chain_decode(BlockCodec& codec, const ChainProfile& chain,
                               const std::vector<std::vector<std::uint32_t>>& outputs,
                               const SideChannelPayload& final_side) {
  require_size(outputs.size(), chain.k, "output list");
  ChainDecodeResult out;
  out.messages.resize(chain.k);
  out.status.resize(chain.k);
  SideChannelPayload side = final_side;
  for (std::size_t j = chain.k; j-- > 0;) {
    DecodeResult d = codec.decode(outputs[j], side);
    out.messages[j] = std::move(d.message);
    out.status[j] = d.status;
    side.bits = codec.relay_bits(d.u);
    side.block_index = j == 0 ? 0 : j - 1;
  }
  return out;
}

}  // namespace

ChainEncodeResult c3_encode(const ChainProfile& chain, const StateChannelSpec& spec,
                            const std::vector<BitVec>& messages,
                            const std::vector<std::vector<std::uint32_t>>& states, RngStream& rng) {
  chain.validate();
  BlockCodec codec(chain.profile, spec, true);
  return chain_encode(codec, chain, messages, states, rng);
}

ChainDecodeResult c3_decode(const ChainProfile& chain, const StateChannelSpec& spec,
                            const std::vector<std::vector<std::uint32_t>>& outputs,
                            const SideChannelPayload& final_side) {
  chain.validate();
  BlockCodec codec(chain.profile, spec, true);
  return chain_decode(codec, chain, outputs, final_side);
}

double effective_rate(const CodeProfile& profile) {
  return (static_cast<double>(profile.message.size()) - static_cast<double>(profile.side.size())) /
         static_cast<double>(profile.n);
}

double effective_rate(const ChainProfile& chain) {
  const double k = static_cast<double>(chain.k);
  const double m = static_cast<double>(chain.profile.message.size());
  const double sigma = static_cast<double>(chain.profile.side.size());
  return (k * (m - sigma) - sigma) / (k * static_cast<double>(chain.profile.n));
}

// ---------------------------------------------------------------------------
// Trials

std::size_t wom_violations(const StateChannelSpec& spec, const std::vector<std::uint32_t>& s, const BitVec& x) {
  if (spec.stateless()) return 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) count += (s[i] != 0 && x[i] != 0);
  return count;
}

double block_cost(const StateChannelSpec& spec, const BitVec& x) {
  double c = 0.0;
  for (auto b : x) c += spec.cost[b & 1];
  return c;
}

BlockOutcome simulate_block(BlockCodec& codec, const StateChannelSpec& spec, RngStream& rng) {
  BlockOutcome o;
  o.message = random_bits(codec.message_size(), rng);
  o.state = sample_states(spec, codec.n(), rng);
  EncodeResult e = codec.encode(o.message, o.state, rng);
  o.y = simulate_channel(spec, e.x, o.state, rng);
  DecodeResult d = codec.decode(o.y, e.side);
  o.estimate = std::move(d.message);
  o.status = d.status;
  o.encoder_conflict = e.conflict;
  o.cost = block_cost(spec, e.x);
  o.wom_violations = wom_violations(spec, o.state, e.x);
  o.success = o.estimate == o.message;
  o.u = std::move(e.u);
  o.v = std::move(e.v);
  o.x = std::move(e.x);
  o.side_payload = std::move(e.side);
  return o;
}

namespace {

struct TrialRecord {
  std::size_t block_errors = 0;
  std::size_t decode_failures = 0;
  std::size_t encoder_conflicts = 0;
  std::size_t wom_violations = 0;
  std::vector<double> cell_costs;  // per block, cost / n
};

struct TrialWorker {
  TrialWorker(const CodeProfile& profile, const StateChannelSpec& spec, const TrialSetup& setup)
      : spec(spec),
        point_spec(setup.scheme == Scheme::kPointToPoint
                       ? std::optional<StateChannelSpec>(degenerate_state_spec(as_asymmetric(spec), spec.model_id))
                       : std::nullopt),
        chain(setup.scheme == Scheme::kChained ? std::optional<ChainProfile>(ChainProfile(setup.k_blocks, profile))
                                               : std::nullopt),
        codec(chain ? chain->profile : profile, point_spec ? *point_spec : spec, chain.has_value()),
        setup(setup) {}

  TrialRecord run(std::size_t t) {
    const StateChannelSpec& active = point_spec ? *point_spec : spec;
    const double n = static_cast<double>(codec.n());
    RngStream rng(setup.seed, setup.stream, t);
    TrialRecord rec;
    if (!chain) {
      const BlockOutcome o = simulate_block(codec, active, rng);
      rec.block_errors = !o.success;
      rec.decode_failures = o.status != DecodeStatus::kOk;
      rec.encoder_conflicts = o.encoder_conflict;
      rec.wom_violations = o.wom_violations;
      rec.cell_costs.push_back(o.cost / n);
      return rec;
    }

    const std::size_t k = chain->k;
    std::vector<BitVec> messages(k);
    std::vector<std::vector<std::uint32_t>> states(k), outputs(k);
    for (std::size_t j = 0; j < k; ++j) {
      messages[j] = random_bits(codec.message_size(), rng);
      states[j] = sample_states(active, codec.n(), rng);
    }
    const ChainEncodeResult enc = chain_encode(codec, *chain, messages, states, rng);
    for (std::size_t j = 0; j < k; ++j) {
      outputs[j] = simulate_channel(active, enc.blocks[j].x, states[j], rng);
      rec.encoder_conflicts += enc.blocks[j].conflict;
      rec.wom_violations += wom_violations(active, states[j], enc.blocks[j].x);
      rec.cell_costs.push_back(block_cost(active, enc.blocks[j].x) / n);
    }
    const ChainDecodeResult dec = chain_decode(codec, *chain, outputs, enc.final_side);
    for (std::size_t j = 0; j < k; ++j) {
      rec.block_errors += dec.messages[j] != messages[j];
      rec.decode_failures += dec.status[j] != DecodeStatus::kOk;
    }
    return rec;
  }

  const StateChannelSpec& spec;
  std::optional<StateChannelSpec> point_spec;
  std::optional<ChainProfile> chain;
  BlockCodec codec;
  TrialSetup setup;
};

void check_setup(const TrialSetup& setup) {
  if (setup.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (setup.scheme == Scheme::kChained && setup.k_blocks < 1)
    throw std::invalid_argument("chain length k must be at least 1");
}

TrialSummary reduce(const std::vector<TrialRecord>& records) {
  TrialSummary s;
  s.trials = records.size();
  double sum = 0.0;
  for (const auto& r : records) {
    s.blocks += r.cell_costs.size();
    s.block_errors += r.block_errors;
    s.failed_trials += r.block_errors > 0;
    s.decode_failures += r.decode_failures;
    s.encoder_conflicts += r.encoder_conflicts;
    s.wom_violations += r.wom_violations;
    for (double c : r.cell_costs) sum += c;
  }
  s.cost_mean = sum / static_cast<double>(s.blocks);
  if (s.blocks > 1) {
    double ss = 0.0;
    for (const auto& r : records)
      for (double c : r.cell_costs) ss += (c - s.cost_mean) * (c - s.cost_mean);
    s.cost_sd = std::sqrt(ss / static_cast<double>(s.blocks - 1));
  }
  return s;
}

}  // namespace

TrialSummary run_trials_serial(const CodeProfile& profile, const StateChannelSpec& spec,
                               const TrialSetup& setup) {
  check_setup(setup);
  TrialWorker worker(profile, spec, setup);
  std::vector<TrialRecord> records(setup.trials);
  for (std::size_t t = 0; t < setup.trials; ++t) records[t] = worker.run(t);
  return reduce(records);
}

TrialSummary run_trials(const CodeProfile& profile, const StateChannelSpec& spec, const TrialSetup& setup) {
  check_setup(setup);
  const int nthreads = setup.threads > 0 ? setup.threads : omp_get_max_threads();
  std::vector<TrialRecord> records(setup.trials);
  { TrialWorker probe(profile, spec, setup); }
  std::exception_ptr error;

#pragma omp parallel num_threads(nthreads)
  {
    TrialWorker worker(profile, spec, setup);
#pragma omp for schedule(dynamic, 4)
    for (std::size_t t = 0; t < setup.trials; ++t) {
      try {
        records[t] = worker.run(t);
      } catch (...) {
#pragma omp critical(polarmc_trial_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);
  return reduce(records);
}

}  // namespace polarmc
