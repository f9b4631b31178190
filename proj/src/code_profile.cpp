#include "polarmc/code_profile.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "polarmc/sc_engine.hpp"

namespace polarmc {

std::vector<IndexRole> CodeProfile::roles() const {
  std::vector<IndexRole> r(n, IndexRole::kMessage);
  for (auto i : frozen) r[i] = IndexRole::kFrozen;
  for (auto i : random_low) r[i] = IndexRole::kRandomLow;
  for (auto i : side) r[i] = IndexRole::kSide;
  return r;
}

void CodeProfile::validate() const {
  if (!is_power_of_two(n)) throw ProfileError("profile block length is not a power of 2");
  if (z.n != n || z.z_source.size() != n || z.z_channel.size() != n)
    throw ProfileError("Z profile length differs from block length");
  for (std::size_t i = 0; i < n; ++i)
    if (!(z.z_source[i] >= 0.0 && z.z_source[i] <= 1.0) || !(z.z_channel[i] >= 0.0 && z.z_channel[i] <= 1.0))
      throw ProfileError("Z estimate outside [0,1] at index " + std::to_string(i));
  if (z.sample_count < 1) throw ProfileError("sample_count must be at least 1");

  std::vector<int> seen(n, 0);
  for (const auto* set : {&message, &frozen, &random_low, &side}) {
    if (!std::is_sorted(set->begin(), set->end())) throw ProfileError("index set not sorted ascending");
    for (auto i : *set) {
      if (i >= n) throw ProfileError("index " + std::to_string(i) + " out of range");
      if (seen[i]++) throw ProfileError("index " + std::to_string(i) + " appears in more than one set");
    }
  }
  if (std::count(seen.begin(), seen.end(), 0) != 0) throw ProfileError("index sets do not cover [n]");
  if (frozen_bits.size() != frozen.size()) throw ProfileError("frozen_bits length differs from frozen set size");
  for (auto b : frozen_bits)
    if (b > 1) throw ProfileError("frozen bits must be 0/1");

  if (!std::is_sorted(relay.begin(), relay.end())) throw ProfileError("relay set not sorted ascending");
  if (!relay.empty() && relay.size() != side.size()) throw ProfileError("relay set size differs from side set size");
  for (auto i : relay)
    if (!std::binary_search(message.begin(), message.end(), i)) throw ProfileError("relay index outside message set");
}

// ---------------------------------------------------------------------------
// Estimation

namespace {

constexpr double kFixedScale = 1099511627776.0;  // 2^40
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 22;

struct SampleWorker {
  SampleWorker(const StateChannelSpec& spec, std::size_t n)
      : spec(spec),
        source_ctx(n, spec.source_base()),
        channel_ctx(n, spec.channel_base()),
        source(source_ctx),
        channel(channel_ctx) {}

  // Adds sample `t`'s fixed-point contributions into the accumulators.
  void run(std::uint64_t seed, std::uint64_t t, std::vector<std::int64_t>& acc_source,
           std::vector<std::int64_t>& acc_channel) {
    const std::size_t n = source_ctx.n();
    const AuxFunctions& aux = *spec.aux;
    RngStream rng(seed, StreamTag::kEstimate, t);
    const auto s = sample_states(spec, n, rng);
    BitVec v(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = rng.bernoulli(aux.v_given_s[s[i]].p1()) ? 1 : 0;
      x[i] = aux.x_map[s[i]][v[i]];
    }
    const auto y = simulate_channel(spec, x, s, rng);
    const ScPolicy genie = ScPolicy::fixed_to(polar_transform(v));

    const PassResult rs = source.pass(Observation{s}, genie, nullptr, ZeroMode::kThrow, true);
    const PassResult rc = channel.pass(Observation{y}, genie, nullptr, ZeroMode::kThrow, true);
    for (std::size_t i = 0; i < n; ++i) {
      acc_source[i] += std::llround(2.0 * std::sqrt(rs.p1[i] * (1.0 - rs.p1[i])) * kFixedScale);
      acc_channel[i] += std::llround(2.0 * std::sqrt(rc.p1[i] * (1.0 - rc.p1[i])) * kFixedScale);
    }
  }

  const StateChannelSpec& spec;
  ScContext source_ctx;
  ScContext channel_ctx;
  ScEngine source;
  ScEngine channel;
};

void check_estimate_args(const StateChannelSpec& spec, std::size_t n, std::uint64_t sample_count) {
  checked_log2(n);
  spec.validate();
  spec.require_aux();
  if (sample_count < 1 || sample_count > kMaxSamples)
    throw std::invalid_argument("sample_count must lie in [1, 2^22]");
}

ZProfile finish_estimate(std::size_t n, std::uint64_t sample_count, std::uint64_t seed,
                         const std::vector<std::int64_t>& acc_source,
                         const std::vector<std::int64_t>& acc_channel) {
  ZProfile zp;
  zp.n = n;
  zp.sample_count = sample_count;
  zp.seed = seed;
  zp.z_source.resize(n);
  zp.z_channel.resize(n);
  const double denom = kFixedScale * static_cast<double>(sample_count);
  for (std::size_t i = 0; i < n; ++i) {
    zp.z_source[i] = std::clamp(static_cast<double>(acc_source[i]) / denom, 0.0, 1.0);
    zp.z_channel[i] = std::clamp(static_cast<double>(acc_channel[i]) / denom, 0.0, 1.0);
  }
  return zp;
}

}  // namespace

ZProfile estimate_profile_serial(const StateChannelSpec& spec, std::size_t n,
                                 std::uint64_t sample_count, std::uint64_t seed) {
  check_estimate_args(spec, n, sample_count);
  std::vector<std::int64_t> acc_source(n, 0), acc_channel(n, 0);
  SampleWorker worker(spec, n);
  for (std::uint64_t t = 0; t < sample_count; ++t) worker.run(seed, t, acc_source, acc_channel);
  return finish_estimate(n, sample_count, seed, acc_source, acc_channel);
}

ZProfile estimate_profile(const StateChannelSpec& spec, std::size_t n, std::uint64_t sample_count,
                          std::uint64_t seed, int threads) {
  check_estimate_args(spec, n, sample_count);
  const int nthreads = threads > 0 ? threads : omp_get_max_threads();
  std::vector<std::int64_t> acc_source(n, 0), acc_channel(n, 0);

#pragma omp parallel num_threads(nthreads)
  {
    SampleWorker worker(spec, n);
    std::vector<std::int64_t> local_source(n, 0), local_channel(n, 0);
#pragma omp for schedule(dynamic, 16) nowait
    for (std::uint64_t t = 0; t < sample_count; ++t) worker.run(seed, t, local_source, local_channel);
#pragma omp critical(polarmc_estimate_reduce)
    for (std::size_t i = 0; i < n; ++i) {
      acc_source[i] += local_source[i];
      acc_channel[i] += local_channel[i];
    }
  }
  return finish_estimate(n, sample_count, seed, acc_source, acc_channel);
}

// ---------------------------------------------------------------------------
// Set selection

namespace {

void check_z_profile(const ZProfile& zp) {
  checked_log2(zp.n);
  if (zp.z_source.size() != zp.n || zp.z_channel.size() != zp.n)
    throw std::invalid_argument("Z profile length differs from block length");
}

void check_thresholds(double z_high, double z_low) {
  if (!(z_high >= 0.0 && z_high <= 1.0) || !(z_low >= 0.0 && z_low <= 1.0))
    throw std::invalid_argument("thresholds must lie in [0,1]");
  if (z_high < z_low) throw std::invalid_argument("z_high must not be below z_low");
}

// Partition given H membership and L membership.
CodeProfile partition(const ZProfile& zp, const std::vector<bool>& high, const std::vector<bool>& low) {
  CodeProfile p;
  p.n = zp.n;
  p.z = zp;
  for (std::size_t i = 0; i < zp.n; ++i) {
    if (high[i])
      (low[i] ? p.message : p.frozen).push_back(i);
    else
      (low[i] ? p.random_low : p.side).push_back(i);
  }
  if (p.message.empty()) throw ProfileError("thresholds leave the message set empty");
  p.frozen_bits.assign(p.frozen.size(), 0);
  p.relay = choose_relay_set(p);
  return p;
}

}  // namespace

CodeProfile select_sets(const ZProfile& zp, double z_high, double z_low) {
  check_z_profile(zp);
  check_thresholds(z_high, z_low);
  std::vector<bool> high(zp.n), low(zp.n);
  for (std::size_t i = 0; i < zp.n; ++i) {
    high[i] = zp.z_source[i] >= z_high;
    low[i] = zp.z_channel[i] <= z_low;
  }
  CodeProfile p = partition(zp, high, low);
  p.z_high = z_high;
  p.z_low = z_low;
  p.selection = "thresholds";
  return p;
}

double union_bound_threshold(const std::vector<double>& z_channel, double error_target) {
  if (!(error_target >= 0.0)) throw std::invalid_argument("error target must be nonnegative");
  std::vector<double> sorted = z_channel;
  std::sort(sorted.begin(), sorted.end());
  double threshold = 0.0;
  double sum = 0.0;
  std::size_t k = 0;
  while (k < sorted.size()) {
    // Take every copy of the next distinct value, or none of them.
    std::size_t end = k;
    double group = 0.0;
    while (end < sorted.size() && sorted[end] == sorted[k]) group += sorted[end++];
    if (sum + group > error_target) break;
    sum += group;
    threshold = sorted[k];
    k = end;
  }
  return threshold;
}

CodeProfile select_sets_union_bound(const ZProfile& zp, double z_high, double error_target) {
  check_z_profile(zp);
  CodeProfile p = select_sets(zp, z_high, std::min(union_bound_threshold(zp.z_channel, error_target), z_high));
  p.selection = "union-bound";
  return p;
}

CodeProfile select_sets_for_rate(const ZProfile& zp, double z_high, std::size_t message_count) {
  check_z_profile(zp);
  check_thresholds(z_high, 0.0);
  std::vector<std::size_t> high_idx;
  for (std::size_t i = 0; i < zp.n; ++i)
    if (zp.z_source[i] >= z_high) high_idx.push_back(i);
  if (message_count == 0 || message_count > high_idx.size())
    throw std::invalid_argument("requested " + std::to_string(message_count) + " message bits but only " +
                                std::to_string(high_idx.size()) + " indices have high source Z");
  std::stable_sort(high_idx.begin(), high_idx.end(),
                   [&](std::size_t a, std::size_t b) { return zp.z_channel[a] < zp.z_channel[b]; });
  const double z_low = zp.z_channel[high_idx[message_count - 1]];

  std::vector<bool> high(zp.n, false), low(zp.n, false);
  for (std::size_t r = 0; r < high_idx.size(); ++r) {
    high[high_idx[r]] = true;
    low[high_idx[r]] = r < message_count;
  }
  for (std::size_t i = 0; i < zp.n; ++i)
    if (!high[i]) low[i] = zp.z_channel[i] <= z_low;

  CodeProfile p = partition(zp, high, low);
  p.z_high = z_high;
  p.z_low = z_low;
  p.selection = "rate";
  return p;
}

std::vector<std::size_t> choose_relay_set(const CodeProfile& profile) {
  if (profile.side.size() > profile.message.size()) return {};
  std::vector<std::size_t> order = profile.message;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return profile.z.z_channel[a] < profile.z.z_channel[b];
  });
  order.resize(profile.side.size());
  std::sort(order.begin(), order.end());
  return order;
}

// ---------------------------------------------------------------------------
// Persistence

using nlohmann::json;

std::string profile_to_json(const CodeProfile& p) {
  json j;
  j["version"] = kProfileVersion;
  j["model_id"] = p.model_id;
  j["model_params"] = p.model_params;
  j["n"] = p.n;
  j["thresholds"] = {{"z_high", p.z_high}, {"z_low", p.z_low}, {"rule", p.selection}};
  j["z_source"] = p.z.z_source;
  j["z_channel"] = p.z.z_channel;
  j["sets"] = {{"message", p.message}, {"frozen", p.frozen}, {"random_low", p.random_low}, {"side", p.side}};
  j["frozen_bits"] = std::vector<int>(p.frozen_bits.begin(), p.frozen_bits.end());
  j["relay_set"] = p.relay;
  j["seed"] = p.z.seed;
  j["sample_count"] = p.z.sample_count;
  return j.dump(1) + "\n";
}

CodeProfile profile_from_json(const std::string& text) {
  CodeProfile p;
  try {
    const json j = json::parse(text);
    const int version = j.at("version").get<int>();
    if (version != kProfileVersion)
      throw ProfileError("unsupported profile version " + std::to_string(version));
    p.model_id = j.at("model_id").get<std::string>();
    if (j.contains("model_params")) p.model_params = j.at("model_params").get<ParamMap>();
    p.n = j.at("n").get<std::size_t>();
    const auto& th = j.at("thresholds");
    p.z_high = th.at("z_high").get<double>();
    p.z_low = th.at("z_low").get<double>();
    p.selection = th.value("rule", "thresholds");
    p.z.n = p.n;
    p.z.z_source = j.at("z_source").get<std::vector<double>>();
    p.z.z_channel = j.at("z_channel").get<std::vector<double>>();
    p.z.seed = j.at("seed").get<std::uint64_t>();
    p.z.sample_count = j.at("sample_count").get<std::uint64_t>();
    const auto& sets = j.at("sets");
    p.message = sets.at("message").get<std::vector<std::size_t>>();
    p.frozen = sets.at("frozen").get<std::vector<std::size_t>>();
    p.random_low = sets.at("random_low").get<std::vector<std::size_t>>();
    p.side = sets.at("side").get<std::vector<std::size_t>>();
    for (int b : j.at("frozen_bits").get<std::vector<int>>()) {
      if (b != 0 && b != 1) throw ProfileError("frozen bits must be 0/1");
      p.frozen_bits.push_back(static_cast<std::uint8_t>(b));
    }
    p.relay = j.at("relay_set").get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ProfileError(std::string("malformed profile file: ") + e.what());
  }
  p.validate();
  return p;
}

void save_profile(const CodeProfile& profile, const std::filesystem::path& path) {
  profile.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write profile to " + path.string());
  out << profile_to_json(profile);
}

CodeProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProfileError("cannot open profile " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return profile_from_json(buf.str());
}

}  // namespace polarmc
