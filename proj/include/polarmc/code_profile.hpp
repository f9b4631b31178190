// Code construction: per-index Bhattacharyya profiles by Monte Carlo, the
// four-way index partition, the frozen-vector search, and profile files.

#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarmc/channel_models.hpp"
#include "polarmc/polar_transform.hpp"

namespace polarmc {

inline constexpr int kProfileVersion = 1;
inline constexpr double kDefaultZHigh = 0.9;

/// Estimated Z(U_i | U_[i-1], S_[n]) and Z(U_i | U_[i-1], Y_[n]).
struct ZProfile {
  std::size_t n = 0;
  std::vector<double> z_source;
  std::vector<double> z_channel;
  std::uint64_t sample_count = 0;
  std::uint64_t seed = 0;

  bool operator==(const ZProfile&) const = default;
};

enum class IndexRole : std::uint8_t {
  kMessage,    // high source Z, low channel Z
  kFrozen,     // high source Z, high channel Z
  kRandomLow,  // low source Z, low channel Z
  kSide,       // low source Z, high channel Z: sent out of band or relayed
};

struct CodeProfile {
  std::size_t n = 0;
  std::string model_id;
  ParamMap model_params;
  ZProfile z;
  double z_high = kDefaultZHigh;
  double z_low = 0.0;
  std::string selection;  // "thresholds", "union-bound" or "rate"
  std::vector<std::size_t> message;
  std::vector<std::size_t> frozen;
  std::vector<std::size_t> random_low;
  std::vector<std::size_t> side;
  BitVec frozen_bits;
  std::vector<std::size_t> relay;  // R, subset of message; empty or |side| long

  std::vector<IndexRole> roles() const;
  /// Throws ProfileError on any broken invariant.
  void validate() const;

  bool operator==(const CodeProfile&) const = default;
};

class ProfileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Genie-aided Monte Carlo estimate: sample (v, s, y) blocks from the model,
/// run SC with the true u fixed, and average 2 sqrt(p (1 - p)) per index.
/// Sums are accumulated in 2^-40 fixed point so the result does not depend
/// on how samples are split across workers.
ZProfile estimate_profile(const StateChannelSpec& spec, std::size_t n, std::uint64_t sample_count,
                          std::uint64_t seed, int threads = 0);
ZProfile estimate_profile_serial(const StateChannelSpec& spec, std::size_t n,
                                 std::uint64_t sample_count, std::uint64_t seed);

/// H = {z_source >= z_high}, L = {z_channel <= z_low}.
CodeProfile select_sets(const ZProfile& zp, double z_high, double z_low);

/// Largest z_low whose L keeps sum_{i in L} z_channel[i] <= error_target.
double union_bound_threshold(const std::vector<double>& z_channel, double error_target);
CodeProfile select_sets_union_bound(const ZProfile& zp, double z_high, double error_target);

/// Message set = the `message_count` indices of H with the smallest
/// z_channel (ties by index); z_low becomes the largest selected value.
CodeProfile select_sets_for_rate(const ZProfile& zp, double z_high, std::size_t message_count);

/// The |side| message indices with smallest z_channel, ties by index, or
/// empty when |side| > |message|.
std::vector<std::size_t> choose_relay_set(const CodeProfile& profile);

struct FrozenSearchOptions {
  std::size_t trials_budget = 20;  // candidate vectors
  double cost_slack = 0.02;        // per-cell, added to the model budget
  double error_target = 0.1;       // frame error rate
  std::size_t batch = 200;         // blocks simulated per candidate
  std::uint64_t seed = 1;
  int threads = 0;
};

struct FrozenSearchResult {
  BitVec frozen_bits;
  bool accepted = false;  // false: budget exhausted, best candidate returned
  std::size_t candidates = 0;
  double mean_cost = 0.0;  // per cell, of the returned candidate
  double fer = 0.0;
};

/// Draw uniform frozen vectors until one meets the cost and error targets on
/// a simulated batch. The profile's other fields are left untouched.
FrozenSearchResult search_frozen(const CodeProfile& profile, const StateChannelSpec& spec,
                                 const FrozenSearchOptions& options);

std::string profile_to_json(const CodeProfile& profile);
CodeProfile profile_from_json(const std::string& text);
void save_profile(const CodeProfile& profile, const std::filesystem::path& path);
CodeProfile load_profile(const std::filesystem::path& path);

}  // namespace polarmc
