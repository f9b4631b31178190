// Experiment runner behind the command line tool: construction, Monte Carlo
// simulation, capacity reports, sweeps, and the built-in check suite.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarmc/channel_models.hpp"
#include "polarmc/code_profile.hpp"
#include "polarmc/schemes.hpp"

namespace polarmc {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string model = "example2";
  ParamMap params;
  std::vector<std::size_t> n{1024};
  double z_high = kDefaultZHigh;
  std::optional<double> z_low;         // default: union bound on error_target
  std::optional<double> rate;          // absolute |message| / n
  std::optional<double> rate_fraction; // |message| / n as a fraction of capacity
  double error_target = 0.1;
  std::uint64_t samples = 2000;
  std::size_t trials = 100;
  std::size_t k_blocks = 1;
  std::string scheme = "auto";  // auto, point-to-point, informed, chained
  bool search_frozen = false;
  std::size_t frozen_budget = 20;
  std::size_t frozen_batch = 200;
  double cost_slack = 0.02;
  double grid_resolution = 1e-3;
  std::uint64_t seed = 1;
  std::string sweep_param;  // empty: sweep over n
  std::vector<double> sweep_values;
  int threads = 0;

  void validate() const;
  /// Every field except threads, which never changes results.
  nlohmann::json to_json() const;
  /// Fields present in `j` override this config; unknown keys are rejected.
  void merge_json(const nlohmann::json& j);
};

/// "k=v,k=v" into a parameter map.
ParamMap parse_params(const std::string& text);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct TrialReport {
  std::size_t n = 0;
  std::string scheme;
  double rate = 0.0;       // effective, side bits debited
  double code_rate = 0.0;  // |message| / n
  double capacity = 0.0;
  double side_fraction = 0.0;
  std::size_t trials = 0;
  std::size_t blocks = 0;
  std::size_t block_errors = 0;
  double fer = 0.0;
  Interval fer_ci;
  double cost = 0.0;  // mean per cell
  Interval cost_ci;
  std::size_t wom_violations = 0;
  std::size_t decode_failures = 0;
  std::size_t encoder_conflicts = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";
  double wall_seconds = 0.0;  // JSON summary only
};

/// Header and rows of the tidy CSV.
std::string csv_header();
std::string csv_row(const TrialReport& r, const ExperimentConfig& config);
nlohmann::json report_to_json(const TrialReport& r);

/// Model spec with auxiliary functions filled in.
StateChannelSpec build_spec(const ExperimentConfig& config);
/// Closed form when known, else the grid value.
double reference_capacity(const StateChannelSpec& spec, const ExperimentConfig& config);

Scheme resolve_scheme(const ExperimentConfig& config, const StateChannelSpec& spec);

/// Profile for block length n: estimate, select sets, optional frozen search.
CodeProfile construct_profile(const ExperimentConfig& config, const StateChannelSpec& spec, std::size_t n,
                              FrozenSearchResult* search = nullptr);

/// Throws ConfigError when the profile was built for another model or n.
void check_compatible(const CodeProfile& profile, const StateChannelSpec& spec);

TrialReport simulate_profile(const ExperimentConfig& config, const StateChannelSpec& spec,
                             const CodeProfile& profile);

// Subcommands. Each returns the process exit code.
int cmd_construct(const ExperimentConfig& config, const std::string& out_path, std::ostream& log);
int cmd_simulate(const ExperimentConfig& config, const std::string& profile_path, const std::string& out_path,
                 const std::string& summary_path, std::optional<double> max_fer, std::ostream& log);
int cmd_capacity(const ExperimentConfig& config, const std::string& out_path, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, const std::string& out_path, std::ostream& log);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Oracle and identity checks at reduced sizes.
std::vector<CheckResult> run_verify_suite(std::uint64_t seed);
int cmd_verify(std::uint64_t seed, std::ostream& log);

}  // namespace polarmc
