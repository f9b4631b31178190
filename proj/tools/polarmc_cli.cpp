// polarmc: construct, simulate, capacity, sweep, verify.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "polarmc/simharness.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::string model;
  std::string params;
  std::vector<std::size_t> n;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> k_blocks;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<double> z_high;
  std::optional<double> z_low;
  std::optional<double> rate;
  std::optional<double> rate_fraction;
  std::optional<double> error_target;
  std::optional<double> resolution;
  std::string scheme;
  bool search_frozen = false;
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::optional<int> threads;
  std::string profile;
  std::string out;
  std::string summary;
  std::optional<double> max_fer;
};

void add_model_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its fields");
  cmd->add_option("--model", f.model, "example1, example2, bsc or basym");
  cmd->add_option("--params", f.params, "model parameters as k=v,k=v");
  cmd->add_option("--resolution", f.resolution, "capacity grid resolution");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all)");
}

void add_code_flags(CLI::App* cmd, Flags& f) {
  add_model_flags(cmd, f);
  cmd->add_option("--n", f.n, "block length(s), powers of 2");
  cmd->add_option("--seed", f.seed, "root seed");
  cmd->add_option("--samples", f.samples, "Monte Carlo samples for the Z profile");
  cmd->add_option("--z-high", f.z_high, "source-side threshold");
  cmd->add_option("--z-low", f.z_low, "channel-side threshold");
  cmd->add_option("--rate", f.rate, "code rate |message|/n");
  cmd->add_option("--rate-fraction", f.rate_fraction, "code rate as a fraction of capacity");
  cmd->add_option("--error-target", f.error_target, "frame error target");
  cmd->add_flag("--search-frozen", f.search_frozen, "search for a frozen vector");
}

void add_trial_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--trials", f.trials, "simulated trials");
  cmd->add_option("--k-blocks", f.k_blocks, "chain length");
  cmd->add_option("--scheme", f.scheme, "auto, point-to-point, informed or chained");
}

polarmc::ExperimentConfig resolve(const Flags& f) {
  polarmc::ExperimentConfig c;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw polarmc::ConfigError("cannot open config " + f.config_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw polarmc::ConfigError(std::string("malformed config: ") + e.what());
    }
    c.merge_json(j);
  }
  if (!f.model.empty()) c.model = f.model;
  if (!f.params.empty()) c.params = polarmc::parse_params(f.params);
  if (!f.n.empty()) c.n = f.n;
  if (f.trials) c.trials = *f.trials;
  if (f.k_blocks) c.k_blocks = *f.k_blocks;
  if (f.seed) c.seed = *f.seed;
  if (f.samples) c.samples = *f.samples;
  if (f.z_high) c.z_high = *f.z_high;
  if (f.z_low) c.z_low = f.z_low;
  if (f.rate) c.rate = f.rate;
  if (f.rate_fraction) c.rate_fraction = f.rate_fraction;
  if (f.error_target) c.error_target = *f.error_target;
  if (f.resolution) c.grid_resolution = *f.resolution;
  if (!f.scheme.empty()) c.scheme = f.scheme;
  if (f.search_frozen) c.search_frozen = true;
  if (!f.sweep_param.empty()) c.sweep_param = f.sweep_param;
  if (!f.sweep_values.empty()) c.sweep_values = f.sweep_values;
  if (f.threads) c.threads = *f.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polar multicoding for channels with state"};
  app.require_subcommand(1);
  Flags f;

  auto* construct = app.add_subcommand("construct", "estimate a code profile and write it to --out");
  add_code_flags(construct, f);
  construct->add_option("--out", f.out, "profile file")->required();

  auto* simulate = app.add_subcommand("simulate", "run encode/decode trials");
  add_code_flags(simulate, f);
  add_trial_flags(simulate, f);
  simulate->add_option("--profile", f.profile, "profile file from construct");
  simulate->add_option("--out", f.out, "CSV output (default stdout)");
  simulate->add_option("--summary", f.summary, "JSON summary output");
  simulate->add_option("--max-fer", f.max_fer, "exit nonzero when the FER is above this");

  auto* capacity = app.add_subcommand("capacity", "closed-form and grid capacity");
  add_model_flags(capacity, f);
  capacity->add_option("--out", f.out, "CSV output");

  auto* sweep = app.add_subcommand("sweep", "construct and simulate over n or a model parameter");
  add_code_flags(sweep, f);
  add_trial_flags(sweep, f);
  sweep->add_option("--sweep-param", f.sweep_param, "model parameter to vary");
  sweep->add_option("--sweep-values", f.sweep_values, "values of the swept parameter");
  sweep->add_option("--out", f.out, "CSV output (JSON summary goes to <out>.json)");

  auto* verify = app.add_subcommand("verify", "run the oracle and identity checks");
  verify->add_option("--seed", f.seed, "root seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) return polarmc::cmd_verify(f.seed.value_or(1), std::cout);
    const polarmc::ExperimentConfig config = resolve(f);
    if (construct->parsed()) return polarmc::cmd_construct(config, f.out, std::cout);
    if (simulate->parsed()) return polarmc::cmd_simulate(config, f.profile, f.out, f.summary, f.max_fer, std::cout);
    if (capacity->parsed()) return polarmc::cmd_capacity(config, f.out, std::cout);
    if (sweep->parsed()) return polarmc::cmd_sweep(config, f.out, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
