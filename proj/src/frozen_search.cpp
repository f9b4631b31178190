#include <algorithm>
#include <limits>

#include "polarmc/code_profile.hpp"
#include "polarmc/schemes.hpp"

namespace polarmc {

FrozenSearchResult search_frozen(const CodeProfile& profile, const StateChannelSpec& spec,
                                 const FrozenSearchOptions& options) {
  if (options.trials_budget < 1) throw std::invalid_argument("frozen search needs a budget of at least 1");
  if (options.batch < 1) throw std::invalid_argument("frozen search batch must be at least 1");
  profile.validate();

  const double cost_limit = spec.budget + options.cost_slack;
  CodeProfile candidate = profile;
  FrozenSearchResult best;
  double best_excess = std::numeric_limits<double>::infinity();

  for (std::size_t c = 0; c < options.trials_budget; ++c) {
    RngStream draw(options.seed, StreamTag::kFrozenCandidate, c);
    for (auto& b : candidate.frozen_bits) b = draw.bit();

    TrialSetup setup;
    setup.scheme = Scheme::kInformed;
    setup.trials = options.batch;
    setup.seed = options.seed;
    setup.stream = StreamTag::kFrozenBatch;
    setup.threads = options.threads;
    const TrialSummary s = run_trials(candidate, spec, setup);
    const double fer = static_cast<double>(s.block_errors) / static_cast<double>(s.blocks);

    const bool ok = s.cost_mean <= cost_limit && fer <= options.error_target;
    const double excess = std::max(0.0, s.cost_mean - cost_limit) + std::max(0.0, fer - options.error_target);
    if (ok || excess < best_excess || (excess == best_excess && fer < best.fer)) {
      best_excess = excess;
      best.frozen_bits = candidate.frozen_bits;
      best.mean_cost = s.cost_mean;
      best.fer = fer;
    }
    best.candidates = c + 1;
    if (ok) {
      best.accepted = true;
      break;
    }
  }
  return best;
}

}  // namespace polarmc
