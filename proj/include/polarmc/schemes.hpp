// Encoders and decoders for the three constructions: point-to-point coding
// over an asymmetric channel, multicoding with an informed encoder, and the
// chained variant that relays each block's side bits through the next block.
//
// All three share BlockCodec. The point-to-point scheme is the informed one
// run on a spec whose state takes a single value.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "polarmc/channel_models.hpp"
#include "polarmc/code_profile.hpp"
#include "polarmc/sc_engine.hpp"

namespace polarmc {

/// u restricted to the side set, carried losslessly out of band.
struct SideChannelPayload {
  BitVec bits;
  std::size_t block_index = 0;
};

struct EncodeResult {
  BitVec u;
  BitVec v;
  BitVec x;
  SideChannelPayload side;
  bool conflict = false;  // a fixed bit had probability zero given the state
};

enum class DecodeStatus : std::uint8_t { kOk, kZeroProbability };

struct DecodeResult {
  BitVec message;
  BitVec u;
  DecodeStatus status = DecodeStatus::kOk;
};

/// Encoder/decoder pair for one profile. Holds SC workspaces, so each worker
/// needs its own instance.
class BlockCodec {
 public:
  /// `chained`: message bits go to message \ relay, relay positions are
  /// filled from the caller.
  BlockCodec(const CodeProfile& profile, const StateChannelSpec& spec, bool chained = false);
  BlockCodec(const BlockCodec&) = delete;
  BlockCodec& operator=(const BlockCodec&) = delete;

  std::size_t n() const { return profile_->n; }
  std::size_t message_size() const { return payload_.size(); }
  const std::vector<std::size_t>& payload_indices() const { return payload_; }

  EncodeResult encode(const BitVec& message, const std::vector<std::uint32_t>& s, RngStream& rng,
                      const BitVec* relay_bits = nullptr);
  DecodeResult decode(const std::vector<std::uint32_t>& y, const SideChannelPayload& side);

  /// u restricted to the relay set.
  BitVec relay_bits(const BitVec& u) const;

 private:
  const CodeProfile* profile_;
  const StateChannelSpec* spec_;
  std::vector<std::size_t> payload_;
  std::vector<std::size_t> relay_;
  ScContext source_ctx_;
  ScContext channel_ctx_;
  ScEngine source_;
  ScEngine channel_;
  ScPolicy encode_policy_;
  ScPolicy decode_policy_;
};

EncodeResult c1_encode(const CodeProfile& profile, const AsymmetricChannel& channel, const BitVec& message,
                       RngStream& rng);
DecodeResult c1_decode(const CodeProfile& profile, const AsymmetricChannel& channel,
                       const std::vector<std::uint32_t>& y, const SideChannelPayload& side);

EncodeResult c2_encode(const CodeProfile& profile, const StateChannelSpec& spec, const BitVec& message,
                       const std::vector<std::uint32_t>& s, RngStream& rng);
DecodeResult c2_decode(const CodeProfile& profile, const StateChannelSpec& spec,
                       const std::vector<std::uint32_t>& y, const SideChannelPayload& side);

/// k blocks sharing one profile. Block 1's relay positions carry the side
/// bits of u0, which is all zeros.
struct ChainProfile {
  std::size_t k = 1;
  CodeProfile profile;
  BitVec u0;

  ChainProfile(std::size_t k, CodeProfile profile);
  void validate() const;
  std::size_t message_size() const { return profile.message.size() - profile.relay.size(); }
};

struct ChainEncodeResult {
  std::vector<EncodeResult> blocks;
  SideChannelPayload final_side;
  bool conflict = false;
};

struct ChainDecodeResult {
  std::vector<BitVec> messages;
  std::vector<DecodeStatus> status;
};

ChainEncodeResult c3_encode(const ChainProfile& chain, const StateChannelSpec& spec,
                            const std::vector<BitVec>& messages,
                            const std::vector<std::vector<std::uint32_t>>& states, RngStream& rng);
ChainDecodeResult c3_decode(const ChainProfile& chain, const StateChannelSpec& spec,
                            const std::vector<std::vector<std::uint32_t>>& outputs,
                            const SideChannelPayload& final_side);

/// (|message| - |side|) / n.
double effective_rate(const CodeProfile& profile);
/// (k (|message| - |side|) - |side|) / (k n): the last block's side bits are
/// debited.
double effective_rate(const ChainProfile& chain);

/// Cells that were already programmed (s != 0) but received x = 1.
std::size_t wom_violations(const StateChannelSpec& spec, const std::vector<std::uint32_t>& s, const BitVec& x);

double block_cost(const StateChannelSpec& spec, const BitVec& x);

struct BlockOutcome {
  BitVec message;
  std::vector<std::uint32_t> state;
  BitVec u;
  BitVec v;
  BitVec x;
  std::vector<std::uint32_t> y;
  BitVec estimate;
  double cost = 0.0;  // sum of b(x_i)
  bool success = false;
  bool encoder_conflict = false;
  DecodeStatus status = DecodeStatus::kOk;
  std::size_t wom_violations = 0;
  SideChannelPayload side_payload;
};

/// One encode / channel / decode round trip drawing everything from `rng`.
BlockOutcome simulate_block(BlockCodec& codec, const StateChannelSpec& spec, RngStream& rng);

enum class Scheme : std::uint8_t { kPointToPoint, kInformed, kChained };

struct TrialSetup {
  Scheme scheme = Scheme::kInformed;
  std::size_t k_blocks = 1;  // chained only
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  StreamTag stream = StreamTag::kTrial;
  int threads = 0;
};

struct TrialSummary {
  std::size_t trials = 0;
  std::size_t blocks = 0;
  std::size_t block_errors = 0;
  std::size_t failed_trials = 0;  // trials with at least one block error
  std::size_t decode_failures = 0;
  std::size_t encoder_conflicts = 0;
  std::size_t wom_violations = 0;
  double cost_mean = 0.0;  // per cell, averaged over blocks
  double cost_sd = 0.0;    // sample sd of the per-block cost / n

  bool operator==(const TrialSummary&) const = default;
};

/// Trial t draws from stream (seed, setup.stream, t), so the result does not
/// depend on the thread count.
TrialSummary run_trials(const CodeProfile& profile, const StateChannelSpec& spec, const TrialSetup& setup);
TrialSummary run_trials_serial(const CodeProfile& profile, const StateChannelSpec& spec,
                               const TrialSetup& setup);

}  // namespace polarmc
