#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cqca/adversary.hpp"
#include "cqca/channel.hpp"
#include "cqca/metrics.hpp"
#include "cqca/packet.hpp"
#include "cqca/photonics.hpp"
#include "cqca/record.hpp"

namespace cqca::parties {

/// Fair coin over {F, A}.
Action chooseSetting(RandomStream& rng);

struct SimulationConfig {
  channel::ChannelConfig channel;
  channel::AttackConfig attack;
  std::uint64_t seed = 1;
  /// Worker lanes; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

/// A simulated round plus the adversaries' private view of it.
struct RoundTrace {
  RoundRecord record;
  bool eveAttached = false;
  /// Eve's probe conditioned on where the photon ended up (size 4 when attached).
  photonics::Probe eveProbe;
  adversary::AliceAttackState alice;
};

/// Emission, onward leg, Bob's and Charlie's actions, return leg,
/// recombination and detection for one round. Draws only from lanes derived
/// from (seed, roundId).
RoundTrace playRound(std::uint64_t roundId, const SimulationConfig& cfg);

/// Rounds 0 .. n-1, evaluated in parallel lanes, returned in round order.
std::vector<RoundTrace> simulateRounds(std::uint64_t n, const SimulationConfig& cfg);

std::vector<RoundRecord> recordsOf(std::span<const RoundTrace> traces);

/// A party's own sifted bit, computed from its setting and Alice's announcement only.
/// Bob maps F -> 1, A -> 0; Charlie maps A -> 1, F -> 0.
std::optional<int> localSiftedBit(PartyId party, Action ownSetting, Announcement alice, bool sampled);

struct SiftedKeys {
  std::vector<int> bob;
  std::vector<int> charlie;
  std::vector<std::uint64_t> roundIds;

  std::size_t mismatches() const;
};

SiftedKeys siftKey(std::span<const RoundRecord> rounds);

struct Transcript {
  std::vector<RoundRecord> rounds;
  std::vector<HybridPacket> packets;
  metrics::Verdict verdict;
};

struct ProtocolResult {
  Transcript transcript;
  metrics::MeritReport report;
  /// Empty when the run aborted.
  SiftedKeys keys;
  std::vector<adversary::EveRecord> eve;
};

/// Full session: n rounds, disclosure of floor(n f) rounds chosen by Bob and
/// confirmed by Charlie, figure-of-merit checks, then sifting.
ProtocolResult runProtocol(std::uint64_t n, double f, const SimulationConfig& cfg,
                           const metrics::TolerancePolicy& policy = {});

/// Eve's Helstrom guesses on every undisclosed D1 round she probed. Each
/// guess draws from its own (seed, round) lane.
std::vector<adversary::EveRecord> eveRecords(std::span<const RoundTrace> traces, const SimulationConfig& cfg);

/// Packs bits MSB-first into lowercase hex; the last octet is zero-padded.
std::string bitsToHex(std::span<const int> bits);

}  // namespace cqca::parties
