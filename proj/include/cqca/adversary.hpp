#pragma once

#include <optional>
#include <span>
#include <utility>

#include "cqca/channel.hpp"
#include "cqca/photonics.hpp"

namespace cqca::adversary {

enum class ProbeResult : std::uint8_t { Returned, NotReturned, NotApplicable };

struct AliceAttackState {
  bool attackedRound = false;
  ProbeResult probeResult = ProbeResult::NotApplicable;
  Announcement fakeAnnouncement = Announcement::Null;
};

struct SinglePathOutcome {
  Announcement announcement = Announcement::Null;
  AliceAttackState state;
  /// The target's detector absorbed Alice's photon.
  bool targetClicked = false;
};

/// Semihonest Alice sends a bare photon down one arm only. If the target
/// absorbs it she must announce NULL; if it returns she fakes an announcement.
SinglePathOutcome aliceSinglePath(Action targetSetting, channel::SinglePathStrategy strategy, RandomStream& rng);

struct DoublePathOutcome {
  Announcement announcement = Announcement::Null;
  std::pair<Action, Action> inferredSettings;
  bool clickB = false;
  bool clickC = false;
};

/// One photon down each arm: the return pattern reveals both settings, and
/// both detectors fire when both parties absorb. Alice then announces an
/// outcome drawn from the honest outcome table for the inferred settings.
DoublePathOutcome aliceDoublePath(Action settingB, Action settingC, RandomStream& rng);

/// Honest Alice outcome distribution for a settings cell, sampled.
Announcement sampleHonestTable(Action settingB, Action settingC, RandomStream& rng);

struct EveRecord {
  std::uint64_t roundId = 0;
  std::optional<int> guess;
  std::optional<int> trueBit;  ///< defined for anti-correlated settings only
};

int eveExtractBit(const photonics::EveProbePair& probe, RandomStream& rng);

struct EveInformation {
  double mutualInformation = 0.0;  ///< plug-in estimate, bits per sifted bit
  double errorProbability = 0.0;   ///< fraction of wrong guesses
  std::size_t count = 0;
};

/// Empirical I(guess; trueBit) over records carrying both fields.
EveInformation empiricalInformation(std::span<const EveRecord> records);

}  // namespace cqca::adversary
