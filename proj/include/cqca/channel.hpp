#pragma once

#include "cqca/photonics.hpp"

namespace cqca::channel {

struct ChannelConfig {
  double lossRate = 0.0;   ///< aggregate transmission loss, applied at Alice's detectors
  double darkRate = 0.0;   ///< per-detector dark-count probability per round
  bool timingJitter = true;  ///< Alice randomizes her emission schedule

  void validate() const;
  bool operator==(const ChannelConfig&) const = default;
};

enum class AttackKind : std::uint8_t { None, EveProbe, AliceSinglePath, AliceDoublePath };
enum class SinglePathStrategy : std::uint8_t { RandomQuarter, AlwaysD2 };
/// `Either` picks B or C uniformly on each attacked round.
enum class AttackTarget : std::uint8_t { B, C, Either };

struct AttackConfig {
  AttackKind kind = AttackKind::None;
  double theta = 0.0;  ///< Eve's probe angle, radians
  double p = 0.0;      ///< Alice's per-round attack probability
  AttackTarget target = AttackTarget::Either;
  SinglePathStrategy strategy = SinglePathStrategy::RandomQuarter;
  bool knowsSchedule = true;  ///< worst-case Eve

  static AttackConfig none() { return {}; }
  static AttackConfig eve(double theta, bool knowsSchedule = true);
  static AttackConfig aliceSinglePath(double p, SinglePathStrategy strategy, AttackTarget target = AttackTarget::Either);
  static AttackConfig aliceDoublePath(double p);

  void validate() const;
  bool operator==(const AttackConfig&) const = default;
};

/// True when Eve entangles her probes on this run's rounds.
bool eveAttacksOnwardLeg(const ChannelConfig& cfg, const AttackConfig& atk);

/// Alice-to-parties leg. Attaches Eve's probe when she can synchronize with
/// the emission schedule; an unsynchronized Eve abstains. Alice's own attacks
/// do not pass through here.
photonics::JointState transmitOnward(const photonics::JointState& state, const ChannelConfig& cfg,
                                     const AttackConfig& atk, RandomStream& rng);

/// Parties-to-Alice leg. Identity: attacking the return leg gains Eve nothing.
inline photonics::JointState returnLeg(const photonics::JointState& state) { return state; }

}  // namespace cqca::channel
