#include "cqca/channel.hpp"

#include <numbers>
#include <stdexcept>

namespace cqca::channel {

void ChannelConfig::validate() const {
  if (!(lossRate >= 0.0 && lossRate < 1.0)) throw std::invalid_argument("loss rate must lie in [0, 1)");
  if (!(darkRate >= 0.0 && darkRate < 1.0)) throw std::invalid_argument("dark-count rate must lie in [0, 1)");
}

AttackConfig AttackConfig::eve(double theta, bool knowsSchedule) {
  AttackConfig a;
  a.kind = AttackKind::EveProbe;
  a.theta = theta;
  a.knowsSchedule = knowsSchedule;
  return a;
}

AttackConfig AttackConfig::aliceSinglePath(double p, SinglePathStrategy strategy, AttackTarget target) {
  AttackConfig a;
  a.kind = AttackKind::AliceSinglePath;
  a.p = p;
  a.strategy = strategy;
  a.target = target;
  return a;
}

AttackConfig AttackConfig::aliceDoublePath(double p) {
  AttackConfig a;
  a.kind = AttackKind::AliceDoublePath;
  a.p = p;
  return a;
}

void AttackConfig::validate() const {
  if (!(theta >= 0.0 && theta <= std::numbers::pi / 2)) throw std::invalid_argument("theta must lie in [0, pi/2]");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("attack probability p must lie in [0, 1]");
}

bool eveAttacksOnwardLeg(const ChannelConfig& cfg, const AttackConfig& atk) {
  return atk.kind == AttackKind::EveProbe && (atk.knowsSchedule || !cfg.timingJitter);
}

photonics::JointState transmitOnward(const photonics::JointState& state, const ChannelConfig& cfg,
                                     const AttackConfig& atk, RandomStream& /*rng*/) {
  if (eveAttacksOnwardLeg(cfg, atk)) return photonics::attachEveProbe(state, atk.theta);
  return state;
}

}  // namespace cqca::channel
