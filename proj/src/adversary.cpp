#include "cqca/adversary.hpp"

#include <array>
#include <cmath>

namespace cqca::adversary {

SinglePathOutcome aliceSinglePath(Action targetSetting, channel::SinglePathStrategy strategy, RandomStream& rng) {
  SinglePathOutcome out;
  out.state.attackedRound = true;
  if (targetSetting == Action::A) {
    out.state.probeResult = ProbeResult::NotReturned;
    out.targetClicked = true;
    out.announcement = Announcement::Null;
  } else {
    out.state.probeResult = ProbeResult::Returned;
    if (strategy == channel::SinglePathStrategy::RandomQuarter) {
      out.announcement = rng.bernoulli(0.25) ? Announcement::D1 : Announcement::D2;
    } else {
      out.announcement = Announcement::D2;
    }
  }
  out.state.fakeAnnouncement = out.announcement;
  return out;
}

Announcement sampleHonestTable(Action settingB, Action settingC, RandomStream& rng) {
  if (settingB == Action::F && settingC == Action::F) return Announcement::D2;
  if (settingB == Action::A && settingC == Action::A) return Announcement::Null;
  const double u = rng.uniform();
  if (u < 0.25) return Announcement::D1;
  if (u < 0.5) return Announcement::D2;
  return Announcement::Null;
}

DoublePathOutcome aliceDoublePath(Action settingB, Action settingC, RandomStream& rng) {
  DoublePathOutcome out;
  out.clickB = settingB == Action::A;
  out.clickC = settingC == Action::A;
  // A returned photon means the arm reflected.
  out.inferredSettings = {out.clickB ? Action::A : Action::F, out.clickC ? Action::A : Action::F};
  out.announcement = sampleHonestTable(out.inferredSettings.first, out.inferredSettings.second, rng);
  return out;
}

int eveExtractBit(const photonics::EveProbePair& probe, RandomStream& rng) { return photonics::helstromGuess(probe, rng); }

EveInformation empiricalInformation(std::span<const EveRecord> records) {
  std::array<std::array<double, 2>, 2> joint{};
  std::size_t count = 0;
  std::size_t wrong = 0;
  for (const auto& r : records) {
    if (!r.guess || !r.trueBit) continue;
    joint[*r.trueBit][*r.guess] += 1.0;
    ++count;
    if (*r.guess != *r.trueBit) ++wrong;
  }
  EveInformation info;
  info.count = count;
  if (count == 0) return info;
  info.errorProbability = static_cast<double>(wrong) / static_cast<double>(count);

  const double total = static_cast<double>(count);
  double mi = 0.0;
  for (int t = 0; t < 2; ++t) {
    for (int g = 0; g < 2; ++g) {
      if (joint[t][g] == 0.0) continue;
      const double pj = joint[t][g] / total;
      const double pt = (joint[t][0] + joint[t][1]) / total;
      const double pg = (joint[0][g] + joint[1][g]) / total;
      mi += pj * std::log2(pj / (pt * pg));
    }
  }
  info.mutualInformation = std::max(0.0, mi);
  return info;
}

}  // namespace cqca::adversary
