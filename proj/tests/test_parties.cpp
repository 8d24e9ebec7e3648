#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "cqca/parties.hpp"
#include "stat_helpers.hpp"

using namespace cqca;
using namespace cqca::parties;
using cqca::testing::withinSigma;

namespace {

RoundRecord rec(std::uint64_t id, Action b, Action c, Announcement a, bool sampled = false) {
  RoundRecord r;
  r.roundId = id;
  r.settingB = b;
  r.settingC = c;
  r.outcomeAlice = a;
  r.sampled = sampled;
  return r;
}

constexpr auto F = Action::F;
constexpr auto A = Action::A;

}  // namespace

TEST_CASE("chooseSetting is a fair coin, independent across parties") {
  constexpr std::size_t n = 100000;
  std::size_t fb = 0, both = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    auto rb = RandomStream::forLane(9, i, RandomStream::Purpose::Bob);
    auto rc = RandomStream::forLane(9, i, RandomStream::Purpose::Charlie);
    const bool b = chooseSetting(rb) == F;
    const bool c = chooseSetting(rc) == F;
    fb += b;
    both += b && c;
  }
  CHECK(withinSigma(fb, n, 0.5));
  CHECK(withinSigma(both, n, 0.25));
}

TEST_CASE("siftKey keeps undisclosed D1 rounds") {
  const std::vector<RoundRecord> rounds = {
      rec(0, F, A, Announcement::D1),        // Bob 1, Charlie 1
      rec(1, A, F, Announcement::D1),        // Bob 0, Charlie 0
      rec(2, F, A, Announcement::D2),        // not D1
      rec(3, A, F, Announcement::D1, true),  // disclosed
      rec(4, F, F, Announcement::D1),        // erroneous round: Bob 1, Charlie 0
      rec(5, A, A, Announcement::Null),
  };
  const auto k = siftKey(rounds);
  CHECK(k.bob == std::vector<int>{1, 0, 1});
  CHECK(k.charlie == std::vector<int>{1, 0, 0});
  CHECK(k.roundIds == std::vector<std::uint64_t>{0, 1, 4});
  CHECK(k.mismatches() == 1);
}

TEST_CASE("localSiftedBit uses only the party's own setting and the announcement") {
  CHECK(localSiftedBit(PartyId::Bob, F, Announcement::D1, false) == 1);
  CHECK(localSiftedBit(PartyId::Bob, A, Announcement::D1, false) == 0);
  CHECK(localSiftedBit(PartyId::Charlie, A, Announcement::D1, false) == 1);
  CHECK(localSiftedBit(PartyId::Charlie, F, Announcement::D1, false) == 0);
  CHECK_FALSE(localSiftedBit(PartyId::Bob, F, Announcement::D2, false));
  CHECK_FALSE(localSiftedBit(PartyId::Bob, F, Announcement::Null, false));
  CHECK_FALSE(localSiftedBit(PartyId::Charlie, A, Announcement::D1, true));
  CHECK_THROWS_AS(localSiftedBit(PartyId::Alice, F, Announcement::D1, false), std::invalid_argument);
}

TEST_CASE("bitsToHex packs MSB first") {
  CHECK(bitsToHex(std::vector<int>{1, 0, 1, 0, 0, 1, 0, 1}) == "a5");
  CHECK(bitsToHex(std::vector<int>{1}) == "80");
  CHECK(bitsToHex(std::vector<int>{}).empty());
}

TEST_CASE("honest protocol: keys agree and have the expected length") {
  constexpr std::uint64_t n = 100000;
  constexpr double f = 0.25;
  SimulationConfig cfg;
  cfg.seed = 2024;
  const auto res = runProtocol(n, f, cfg);
  REQUIRE(res.transcript.verdict.keyProduced);
  CHECK(res.transcript.verdict.describe() == "KeyProduced");
  CHECK(res.keys.mismatches() == 0);
  CHECK(res.keys.bob == res.keys.charlie);
  // Each undisclosed round sifts with probability 1/8.
  const std::size_t undisclosed = n - static_cast<std::size_t>(n * f);
  CHECK(withinSigma(res.keys.bob.size(), undisclosed, 0.125));
  std::size_t sampled = 0;
  for (const auto& r : res.transcript.rounds) sampled += r.sampled;
  CHECK(sampled == static_cast<std::size_t>(n * f));
}

TEST_CASE("honest key bits are balanced") {
  SimulationConfig cfg;
  cfg.seed = 5;
  const auto res = runProtocol(50000, 0.25, cfg);
  REQUIRE(res.transcript.verdict.keyProduced);
  const auto ones = static_cast<std::size_t>(std::count(res.keys.bob.begin(), res.keys.bob.end(), 1));
  CHECK(withinSigma(ones, res.keys.bob.size(), 0.5));
}

TEST_CASE("double-path attack is caught by the coincidence check") {
  SimulationConfig cfg;
  cfg.attack = channel::AttackConfig::aliceDoublePath(1.0);
  const auto res = runProtocol(10000, 0.25, cfg);
  CHECK_FALSE(res.transcript.verdict.keyProduced);
  const auto& why = res.transcript.verdict.reasons;
  CHECK(std::find(why.begin(), why.end(), metrics::Figure::Coincidence) != why.end());
  CHECK(res.keys.bob.empty());
}

TEST_CASE("results are deterministic and independent of the worker count") {
  SimulationConfig a;
  a.seed = 77;
  a.attack = channel::AttackConfig::eve(0.3);
  a.threads = 1;
  SimulationConfig b = a;
  b.threads = 7;
  const auto ra = runProtocol(20000, 0.25, a);
  const auto rb = runProtocol(20000, 0.25, b);
  CHECK(ra.transcript.rounds == rb.transcript.rounds);
  CHECK(ra.transcript.packets == rb.transcript.packets);
  CHECK(ra.keys.bob == rb.keys.bob);
  REQUIRE(ra.eve.size() == rb.eve.size());
  for (std::size_t i = 0; i < ra.eve.size(); ++i) CHECK(ra.eve[i].guess == rb.eve[i].guess);

  SimulationConfig c = a;
  c.seed = 78;
  CHECK_FALSE(runProtocol(20000, 0.25, c).transcript.rounds == ra.transcript.rounds);
}

TEST_CASE("packet stream") {
  SimulationConfig cfg;
  cfg.seed = 3;
  constexpr std::uint64_t n = 9000;
  const auto res = runProtocol(n, 0.5, cfg);
  const auto& packets = res.transcript.packets;

  SUBCASE("numbers are gapless per direction") {
    std::map<std::pair<PartyId, PartyId>, std::uint32_t> next;
    for (const auto& p : packets) CHECK(p.packetNumber == next[{p.origin, p.destination}]++);
  }
  SUBCASE("stream re-decodes to the same packets") {
    std::vector<std::uint8_t> wire;
    for (const auto& p : packets) appendPacket(p, wire);
    CHECK(decodeStream(wire) == packets);
  }
  SUBCASE("two quantum slots and two announcements per round") {
    std::size_t slots = 0, announces = 0, discloses = 0;
    for (const auto& p : packets) {
      slots += p.bodyType == BodyType::QuantumSlot;
      announces += p.bodyType == BodyType::Announce;
      discloses += p.bodyType == BodyType::Disclose;
    }
    CHECK(slots == 2 * n);
    CHECK(announces == 2 * n);
    CHECK(discloses == 2 * (n / 2));
  }
  SUBCASE("every announcement precedes every disclosure and the sample choice") {
    std::size_t lastAnnounce = 0, firstDisclosure = packets.size();
    for (std::size_t i = 0; i < packets.size(); ++i) {
      const auto& p = packets[i];
      if (p.bodyType == BodyType::Announce) lastAnnounce = i;
      const bool smp = p.bodyType == BodyType::Control && p.body.size() >= 3 && p.body[0] == 'S' && p.body[1] == 'M';
      if ((p.bodyType == BodyType::Disclose || smp) && firstDisclosure == packets.size()) firstDisclosure = i;
    }
    CHECK(lastAnnounce < firstDisclosure);
  }
  SUBCASE("announcement bodies match the transcript") {
    for (const auto& p : packets) {
      if (p.bodyType != BodyType::Announce) continue;
      const auto id = getU64(p.body, 0);
      CHECK(static_cast<char>(p.body[8]) == toChar(res.transcript.rounds[id].outcomeAlice));
    }
  }
  SUBCASE("no packet involves Eve") {
    for (const auto& p : packets) {
      CHECK(p.origin != PartyId::Eve);
      CHECK(p.destination != PartyId::Eve);
    }
  }
}

TEST_CASE("sifted bits in the transcript follow the local rule") {
  SimulationConfig cfg;
  const auto res = runProtocol(20000, 0.25, cfg);
  for (const auto& r : res.transcript.rounds) {
    CHECK(r.siftedBit == localSiftedBit(PartyId::Bob, r.settingB, r.outcomeAlice, r.sampled));
  }
}

TEST_CASE("transcript round-trips through the record file format") {
  SimulationConfig cfg;
  cfg.channel.darkRate = 0.05;
  const auto res = runProtocol(3000, 0.3, cfg);
  std::stringstream ss;
  writeRoundRecords(ss, res.transcript.rounds);
  CHECK(readRoundRecords(ss) == res.transcript.rounds);

  CHECK(formatRoundRecord(rec(12, F, A, Announcement::D1)) == "12 F A 1 0 0 0 - 0");
  RoundRecord r = rec(12, F, A, Announcement::D1);
  r.siftedBit = 1;
  CHECK(parseRoundRecord("12 F A 1 0 0 0 1 0") == r);
  CHECK_THROWS_AS(parseRoundRecord("12 F X 1 0 0 0 1 0"), std::invalid_argument);
  CHECK_THROWS_AS(parseRoundRecord("12 F A 1 0 0 0"), std::invalid_argument);
}

TEST_CASE("argument validation") {
  SimulationConfig cfg;
  CHECK_THROWS_AS(runProtocol(0, 0.25, cfg), std::invalid_argument);
  CHECK_THROWS_AS(runProtocol(100, 0.0, cfg), std::invalid_argument);
  CHECK_THROWS_AS(runProtocol(100, 1.0, cfg), std::invalid_argument);
}
