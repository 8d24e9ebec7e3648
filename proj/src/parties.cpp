#include "cqca/parties.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace cqca::parties {

namespace {

using Purpose = RandomStream::Purpose;

void finishClicks(RoundTrace& t, int photonClicks, bool darkB, bool darkC) {
  t.record.clickB = t.record.clickB || darkB;
  t.record.clickC = t.record.clickC || darkC;
  t.record.multipleCount = photonClicks + (darkB ? 1 : 0) + (darkC ? 1 : 0) >= 2;
}

void playInterferometer(RoundTrace& t, const SimulationConfig& cfg, RandomStream& rq) {
  auto& rec = t.record;
  auto state = photonics::emit();
  state = channel::transmitOnward(state, cfg.channel, cfg.attack, rq);
  t.eveAttached = state.probeDim() == photonics::kProbeDim;

  // Bob's absorption is evaluated before Charlie's.
  auto afterB = photonics::applyPartyAction(state, Arm::B, rec.settingB, rq);
  auto afterC = photonics::applyPartyAction(afterB.state, Arm::C, rec.settingC, rq);
  state = channel::returnLeg(afterC.state);

  int clicks = 0;
  photonics::DetectionEvent ev;
  if (afterB.absorbed || afterC.absorbed) {
    rec.clickB = afterB.absorbed;
    rec.clickC = afterC.absorbed;
    clicks = 1;
    const photonics::Probe none = photonics::Probe::Zero(state.probeDim());
    ev = photonics::sampleDetection(none, none, cfg.channel.lossRate, cfg.channel.darkRate, rq);
    if (t.eveAttached) t.eveProbe = afterB.absorbed ? state.ampB : state.ampC;
  } else {
    const auto ports = photonics::recombineAtBS(state);
    ev = photonics::sampleDetection(ports.ampD1, ports.ampD2, cfg.channel.lossRate, cfg.channel.darkRate, rq);
    if (t.eveAttached) t.eveProbe = ev.probe;
  }
  clicks += ev.clicks;
  rec.outcomeAlice = ev.outcome;

  const bool darkB = rec.settingB == Action::A && rq.bernoulli(cfg.channel.darkRate);
  const bool darkC = rec.settingC == Action::A && rq.bernoulli(cfg.channel.darkRate);
  finishClicks(t, clicks, darkB, darkC);
}

void playSinglePath(RoundTrace& t, const SimulationConfig& cfg, RandomStream& ra, RandomStream& rq) {
  auto& rec = t.record;
  Arm target = Arm::B;
  switch (cfg.attack.target) {
    case channel::AttackTarget::B: target = Arm::B; break;
    case channel::AttackTarget::C: target = Arm::C; break;
    case channel::AttackTarget::Either: target = ra.bernoulli(0.5) ? Arm::B : Arm::C; break;
  }
  const Action targetSetting = target == Arm::B ? rec.settingB : rec.settingC;
  const auto out = adversary::aliceSinglePath(targetSetting, cfg.attack.strategy, ra);
  t.alice = out.state;
  rec.outcomeAlice = out.announcement;
  if (target == Arm::B) {
    rec.clickB = out.targetClicked;
  } else {
    rec.clickC = out.targetClicked;
  }
  const bool darkB = rec.settingB == Action::A && rq.bernoulli(cfg.channel.darkRate);
  const bool darkC = rec.settingC == Action::A && rq.bernoulli(cfg.channel.darkRate);
  finishClicks(t, out.targetClicked ? 1 : 0, darkB, darkC);
}

void playDoublePath(RoundTrace& t, const SimulationConfig& cfg, RandomStream& ra, RandomStream& rq) {
  auto& rec = t.record;
  const auto out = adversary::aliceDoublePath(rec.settingB, rec.settingC, ra);
  t.alice.attackedRound = true;
  t.alice.probeResult = adversary::ProbeResult::NotApplicable;
  t.alice.fakeAnnouncement = out.announcement;
  rec.outcomeAlice = out.announcement;
  rec.clickB = out.clickB;
  rec.clickC = out.clickC;
  const bool darkB = rec.settingB == Action::A && rq.bernoulli(cfg.channel.darkRate);
  const bool darkC = rec.settingC == Action::A && rq.bernoulli(cfg.channel.darkRate);
  finishClicks(t, (out.clickB ? 1 : 0) + (out.clickC ? 1 : 0), darkB, darkC);
}

class PacketLog {
 public:
  void send(PartyId from, PartyId to, BodyType type, std::vector<std::uint8_t> body) {
    HybridPacket p;
    p.packetNumber = next_[{from, to}]++;
    p.origin = from;
    p.destination = to;
    p.bodyType = type;
    p.body = std::move(body);
    packets_.push_back(std::move(p));
  }
  std::vector<HybridPacket> take() { return std::move(packets_); }

 private:
  std::map<std::pair<PartyId, PartyId>, std::uint32_t> next_;
  std::vector<HybridPacket> packets_;
};

std::vector<std::uint8_t> tagged(std::string_view tag, std::uint64_t value) {
  std::vector<std::uint8_t> body(tag.begin(), tag.end());
  putU64(body, value);
  return body;
}

std::vector<std::uint8_t> roundBody(std::uint64_t roundId, std::initializer_list<char> fields) {
  std::vector<std::uint8_t> body;
  putU64(body, roundId);
  for (char c : fields) body.push_back(static_cast<std::uint8_t>(c));
  return body;
}

/// Bob's choice of disclosure indices: partial Fisher-Yates over all rounds.
std::vector<std::uint64_t> chooseDisclosure(std::uint64_t n, std::uint64_t count, RandomStream& rng) {
  std::vector<std::uint64_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.below(n - i)]);
  }
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Action chooseSetting(RandomStream& rng) { return rng.bernoulli(0.5) ? Action::F : Action::A; }

RoundTrace playRound(std::uint64_t roundId, const SimulationConfig& cfg) {
  auto rb = RandomStream::forLane(cfg.seed, roundId, Purpose::Bob);
  auto rc = RandomStream::forLane(cfg.seed, roundId, Purpose::Charlie);
  auto rq = RandomStream::forLane(cfg.seed, roundId, Purpose::Quantum);
  auto ra = RandomStream::forLane(cfg.seed, roundId, Purpose::Alice);

  RoundTrace t;
  t.record.roundId = roundId;
  t.record.settingB = chooseSetting(rb);
  t.record.settingC = chooseSetting(rc);

  using channel::AttackKind;
  const auto kind = cfg.attack.kind;
  const bool aliceAttacks =
      (kind == AttackKind::AliceSinglePath || kind == AttackKind::AliceDoublePath) && ra.bernoulli(cfg.attack.p);
  if (!aliceAttacks) {
    playInterferometer(t, cfg, rq);
  } else if (kind == AttackKind::AliceSinglePath) {
    playSinglePath(t, cfg, ra, rq);
  } else {
    playDoublePath(t, cfg, ra, rq);
  }
  return t;
}

std::vector<RoundTrace> simulateRounds(std::uint64_t n, const SimulationConfig& cfg) {
  cfg.channel.validate();
  cfg.attack.validate();
  std::vector<RoundTrace> out(n);
  unsigned lanes = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  if (n < 4096) lanes = 1;
  lanes = static_cast<unsigned>(std::min<std::uint64_t>(lanes, n == 0 ? 1 : n));

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) out[i] = playRound(i, cfg);
  };
  if (lanes <= 1) {
    work(0, n);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::uint64_t chunk = (n + lanes - 1) / lanes;
  for (unsigned k = 0; k < lanes; ++k) {
    const std::uint64_t b = k * chunk;
    const std::uint64_t e = std::min<std::uint64_t>(n, b + chunk);
    if (b < e) pool.emplace_back(work, b, e);
  }
  pool.clear();
  return out;
}

std::vector<RoundRecord> recordsOf(std::span<const RoundTrace> traces) {
  std::vector<RoundRecord> out;
  out.reserve(traces.size());
  for (const auto& t : traces) out.push_back(t.record);
  return out;
}

std::optional<int> localSiftedBit(PartyId party, Action ownSetting, Announcement alice, bool sampled) {
  if (alice != Announcement::D1 || sampled) return std::nullopt;
  if (party == PartyId::Bob) return ownSetting == Action::F ? 1 : 0;
  if (party == PartyId::Charlie) return ownSetting == Action::A ? 1 : 0;
  throw std::invalid_argument("only Bob and Charlie hold sifted keys");
}

std::size_t SiftedKeys::mismatches() const {
  std::size_t m = 0;
  for (std::size_t i = 0; i < bob.size(); ++i) m += bob[i] != charlie[i];
  return m;
}

SiftedKeys siftKey(std::span<const RoundRecord> rounds) {
  SiftedKeys k;
  for (const auto& r : rounds) {
    const auto b = localSiftedBit(PartyId::Bob, r.settingB, r.outcomeAlice, r.sampled);
    const auto c = localSiftedBit(PartyId::Charlie, r.settingC, r.outcomeAlice, r.sampled);
    if (!b || !c) continue;
    k.bob.push_back(*b);
    k.charlie.push_back(*c);
    k.roundIds.push_back(r.roundId);
  }
  return k;
}

ProtocolResult runProtocol(std::uint64_t n, double f, const SimulationConfig& cfg,
                           const metrics::TolerancePolicy& policy) {
  if (n == 0) throw std::invalid_argument("n must be positive");
  if (!(f > 0.0 && f < 1.0)) throw std::invalid_argument("test fraction f must lie in (0, 1)");

  PacketLog log;
  // Charlie's request, Alice notifies Bob, Bob's authenticated request, Charlie's consent.
  log.send(PartyId::Charlie, PartyId::Alice, BodyType::Control, tagged("REQ", n));
  log.send(PartyId::Alice, PartyId::Bob, BodyType::Control, tagged("NTF", n));
  log.send(PartyId::Bob, PartyId::Alice, BodyType::Control, tagged("AUT", n));
  log.send(PartyId::Charlie, PartyId::Alice, BodyType::Control, tagged("CNS", n));

  // Photons in flight, parties act.
  auto traces = simulateRounds(n, cfg);
  for (std::uint64_t id = 0; id < n; ++id) {
    std::vector<std::uint8_t> slot;
    putU64(slot, id);
    log.send(PartyId::Alice, PartyId::Bob, BodyType::QuantumSlot, slot);
    log.send(PartyId::Alice, PartyId::Charlie, BodyType::QuantumSlot, std::move(slot));
  }

  // Alice announces every outcome.
  for (const auto& t : traces) {
    const char a = toChar(t.record.outcomeAlice);
    log.send(PartyId::Alice, PartyId::Bob, BodyType::Announce, roundBody(t.record.roundId, {a}));
    log.send(PartyId::Alice, PartyId::Charlie, BodyType::Announce, roundBody(t.record.roundId, {a}));
  }

  // Bob proposes the disclosure set, Charlie confirms it.
  const auto disclosureCount = static_cast<std::uint64_t>(std::floor(static_cast<double>(n) * f));
  auto rs = RandomStream::forLane(cfg.seed, 0, Purpose::Sampling);
  const auto disclosed = chooseDisclosure(n, disclosureCount, rs);
  constexpr std::size_t kIndicesPerPacket = 4096;
  std::size_t next = 0;
  do {
    std::vector<std::uint8_t> body{'S', 'M', 'P'};
    const std::size_t end = std::min(disclosed.size(), next + kIndicesPerPacket);
    for (; next < end; ++next) putU64(body, disclosed[next]);
    log.send(PartyId::Bob, PartyId::Charlie, BodyType::Control, std::move(body));
  } while (next < disclosed.size());
  log.send(PartyId::Charlie, PartyId::Bob, BodyType::Control, tagged("CNF", disclosureCount));

  for (auto id : disclosed) {
    auto& r = traces[id].record;
    r.sampled = true;
    log.send(PartyId::Bob, PartyId::Charlie, BodyType::Disclose, roundBody(id, {toChar(r.settingB), r.clickB ? '1' : '0'}));
    log.send(PartyId::Charlie, PartyId::Bob, BodyType::Disclose, roundBody(id, {toChar(r.settingC), r.clickC ? '1' : '0'}));
  }

  ProtocolResult result;
  auto& rounds = result.transcript.rounds;
  rounds = recordsOf(traces);
  for (auto& r : rounds) r.siftedBit = localSiftedBit(PartyId::Bob, r.settingB, r.outcomeAlice, r.sampled);

  // Figures of merit on the disclosed rounds.
  std::vector<RoundRecord> sample;
  sample.reserve(disclosed.size());
  for (auto id : disclosed) sample.push_back(rounds[id]);
  result.report = metrics::buildReport(sample, rounds, cfg.channel, policy);
  result.transcript.verdict = {result.report.pass, result.report.failures()};

  // Eve measures after Alice's announcement.
  result.eve = eveRecords(traces, cfg);

  // Sifting only after the checks pass.
  if (result.transcript.verdict.keyProduced) result.keys = siftKey(rounds);
  result.transcript.packets = log.take();
  return result;
}

std::vector<adversary::EveRecord> eveRecords(std::span<const RoundTrace> traces, const SimulationConfig& cfg) {
  std::vector<adversary::EveRecord> out;
  for (const auto& t : traces) {
    if (!t.eveAttached || t.record.sampled || t.record.outcomeAlice != Announcement::D1) continue;
    adversary::EveRecord er;
    er.roundId = t.record.roundId;
    auto re = RandomStream::forLane(cfg.seed, t.record.roundId, Purpose::Eve);
    er.guess = adversary::eveExtractBit({cfg.attack.theta, t.eveProbe, Announcement::D1}, re);
    if (t.record.anticorrelated()) er.trueBit = t.record.settingB == Action::F ? 1 : 0;
    out.push_back(er);
  }
  return out;
}

std::string bitsToHex(std::span<const int> bits) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string hex;
  for (std::size_t i = 0; i < bits.size(); i += 8) {
    unsigned byte = 0;
    for (std::size_t j = 0; j < 8; ++j) {
      byte <<= 1;
      if (i + j < bits.size() && bits[i + j]) byte |= 1;
    }
    hex.push_back(digits[byte >> 4]);
    hex.push_back(digits[byte & 0xF]);
  }
  return hex;
}

}  // namespace cqca::parties
