#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cqca/record.hpp"

namespace cqca {

namespace {

Action parseAction(char c) {
  if (c == 'F') return Action::F;
  if (c == 'A') return Action::A;
  throw std::invalid_argument(std::string("bad setting '") + c + "'");
}

Announcement parseAnnouncement(char c) {
  switch (c) {
    case '1': return Announcement::D1;
    case '2': return Announcement::D2;
    case 'N': return Announcement::Null;
    default: throw std::invalid_argument(std::string("bad announcement '") + c + "'");
  }
}

bool parseFlag(char c) {
  if (c == '0') return false;
  if (c == '1') return true;
  throw std::invalid_argument(std::string("bad flag '") + c + "'");
}

}  // namespace

std::string formatRoundRecord(const RoundRecord& r) {
  std::string line = std::to_string(r.roundId);
  const char fields[] = {' ',
                         toChar(r.settingB),
                         ' ',
                         toChar(r.settingC),
                         ' ',
                         toChar(r.outcomeAlice),
                         ' ',
                         r.clickB ? '1' : '0',
                         ' ',
                         r.clickC ? '1' : '0',
                         ' ',
                         r.sampled ? '1' : '0',
                         ' ',
                         r.siftedBit ? static_cast<char>('0' + *r.siftedBit) : '-',
                         ' ',
                         r.multipleCount ? '1' : '0'};
  line.append(fields, sizeof(fields));
  return line;
}

RoundRecord parseRoundRecord(const std::string& line) {
  std::istringstream in(line);
  std::uint64_t id = 0;
  std::string tok[8];
  if (!(in >> id)) throw std::invalid_argument("record line: missing round id");
  for (auto& t : tok) {
    if (!(in >> t) || t.size() != 1) throw std::invalid_argument("record line: expected single-character field");
  }
  std::string extra;
  if (in >> extra) throw std::invalid_argument("record line: trailing fields");

  RoundRecord r;
  r.roundId = id;
  r.settingB = parseAction(tok[0][0]);
  r.settingC = parseAction(tok[1][0]);
  r.outcomeAlice = parseAnnouncement(tok[2][0]);
  r.clickB = parseFlag(tok[3][0]);
  r.clickC = parseFlag(tok[4][0]);
  r.sampled = parseFlag(tok[5][0]);
  if (tok[6][0] != '-') r.siftedBit = parseFlag(tok[6][0]) ? 1 : 0;
  r.multipleCount = parseFlag(tok[7][0]);
  return r;
}

void writeRoundRecords(std::ostream& os, std::span<const RoundRecord> rounds) {
  for (const auto& r : rounds) os << formatRoundRecord(r) << '\n';
}

std::vector<RoundRecord> readRoundRecords(std::istream& is) {
  std::vector<RoundRecord> rounds;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    rounds.push_back(parseRoundRecord(line));
  }
  return rounds;
}

}  // namespace cqca
