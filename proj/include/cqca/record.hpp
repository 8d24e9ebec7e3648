#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cqca/types.hpp"

namespace cqca {

/// One protocol round as seen after all announcements and disclosures.
struct RoundRecord {
  std::uint64_t roundId = 0;
  Action settingB = Action::F;
  Action settingC = Action::F;
  Announcement outcomeAlice = Announcement::Null;
  bool clickB = false;
  bool clickC = false;
  bool sampled = false;
  /// Present iff Alice announced D1 and the round was not disclosed. Holds
  /// Bob's local bit (F -> 1, A -> 0), which is the shared key bit whenever
  /// the settings are anti-correlated.
  std::optional<int> siftedBit;
  /// Two or more detector clicks in the round.
  bool multipleCount = false;

  bool anticorrelated() const { return settingB != settingC; }
  bool operator==(const RoundRecord&) const = default;
};

/// Line-delimited record file: one round per line, fields separated by one space:
///
///   roundId settingB settingC alice clickB clickC sampled bit multi
///
/// settings are F/A, alice is 1/2/N (D1/D2/NULL), flags are 0/1 and bit is 0/1/-.
void writeRoundRecords(std::ostream& os, std::span<const RoundRecord> rounds);
std::vector<RoundRecord> readRoundRecords(std::istream& is);

std::string formatRoundRecord(const RoundRecord& r);
RoundRecord parseRoundRecord(const std::string& line);

}  // namespace cqca
