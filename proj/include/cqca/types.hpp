#pragma once

#include <cstdint>
#include <string_view>

namespace cqca {

/// Setting applied by Bob or Charlie in their arm: Faraday-mirror reflection or absorption.
enum class Action : std::uint8_t { F, A };

enum class Arm : std::uint8_t { B, C };

/// What Alice announces for a round.
enum class Announcement : std::uint8_t { D1, D2, Null };

constexpr char toChar(Action a) { return a == Action::F ? 'F' : 'A'; }

constexpr char toChar(Announcement a) {
  switch (a) {
    case Announcement::D1: return '1';
    case Announcement::D2: return '2';
    case Announcement::Null: return 'N';
  }
  return '?';
}

constexpr std::string_view name(Announcement a) {
  switch (a) {
    case Announcement::D1: return "D1";
    case Announcement::D2: return "D2";
    case Announcement::Null: return "NULL";
  }
  return "?";
}

}  // namespace cqca
