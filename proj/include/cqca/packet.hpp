#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cqca {

enum class PartyId : std::uint8_t { Alice = 0, Bob = 1, Charlie = 2, Eve = 3 };

enum class BodyType : std::uint8_t { QuantumSlot = 0, Control = 1, Announce = 2, Disclose = 3 };

/// Hybrid packet: classical header, body, classical footer.
///
/// Wire layout (multi-octet integers big-endian):
///
///   offset  size  field
///        0     2  magic 0xC1 0xCA
///        2     1  version
///        3     4  packetNumber
///        7     1  origin
///        8     1  destination
///        9     2  bodyLength
///       11     1  bodyType
///       12     n  body
///     12+n     1  terminator 0b00000011
///     13+n     1  XOR of body octets
///
/// A QUANTUM_SLOT body is the 64-bit round identifier of the simulated photon.
struct HybridPacket {
  std::uint8_t version = kVersion;
  std::uint32_t packetNumber = 0;
  PartyId origin = PartyId::Alice;
  PartyId destination = PartyId::Bob;
  BodyType bodyType = BodyType::Control;
  std::vector<std::uint8_t> body;

  static constexpr std::uint8_t kMagic0 = 0xC1;
  static constexpr std::uint8_t kMagic1 = 0xCA;
  static constexpr std::uint8_t kVersion = 1;
  static constexpr std::uint8_t kTerminator = 0b11;
  static constexpr std::size_t kHeaderSize = 12;
  static constexpr std::size_t kFooterSize = 2;
  static constexpr std::size_t kMaxBody = 0xFFFF;

  bool operator==(const HybridPacket&) const = default;
};

class MalformedPacket : public std::runtime_error {
 public:
  enum class Reason { BadMagic, BadVersion, BadParty, BadBodyType, Truncated, BadTerminator, BadChecksum, TrailingBytes, BodyTooLarge };

  MalformedPacket(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

std::uint8_t xorChecksum(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> encodePacket(const HybridPacket& p);
void appendPacket(const HybridPacket& p, std::vector<std::uint8_t>& out);

/// Decodes exactly one packet; trailing octets are rejected.
HybridPacket decodePacket(std::span<const std::uint8_t> octets);

/// Decodes the packet at the front of `octets` and reports how many octets it used.
HybridPacket decodePacketPrefix(std::span<const std::uint8_t> octets, std::size_t& consumed);

/// Splits a concatenated packet stream.
std::vector<HybridPacket> decodeStream(std::span<const std::uint8_t> octets);

// Body helpers.
void putU64(std::vector<std::uint8_t>& out, std::uint64_t v);
std::uint64_t getU64(std::span<const std::uint8_t> in, std::size_t offset);

}  // namespace cqca
