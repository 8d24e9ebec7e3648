#include "cqca/packet.hpp"

namespace cqca {

namespace {

void putU16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

PartyId checkedParty(std::uint8_t raw) {
  if (raw > static_cast<std::uint8_t>(PartyId::Charlie)) {
    throw MalformedPacket(MalformedPacket::Reason::BadParty, "origin/destination must be Alice, Bob or Charlie");
  }
  return static_cast<PartyId>(raw);
}

}  // namespace

std::uint8_t xorChecksum(std::span<const std::uint8_t> bytes) {
  std::uint8_t x = 0;
  for (auto b : bytes) x ^= b;
  return x;
}

void putU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint64_t getU64(std::span<const std::uint8_t> in, std::size_t offset) {
  if (offset + 8 > in.size()) throw std::out_of_range("u64 read past end of body");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[offset + i];
  return v;
}

void appendPacket(const HybridPacket& p, std::vector<std::uint8_t>& out) {
  if (p.body.size() > HybridPacket::kMaxBody) {
    throw MalformedPacket(MalformedPacket::Reason::BodyTooLarge, "body exceeds 65535 octets");
  }
  if (p.origin == PartyId::Eve || p.destination == PartyId::Eve) {
    throw MalformedPacket(MalformedPacket::Reason::BadParty, "Eve is never a packet endpoint");
  }
  out.reserve(out.size() + HybridPacket::kHeaderSize + p.body.size() + HybridPacket::kFooterSize);
  out.push_back(HybridPacket::kMagic0);
  out.push_back(HybridPacket::kMagic1);
  out.push_back(p.version);
  putU32(out, p.packetNumber);
  out.push_back(static_cast<std::uint8_t>(p.origin));
  out.push_back(static_cast<std::uint8_t>(p.destination));
  putU16(out, static_cast<std::uint16_t>(p.body.size()));
  out.push_back(static_cast<std::uint8_t>(p.bodyType));
  out.insert(out.end(), p.body.begin(), p.body.end());
  out.push_back(HybridPacket::kTerminator);
  out.push_back(xorChecksum(p.body));
}

std::vector<std::uint8_t> encodePacket(const HybridPacket& p) {
  std::vector<std::uint8_t> out;
  appendPacket(p, out);
  return out;
}

HybridPacket decodePacketPrefix(std::span<const std::uint8_t> in, std::size_t& consumed) {
  using R = MalformedPacket::Reason;
  if (in.size() < HybridPacket::kHeaderSize) throw MalformedPacket(R::Truncated, "truncated header");
  if (in[0] != HybridPacket::kMagic0 || in[1] != HybridPacket::kMagic1) throw MalformedPacket(R::BadMagic, "bad magic");

  HybridPacket p;
  p.version = in[2];
  if (p.version != HybridPacket::kVersion) throw MalformedPacket(R::BadVersion, "unsupported version");
  p.packetNumber = (std::uint32_t{in[3]} << 24) | (std::uint32_t{in[4]} << 16) | (std::uint32_t{in[5]} << 8) | in[6];
  p.origin = checkedParty(in[7]);
  p.destination = checkedParty(in[8]);
  const std::size_t bodyLength = (std::size_t{in[9]} << 8) | in[10];
  if (in[11] > static_cast<std::uint8_t>(BodyType::Disclose)) throw MalformedPacket(R::BadBodyType, "unknown body type");
  p.bodyType = static_cast<BodyType>(in[11]);

  const std::size_t total = HybridPacket::kHeaderSize + bodyLength + HybridPacket::kFooterSize;
  if (in.size() < total) throw MalformedPacket(R::Truncated, "truncated: bodyLength exceeds remaining octets");
  const auto body = in.subspan(HybridPacket::kHeaderSize, bodyLength);
  p.body.assign(body.begin(), body.end());

  if (in[HybridPacket::kHeaderSize + bodyLength] != HybridPacket::kTerminator) {
    throw MalformedPacket(R::BadTerminator, "missing footer terminator");
  }
  if (in[HybridPacket::kHeaderSize + bodyLength + 1] != xorChecksum(body)) {
    throw MalformedPacket(R::BadChecksum, "checksum mismatch");
  }
  consumed = total;
  return p;
}

HybridPacket decodePacket(std::span<const std::uint8_t> octets) {
  std::size_t used = 0;
  HybridPacket p = decodePacketPrefix(octets, used);
  if (used != octets.size()) throw MalformedPacket(MalformedPacket::Reason::TrailingBytes, "trailing octets after footer");
  return p;
}

std::vector<HybridPacket> decodeStream(std::span<const std::uint8_t> octets) {
  std::vector<HybridPacket> packets;
  std::size_t offset = 0;
  while (offset < octets.size()) {
    std::size_t used = 0;
    packets.push_back(decodePacketPrefix(octets.subspan(offset), used));
    offset += used;
  }
  return packets;
}

}  // namespace cqca
