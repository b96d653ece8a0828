// Score wire protocol.
//
//   message  = u64-LE header length | UTF-8 JSON header | u64-LE payload length | payload
//   request  = {"op":"score","domain":"image"|"kspace","sigma":s,"shape":[2,H,W],"dtype":"f32"}
//   payload  = little-endian f32, channel-first: the H*W real plane, then the H*W imaginary plane
//   response = {"status":"ok","shape":[2,H,W]} + payload, or {"status":"error","message":...}
//   {"op":"ping"} -> {"status":"ok"} with an empty payload
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddugm/score.hpp"
#include "ddugm/tensor.hpp"

namespace ddugm::wire {

using Bytes = std::vector<std::uint8_t>;

/// Headers or payloads beyond this are treated as corrupt framing.
inline constexpr std::uint64_t kMaxHeaderBytes = 1u << 20;
inline constexpr std::uint64_t kMaxPayloadBytes = 1ull << 32;

struct Message {
  nlohmann::json header;
  Bytes payload;
};

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline void put_f32(Bytes& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

inline float get_f32(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<float>(bits);
}

inline Bytes encode(const Message& msg) {
  const std::string header = msg.header.dump();
  Bytes out;
  out.reserve(16 + header.size() + msg.payload.size());
  put_u64(out, header.size());
  out.insert(out.end(), header.begin(), header.end());
  put_u64(out, msg.payload.size());
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

/// Decodes one complete message from a buffer; the buffer must hold exactly one message.
inline Message decode(const Bytes& bytes) {
  if (bytes.size() < 8) throw ProtocolError("wire: message shorter than its length prefix");
  const std::uint64_t hlen = get_u64(bytes.data());
  if (hlen > kMaxHeaderBytes || bytes.size() < 16 + hlen) throw ProtocolError("wire: truncated header");
  Message msg;
  try {
    msg.header = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(hlen));
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("wire: header is not valid JSON: ") + e.what());
  }
  const std::uint64_t plen = get_u64(bytes.data() + 8 + hlen);
  if (bytes.size() != 16 + hlen + plen) throw ProtocolError("wire: payload length does not match framing");
  msg.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(16 + hlen), bytes.end());
  return msg;
}

/// One H x W frame as [2, H, W] f32 planes.
inline Bytes frame_to_payload(std::span<const cplx> frame) {
  Bytes out;
  out.reserve(frame.size() * 8);
  for (const auto& z : frame) put_f32(out, static_cast<float>(z.real()));
  for (const auto& z : frame) put_f32(out, static_cast<float>(z.imag()));
  return out;
}

inline std::vector<cplx> payload_to_frame(const Bytes& payload, std::size_t height, std::size_t width) {
  const std::size_t n = height * width;
  if (payload.size() != 8 * n)
    throw ProtocolError("wire: payload has " + std::to_string(payload.size()) + " bytes, expected " +
                        std::to_string(8 * n));
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = {get_f32(payload.data() + 4 * i), get_f32(payload.data() + 4 * (n + i))};
  return out;
}

inline Message score_request(ScoreDomain domain, double sigma, std::span<const cplx> frame, std::size_t height,
                             std::size_t width) {
  Message msg;
  msg.header = {{"op", "score"},
                {"domain", std::string(to_string(domain))},
                {"sigma", sigma},
                {"shape", {2, height, width}},
                {"dtype", "f32"}};
  msg.payload = frame_to_payload(frame);
  return msg;
}

inline Message ping_request() { return Message{{{"op", "ping"}}, {}}; }

inline Message ok_reply(std::size_t height, std::size_t width, Bytes payload) {
  return Message{{{"status", "ok"}, {"shape", {2, height, width}}}, std::move(payload)};
}

inline Message error_reply(const std::string& message) {
  return Message{{{"status", "error"}, {"message", message}}, {}};
}

/// Validates a score reply against the requested frame size and returns its values.
inline std::vector<cplx> parse_score_reply(const Message& reply, std::size_t height, std::size_t width) {
  const auto& h = reply.header;
  if (!h.is_object() || !h.contains("status")) throw ProtocolError("wire: reply header lacks 'status'");
  if (h["status"] != "ok")
    throw ProtocolError("score server error: " + h.value("message", std::string("<no message>")));
  if (!h.contains("shape") || h["shape"] != nlohmann::json::array({2, height, width}))
    throw ProtocolError("wire: reply shape " + (h.contains("shape") ? h["shape"].dump() : std::string("<missing>")) +
                        " does not match request [2," + std::to_string(height) + "," + std::to_string(width) + "]");
  return payload_to_frame(reply.payload, height, width);
}

}  // namespace ddugm::wire
