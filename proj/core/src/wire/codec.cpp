#include "blexer/wire/codec.hpp"

#include <exception>

#include "blexer/common/error.hpp"
#include "blexer/wire/payload_json.hpp"

namespace blexer::wire {

namespace {

constexpr int kMaxNesting = 16;

// Rejects pathologically nested input before it reaches the parser.
bool nesting_within_limit(std::string_view text) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (char c : text) {
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '[' || c == '{') {
      if (++depth > kMaxNesting) return false;
    } else if (c == ']' || c == '}') {
      --depth;
    }
  }
  return true;
}

nlohmann::json envelope_json(const Envelope& msg) {
  nlohmann::json j;
  j["msg_type"] = to_string(msg.type());
  j["seq"] = msg.seq;
  j["sent_at"] = msg.sent_at;
  j["payload"] = payload_to_json(msg.payload);
  return j;
}

Envelope decode_unchecked(std::string_view bytes) {
  if (!bytes.empty() && bytes.back() == '\n') bytes.remove_suffix(1);
  if (!bytes.empty() && bytes.back() == '\r') bytes.remove_suffix(1);
  if (bytes.size() > kMaxFrameBytes)
    throw Error(Errc::MalformedJson, "", "frame exceeds 65536 bytes");
  if (!nesting_within_limit(bytes)) throw Error(Errc::MalformedJson, "", "nesting too deep");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::MalformedJson, "", e.what());
  }
  if (!j.is_object()) throw Error(Errc::SchemaViolation, "", "envelope must be a JSON object");

  auto type_it = j.find("msg_type");
  if (type_it == j.end()) throw Error(Errc::SchemaViolation, "msg_type", "missing");
  if (!type_it->is_string()) throw Error(Errc::SchemaViolation, "msg_type", "expected string");
  const auto type_name = type_it->get<std::string>();
  auto type = parse_msg_type(type_name);
  if (!type) throw Error(Errc::UnknownType, "msg_type", "unknown message type '" + type_name + "'");

  Envelope env;
  auto seq_it = j.find("seq");
  if (seq_it == j.end()) throw Error(Errc::SchemaViolation, "seq", "missing");
  if (seq_it->is_number_unsigned()) {
    env.seq = seq_it->get<std::uint64_t>();
  } else if (seq_it->is_number_integer() && seq_it->get<std::int64_t>() >= 0) {
    env.seq = static_cast<std::uint64_t>(seq_it->get<std::int64_t>());
  } else {
    throw Error(Errc::SchemaViolation, "seq", "expected non-negative integer");
  }

  auto sent_it = j.find("sent_at");
  if (sent_it == j.end()) throw Error(Errc::SchemaViolation, "sent_at", "missing");
  if (sent_it->is_number_unsigned() &&
      sent_it->get<std::uint64_t>() <= static_cast<std::uint64_t>(INT64_MAX)) {
    env.sent_at = static_cast<TimeMs>(sent_it->get<std::uint64_t>());
  } else if (sent_it->is_number_integer() && sent_it->get<std::int64_t>() >= 0) {
    env.sent_at = sent_it->get<std::int64_t>();
  } else {
    throw Error(Errc::SchemaViolation, "sent_at", "expected non-negative integer");
  }

  auto payload_it = j.find("payload");
  if (payload_it == j.end()) throw Error(Errc::SchemaViolation, "payload", "missing");
  env.payload = payload_from_json(*type, *payload_it, "payload");
  return env;
}

}  // namespace

std::string encode(const Envelope& msg) {
  std::string out = envelope_json(msg).dump();
  out.push_back('\n');
  return out;
}

std::string encode_datagram(const Envelope& msg) { return envelope_json(msg).dump(); }

Envelope decode(std::string_view bytes) {
  try {
    return decode_unchecked(bytes);
  } catch (const Error&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::SchemaViolation, "", e.what());
  } catch (const std::bad_alloc&) {
    throw Error(Errc::MalformedJson, "", "allocation failure");
  } catch (const std::exception& e) {
    throw Error(Errc::MalformedJson, "", e.what());
  }
}

}  // namespace blexer::wire
