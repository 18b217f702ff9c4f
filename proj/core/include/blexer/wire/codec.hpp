#pragma once

#include <string>
#include <string_view>

#include "blexer/wire/envelope.hpp"

namespace blexer::wire {

// One UTF-8 JSON object followed by exactly one '\n' (TCP framing).
std::string encode(const Envelope& msg);

// One JSON object without a terminator (one UDP datagram).
std::string encode_datagram(const Envelope& msg);

// Accepts a line with or without its trailing newline, or a datagram.
// Throws Error with code MalformedJson, UnknownType or SchemaViolation; no
// other exception escapes. Inputs over kMaxFrameBytes are rejected unparsed.
Envelope decode(std::string_view bytes);

// Splits a byte stream into newline-terminated frames. Partial frames are
// buffered; a partial frame exceeding kMaxFrameBytes is discarded and
// counted as oversize.
class LineFramer {
 public:
  template <class Fn>
  void feed(std::string_view chunk, Fn&& on_line) {
    for (char c : chunk) {
      if (c == '\n') {
        if (!discarding_) on_line(std::string_view(buffer_));
        buffer_.clear();
        discarding_ = false;
        continue;
      }
      if (discarding_) continue;
      buffer_.push_back(c);
      if (buffer_.size() > kMaxFrameBytes) {
        buffer_.clear();
        discarding_ = true;
        ++oversize_;
      }
    }
  }
  std::size_t oversize_frames() const { return oversize_; }
  std::size_t pending_bytes() const { return buffer_.size(); }

 private:
  std::string buffer_;
  bool discarding_ = false;
  std::size_t oversize_ = 0;
};

}  // namespace blexer::wire
