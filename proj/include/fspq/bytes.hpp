#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fspq {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

// Best-effort wipe that the optimizer may not elide.
void secure_wipe(void* p, size_t n) noexcept;
void secure_wipe(Bytes& b) noexcept;
template <size_t N>
void secure_wipe(std::array<uint8_t, N>& a) noexcept {
  secure_wipe(a.data(), a.size());
}

std::string to_hex(BytesView data);
std::optional<Bytes> from_hex(const std::string& hex);

inline BytesView as_view(const Bytes& b) { return {b.data(), b.size()}; }
inline BytesView as_view(const std::string& s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

// Little-endian scalar encoding used by every wire format in this project.
inline void put_u64_le(uint8_t* out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(v >> (8 * i));
}
inline uint64_t get_u64_le(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(p[i]) << (8 * i);
  return v;
}
inline void put_u32_le(uint8_t* out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<uint8_t>(v >> (8 * i));
}
inline uint32_t get_u32_le(const uint8_t* p) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
  return v;
}

class ByteWriter {
 public:
  Bytes take() { return std::move(buf_); }
  const Bytes& data() const { return buf_; }
  size_t size() const { return buf_.size(); }

  void raw(BytesView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
  void u8(uint8_t v) { buf_.push_back(v); }
  void u16(uint16_t v) {
    buf_.push_back(static_cast<uint8_t>(v));
    buf_.push_back(static_cast<uint8_t>(v >> 8));
  }
  void u32(uint32_t v) {
    size_t at = buf_.size();
    buf_.resize(at + 4);
    put_u32_le(buf_.data() + at, v);
  }
  void u64(uint64_t v) {
    size_t at = buf_.size();
    buf_.resize(at + 8);
    put_u64_le(buf_.data() + at, v);
  }
  // Length-prefixed blob (u32 length).
  void blob(BytesView b) {
    u32(static_cast<uint32_t>(b.size()));
    raw(b);
  }
  void zeros(size_t n) { buf_.insert(buf_.end(), n, 0); }

 private:
  Bytes buf_;
};

// Strict cursor-based reader: every helper throws ParseError on shortage, and
// callers are expected to check finished() where trailing garbage matters.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class ByteReader {
 public:
  explicit ByteReader(BytesView data) : data_(data) {}

  size_t remaining() const { return data_.size() - pos_; }
  bool finished() const { return pos_ == data_.size(); }

  BytesView raw(size_t n) {
    need(n);
    BytesView out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  Bytes bytes(size_t n) {
    BytesView v = raw(n);
    return Bytes(v.begin(), v.end());
  }
  uint8_t u8() { return raw(1)[0]; }
  uint16_t u16() {
    BytesView v = raw(2);
    return static_cast<uint16_t>(v[0] | (v[1] << 8));
  }
  uint32_t u32() { return get_u32_le(raw(4).data()); }
  uint64_t u64() { return get_u64_le(raw(8).data()); }
  Bytes blob(size_t max_len = SIZE_MAX) {
    uint32_t n = u32();
    if (n > max_len || n > remaining()) throw ParseError("blob length out of range");
    return bytes(n);
  }

 private:
  void need(size_t n) const {
    if (remaining() < n) throw ParseError("unexpected end of input");
  }
  BytesView data_;
  size_t pos_ = 0;
};

}  // namespace fspq
