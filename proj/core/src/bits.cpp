#include "qtk/bits.hpp"

#include <bit>

#include "qtk/errors.hpp"

namespace qtk {

void BitString::push_bit(bool b) {
  if ((len_ & 63) == 0) words_.push_back(0);
  if (b) words_.back() |= std::uint64_t{1} << (63 - (len_ & 63));
  ++len_;
}

void BitString::write_uint(std::uint64_t value, unsigned width) {
  if (width < 1 || width > 64)
    throw ParamError("write_uint: width must be in [1,64], got " + std::to_string(width));
  if (width < 64 && (value >> width) != 0)
    throw ParamError("write_uint: value " + std::to_string(value) + " does not fit in " +
                     std::to_string(width) + " bits");
  // Fill the tail of the current word, then spill into a fresh one.
  unsigned used = static_cast<unsigned>(len_ & 63);
  if (used == 0) words_.push_back(0);
  unsigned room = 64 - used;
  if (width <= room) {
    words_.back() |= value << (room - width);
  } else {
    unsigned spill = width - room;
    words_.back() |= value >> spill;
    words_.push_back(value << (64 - spill));
  }
  len_ += width;
}

void BitString::write_field(std::uint64_t value, unsigned width) {
  if (width == 0) {
    if (value != 0) throw ParamError("write_field: nonzero value in zero-width field");
    return;
  }
  write_uint(value, width);
}

void BitString::append(const BitString& other) {
  std::size_t i = 0;
  for (; i + 64 <= other.len_; i += 64) write_uint(other.words_[i >> 6], 64);
  for (; i < other.len_; ++i) push_bit(other.bit(i));
}

BitString BitString::sub(std::size_t pos, std::size_t count) const {
  if (pos + count > len_) throw TruncatedStream("sub: range past end of stream");
  BitString b;
  for (std::size_t i = 0; i < count; ++i) b.push_bit(bit(pos + i));
  return b;
}

std::string BitString::to_string() const {
  std::string s;
  s.reserve(len_);
  for (std::size_t i = 0; i < len_; ++i) s.push_back(bit(i) ? '1' : '0');
  return s;
}

BitString BitString::from_string(const std::string& s) {
  BitString b;
  for (char c : s) {
    if (c != '0' && c != '1') throw ParamError("from_string: expected only 0/1");
    b.push_bit(c == '1');
  }
  return b;
}

bool BitString::operator==(const BitString& o) const {
  return len_ == o.len_ && words_ == o.words_;
}

std::uint64_t BitReader::read_uint(unsigned width) {
  if (width < 1 || width > 64)
    throw ParamError("read_uint: width must be in [1,64], got " + std::to_string(width));
  if (pos_ + width > src_->size())
    throw TruncatedStream("read_uint: need " + std::to_string(width) + " bits at " +
                          std::to_string(pos_) + ", stream has " +
                          std::to_string(src_->size()));
  std::uint64_t v = 0;
  for (unsigned i = 0; i < width; ++i) v = (v << 1) | (src_->bit(pos_ + i) ? 1u : 0u);
  pos_ += width;
  return v;
}

std::uint64_t BitReader::read_field(unsigned width) {
  return width == 0 ? 0 : read_uint(width);
}

bool BitReader::read_bit() { return read_uint(1) != 0; }

BitString& write_uint(BitString& sink, std::uint64_t value, unsigned width) {
  sink.write_uint(value, width);
  return sink;
}

std::pair<std::uint64_t, std::size_t> read_uint(const BitString& source, std::size_t cursor,
                                                unsigned width) {
  BitReader r(source, cursor);
  auto v = r.read_uint(width);
  return {v, r.position()};
}

unsigned ceil_log2(std::uint64_t n) {
  if (n <= 1) return 0;
  return 64 - static_cast<unsigned>(std::countl_zero(n - 1));
}

}  // namespace qtk
