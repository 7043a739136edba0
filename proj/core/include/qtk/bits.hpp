#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qtk {

// Packed bit sequence. Fields are written MSB-first and concatenated with
// no alignment, so size() is exactly the number of bits on the wire.
class BitString {
 public:
  BitString() = default;

  std::size_t size() const { return len_; }
  bool empty() const { return len_ == 0; }

  bool bit(std::size_t i) const {
    return (words_[i >> 6] >> (63 - (i & 63))) & 1u;
  }

  void push_bit(bool b);
  // width in [1,64]; value must fit.
  void write_uint(std::uint64_t value, unsigned width);
  // Same as write_uint but width 0 is a no-op (value must then be 0).
  void write_field(std::uint64_t value, unsigned width);
  void append(const BitString& other);
  BitString sub(std::size_t pos, std::size_t count) const;

  std::string to_string() const;  // "0101..."
  static BitString from_string(const std::string& s);

  bool operator==(const BitString& o) const;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t len_ = 0;
};

// Sequential reader with an explicit cursor.
class BitReader {
 public:
  explicit BitReader(const BitString& src, std::size_t cursor = 0)
      : src_(&src), pos_(cursor) {}

  std::uint64_t read_uint(unsigned width);
  std::uint64_t read_field(unsigned width);  // width 0 reads nothing -> 0
  bool read_bit();

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return src_->size() - pos_; }

 private:
  const BitString* src_;
  std::size_t pos_;
};

// Free-function forms.
BitString& write_uint(BitString& sink, std::uint64_t value, unsigned width);
std::pair<std::uint64_t, std::size_t> read_uint(const BitString& source,
                                                std::size_t cursor,
                                                unsigned width);

// ceil(log2(n)) for n >= 1; 0 for n == 1.
unsigned ceil_log2(std::uint64_t n);

}  // namespace qtk
