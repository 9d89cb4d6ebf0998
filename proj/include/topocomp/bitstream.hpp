#pragma once

#include <cstdint>
#include <vector>

#include "topocomp/errors.hpp"

namespace topocomp {

/// Appends variable-width words to a byte vector, LSB first.
class BitWriter {
 public:
  explicit BitWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(std::uint64_t value, unsigned bits) {
    while (bits > 0) {
      if (used_ == 0) out_.push_back(0);
      const unsigned take = std::min(8u - used_, bits);
      const std::uint8_t mask = std::uint8_t((1u << take) - 1u);
      out_.back() |= std::uint8_t((value & mask) << used_);
      value >>= take;
      bits -= take;
      used_ = (used_ + take) & 7u;
    }
  }

  void align() { used_ = 0; }

 private:
  std::vector<std::uint8_t>& out_;
  unsigned used_ = 0;  // bits occupied in the last byte
};

/// Reads variable-width words written by BitWriter.
class BitReader {
 public:
  BitReader(const std::uint8_t* data, std::size_t size)
      : data_(data), size_(size) {}

  std::uint64_t get(unsigned bits) {
    std::uint64_t value = 0;
    unsigned got = 0;
    while (got < bits) {
      if (byte_ >= size_)
        throw ArchiveError(ArchiveError::Kind::Truncated,
                           "archive payload truncated");
      const unsigned take = std::min(8u - used_, bits - got);
      const std::uint8_t mask = std::uint8_t((1u << take) - 1u);
      value |= std::uint64_t((data_[byte_] >> used_) & mask) << got;
      got += take;
      used_ += take;
      if (used_ == 8) {
        used_ = 0;
        ++byte_;
      }
    }
    return value;
  }

  void align() {
    if (used_ != 0) {
      used_ = 0;
      ++byte_;
    }
  }

  std::size_t byte_position() const { return byte_ + (used_ ? 1 : 0); }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t byte_ = 0;
  unsigned used_ = 0;
};

/// Width in bits of a word able to hold values 0..n-1, at least one bit.
inline unsigned bit_width_for(std::uint64_t n) {
  if (n < 2) return 1;
  unsigned w = 0;
  std::uint64_t v = n - 1;
  while (v > 0) {
    ++w;
    v >>= 1;
  }
  return w;
}

}  // namespace topocomp
