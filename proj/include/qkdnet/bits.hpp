#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace qkdnet {

/// Bit string with one byte per bit. Keys in this toolkit are at most a few
/// thousand bits, so the simple layout wins over packing.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t n) : bits_(n, 0) {}

  /// Parses "0101..." (any other character is rejected).
  static BitString from_binary(std::string_view text);
  /// Parses MSB-first packed hex holding `nbits` bits.
  static BitString from_hex(std::string_view hex, std::size_t nbits);
  static BitString random(std::size_t n, std::mt19937_64& rng);

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  void flip(std::size_t i) { bits_[i] ^= 1; }

  BitString slice(std::size_t begin, std::size_t end) const;
  void append(const BitString& other);
  void push_back(bool v) { bits_.push_back(v ? 1 : 0); }

  /// Bitwise XOR; lengths must match.
  BitString operator^(const BitString& other) const;
  bool operator==(const BitString&) const = default;

  std::string to_binary() const;
  std::string to_hex() const;

 private:
  std::vector<std::uint8_t> bits_;
};

}  // namespace qkdnet
