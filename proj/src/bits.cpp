#include "qkdnet/bits.hpp"

#include "qkdnet/error.hpp"

namespace qkdnet {

BitString BitString::from_binary(std::string_view text) {
  BitString out;
  out.bits_.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') throw InputError("invalid binary digit '" + std::string(1, ch) + "'");
    out.bits_.push_back(ch == '1' ? 1 : 0);
  }
  return out;
}

namespace {

int hex_value(char ch) {
  if (ch >= '0' && ch <= '9') return ch - '0';
  if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
  if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
  return -1;
}

}  // namespace

BitString BitString::from_hex(std::string_view hex, std::size_t nbits) {
  if (hex.size() != (nbits + 7) / 8 * 2) {
    throw InputError("hex string of " + std::to_string(hex.size()) + " digits cannot hold " +
                     std::to_string(nbits) + " bits");
  }
  BitString out(nbits);
  for (std::size_t i = 0; i < nbits; ++i) {
    int nibble = hex_value(hex[i / 4]);
    if (nibble < 0) throw InputError("invalid hex digit in '" + std::string(hex) + "'");
    out.bits_[i] = (nibble >> (3 - i % 4)) & 1;
  }
  for (std::size_t j = (nbits + 3) / 4; j < hex.size(); ++j) {
    if (hex_value(hex[j]) < 0) throw InputError("invalid hex digit in '" + std::string(hex) + "'");
  }
  return out;
}

BitString BitString::random(std::size_t n, std::mt19937_64& rng) {
  BitString out(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    out.bits_[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return out;
}

BitString BitString::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > bits_.size()) throw InputError("bit slice out of range");
  BitString out;
  out.bits_.assign(bits_.begin() + static_cast<std::ptrdiff_t>(begin),
                   bits_.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

void BitString::append(const BitString& other) {
  bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
}

BitString BitString::operator^(const BitString& other) const {
  if (other.size() != size()) {
    throw InputError("xor of bit strings with lengths " + std::to_string(size()) + " and " +
                     std::to_string(other.size()));
  }
  BitString out(size());
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ other.bits_[i];
  return out;
}

std::string BitString::to_binary() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::string BitString::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::size_t bytes = (bits_.size() + 7) / 8;
  std::string out(bytes * 2, '0');
  for (std::size_t j = 0; j < bytes * 2; ++j) {
    int nibble = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      std::size_t i = j * 4 + k;
      nibble = (nibble << 1) | (i < bits_.size() ? bits_[i] : 0);
    }
    out[j] = kDigits[nibble];
  }
  return out;
}

}  // namespace qkdnet
