#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qkdnet/bits.hpp"
#include "qkdnet/flow_routing.hpp"

namespace qkdnet {

/// A contiguous bit range [begin, end) of an original link key.
struct Fragment {
  std::string key_id;
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - begin; }
  bool operator==(const Fragment&) const = default;
  auto operator<=>(const Fragment&) const = default;
};

/// Key bits together with where each bit came from. A fresh link key has a
/// single fragment covering itself; split and concatenated keys carry the
/// fragments of their parts.
struct KeyMaterial {
  std::string id;
  std::pair<std::string, std::string> owners;
  BitString bits;
  std::vector<bool> consumed;
  std::vector<Fragment> origin;

  std::size_t length() const noexcept { return bits.size(); }
  std::size_t available() const;
};

KeyMaterial make_key(std::string id, std::string owner_a, std::string owner_b, BitString bits);
/// Link key between two nodes, identified by link_id(a, b).
KeyMaterial make_link_key(const std::string& a, const std::string& b, BitString bits);

/// Takes consecutive segments starting at the first unconsumed bit and marks
/// them consumed. Throws InputError when the request exceeds what is left.
std::vector<KeyMaterial> split_key(KeyMaterial& key, std::span<const std::size_t> lengths);

/// Concatenates keys into one composite key (fragments preserved).
KeyMaterial concat_keys(std::string id, std::pair<std::string, std::string> owners,
                        std::span<const KeyMaterial> parts);

BitString xor_keys(const KeyMaterial& a, const KeyMaterial& b);

struct Announcement {
  std::string announcer;
  std::string pad_key_id;
  std::size_t pad_offset = 0;
  std::vector<Fragment> payload;  // public descriptor of the plaintext
  BitString ciphertext;
};

using Transcript = std::vector<Announcement>;

/// One announcement per line: announcer, pad_key_id, pad_offset, length,
/// payload_descriptor and hex ciphertext.
std::string transcript_to_jsonl(const Transcript& transcript);
Transcript transcript_from_jsonl(std::string_view text);

struct ChainResult {
  BitString end_key;
  Transcript transcript;
};

/// Relays the first key's bits along a chain of link keys; every key is
/// truncated to the shortest one.
ChainResult run_linear_chain(std::vector<KeyMaterial>& keys);

/// Bits an intermediary received but could not forward.
struct Surplus {
  std::string node;
  std::vector<Fragment> fragments;
};

struct FloodResult {
  std::vector<KeyMaterial> shared;  // source-designated segments reaching the sink
  Transcript transcript;
  std::vector<Surplus> retained;
};

/// Keys indexed by link id.
using KeyRing = std::map<std::string, KeyMaterial>;

/// Executes the flooding protocol of `plan` over `keys` (consumed in place).
FloodResult run_flood(const FloodPlan& plan, KeyRing& keys);

/// What the sink reconstructs from the public transcript, the public plan and
/// its own link keys, sorted canonically (by fragment).
std::vector<KeyMaterial> decode_at_sink(const FloodPlan& plan, const Transcript& transcript,
                                        const KeyRing& sink_keys);

/// Fresh keys for every arc of the plan, `length = capacity` bits, drawn from
/// a seeded generator in link order.
KeyRing generate_keys(const FloodPlan& plan, std::uint64_t seed);

/// Concatenation in canonical (fragment) order.
BitString assemble_rate(std::span<const KeyMaterial> shared);
/// XOR of all keys truncated to the shortest.
BitString assemble_secure(std::span<const KeyMaterial> shared);

}  // namespace qkdnet
