#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qkdnet {

enum class CapacityUnit { BitsPerSecond, BitsPerBlock };

std::string_view to_string(CapacityUnit unit);

/// Undirected key-rate link. Endpoints are stored with `a < b`.
struct Link {
  std::string a;
  std::string b;
  double capacity = 0.0;

  bool operator==(const Link&) const = default;
};

/// Canonical identifier of the key shared over an undirected link, "a-b"
/// with the endpoints in lexicographic order.
std::string link_id(std::string_view x, std::string_view y);

/// Undirected capacitated network of users. Immutable once constructed;
/// nodes and links are kept in lexicographic order.
class Network {
 public:
  Network(std::vector<std::string> nodes, std::vector<Link> links,
          CapacityUnit unit = CapacityUnit::BitsPerBlock,
          double block_seconds = 1.0);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  CapacityUnit unit() const noexcept { return unit_; }
  double block_seconds() const noexcept { return block_seconds_; }

  bool has_node(std::string_view id) const;
  /// Declared capacity of the link, if the link exists.
  std::optional<double> capacity(std::string_view x, std::string_view y) const;
  /// Key rate in bits per second (0 for absent links).
  double rate_bps(std::string_view x, std::string_view y) const;
  /// Whole key bits available per planning block (0 for absent links).
  std::int64_t block_bits(std::string_view x, std::string_view y) const;
  std::int64_t block_bits(const Link& link) const;
  /// Neighbours reachable over links with positive capacity.
  std::vector<std::string> neighbors(std::string_view id) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<std::string> nodes_;
  std::vector<Link> links_;
  CapacityUnit unit_;
  double block_seconds_;
};

Network load_network(std::string_view json_text);
Network load_network_file(const std::filesystem::path& path);
std::string serialize_network(const Network& net);

/// One evaluator's subjective trust in other nodes.
struct TrustTable {
  std::string evaluator;
  std::map<std::string, double> trust;
};

struct MergedTrust {
  std::map<std::string, double> entries;

  /// Trust of a node; nodes without an entry are fully untrusted.
  double of(std::string_view node) const;
  bool operator==(const MergedTrust&) const = default;
};

TrustTable load_trust_table(std::string_view json_text);
TrustTable load_trust_table_file(const std::filesystem::path& path);

/// Entrywise minimum over the nodes both inputs rate.
MergedTrust merge_trust(const TrustTable& t1, const TrustTable& t2);
MergedTrust merge_trust(const MergedTrust& t1, const MergedTrust& t2);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace qkdnet
