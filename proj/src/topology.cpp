#include "qkdnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "qkdnet/error.hpp"

namespace qkdnet {

using nlohmann::json;

std::string_view to_string(CapacityUnit unit) {
  return unit == CapacityUnit::BitsPerSecond ? "bps" : "bits_per_block";
}

std::string link_id(std::string_view x, std::string_view y) {
  if (y < x) std::swap(x, y);
  std::string out(x);
  out += '-';
  out += y;
  return out;
}

Network::Network(std::vector<std::string> nodes, std::vector<Link> links, CapacityUnit unit,
                 double block_seconds)
    : nodes_(std::move(nodes)), links_(std::move(links)), unit_(unit), block_seconds_(block_seconds) {
  if (!(block_seconds_ > 0) || !std::isfinite(block_seconds_)) {
    throw InputError("block_seconds must be a positive number");
  }
  std::sort(nodes_.begin(), nodes_.end());
  if (auto dup = std::adjacent_find(nodes_.begin(), nodes_.end()); dup != nodes_.end()) {
    throw InputError("duplicate node '" + *dup + "'");
  }
  for (auto& link : links_) {
    if (link.a == link.b) throw InputError("self-loop on node '" + link.a + "'");
    if (link.b < link.a) std::swap(link.a, link.b);
    if (!has_node(link.a)) throw InputError("link references unknown node '" + link.a + "'");
    if (!has_node(link.b)) throw InputError("link references unknown node '" + link.b + "'");
    if (!(link.capacity >= 0) || !std::isfinite(link.capacity)) {
      throw InputError("negative capacity on link " + link_id(link.a, link.b));
    }
  }
  std::sort(links_.begin(), links_.end(), [](const Link& l, const Link& r) {
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
  });
  auto dup = std::adjacent_find(links_.begin(), links_.end(), [](const Link& l, const Link& r) {
    return l.a == r.a && l.b == r.b;
  });
  if (dup != links_.end()) throw InputError("duplicate link " + link_id(dup->a, dup->b));
}

bool Network::has_node(std::string_view id) const {
  return std::binary_search(nodes_.begin(), nodes_.end(), id);
}

std::optional<double> Network::capacity(std::string_view x, std::string_view y) const {
  if (y < x) std::swap(x, y);
  auto it = std::lower_bound(links_.begin(), links_.end(), std::pair{x, y},
                             [](const Link& l, const std::pair<std::string_view, std::string_view>& k) {
                               return std::tie(l.a, l.b) < std::tie(k.first, k.second);
                             });
  if (it == links_.end() || it->a != x || it->b != y) return std::nullopt;
  return it->capacity;
}

double Network::rate_bps(std::string_view x, std::string_view y) const {
  auto cap = capacity(x, y);
  if (!cap) return 0.0;
  return unit_ == CapacityUnit::BitsPerSecond ? *cap : *cap / block_seconds_;
}

std::int64_t Network::block_bits(std::string_view x, std::string_view y) const {
  auto cap = capacity(x, y);
  if (!cap) return 0;
  return block_bits(Link{std::string(x), std::string(y), *cap});
}

std::int64_t Network::block_bits(const Link& link) const {
  double bits = unit_ == CapacityUnit::BitsPerSecond ? link.capacity * block_seconds_ : link.capacity;
  return static_cast<std::int64_t>(std::floor(bits));
}

std::vector<std::string> Network::neighbors(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& link : links_) {
    if (link.capacity <= 0) continue;
    if (link.a == id) out.push_back(link.b);
    if (link.b == id) out.push_back(link.a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Network load_network(std::string_view json_text) {
  json doc = detail::parse_json(json_text);
  detail::require_object(doc, "");
  auto unit_text = detail::require_string(doc, "/unit");
  CapacityUnit unit;
  if (unit_text == "bps") {
    unit = CapacityUnit::BitsPerSecond;
  } else if (unit_text == "bits_per_block") {
    unit = CapacityUnit::BitsPerBlock;
  } else {
    throw InputError("/unit: unknown unit '" + unit_text + "'");
  }
  double block_seconds = 1.0;
  if (doc.contains("block_seconds")) {
    block_seconds = detail::require_number(doc, "/block_seconds");
    if (!(block_seconds > 0)) throw InputError("/block_seconds: must be positive");
  }

  const json& nodes_doc = detail::require_array(doc, "/nodes");
  std::vector<std::string> nodes;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < nodes_doc.size(); ++i) {
    std::string path = "/nodes/" + std::to_string(i);
    if (!nodes_doc[i].is_string()) throw InputError(path + ": node id must be a string");
    auto id = nodes_doc[i].get<std::string>();
    if (id.empty()) throw InputError(path + ": empty node id");
    if (!seen.insert(id).second) throw InputError(path + ": duplicate node '" + id + "'");
    nodes.push_back(id);
  }

  const json& links_doc = detail::require_array(doc, "/links");
  std::vector<Link> links;
  std::set<std::pair<std::string, std::string>> pairs;
  for (std::size_t i = 0; i < links_doc.size(); ++i) {
    std::string path = "/links/" + std::to_string(i);
    const json& entry = links_doc[i];
    if (!entry.is_object()) throw InputError(path + ": link must be an object");
    Link link{detail::require_string(entry, "/a", path), detail::require_string(entry, "/b", path),
              detail::require_number(entry, "/capacity", path)};
    if (link.a == link.b) throw InputError(path + ": self-loop on node '" + link.a + "'");
    if (!seen.contains(link.a)) throw InputError(path + "/a: unknown node '" + link.a + "'");
    if (!seen.contains(link.b)) throw InputError(path + "/b: unknown node '" + link.b + "'");
    if (link.capacity < 0) throw InputError(path + "/capacity: negative capacity");
    auto key = link.a < link.b ? std::pair{link.a, link.b} : std::pair{link.b, link.a};
    if (!pairs.insert(key).second) {
      throw InputError(path + ": duplicate link " + link_id(link.a, link.b));
    }
    links.push_back(std::move(link));
  }
  return Network(std::move(nodes), std::move(links), unit, block_seconds);
}

Network load_network_file(const std::filesystem::path& path) {
  return load_network(read_text_file(path));
}

std::string serialize_network(const Network& net) {
  json doc;
  doc["unit"] = std::string(to_string(net.unit()));
  doc["block_seconds"] = net.block_seconds();
  doc["nodes"] = net.nodes();
  json links = json::array();
  for (const auto& link : net.links()) {
    links.push_back({{"a", link.a}, {"b", link.b}, {"capacity", link.capacity}});
  }
  doc["links"] = std::move(links);
  return doc.dump(2) + "\n";
}

double MergedTrust::of(std::string_view node) const {
  auto it = entries.find(std::string(node));
  return it == entries.end() ? 0.0 : it->second;
}

TrustTable load_trust_table(std::string_view json_text) {
  json doc = detail::parse_json(json_text);
  detail::require_object(doc, "");
  TrustTable table;
  table.evaluator = detail::require_string(doc, "/evaluator");
  const json& trust = doc.contains("trust") ? doc["trust"] : json();
  if (!trust.is_object()) throw InputError("/trust: expected an object");
  for (const auto& [node, value] : trust.items()) {
    std::string path = "/trust/" + node;
    if (!value.is_number()) throw InputError(path + ": trust must be a number");
    double t = value.get<double>();
    if (!(t >= 0.0 && t <= 1.0)) throw InputError(path + ": trust must lie in [0, 1]");
    if (node == table.evaluator) throw InputError(path + ": evaluator cannot rate itself");
    table.trust.emplace(node, t);
  }
  return table;
}

TrustTable load_trust_table_file(const std::filesystem::path& path) {
  return load_trust_table(read_text_file(path));
}

MergedTrust merge_trust(const MergedTrust& t1, const MergedTrust& t2) {
  MergedTrust out;
  for (const auto& [node, value] : t1.entries) {
    if (auto it = t2.entries.find(node); it != t2.entries.end()) {
      out.entries.emplace(node, std::min(value, it->second));
    }
  }
  if (out.entries.empty()) throw InputError("no common nodes");
  return out;
}

MergedTrust merge_trust(const TrustTable& t1, const TrustTable& t2) {
  return merge_trust(MergedTrust{t1.trust}, MergedTrust{t2.trust});
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace qkdnet
