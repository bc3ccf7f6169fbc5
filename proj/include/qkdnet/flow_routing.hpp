#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qkdnet/topology.hpp"

namespace qkdnet {

struct Arc {
  std::string from;
  std::string to;
  std::int64_t capacity = 0;

  bool operator==(const Arc&) const = default;
};

/// A flooding routing strategy: every usable link of the base network
/// oriented, with source links pointing out and sink links pointing in.
struct DirectedNetwork {
  std::vector<std::string> nodes;
  std::string source;
  std::string sink;
  std::vector<Arc> arcs;  // one per positive-capacity link, in link order

  bool operator==(const DirectedNetwork&) const = default;
};

struct ArcFlow {
  std::string from;
  std::string to;
  std::int64_t capacity = 0;
  std::int64_t flow = 0;
};

struct FlowResult {
  std::int64_t value = 0;
  std::vector<ArcFlow> edge_flows;
  std::vector<std::string> source_side;  // min cut, residual reachability
};

/// Links that touch neither endpoint and carry positive capacity, sorted.
std::vector<Link> intermediary_links(const Network& net, const std::string& source,
                                     const std::string& sink);

/// Orients `net`: bit i of `index` reverses the i-th intermediary link
/// (default direction is a -> b with a < b).
DirectedNetwork orient(const Network& net, const std::string& source,
                       const std::string& sink, std::uint64_t index);

/// Finite sequence of all 2^(|E|-|E_s|) orientations in binary-counter order.
class OrientationEnumerator {
 public:
  static constexpr std::size_t kDefaultLimit = 20;

  /// Throws LimitError when the intermediary link count exceeds `limit`.
  OrientationEnumerator(const Network& net, std::string source, std::string sink,
                        std::size_t limit = kDefaultLimit);

  std::uint64_t size() const noexcept { return std::uint64_t{1} << free_links_; }
  DirectedNetwork at(std::uint64_t index) const;
  void for_each(const std::function<void(std::uint64_t, const DirectedNetwork&)>& fn) const;

 private:
  const Network* net_;
  std::string source_;
  std::string sink_;
  std::size_t free_links_;
};

/// Edmonds-Karp (breadth-first augmenting paths) on the directed network.
FlowResult max_flow(const DirectedNetwork& net);

/// Max flow with each undirected link usable in either direction. The
/// returned edge flows are net flows, one entry per link carrying flow.
FlowResult undirected_max_flow(const Network& net, const std::string& source,
                               const std::string& sink);

/// True when the orientation admits a topological order.
bool is_acyclic(const DirectedNetwork& net);

/// Topological order of all nodes, smallest identifier first among ready
/// nodes. Throws InputError on a cycle.
std::vector<std::string> topological_order(const DirectedNetwork& net);

struct OptimalFlood {
  std::int64_t value = 0;
  std::vector<DirectedNetwork> optimal;  // every optimal orientation, in order
  std::vector<std::uint64_t> indices;    // orientation index of each entry
  bool exhaustive = true;                // false when the limit forced fallback
};

/// Best max-flow over all orientations. Beyond `limit` intermediary links the
/// value comes from the undirected max flow and a single optimal orientation
/// is derived from an acyclic decomposition of that flow.
OptimalFlood optimal_flood_value(const Network& net, const std::string& source,
                                 const std::string& sink,
                                 std::size_t limit = OrientationEnumerator::kDefaultLimit);

/// Orientation that carries `flow` (an undirected max flow) without cycles.
DirectedNetwork orientation_from_flow(const Network& net, const std::string& source,
                                      const std::string& sink, const FlowResult& flow);

struct PathSet {
  /// Interior nodes of each path, source side first. An empty path is the
  /// direct source-sink link.
  std::vector<std::vector<std::string>> paths;
  std::set<std::string> cross_points;
};

/// Nodes occurring in more than one path.
std::set<std::string> cross_points_of(const std::vector<std::vector<std::string>>& paths);

/// Internally vertex-disjoint source-sink paths (node-split unit-capacity
/// flow). Throws InfeasibleError carrying the maximum count when fewer than
/// `required` exist.
PathSet find_mnops(const Network& net, const std::string& source, const std::string& sink,
                   std::size_t required);

/// Number of internally vertex-disjoint paths (vertex connectivity, with a
/// direct link counting once).
std::size_t max_disjoint_paths(const Network& net, const std::string& source,
                               const std::string& sink);

/// Bottleneck rate (bits per second) along source, interior..., sink.
double path_rate_bps(const Network& net, const std::string& source, const std::string& sink,
                     const std::vector<std::string>& interior);

/// A runnable flooding plan: an acyclic optimal orientation, the max flow on
/// it, the processing order of intermediaries and each node's output order.
struct FloodPlan {
  DirectedNetwork orientation;
  std::vector<ArcFlow> flows;
  std::vector<std::string> order;  // intermediaries, topological
  std::map<std::string, std::vector<std::string>> outputs;
  std::int64_t value = 0;

  std::int64_t flow(const std::string& from, const std::string& to) const;
};

FloodPlan make_flood_plan(const Network& net, const std::string& source,
                          const std::string& sink,
                          std::size_t limit = OrientationEnumerator::kDefaultLimit);

/// Plan for a given orientation (flows from max_flow on it).
FloodPlan plan_for_orientation(const DirectedNetwork& orientation);

std::string plan_to_json(const FloodPlan& plan);
FloodPlan plan_from_json(std::string_view json_text);

}  // namespace qkdnet
