#include "qkdnet/flow_routing.hpp"

#include <algorithm>
#include <optional>
#include <limits>
#include <queue>
#include <set>

#include <json.hpp>

#include "json_util.hpp"
#include "qkdnet/error.hpp"

namespace qkdnet {

namespace {

// Residual graph with paired forward/backward edges.
class FlowGraph {
 public:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    std::int64_t residual;
    std::int64_t capacity;  // 0 for backward edges
  };

  explicit FlowGraph(std::size_t n) : adj_(n) {}

  // Returns a handle (node, position) of the forward edge.
  std::pair<std::size_t, std::size_t> add_arc(std::size_t u, std::size_t v, std::int64_t cap) {
    adj_[u].push_back({v, adj_[v].size(), cap, cap});
    adj_[v].push_back({u, adj_[u].size() - 1, 0, 0});
    return {u, adj_[u].size() - 1};
  }

  std::int64_t flow_on(std::pair<std::size_t, std::size_t> handle) const {
    const Edge& e = adj_[handle.first][handle.second];
    return e.capacity - e.residual;
  }

  std::int64_t edmonds_karp(std::size_t s, std::size_t t) {
    std::int64_t total = 0;
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    for (;;) {
      std::vector<std::pair<std::size_t, std::size_t>> parent(adj_.size(), {kNone, kNone});
      parent[s] = {s, kNone};
      std::queue<std::size_t> queue;
      queue.push(s);
      while (!queue.empty() && parent[t].first == kNone) {
        std::size_t u = queue.front();
        queue.pop();
        for (std::size_t i = 0; i < adj_[u].size(); ++i) {
          const Edge& e = adj_[u][i];
          if (e.residual > 0 && parent[e.to].first == kNone) {
            parent[e.to] = {u, i};
            queue.push(e.to);
          }
        }
      }
      if (parent[t].first == kNone) return total;

      std::int64_t push = std::numeric_limits<std::int64_t>::max();
      for (std::size_t v = t; v != s; v = parent[v].first) {
        push = std::min(push, adj_[parent[v].first][parent[v].second].residual);
      }
      for (std::size_t v = t; v != s; v = parent[v].first) {
        Edge& e = adj_[parent[v].first][parent[v].second];
        e.residual -= push;
        adj_[v][e.rev].residual += push;
      }
      total += push;
    }
  }

  std::vector<bool> reachable(std::size_t s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::vector<std::size_t> stack{s};
    seen[s] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (const Edge& e : adj_[u]) {
        if (e.residual > 0 && !seen[e.to]) {
          seen[e.to] = true;
          stack.push_back(e.to);
        }
      }
    }
    return seen;
  }

  const std::vector<Edge>& edges(std::size_t u) const { return adj_[u]; }

 private:
  std::vector<std::vector<Edge>> adj_;
};

std::size_t index_of(const std::vector<std::string>& sorted, const std::string& id) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
  if (it == sorted.end() || *it != id) throw InputError("unknown node '" + id + "'");
  return static_cast<std::size_t>(it - sorted.begin());
}

void check_endpoints(const std::vector<std::string>& nodes, const std::string& source,
                     const std::string& sink) {
  if (!std::binary_search(nodes.begin(), nodes.end(), source)) {
    throw InputError("source '" + source + "' is not in the network");
  }
  if (!std::binary_search(nodes.begin(), nodes.end(), sink)) {
    throw InputError("sink '" + sink + "' is not in the network");
  }
  if (source == sink) throw InputError("source and sink must differ");
}

std::vector<std::string> names_where(const std::vector<std::string>& nodes,
                                     const std::vector<bool>& mask) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (mask[i]) out.push_back(nodes[i]);
  }
  return out;
}

}  // namespace

std::vector<Link> intermediary_links(const Network& net, const std::string& source,
                                     const std::string& sink) {
  std::vector<Link> out;
  for (const auto& link : net.links()) {
    if (net.block_bits(link) <= 0) continue;
    if (link.a == source || link.b == source || link.a == sink || link.b == sink) continue;
    out.push_back(link);
  }
  return out;
}

DirectedNetwork orient(const Network& net, const std::string& source, const std::string& sink,
                       std::uint64_t index) {
  check_endpoints(net.nodes(), source, sink);
  DirectedNetwork out{net.nodes(), source, sink, {}};
  std::size_t free_index = 0;
  for (const auto& link : net.links()) {
    std::int64_t cap = net.block_bits(link);
    if (cap <= 0) continue;
    if (link.a == source || link.b == sink) {
      out.arcs.push_back({link.a, link.b, cap});
    } else if (link.b == source || link.a == sink) {
      out.arcs.push_back({link.b, link.a, cap});
    } else {
      bool reversed = free_index < 64 && ((index >> free_index) & 1u);
      ++free_index;
      if (reversed) {
        out.arcs.push_back({link.b, link.a, cap});
      } else {
        out.arcs.push_back({link.a, link.b, cap});
      }
    }
  }
  return out;
}

OrientationEnumerator::OrientationEnumerator(const Network& net, std::string source,
                                             std::string sink, std::size_t limit)
    : net_(&net), source_(std::move(source)), sink_(std::move(sink)) {
  check_endpoints(net.nodes(), source_, sink_);
  free_links_ = intermediary_links(net, source_, sink_).size();
  if (free_links_ > limit || free_links_ >= 63) {
    throw LimitError(std::to_string(free_links_) + " intermediary links exceed the orientation limit of " +
                     std::to_string(limit) + "; use optimal_flood_value directly");
  }
}

DirectedNetwork OrientationEnumerator::at(std::uint64_t index) const {
  if (index >= size()) throw InputError("orientation index out of range");
  return orient(*net_, source_, sink_, index);
}

void OrientationEnumerator::for_each(
    const std::function<void(std::uint64_t, const DirectedNetwork&)>& fn) const {
  for (std::uint64_t i = 0; i < size(); ++i) fn(i, at(i));
}

FlowResult max_flow(const DirectedNetwork& net) {
  check_endpoints(net.nodes, net.source, net.sink);
  FlowGraph graph(net.nodes.size());
  std::vector<std::pair<std::size_t, std::size_t>> handles;
  handles.reserve(net.arcs.size());
  for (const auto& arc : net.arcs) {
    if (arc.capacity < 0) throw InputError("negative arc capacity " + arc.from + "->" + arc.to);
    handles.push_back(
        graph.add_arc(index_of(net.nodes, arc.from), index_of(net.nodes, arc.to), arc.capacity));
  }
  std::size_t s = index_of(net.nodes, net.source);
  FlowResult result;
  result.value = graph.edmonds_karp(s, index_of(net.nodes, net.sink));
  for (std::size_t i = 0; i < net.arcs.size(); ++i) {
    const auto& arc = net.arcs[i];
    result.edge_flows.push_back({arc.from, arc.to, arc.capacity, graph.flow_on(handles[i])});
  }
  result.source_side = names_where(net.nodes, graph.reachable(s));
  return result;
}

FlowResult undirected_max_flow(const Network& net, const std::string& source,
                               const std::string& sink) {
  check_endpoints(net.nodes(), source, sink);
  const auto& nodes = net.nodes();
  FlowGraph graph(nodes.size());
  struct Pair {
    const Link* link;
    std::int64_t cap;
    std::pair<std::size_t, std::size_t> forward, backward;
  };
  std::vector<Pair> pairs;
  for (const auto& link : net.links()) {
    std::int64_t cap = net.block_bits(link);
    if (cap <= 0) continue;
    std::size_t a = index_of(nodes, link.a);
    std::size_t b = index_of(nodes, link.b);
    auto fwd = graph.add_arc(a, b, cap);
    auto bwd = graph.add_arc(b, a, cap);
    pairs.push_back({&link, cap, fwd, bwd});
  }
  std::size_t s = index_of(nodes, source);
  FlowResult result;
  result.value = graph.edmonds_karp(s, index_of(nodes, sink));
  for (const auto& p : pairs) {
    std::int64_t net_flow = graph.flow_on(p.forward) - graph.flow_on(p.backward);
    if (net_flow > 0) {
      result.edge_flows.push_back({p.link->a, p.link->b, p.cap, net_flow});
    } else if (net_flow < 0) {
      result.edge_flows.push_back({p.link->b, p.link->a, p.cap, -net_flow});
    }
  }
  result.source_side = names_where(nodes, graph.reachable(s));
  return result;
}

namespace {

// Kahn's algorithm over the given node subset; smallest ready id first.
std::optional<std::vector<std::string>> kahn(const std::vector<std::string>& nodes,
                                             const std::vector<std::pair<std::string, std::string>>& edges) {
  std::map<std::string, std::size_t> indegree;
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& n : nodes) indegree[n] = 0;
  for (const auto& [from, to] : edges) {
    out[from].push_back(to);
    ++indegree[to];
  }
  std::set<std::string> ready;
  for (const auto& [n, d] : indegree) {
    if (d == 0) ready.insert(n);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    std::string n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const auto& m : out[n]) {
      if (--indegree[m] == 0) ready.insert(m);
    }
  }
  if (order.size() != nodes.size()) return std::nullopt;
  return order;
}

std::vector<std::pair<std::string, std::string>> arc_pairs(const DirectedNetwork& net) {
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& arc : net.arcs) edges.emplace_back(arc.from, arc.to);
  return edges;
}

}  // namespace

bool is_acyclic(const DirectedNetwork& net) { return kahn(net.nodes, arc_pairs(net)).has_value(); }

std::vector<std::string> topological_order(const DirectedNetwork& net) {
  auto order = kahn(net.nodes, arc_pairs(net));
  if (!order) throw InputError("cyclic orientation has no topological order");
  return *order;
}

DirectedNetwork orientation_from_flow(const Network& net, const std::string& source,
                                      const std::string& sink, const FlowResult& flow) {
  // Cancel circulations so the flow support becomes a DAG.
  std::map<std::pair<std::string, std::string>, std::int64_t> f;
  for (const auto& e : flow.edge_flows) {
    if (e.flow > 0) f[{e.from, e.to}] += e.flow;
  }
  for (;;) {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [edge, amount] : f) {
      if (amount > 0) out[edge.first].push_back(edge.second);
    }
    std::map<std::string, int> state;  // 1 = on stack, 2 = done
    std::vector<std::string> cycle;
    std::function<bool(const std::string&, std::vector<std::string>&)> dfs =
        [&](const std::string& u, std::vector<std::string>& stack) {
          state[u] = 1;
          stack.push_back(u);
          for (const auto& v : out[u]) {
            if (state[v] == 1) {
              auto it = std::find(stack.begin(), stack.end(), v);
              cycle.assign(it, stack.end());
              return true;
            }
            if (state[v] == 0 && dfs(v, stack)) return true;
          }
          stack.pop_back();
          state[u] = 2;
          return false;
        };
    for (const auto& n : net.nodes()) {
      std::vector<std::string> stack;
      if (state[n] == 0 && dfs(n, stack)) break;
    }
    if (cycle.empty()) break;
    std::int64_t least = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      least = std::min(least, f[{cycle[i], cycle[(i + 1) % cycle.size()]}]);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      f[{cycle[i], cycle[(i + 1) % cycle.size()]}] -= least;
    }
  }

  std::vector<std::string> middle;
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& n : net.nodes()) {
    if (n != source && n != sink) middle.push_back(n);
  }
  for (const auto& [edge, amount] : f) {
    if (amount <= 0) continue;
    if (edge.first == source || edge.first == sink || edge.second == source || edge.second == sink) continue;
    edges.push_back(edge);
  }
  auto order = kahn(middle, edges);
  if (!order) throw Error(ErrorKind::Internal, "flow support is cyclic after cancellation");
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order->size(); ++i) position[(*order)[i]] = i;

  std::uint64_t index = 0;
  auto links = intermediary_links(net, source, sink);
  for (std::size_t i = 0; i < links.size() && i < 64; ++i) {
    if (position[links[i].b] < position[links[i].a]) index |= std::uint64_t{1} << i;
  }
  return orient(net, source, sink, index);
}

OptimalFlood optimal_flood_value(const Network& net, const std::string& source,
                                 const std::string& sink, std::size_t limit) {
  FlowResult undirected = undirected_max_flow(net, source, sink);
  OptimalFlood result;
  auto free_links = intermediary_links(net, source, sink).size();
  if (free_links > limit || free_links >= 63) {
    result.exhaustive = false;
    result.value = undirected.value;
    result.optimal.push_back(orientation_from_flow(net, source, sink, undirected));
    std::uint64_t index = 0;
    auto links = intermediary_links(net, source, sink);
    for (std::size_t i = 0; i < links.size() && i < 64; ++i) {
      const auto& arcs = result.optimal.front().arcs;
      auto it = std::find_if(arcs.begin(), arcs.end(), [&](const Arc& a) {
        return a.from == links[i].b && a.to == links[i].a;
      });
      if (it != arcs.end()) index |= std::uint64_t{1} << i;
    }
    result.indices.push_back(index);
    return result;
  }

  OrientationEnumerator orientations(net, source, sink, limit);
  result.value = -1;
  orientations.for_each([&](std::uint64_t index, const DirectedNetwork& directed) {
    std::int64_t value = max_flow(directed).value;
    if (value > result.value) {
      result.value = value;
      result.optimal.clear();
      result.indices.clear();
    }
    if (value == result.value) {
      result.optimal.push_back(directed);
      result.indices.push_back(index);
    }
  });
  if (result.value != undirected.value) {
    throw Error(ErrorKind::Internal, "best orientation flow " + std::to_string(result.value) +
                                         " differs from undirected max flow " +
                                         std::to_string(undirected.value));
  }
  return result;
}

std::set<std::string> cross_points_of(const std::vector<std::vector<std::string>>& paths) {
  std::map<std::string, std::size_t> count;
  for (const auto& path : paths) {
    std::set<std::string> unique(path.begin(), path.end());
    for (const auto& n : unique) ++count[n];
  }
  std::set<std::string> out;
  for (const auto& [n, c] : count) {
    if (c > 1) out.insert(n);
  }
  return out;
}

namespace {

// Vertex-disjoint paths through a node-split unit-capacity network.
std::vector<std::vector<std::string>> disjoint_paths(const Network& net, const std::string& source,
                                                     const std::string& sink) {
  check_endpoints(net.nodes(), source, sink);
  const auto& nodes = net.nodes();
  std::size_t n = nodes.size();
  // node i: in = 2i, out = 2i + 1; the source uses only out, the sink only in.
  auto in = [](std::size_t i) { return 2 * i; };
  auto out = [](std::size_t i) { return 2 * i + 1; };
  FlowGraph graph(2 * n);
  std::size_t s = index_of(nodes, source);
  std::size_t t = index_of(nodes, sink);
  for (std::size_t i = 0; i < n; ++i) {
    if (i != s && i != t) graph.add_arc(in(i), out(i), 1);
  }
  for (const auto& link : net.links()) {
    if (net.block_bits(link) <= 0) continue;
    std::size_t a = index_of(nodes, link.a);
    std::size_t b = index_of(nodes, link.b);
    auto tail = [&](std::size_t i) { return i == s ? out(s) : (i == t ? in(t) : out(i)); };
    auto head = [&](std::size_t i) { return i == s ? out(s) : (i == t ? in(t) : in(i)); };
    if (a != t && b != s) graph.add_arc(tail(a), head(b), 1);
    if (b != t && a != s) graph.add_arc(tail(b), head(a), 1);
  }
  std::int64_t count = graph.edmonds_karp(out(s), in(t));

  // Walk flow-carrying edges from the source; each unit is one path.
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> used;
  std::vector<std::vector<std::string>> paths;
  for (std::int64_t k = 0; k < count; ++k) {
    std::vector<std::string> interior;
    std::size_t u = out(s);
    std::size_t guard = 0;
    while (u != in(t)) {
      bool moved = false;
      const auto& edges = graph.edges(u);
      for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& e = edges[i];
        std::int64_t f = e.capacity - e.residual;
        if (e.capacity > 0 && f > used[{u, i}]) {
          ++used[{u, i}];
          u = e.to;
          moved = true;
          break;
        }
      }
      if (!moved || ++guard > 4 * n + 4) throw Error(ErrorKind::Internal, "path extraction failed");
      if (u % 2 == 0 && u != in(t)) interior.push_back(nodes[u / 2]);
    }
    paths.push_back(std::move(interior));
  }
  std::sort(paths.begin(), paths.end(), [](const auto& l, const auto& r) {
    if (l.size() != r.size()) return l.size() < r.size();
    return l < r;
  });
  return paths;
}

}  // namespace

PathSet find_mnops(const Network& net, const std::string& source, const std::string& sink,
                   std::size_t required) {
  if (required < 1) throw InputError("required path count must be at least 1");
  auto paths = disjoint_paths(net, source, sink);
  if (paths.size() < required) {
    throw InfeasibleError("only " + std::to_string(paths.size()) + " disjoint paths between " +
                              source + " and " + sink + ", " + std::to_string(required) +
                              " required",
                          static_cast<double>(paths.size()));
  }
  paths.resize(required);
  return PathSet{std::move(paths), {}};
}

std::size_t max_disjoint_paths(const Network& net, const std::string& source,
                               const std::string& sink) {
  return disjoint_paths(net, source, sink).size();
}

double path_rate_bps(const Network& net, const std::string& source, const std::string& sink,
                     const std::vector<std::string>& interior) {
  std::vector<std::string> hops;
  hops.push_back(source);
  hops.insert(hops.end(), interior.begin(), interior.end());
  hops.push_back(sink);
  double rate = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    rate = std::min(rate, net.rate_bps(hops[i], hops[i + 1]));
  }
  return rate;
}

std::int64_t FloodPlan::flow(const std::string& from, const std::string& to) const {
  for (const auto& f : flows) {
    if (f.from == from && f.to == to) return f.flow;
  }
  return 0;
}

FloodPlan plan_for_orientation(const DirectedNetwork& orientation) {
  FloodPlan plan;
  plan.orientation = orientation;
  FlowResult flow = max_flow(orientation);
  plan.flows = flow.edge_flows;
  plan.value = flow.value;
  for (const auto& n : topological_order(orientation)) {
    if (n != orientation.source && n != orientation.sink) plan.order.push_back(n);
  }
  for (const auto& n : plan.order) {
    std::vector<std::string> outs;
    for (const auto& f : plan.flows) {
      if (f.from == n && f.flow > 0) outs.push_back(f.to);
    }
    std::sort(outs.begin(), outs.end(),
              [&](const auto& l, const auto& r) { return link_id(n, l) < link_id(n, r); });
    plan.outputs[n] = std::move(outs);
  }
  return plan;
}

FloodPlan make_flood_plan(const Network& net, const std::string& source, const std::string& sink,
                          std::size_t limit) {
  OptimalFlood optimum = optimal_flood_value(net, source, sink, limit);
  if (optimum.value == 0) throw InfeasibleError("no path between " + source + " and " + sink, 0.0);
  for (const auto& candidate : optimum.optimal) {
    if (is_acyclic(candidate)) return plan_for_orientation(candidate);
  }
  return plan_for_orientation(
      orientation_from_flow(net, source, sink, undirected_max_flow(net, source, sink)));
}

std::string plan_to_json(const FloodPlan& plan) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["source"] = plan.orientation.source;
  doc["sink"] = plan.orientation.sink;
  doc["value"] = plan.value;
  doc["nodes"] = plan.orientation.nodes;
  ordered_json arcs = ordered_json::array();
  for (const auto& f : plan.flows) {
    arcs.push_back({{"from", f.from}, {"to", f.to}, {"capacity", f.capacity}, {"flow", f.flow}});
  }
  doc["arcs"] = std::move(arcs);
  doc["order"] = plan.order;
  ordered_json outputs = ordered_json::object();
  for (const auto& n : plan.order) outputs[n] = plan.outputs.at(n);
  doc["outputs"] = std::move(outputs);
  return doc.dump(2) + "\n";
}

FloodPlan plan_from_json(std::string_view json_text) {
  using nlohmann::json;
  json doc = detail::parse_json(json_text);
  detail::require_object(doc, "");
  FloodPlan plan;
  plan.orientation.source = detail::require_string(doc, "/source");
  plan.orientation.sink = detail::require_string(doc, "/sink");
  for (const auto& n : detail::require_array(doc, "/nodes")) {
    if (!n.is_string()) throw InputError("/nodes: node ids must be strings");
    plan.orientation.nodes.push_back(n.get<std::string>());
  }
  std::sort(plan.orientation.nodes.begin(), plan.orientation.nodes.end());
  const auto& arcs = detail::require_array(doc, "/arcs");
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    std::string path = "/arcs/" + std::to_string(i);
    ArcFlow f{detail::require_string(arcs[i], "/from", path), detail::require_string(arcs[i], "/to", path),
              static_cast<std::int64_t>(detail::require_number(arcs[i], "/capacity", path)),
              static_cast<std::int64_t>(detail::require_number(arcs[i], "/flow", path))};
    if (f.flow < 0 || f.flow > f.capacity) throw InputError(path + ": flow outside [0, capacity]");
    plan.orientation.arcs.push_back({f.from, f.to, f.capacity});
    plan.flows.push_back(std::move(f));
  }
  check_endpoints(plan.orientation.nodes, plan.orientation.source, plan.orientation.sink);
  for (const auto& arc : plan.orientation.arcs) {
    index_of(plan.orientation.nodes, arc.from);
    index_of(plan.orientation.nodes, arc.to);
  }
  for (const auto& n : detail::require_array(doc, "/order")) {
    if (!n.is_string()) throw InputError("/order: node ids must be strings");
    plan.order.push_back(n.get<std::string>());
  }
  const auto& outputs = doc.contains("outputs") ? doc["outputs"] : json::object();
  if (!outputs.is_object()) throw InputError("/outputs: expected an object");
  for (const auto& n : plan.order) {
    std::vector<std::string> outs;
    if (outputs.contains(n)) {
      for (const auto& m : outputs[n]) outs.push_back(m.get<std::string>());
    }
    plan.outputs[n] = std::move(outs);
  }
  // The processing order must respect the orientation.
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < plan.order.size(); ++i) position[plan.order[i]] = i;
  for (const auto& arc : plan.orientation.arcs) {
    auto f = position.find(arc.from);
    auto t = position.find(arc.to);
    if (f != position.end() && t != position.end() && f->second >= t->second) {
      throw InputError("/order: not a topological order of the arcs (" + arc.from + "->" + arc.to + ")");
    }
  }
  if (!is_acyclic(plan.orientation)) throw InputError("/arcs: cyclic orientation");
  plan.value = 0;
  for (const auto& f : plan.flows) {
    if (f.from == plan.orientation.source) plan.value += f.flow;
  }
  if (doc.contains("value") && doc["value"].get<std::int64_t>() != plan.value) {
    throw InputError("/value: does not match the flow leaving the source");
  }
  return plan;
}

}  // namespace qkdnet
