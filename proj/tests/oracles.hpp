#pragma once

// Reference computations written independently of the library, used as
// ground truth by the unit, property and acceptance tests.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "qkdnet/topology.hpp"

namespace oracle {

/// Capacity matrix over node positions, using whole key bits per block.
inline std::vector<std::vector<std::int64_t>> capacity_matrix(const qkdnet::Network& net,
                                                               std::map<std::string, int>& pos) {
  pos.clear();
  for (const auto& n : net.nodes()) pos.emplace(n, static_cast<int>(pos.size()));
  std::vector<std::vector<std::int64_t>> cap(pos.size(), std::vector<std::int64_t>(pos.size(), 0));
  for (const auto& l : net.links()) {
    auto bits = static_cast<std::int64_t>(l.capacity);
    cap[pos[l.a]][pos[l.b]] = bits;
    cap[pos[l.b]][pos[l.a]] = bits;
  }
  return cap;
}

/// Minimum over every vertex set holding s but not t of the capacity of the
/// links leaving it.
inline std::int64_t brute_force_min_cut(const qkdnet::Network& net, const std::string& s,
                                        const std::string& t) {
  std::map<std::string, int> pos;
  auto cap = capacity_matrix(net, pos);
  int n = static_cast<int>(pos.size());
  int si = pos.at(s), ti = pos.at(t);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!((mask >> si) & 1u) || ((mask >> ti) & 1u)) continue;
    std::int64_t cut = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (((mask >> i) & 1u) && !((mask >> j) & 1u)) cut += cap[i][j];
      }
    }
    best = std::min(best, cut);
  }
  return best;
}

/// Depth-first augmenting paths on the symmetric capacity matrix.
inline std::int64_t simple_max_flow(const qkdnet::Network& net, const std::string& s,
                                    const std::string& t) {
  std::map<std::string, int> pos;
  auto residual = capacity_matrix(net, pos);
  int n = static_cast<int>(pos.size());
  int si = pos.at(s), ti = pos.at(t);
  std::int64_t total = 0;
  while (true) {
    std::vector<int> parent(n, -1);
    std::vector<int> stack{si};
    parent[si] = si;
    while (!stack.empty() && parent[ti] < 0) {
      int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        if (parent[v] < 0 && residual[u][v] > 0) {
          parent[v] = u;
          stack.push_back(v);
        }
      }
    }
    if (parent[ti] < 0) return total;
    std::int64_t push = std::numeric_limits<std::int64_t>::max();
    for (int v = ti; v != si; v = parent[v]) push = std::min(push, residual[parent[v]][v]);
    for (int v = ti; v != si; v = parent[v]) {
      residual[parent[v]][v] -= push;
      residual[v][parent[v]] += push;
    }
    total += push;
  }
}

/// Trust of an XOR key over disjoint paths: probability that at least two
/// paths are fully honest, by enumerating path states.
inline double path_level_trust(const std::vector<double>& path_trust) {
  std::size_t n = path_trust.size();
  double p = 0.0;
  for (std::uint32_t honest = 0; honest < (1u << n); ++honest) {
    if (std::popcount(honest) < 2) continue;
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= (honest >> i) & 1u ? path_trust[i] : 1.0 - path_trust[i];
    p += w;
  }
  return p;
}

/// Every set partition of {0..n-1}, via restricted growth strings.
inline std::vector<std::vector<std::vector<std::size_t>>> set_partitions(std::size_t n) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::size_t> label(n, 0);
  std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t i, std::size_t blocks) {
    if (i == n) {
      std::vector<std::vector<std::size_t>> part(blocks);
      for (std::size_t k = 0; k < n; ++k) part[label[k]].push_back(k);
      out.push_back(std::move(part));
      return;
    }
    for (std::size_t b = 0; b <= blocks; ++b) {
      label[i] = b;
      grow(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n > 0) grow(0, 0);
  return out;
}

/// Random connected-or-not network over `nodes` with up to `max_links` links
/// and integer capacities in [1, max_cap].
inline qkdnet::Network random_network(std::mt19937_64& rng, int nodes, int max_links, int max_cap) {
  std::vector<std::string> ids;
  for (int i = 0; i < nodes; ++i) ids.push_back(std::string(1, static_cast<char>('A' + i)));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < nodes; ++i) {
    for (int j = i + 1; j < nodes; ++j) pairs.emplace_back(i, j);
  }
  std::shuffle(pairs.begin(), pairs.end(), rng);
  int count = std::uniform_int_distribution<int>(1, std::min<int>(max_links, static_cast<int>(pairs.size())))(rng);
  std::vector<qkdnet::Link> links;
  for (int k = 0; k < count; ++k) {
    auto [i, j] = pairs[k];
    double cap = std::uniform_int_distribution<int>(1, max_cap)(rng);
    links.push_back({ids[i], ids[j], cap});
  }
  return qkdnet::Network(ids, links);
}

}  // namespace oracle
