#include "qkdnet/trust_calculus.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "json_util.hpp"
#include "qkdnet/error.hpp"

namespace qkdnet {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// prod_{i != skip} (1 - T_i); skip = n means no exclusion.
double untrusted_product(std::span<const double> t, std::size_t skip) {
  double p = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i != skip) p *= 1.0 - t[i];
  }
  return p;
}

void check_trust(double t, const std::string& what) {
  if (!(t >= 0.0 && t <= 1.0)) throw InputError(what + " trust must lie in [0, 1]");
}

}  // namespace

TrustAssessment make_assessment(std::vector<std::vector<std::string>> paths,
                                std::map<std::string, double> node_trust, AdversaryMode mode) {
  TrustAssessment a;
  a.paths.cross_points = cross_points_of(paths);
  a.paths.paths = std::move(paths);
  a.node_trust = std::move(node_trust);
  a.mode = mode;
  return a;
}

std::vector<double> path_trusts(const TrustAssessment& assess) {
  std::vector<double> out;
  for (const auto& path : assess.paths.paths) {
    double t = 1.0;
    for (const auto& node : path) {
      auto it = assess.node_trust.find(node);
      if (it == assess.node_trust.end()) throw InputError("missing trust entry for node '" + node + "'");
      check_trust(it->second, "node '" + node + "'");
      t *= it->second;
    }
    out.push_back(t);
  }
  return out;
}

double compromise_probability_closed(const TrustAssessment& assess) {
  auto t = path_trusts(assess);
  if (t.empty()) throw InputError("no paths");
  double p = untrusted_product(t, t.size());
  for (std::size_t k = 0; k < t.size(); ++k) p += untrusted_product(t, k);
  for (const auto& x : cross_points_of(assess.paths.paths)) {
    double term = assess.node_trust.at(x);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& path = assess.paths.paths[i];
      if (std::find(path.begin(), path.end(), x) == path.end()) term *= 1.0 - t[i];
    }
    p += term;
  }
  return clamp01(p);
}

double trust_xor(std::span<const double> path_trust) {
  if (path_trust.empty()) throw InputError("no paths");
  for (double t : path_trust) check_trust(t, "path");
  double compromised = untrusted_product(path_trust, path_trust.size());
  for (std::size_t k = 0; k < path_trust.size(); ++k) {
    compromised += path_trust[k] * untrusted_product(path_trust, k);
  }
  return clamp01(1.0 - compromised);
}

double trust_xor(const TrustAssessment& assess) {
  if (!cross_points_of(assess.paths.paths).empty()) {
    throw InputError("overlapping paths have no closed form; use compromise_oracle");
  }
  return trust_xor(path_trusts(assess));
}

double trust_partitioned(std::span<const std::vector<std::size_t>> subsets,
                         std::span<const double> path_trust) {
  if (subsets.empty()) throw InputError("empty partition");
  std::vector<bool> seen(path_trust.size(), false);
  double t = 1.0;
  for (const auto& subset : subsets) {
    std::vector<double> member_trust;
    for (std::size_t i : subset) {
      if (i >= path_trust.size()) throw InputError("partition refers to unknown path " + std::to_string(i));
      if (seen[i]) throw InputError("path " + std::to_string(i) + " appears in two subsets");
      seen[i] = true;
      member_trust.push_back(path_trust[i]);
    }
    t *= trust_xor(member_trust);
  }
  return t;
}

double trust_partitioned(std::span<const std::vector<std::size_t>> subsets,
                         const TrustAssessment& assess) {
  if (!cross_points_of(assess.paths.paths).empty()) {
    throw InputError("overlapping paths have no closed form; use compromise_oracle");
  }
  auto t = path_trusts(assess);
  return trust_partitioned(subsets, t);
}

double trust_symmetric(unsigned m, unsigned n_prime, double trust) {
  check_trust(trust, "common");
  if (m == 0 || n_prime == 0) throw InputError("subset count and size must be positive");
  double subset = 0.0;
  double binom = 1.0;  // C(n', k)
  for (unsigned k = 0; k + 2 <= n_prime; ++k) {
    subset += binom * std::pow(trust, n_prime - k) * std::pow(1.0 - trust, k);
    binom = binom * (n_prime - k) / (k + 1);
  }
  return std::pow(subset, m);
}

bool is_compromised(const std::vector<std::vector<std::string>>& paths,
                    const std::map<std::string, bool>& dishonest, AdversaryMode mode) {
  auto bad = [&](const std::string& n) {
    auto it = dishonest.find(n);
    return it != dishonest.end() && it->second;
  };
  std::vector<bool> path_bad;
  for (const auto& path : paths) path_bad.push_back(std::any_of(path.begin(), path.end(), bad));
  std::size_t bad_paths = static_cast<std::size_t>(std::count(path_bad.begin(), path_bad.end(), true));
  if (mode == AdversaryMode::Pooling) return bad_paths == paths.size();
  if (bad_paths + 1 >= paths.size()) return true;
  // An honest node reads the key when every path avoiding it is exposed.
  for (const auto& x : cross_points_of(paths)) {
    if (bad(x)) continue;
    bool others_exposed = true;
    for (std::size_t i = 0; i < paths.size() && others_exposed; ++i) {
      bool through = std::find(paths[i].begin(), paths[i].end(), x) != paths[i].end();
      if (!through && !path_bad[i]) others_exposed = false;
    }
    if (others_exposed) return true;
  }
  return false;
}

OracleResult compromise_oracle(const TrustAssessment& assess, AdversaryMode mode,
                               const OracleOptions& options) {
  const auto& paths = assess.paths.paths;
  if (paths.empty()) throw InputError("no paths");
  std::vector<std::string> nodes;
  for (const auto& path : paths) nodes.insert(nodes.end(), path.begin(), path.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  std::vector<double> trust;
  for (const auto& n : nodes) {
    auto it = assess.node_trust.find(n);
    if (it == assess.node_trust.end()) throw InputError("missing trust entry for node '" + n + "'");
    check_trust(it->second, "node '" + n + "'");
    trust.push_back(it->second);
  }
  auto position = [&](const std::string& n) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), n) - nodes.begin());
  };
  // Bit masks of nodes per path, and of paths per cross-point.
  std::vector<std::uint64_t> path_mask;
  for (const auto& path : paths) {
    std::uint64_t mask = 0;
    for (const auto& n : path) mask |= std::uint64_t{1} << (position(n) % 64);
    path_mask.push_back(mask);
  }
  std::vector<std::pair<std::uint64_t, std::vector<std::size_t>>> crossings;  // node bit, paths avoiding it
  for (const auto& x : cross_points_of(paths)) {
    std::uint64_t bit = std::uint64_t{1} << (position(x) % 64);
    std::vector<std::size_t> avoiding;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (!(path_mask[i] & bit)) avoiding.push_back(i);
    }
    crossings.emplace_back(bit, std::move(avoiding));
  }

  auto compromised = [&](std::uint64_t dishonest) {
    std::size_t bad_paths = 0;
    std::uint64_t bad_set = 0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      if (path_mask[i] & dishonest) {
        ++bad_paths;
        bad_set |= std::uint64_t{1} << i;
      }
    }
    if (mode == AdversaryMode::Pooling) return bad_paths == paths.size();
    if (bad_paths + 1 >= paths.size()) return true;
    for (const auto& [bit, avoiding] : crossings) {
      if (dishonest & bit) continue;
      bool exposed = std::all_of(avoiding.begin(), avoiding.end(),
                                 [&](std::size_t i) { return (bad_set >> i) & 1u; });
      if (exposed) return true;
    }
    return false;
  };

  OracleResult result;
  if (nodes.size() <= options.max_exact_nodes && nodes.size() < 64 && paths.size() < 64) {
    double p = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nodes.size()); ++mask) {
      if (!compromised(mask)) continue;
      double w = 1.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) w *= (mask >> j) & 1u ? 1.0 - trust[j] : trust[j];
      p += w;
    }
    result.probability = p;
    result.ci_low = result.ci_high = p;
    return result;
  }
  if (!options.monte_carlo) {
    throw LimitError(std::to_string(nodes.size()) + " interior nodes exceed the exact enumeration limit of " +
                     std::to_string(options.max_exact_nodes) + "; enable Monte Carlo sampling");
  }
  if (nodes.size() >= 64 || paths.size() >= 64) throw LimitError("at most 63 nodes and paths supported");
  if (options.samples == 0) throw InputError("Monte Carlo needs at least one sample");
  std::mt19937_64 rng(options.seed);
  std::uint64_t hits = 0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u >= trust[j]) mask |= std::uint64_t{1} << j;
    }
    if (compromised(mask)) ++hits;
  }
  double n = static_cast<double>(options.samples);
  double p = static_cast<double>(hits) / n;
  constexpr double z = 1.959963984540054;
  double denom = 1.0 + z * z / n;
  double centre = (p + z * z / (2 * n)) / denom;
  double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  result.probability = p;
  result.exact = false;
  result.samples = options.samples;
  result.ci_low = std::max(0.0, centre - half);
  result.ci_high = std::min(1.0, centre + half);
  return result;
}

PartitionSearch optimize_partition(std::span<const PathOption> paths, double t_min,
                                   unsigned min_subset) {
  constexpr std::size_t kMaxPaths = 12;
  constexpr double kTie = 1e-12;
  if (paths.size() > kMaxPaths) {
    throw LimitError(std::to_string(paths.size()) + " paths exceed the partition enumeration limit of " +
                     std::to_string(kMaxPaths));
  }
  if (min_subset == 0) throw InputError("min_subset must be at least 1");
  for (const auto& p : paths) check_trust(p.trust, "path");

  std::vector<double> trust;
  for (const auto& p : paths) trust.push_back(p.trust);

  PartitionSearch search;
  bool have_best = false;
  double best_trust_seen = 0.0;
  std::vector<std::uint32_t> blocks;

  auto better = [&](const Partition& c, const Partition& b) {
    if (std::abs(c.rate - b.rate) > kTie) return c.rate > b.rate;
    if (std::abs(c.trust - b.trust) > kTie) return c.trust > b.trust;
    return c.subsets < b.subsets;
  };

  auto evaluate = [&]() {
    Partition part;
    for (std::uint32_t block : blocks) {
      std::vector<std::size_t> subset;
      std::vector<double> member_trust;
      double rate = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < paths.size(); ++i) {
        if ((block >> i) & 1u) {
          subset.push_back(i);
          member_trust.push_back(trust[i]);
          rate = std::min(rate, paths[i].rate);
        }
      }
      part.subset_trust.push_back(trust_xor(member_trust));
      part.subset_rate.push_back(rate);
      part.subsets.push_back(std::move(subset));
    }
    part.trust = 1.0;
    part.rate = 0.0;
    for (double t : part.subset_trust) part.trust *= t;
    for (double r : part.subset_rate) part.rate += r;
    part.feasible = part.trust >= t_min;
    best_trust_seen = std::max(best_trust_seen, part.trust);
    if (part.feasible && (!have_best || better(part, search.best))) {
      search.best = part;
      have_best = true;
    }
    search.table.push_back(std::move(part));
  };

  std::function<void(std::uint32_t)> recurse = [&](std::uint32_t remaining) {
    if (remaining == 0) {
      evaluate();
      return;
    }
    std::uint32_t first = remaining & (~remaining + 1);
    std::uint32_t rest = remaining & ~first;
    // Every submask of `rest`, joined with the lowest remaining path.
    std::vector<std::uint32_t> choices;
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      std::uint32_t block = sub | first;
      if (static_cast<unsigned>(std::popcount(block)) >= min_subset) choices.push_back(block);
      if (sub == 0) break;
    }
    std::sort(choices.begin(), choices.end(), [](std::uint32_t l, std::uint32_t r) {
      // ascending listing order of the block's members
      for (std::size_t i = 0; i < 32; ++i) {
        bool li = (l >> i) & 1u, ri = (r >> i) & 1u;
        if (li != ri) return li;
      }
      return false;
    });
    for (std::uint32_t block : choices) {
      blocks.push_back(block);
      recurse(remaining & ~block);
      blocks.pop_back();
    }
  };

  if (!paths.empty()) recurse((std::uint32_t{1} << paths.size()) - 1);

  if (search.table.empty()) {
    throw InfeasibleError("no partition of " + std::to_string(paths.size()) +
                              " paths into subsets of at least " + std::to_string(min_subset),
                          0.0);
  }
  if (!have_best) {
    throw InfeasibleError("no feasible partition: best achievable trust " +
                              detail::format_double(best_trust_seen) + " < " + detail::format_double(t_min),
                          best_trust_seen);
  }
  return search;
}

std::string format_partition(const std::vector<std::vector<std::size_t>>& subsets) {
  std::string out;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    if (s) out += '|';
    out += '{';
    for (std::size_t i = 0; i < subsets[s].size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(subsets[s][i]);
    }
    out += '}';
  }
  return out;
}

std::string partition_table_csv(const PartitionSearch& search) {
  std::ostringstream out;
  out << "# set partitions of the paths: keys XOR-combined per subset, subset keys concatenated\n";
  out << "partition,subsets,trust,rate,feasible,best\n";
  for (const auto& p : search.table) {
    out << format_partition(p.subsets) << ',' << p.subsets.size() << ',' << detail::format_double(p.trust)
        << ',' << detail::format_double(p.rate) << ',' << (p.feasible ? 1 : 0) << ','
        << (p.subsets == search.best.subsets ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<FrontierPoint> trust_rate_frontier(unsigned n, double trust) {
  if (n < 2) throw InputError("need at least two intermediaries");
  std::vector<FrontierPoint> points;
  for (unsigned n_prime = n; n_prime >= 2; --n_prime) {
    if (n % n_prime != 0) continue;
    unsigned m = n / n_prime;
    points.push_back({n_prime, m, trust_symmetric(m, n_prime, trust), false});
  }
  for (auto& p : points) {
    p.on_frontier = std::none_of(points.begin(), points.end(), [&](const FrontierPoint& q) {
      return q.m >= p.m && q.trust >= p.trust && (q.m > p.m || q.trust > p.trust);
    });
  }
  return points;
}

std::string frontier_csv(unsigned n, double t_lo, double t_hi, double step) {
  if (!(step > 0)) throw InputError("trust step must be positive");
  if (!(t_lo <= t_hi)) throw InputError("empty trust range");
  std::ostringstream out;
  out << "# trust-rate trade-off: " << n
      << " single-hop intermediaries with common trust T, unit key rates\n";
  out << "T,n_prime,m,trust,on_frontier\n";
  for (std::size_t i = 0;; ++i) {
    double t = t_lo + static_cast<double>(i) * step;
    if (t > t_hi + step * 1e-9) break;
    t = std::min(t, t_hi);
    for (const auto& p : trust_rate_frontier(n, t)) {
      out << detail::format_double(t) << ',' << p.n_prime << ',' << p.m << ','
          << detail::format_double(p.trust) << ',' << (p.on_frontier ? 1 : 0) << '\n';
    }
  }
  return out.str();
}

}  // namespace qkdnet
