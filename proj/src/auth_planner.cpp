#include "qkdnet/auth_planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "qkdnet/error.hpp"

namespace qkdnet {

namespace {

void check_insecurity(double c) {
  if (!(c > 0.0 && c < 1.0)) throw InputError("insecurity c must lie in (0, 1)");
}

std::string two_decimals(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace

double wc_key_length_exact(double insecurity, double comm_bits) {
  check_insecurity(insecurity);
  if (!(comm_bits >= 4.0)) throw InputError("classical communication d must be at least 4 bits");
  double log_d = std::log2(comm_bits);
  return 4.0 * (std::log2(2.0 / insecurity) + std::log2(log_d)) * log_d;
}

std::uint64_t wc_key_length(double insecurity, double comm_bits) {
  return static_cast<std::uint64_t>(std::llround(wc_key_length_exact(insecurity, comm_bits)));
}

std::uint64_t wc_tag_bits(double insecurity) {
  check_insecurity(insecurity);
  return static_cast<std::uint64_t>(std::ceil(std::log2(2.0 / insecurity)));
}

std::uint64_t round_size_fixed_point(double insecurity, double comm_ratio, double reuse_fraction,
                                     std::uint64_t cap) {
  check_insecurity(insecurity);
  if (!(comm_ratio >= 1.0)) throw InputError("communication ratio g must be at least 1");
  if (!(reuse_fraction > 0.0 && reuse_fraction < 1.0)) {
    throw InputError("reuse fraction f must lie in (0, 1)");
  }
  auto funded = [&](std::uint64_t a) {
    double a_real = static_cast<double>(a);
    return wc_key_length_exact(insecurity, comm_ratio * a_real) <= reuse_fraction * a_real;
  };
  // smallest a for which d = g*a is in the formula's domain
  auto lo = static_cast<std::uint64_t>(std::ceil(4.0 / comm_ratio));
  lo = std::max<std::uint64_t>(lo, 1);
  if (lo > cap) throw InfeasibleError("round cap below the smallest valid round", 0.0);
  if (funded(lo)) return lo;
  std::uint64_t hi = lo;
  while (!funded(hi)) {
    if (hi >= cap) {
      throw InfeasibleError("no round length up to " + std::to_string(cap) +
                                " bits funds its own authentication",
                            static_cast<double>(cap));
    }
    lo = hi;
    hi = std::min(cap, hi * 2);
  }
  // funded(hi), !funded(lo)
  while (hi - lo > 1) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    (funded(mid) ? hi : lo) = mid;
  }
  return hi;
}

WcParams size_wegman_carter(WcParams params) {
  params.round_bits =
      round_size_fixed_point(params.insecurity, params.comm_ratio, params.reuse_fraction);
  double a = static_cast<double>(params.round_bits);
  params.comm_bits = params.d_convention == DConvention::Round ? a : params.comm_ratio * a;
  params.tag_bits = wc_tag_bits(params.insecurity);
  params.key_bits = wc_key_length(params.insecurity, params.comm_bits);
  return params;
}

SiatPlan siat_plan(const Network& net, const std::string& intermediary, const std::string& u,
                   const std::string& v, std::uint64_t tag_key_bits, std::uint64_t round_bits) {
  for (const auto& n : {intermediary, u, v}) {
    if (!net.has_node(n)) throw InputError("unknown node '" + n + "'");
  }
  if (intermediary == u || intermediary == v || u == v) {
    throw InputError("intermediary and end users must be distinct");
  }
  SiatPlan plan;
  plan.intermediary = intermediary;
  plan.end_users = {u, v};
  plan.rate_xu = net.rate_bps(intermediary, u);
  plan.rate_xv = net.rate_bps(intermediary, v);
  plan.rate_uv = net.rate_bps(u, v);
  if (plan.rate_xu <= 0) throw InfeasibleError("no link between " + intermediary + " and " + u, 0.0);
  if (plan.rate_xv <= 0) throw InfeasibleError("no link between " + intermediary + " and " + v, 0.0);
  if (plan.rate_uv <= 0) throw InfeasibleError("no quantum channel between end users", 0.0);
  plan.tag_transfer_seconds =
      static_cast<double>(tag_key_bits) / std::min(plan.rate_xu, plan.rate_xv);
  plan.qkd_round_seconds = static_cast<double>(round_bits) / plan.rate_uv;
  plan.trust_window_seconds = plan.tag_transfer_seconds + plan.qkd_round_seconds;
  return plan;
}

std::vector<SiatRow> siat_plan_all(const Network& net, const std::string& new_user,
                                   std::uint64_t tag_key_bits, std::uint64_t round_bits) {
  if (!net.has_node(new_user)) throw InputError("unknown node '" + new_user + "'");
  std::vector<SiatRow> rows;
  auto own = net.neighbors(new_user);
  for (const auto& end_user : net.nodes()) {
    if (end_user == new_user) continue;
    auto theirs = net.neighbors(end_user);
    std::vector<std::string> common;
    std::set_intersection(own.begin(), own.end(), theirs.begin(), theirs.end(),
                          std::back_inserter(common));
    if (common.empty()) {
      rows.push_back({end_user, "", std::nullopt, "no common intermediary"});
      continue;
    }
    for (const auto& x : common) {
      SiatRow row{end_user, x, std::nullopt, ""};
      try {
        row.plan = siat_plan(net, x, new_user, end_user, tag_key_bits, round_bits);
      } catch (const Error& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string siat_table_csv(const std::vector<SiatRow>& rows) {
  std::ostringstream out;
  out << "# trust window per end user and intermediary for a joining user (seconds)\n";
  out << "end_user,intermediary,tag_s,round_s,window_s,status\n";
  for (const auto& r : rows) {
    out << r.end_user << ',' << r.intermediary << ',';
    if (r.plan) {
      out << two_decimals(r.plan->tag_transfer_seconds) << ','
          << two_decimals(r.plan->qkd_round_seconds) << ','
          << two_decimals(r.plan->trust_window_seconds) << ",ok\n";
    } else {
      std::string status = r.error;
      std::replace(status.begin(), status.end(), ',', ';');
      out << ",,," << "error: " << status << '\n';
    }
  }
  return out.str();
}

std::uint64_t key_scaling(std::uint64_t n, std::uint64_t c_a) {
  if (n <= c_a + 1) throw InputError("need more than c_a + 1 users");
  return (c_a + 2) * (c_a + 1) / 2 + (n - c_a - 2) * (c_a + 2);
}

FloodedSiat flooded_siat(const Network& net, const TrustTable& u_table,
                         const TrustTable& v_table, const std::string& u, const std::string& v,
                         double t_min, unsigned min_subset, std::uint64_t tag_key_bits,
                         std::uint64_t round_bits) {
  if (!net.has_node(u) || !net.has_node(v)) throw InputError("unknown end user");
  if (u == v) throw InputError("end users must differ");
  if (u_table.evaluator != u) throw InputError("first trust table belongs to '" + u_table.evaluator + "', not '" + u + "'");
  if (v_table.evaluator != v) throw InputError("second trust table belongs to '" + v_table.evaluator + "', not '" + v + "'");
  double rate_uv = net.rate_bps(u, v);
  if (rate_uv <= 0) throw InfeasibleError("no quantum channel between end users", 0.0);

  MergedTrust merged = merge_trust(u_table, v_table);
  FloodedSiat result;
  for (const auto& [node, t] : merged.entries) {
    if (node != u && node != v && net.has_node(node)) result.peers.push_back(node);
  }

  // Mutual peers plus the end users, without the direct link.
  std::vector<std::string> nodes = result.peers;
  nodes.push_back(u);
  nodes.push_back(v);
  std::sort(nodes.begin(), nodes.end());
  std::vector<Link> links;
  for (const auto& link : net.links()) {
    bool inside = std::binary_search(nodes.begin(), nodes.end(), link.a) &&
                  std::binary_search(nodes.begin(), nodes.end(), link.b);
    bool direct = (link.a == u && link.b == v) || (link.a == v && link.b == u);
    if (inside && !direct) links.push_back(link);
  }
  Network sub(nodes, links, net.unit(), net.block_seconds());

  std::size_t available = max_disjoint_paths(sub, u, v);
  if (available < std::max<std::size_t>(min_subset, 1)) {
    throw InfeasibleError("only " + std::to_string(available) +
                              " disjoint paths through mutual peers; need at least " +
                              std::to_string(min_subset),
                          static_cast<double>(available));
  }
  result.paths = find_mnops(sub, u, v, available);

  for (const auto& path : result.paths.paths) {
    double trust = 1.0;
    for (const auto& node : path) trust *= merged.of(node);
    double rate = path_rate_bps(net, u, v, path);
    result.options.push_back({rate, trust});

    SiatPlan plan;
    for (std::size_t i = 0; i < path.size(); ++i) plan.intermediary += (i ? "+" : "") + path[i];
    plan.end_users = {u, v};
    plan.rate_xu = net.rate_bps(u, path.front());
    plan.rate_xv = net.rate_bps(path.back(), v);
    plan.rate_uv = rate_uv;
    plan.tag_transfer_seconds = static_cast<double>(tag_key_bits) / rate;
    plan.qkd_round_seconds = static_cast<double>(round_bits) / rate_uv;
    plan.trust_window_seconds = plan.tag_transfer_seconds + plan.qkd_round_seconds;
    result.trust_window_seconds = std::max(result.trust_window_seconds, plan.trust_window_seconds);
    result.per_path.push_back(std::move(plan));
  }

  result.search = optimize_partition(result.options, t_min, min_subset);
  result.achieved_trust = result.search.best.trust;
  result.rate = result.search.best.rate;

  result.oracle_trust = 1.0;
  for (const auto& subset : result.search.best.subsets) {
    std::vector<std::vector<std::string>> paths;
    std::map<std::string, double> trust;
    for (std::size_t i : subset) {
      paths.push_back(result.paths.paths[i]);
      for (const auto& node : result.paths.paths[i]) trust[node] = merged.of(node);
    }
    auto assess = make_assessment(std::move(paths), std::move(trust));
    result.oracle_trust *= 1.0 - compromise_oracle(assess, AdversaryMode::Broadcasting).probability;
  }
  if (std::abs(result.oracle_trust - result.achieved_trust) > 1e-12) {
    throw Error(ErrorKind::Internal, "partition trust " + detail::format_double(result.achieved_trust) +
                                         " disagrees with enumeration " +
                                         detail::format_double(result.oracle_trust));
  }
  return result;
}

std::string flooded_siat_json(const FloodedSiat& r) {
  nlohmann::ordered_json doc;
  doc["peers"] = r.peers;
  auto paths = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.paths.paths.size(); ++i) {
    nlohmann::ordered_json p;
    p["index"] = i;
    p["interior"] = r.paths.paths[i];
    p["rate_bps"] = r.options[i].rate;
    p["trust"] = r.options[i].trust;
    p["tag_s"] = r.per_path[i].tag_transfer_seconds;
    p["round_s"] = r.per_path[i].qkd_round_seconds;
    p["window_s"] = r.per_path[i].trust_window_seconds;
    paths.push_back(std::move(p));
  }
  doc["paths"] = std::move(paths);
  doc["partition"] = format_partition(r.search.best.subsets);
  doc["subset_trust"] = r.search.best.subset_trust;
  doc["subset_rate_bps"] = r.search.best.subset_rate;
  doc["trust"] = r.achieved_trust;
  doc["oracle_trust"] = r.oracle_trust;
  doc["rate_bps"] = r.rate;
  doc["trust_window_s"] = r.trust_window_seconds;
  auto table = nlohmann::ordered_json::array();
  for (const auto& p : r.search.table) {
    if (!p.feasible) continue;
    table.push_back({{"partition", format_partition(p.subsets)}, {"trust", p.trust}, {"rate_bps", p.rate}});
  }
  doc["feasible"] = std::move(table);
  return doc.dump(2) + "\n";
}

}  // namespace qkdnet
