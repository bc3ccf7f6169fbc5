#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qkdnet/flow_routing.hpp"
#include "qkdnet/topology.hpp"
#include "qkdnet/trust_calculus.hpp"

namespace qkdnet {

/// Which message volume sizes the inaugural tag key.
enum class DConvention {
  Round,  // d = a, the round length in bits
  Comm,   // d = g * a, the classical communication of one round
};

/// Real-valued Wegman-Carter key length 4(log2(2/c) + log2 log2 d) log2 d.
double wc_key_length_exact(double insecurity, double comm_bits);
/// wc_key_length_exact rounded to the nearest whole bit.
std::uint64_t wc_key_length(double insecurity, double comm_bits);
/// ceil(log2(2/c)).
std::uint64_t wc_tag_bits(double insecurity);

inline constexpr std::uint64_t kDefaultRoundCap = 1'000'000'000;

/// Smallest round length a with wc_key_length_exact(c, g*a) <= f*a.
std::uint64_t round_size_fixed_point(double insecurity, double comm_ratio, double reuse_fraction,
                                     std::uint64_t cap = kDefaultRoundCap);

struct WcParams {
  double insecurity = 1e-9;       // c
  double comm_ratio = 720'000;    // g
  double reuse_fraction = 0.1;    // f
  DConvention d_convention = DConvention::Round;

  std::uint64_t round_bits = 0;   // a
  double comm_bits = 0;           // d used for the tag key
  std::uint64_t tag_bits = 0;     // b
  std::uint64_t key_bits = 0;     // s
};

/// Fills a, d, b and s from c, g, f and the d convention.
WcParams size_wegman_carter(WcParams params);

struct SiatPlan {
  std::string intermediary;
  std::pair<std::string, std::string> end_users;
  double rate_xu = 0;
  double rate_xv = 0;
  double rate_uv = 0;
  double tag_transfer_seconds = 0;
  double qkd_round_seconds = 0;
  double trust_window_seconds = 0;
};

SiatPlan siat_plan(const Network& net, const std::string& intermediary, const std::string& u,
                   const std::string& v, std::uint64_t tag_key_bits, std::uint64_t round_bits);

struct SiatRow {
  std::string end_user;
  std::string intermediary;
  std::optional<SiatPlan> plan;
  std::string error;
};

/// Every (end user, intermediary) combination for a joining user.
std::vector<SiatRow> siat_plan_all(const Network& net, const std::string& new_user,
                                   std::uint64_t tag_key_bits, std::uint64_t round_bits);
std::string siat_table_csv(const std::vector<SiatRow>& rows);

/// Pre-shared keys needed for a fully connected network of n users that
/// tolerates a collective adversary of c_a nodes.
std::uint64_t key_scaling(std::uint64_t n, std::uint64_t c_a);

struct FloodedSiat {
  std::vector<std::string> peers;
  PathSet paths;
  std::vector<PathOption> options;
  std::vector<SiatPlan> per_path;
  PartitionSearch search;
  double achieved_trust = 0;
  double oracle_trust = 0;
  double rate = 0;
  double trust_window_seconds = 0;
};

/// Inaugural key over the mutual peers of u and v: one SIAT share per
/// disjoint path, shares grouped by optimize_partition against t_min.
FloodedSiat flooded_siat(const Network& net, const TrustTable& u_table,
                         const TrustTable& v_table, const std::string& u, const std::string& v,
                         double t_min, unsigned min_subset, std::uint64_t tag_key_bits,
                         std::uint64_t round_bits);

std::string flooded_siat_json(const FloodedSiat& result);

}  // namespace qkdnet
