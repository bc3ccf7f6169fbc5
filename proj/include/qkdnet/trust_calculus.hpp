#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qkdnet/flow_routing.hpp"

namespace qkdnet {

enum class AdversaryMode {
  Pooling,       // dishonest nodes pool what they see, publish nothing
  Broadcasting,  // dishonest nodes publish everything they hold
};

struct TrustAssessment {
  PathSet paths;
  std::map<std::string, double> node_trust;
  AdversaryMode mode = AdversaryMode::Broadcasting;
};

/// Builds an assessment and fills in `cross_points`.
TrustAssessment make_assessment(std::vector<std::vector<std::string>> paths,
                                std::map<std::string, double> node_trust,
                                AdversaryMode mode = AdversaryMode::Broadcasting);

/// Probability that every node on path i is honest.
std::vector<double> path_trusts(const TrustAssessment& assess);

/// Literal closed-form compromise probability including the cross-point
/// collation terms. Kept for comparison only: its single-honest-path term
/// lacks the T_k factor, so it double counts the all-dishonest event.
double compromise_probability_closed(const TrustAssessment& assess);

/// t = 1 - (prod(1-T_i) + sum_k T_k prod_{i!=k}(1-T_i)).
double trust_xor(std::span<const double> path_trust);
double trust_xor(const TrustAssessment& assess);

/// Product of trust_xor over the subsets (indices into path_trust).
double trust_partitioned(std::span<const std::vector<std::size_t>> subsets,
                         std::span<const double> path_trust);
double trust_partitioned(std::span<const std::vector<std::size_t>> subsets,
                         const TrustAssessment& assess);

/// m subsets of n' single-node paths with common trust T.
double trust_symmetric(unsigned m, unsigned n_prime, double trust);

struct OracleOptions {
  std::size_t max_exact_nodes = 20;
  bool monte_carlo = false;
  std::uint64_t samples = 1'000'000;
  std::uint64_t seed = 1;
};

struct OracleResult {
  double probability = 0.0;
  bool exact = true;
  std::uint64_t samples = 0;
  double ci_low = 0.0;  // 95% Wilson interval (equal to probability when exact)
  double ci_high = 0.0;
};

/// Whether the key is compromised for one honesty assignment.
bool is_compromised(const std::vector<std::vector<std::string>>& paths,
                    const std::map<std::string, bool>& dishonest, AdversaryMode mode);

/// Exhaustive enumeration over honesty assignments of the interior nodes
/// (ground truth for every closed form); Monte Carlo beyond the size limit
/// when enabled.
OracleResult compromise_oracle(const TrustAssessment& assess, AdversaryMode mode,
                               const OracleOptions& options = {});

struct PathOption {
  double rate = 0.0;
  double trust = 0.0;
};

struct Partition {
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<double> subset_trust;
  std::vector<double> subset_rate;
  double trust = 0.0;
  double rate = 0.0;
  bool feasible = false;
};

struct PartitionSearch {
  Partition best;
  std::vector<Partition> table;  // every partition with allowed subset sizes
};

/// Enumerates every set partition of the paths into subsets of at least
/// `min_subset` paths and returns the highest-rate one whose trust reaches
/// `t_min` (ties: higher trust, then lexicographic subsets).
PartitionSearch optimize_partition(std::span<const PathOption> paths, double t_min,
                                   unsigned min_subset = 3);

std::string partition_table_csv(const PartitionSearch& search);
std::string format_partition(const std::vector<std::vector<std::size_t>>& subsets);

struct FrontierPoint {
  unsigned n_prime = 0;
  unsigned m = 0;  // rate, in units of one path key
  double trust = 0.0;
  bool on_frontier = false;
};

/// (rate, trust) for every factorisation n' * m = N with n' >= 2.
std::vector<FrontierPoint> trust_rate_frontier(unsigned n, double trust);

/// Rows for a grid of common trust values.
std::string frontier_csv(unsigned n, double t_lo, double t_hi, double step);

}  // namespace qkdnet
