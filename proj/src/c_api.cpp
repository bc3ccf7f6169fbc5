#include "qkdnet/qkdnet.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "json_util.hpp"
#include "qkdnet/adversary_sim.hpp"
#include "qkdnet/auth_planner.hpp"
#include "qkdnet/error.hpp"
#include "qkdnet/flood_engine.hpp"
#include "qkdnet/flow_routing.hpp"
#include "qkdnet/topology.hpp"
#include "qkdnet/trust_calculus.hpp"

using nlohmann::json;
using nlohmann::ordered_json;

struct qkdn_network {
  qkdnet::Network net;
};

struct qkdn_trust_table {
  qkdnet::TrustTable table;
};

struct qkdn_plan {
  qkdnet::FloodPlan plan;
};

struct qkdn_run {
  qkdnet::FloodPlan plan;
  std::uint64_t seed = 0;
  qkdnet::KeyRing initial;  // keys as generated, before consumption
  qkdnet::FloodResult result;
};

namespace {

thread_local std::string g_error;
thread_local double g_error_value = 0.0;

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(const void* p, const char* name) {
  if (!p) throw ArgumentError(std::string(name) + " is null");
}

template <class F>
qkdn_status guarded(F&& body) {
  try {
    body();
    g_error.clear();
    g_error_value = 0.0;
    return QKDN_OK;
  } catch (const qkdnet::InfeasibleError& e) {
    g_error = e.what();
    g_error_value = e.best();
    return QKDN_INFEASIBLE;
  } catch (const qkdnet::Error& e) {
    g_error = e.what();
    g_error_value = 0.0;
    switch (e.kind()) {
      case qkdnet::ErrorKind::Input: return QKDN_INPUT;
      case qkdnet::ErrorKind::Limit: return QKDN_LIMIT;
      case qkdnet::ErrorKind::Io: return QKDN_IO;
      case qkdnet::ErrorKind::Infeasible: return QKDN_INFEASIBLE;
      case qkdnet::ErrorKind::Internal: return QKDN_INTERNAL;
    }
    return QKDN_INTERNAL;
  } catch (const ArgumentError& e) {
    g_error = e.what();
    return QKDN_INVALID_ARGUMENT;
  } catch (const json::exception& e) {
    g_error = std::string("invalid document: ") + e.what();
    return QKDN_INPUT;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return QKDN_INTERNAL;
  } catch (const std::exception& e) {
    g_error = e.what();
    return QKDN_INTERNAL;
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  require(out, "output");
  *out = dup(s);
}

qkdnet::Network with_block(qkdnet::Network net, double block_seconds) {
  if (block_seconds <= 0) return net;
  return qkdnet::Network(net.nodes(), net.links(), net.unit(), block_seconds);
}

ordered_json fragments_json(const std::vector<qkdnet::Fragment>& fragments) {
  ordered_json out = ordered_json::array();
  for (const auto& f : fragments) out.push_back({{"key_id", f.key_id}, {"begin", f.begin}, {"end", f.end}});
  return out;
}

ordered_json bits_json(const qkdnet::BitString& bits) {
  return {{"length", bits.size()}, {"hex", bits.to_hex()}};
}

qkdnet::RunRecord record_of(const qkdn_run& run) {
  return {run.initial, run.result.transcript, run.plan.orientation.source, run.plan.orientation.sink};
}

std::vector<qkdnet::Gf2Vector> final_key(const qkdn_run& run, const qkdnet::VariableIndex& index,
                                         const std::string& kind) {
  if (kind == "rate") return qkdnet::rate_key_expression(index, run.result.shared);
  if (kind == "secure") return qkdnet::secure_key_expression(index, run.result.shared);
  throw ArgumentError("key must be 'rate' or 'secure', not '" + kind + "'");
}

qkdnet::TrustAssessment parse_assessment(const json& doc) {
  qkdnet::detail::require_object(doc, "");
  std::vector<std::vector<std::string>> paths;
  const auto& jpaths = qkdnet::detail::require_array(doc, "/paths");
  for (std::size_t i = 0; i < jpaths.size(); ++i) {
    if (!jpaths[i].is_array()) throw qkdnet::InputError("/paths/" + std::to_string(i) + ": expected an array");
    std::vector<std::string> path;
    for (const auto& n : jpaths[i]) {
      if (!n.is_string()) throw qkdnet::InputError("/paths/" + std::to_string(i) + ": expected node ids");
      path.push_back(n.get<std::string>());
    }
    paths.push_back(std::move(path));
  }
  std::map<std::string, double> trust;
  const auto& jtrust = qkdnet::detail::require_field(doc, "/trust", "");
  qkdnet::detail::require_object(jtrust, "/trust");
  for (const auto& [node, value] : jtrust.items()) {
    if (!value.is_number()) throw qkdnet::InputError("/trust/" + node + ": expected a number");
    trust[node] = value.get<double>();
  }
  return qkdnet::make_assessment(std::move(paths), std::move(trust));
}

ordered_json oracle_json(const qkdnet::OracleResult& r) {
  ordered_json out;
  out["compromise"] = r.probability;
  out["trust"] = 1.0 - r.probability;
  out["exact"] = r.exact;
  if (!r.exact) {
    out["samples"] = r.samples;
    out["ci95"] = {r.ci_low, r.ci_high};
  }
  return out;
}

}  // namespace

extern "C" {

const char* qkdn_version(void) { return "0.1.0"; }

const char* qkdn_last_error(void) { return g_error.c_str(); }

double qkdn_last_error_value(void) { return g_error_value; }

void qkdn_string_free(char* s) { std::free(s); }

qkdn_status qkdn_network_load_file(const char* path, double block_seconds, qkdn_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    *out = new qkdn_network{with_block(qkdnet::load_network_file(path), block_seconds)};
  });
}

qkdn_status qkdn_network_load_json(const char* text, double block_seconds, qkdn_network** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output");
    *out = new qkdn_network{with_block(qkdnet::load_network(text), block_seconds)};
  });
}

void qkdn_network_free(qkdn_network* net) { delete net; }

qkdn_status qkdn_network_to_json(const qkdn_network* net, char** out) {
  return guarded([&] {
    require(net, "network");
    put(out, qkdnet::serialize_network(net->net));
  });
}

qkdn_status qkdn_trust_table_load_file(const char* path, qkdn_trust_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "output");
    *out = new qkdn_trust_table{qkdnet::load_trust_table_file(path)};
  });
}

void qkdn_trust_table_free(qkdn_trust_table* table) { delete table; }

qkdn_status qkdn_trust_table_evaluator(const qkdn_trust_table* table, char** out) {
  return guarded([&] {
    require(table, "table");
    put(out, table->table.evaluator);
  });
}

qkdn_status qkdn_flood_value(const qkdn_network* net, const char* source, const char* sink,
                             size_t orientation_limit, int64_t* value, int* exhaustive,
                             size_t* optimal_count) {
  return guarded([&] {
    require(net, "network");
    require(source, "source");
    require(sink, "sink");
    auto best = qkdnet::optimal_flood_value(net->net, source, sink, orientation_limit);
    if (value) *value = best.value;
    if (exhaustive) *exhaustive = best.exhaustive ? 1 : 0;
    if (optimal_count) *optimal_count = best.optimal.size();
  });
}

qkdn_status qkdn_flood_plan(const qkdn_network* net, const char* source, const char* sink,
                            size_t orientation_limit, qkdn_plan** out) {
  return guarded([&] {
    require(net, "network");
    require(source, "source");
    require(sink, "sink");
    require(out, "output");
    *out = new qkdn_plan{qkdnet::make_flood_plan(net->net, source, sink, orientation_limit)};
  });
}

qkdn_status qkdn_plan_load_json(const char* text, qkdn_plan** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "output");
    *out = new qkdn_plan{qkdnet::plan_from_json(text)};
  });
}

qkdn_status qkdn_plan_to_json(const qkdn_plan* plan, char** out) {
  return guarded([&] {
    require(plan, "plan");
    put(out, qkdnet::plan_to_json(plan->plan));
  });
}

void qkdn_plan_free(qkdn_plan* plan) { delete plan; }

qkdn_status qkdn_mnops_json(const qkdn_network* net, const char* source, const char* sink,
                            size_t required, char** out) {
  return guarded([&] {
    require(net, "network");
    require(source, "source");
    require(sink, "sink");
    if (required == 0) required = qkdnet::max_disjoint_paths(net->net, source, sink);
    if (required == 0) {
      throw qkdnet::InfeasibleError(std::string("no path between ") + source + " and " + sink, 0.0);
    }
    auto paths = qkdnet::find_mnops(net->net, source, sink, required);
    ordered_json doc;
    doc["source"] = source;
    doc["sink"] = sink;
    doc["paths"] = paths.paths;
    ordered_json rates = ordered_json::array();
    for (const auto& p : paths.paths) rates.push_back(qkdnet::path_rate_bps(net->net, source, sink, p));
    doc["rates_bps"] = std::move(rates);
    doc["cross_points"] = std::vector<std::string>(paths.cross_points.begin(), paths.cross_points.end());
    put(out, doc.dump(2) + "\n");
  });
}

qkdn_status qkdn_flood_run(const qkdn_plan* plan, uint64_t seed, qkdn_run** out) {
  return guarded([&] {
    require(plan, "plan");
    require(out, "output");
    auto run = std::make_unique<qkdn_run>();
    run->plan = plan->plan;
    run->seed = seed;
    run->initial = qkdnet::generate_keys(run->plan, seed);
    qkdnet::KeyRing working = run->initial;
    run->result = qkdnet::run_flood(run->plan, working);
    *out = run.release();
  });
}

void qkdn_run_free(qkdn_run* run) { delete run; }

qkdn_status qkdn_run_transcript_jsonl(const qkdn_run* run, char** out) {
  return guarded([&] {
    require(run, "run");
    put(out, qkdnet::transcript_to_jsonl(run->result.transcript));
  });
}

qkdn_status qkdn_run_report_json(const qkdn_run* run, char** out) {
  return guarded([&] {
    require(run, "run");
    const auto& r = run->result;
    ordered_json doc;
    doc["source"] = run->plan.orientation.source;
    doc["sink"] = run->plan.orientation.sink;
    doc["seed"] = run->seed;
    doc["flow_value"] = run->plan.value;
    doc["announcements"] = r.transcript.size();
    ordered_json shared = ordered_json::array();
    for (const auto& k : r.shared) {
      ordered_json entry = bits_json(k.bits);
      entry["fragments"] = fragments_json(k.origin);
      shared.push_back(std::move(entry));
    }
    doc["shared"] = std::move(shared);
    doc["rate_key"] = bits_json(qkdnet::assemble_rate(r.shared));
    if (!r.shared.empty()) doc["secure_key"] = bits_json(qkdnet::assemble_secure(r.shared));
    ordered_json retained = ordered_json::array();
    for (const auto& s : r.retained) retained.push_back({{"node", s.node}, {"fragments", fragments_json(s.fragments)}});
    doc["retained"] = std::move(retained);

    qkdnet::KeyRing sink_keys;
    for (const auto& [id, key] : run->initial) {
      if (key.owners.first == run->plan.orientation.sink || key.owners.second == run->plan.orientation.sink) {
        sink_keys.emplace(id, key);
      }
    }
    auto decoded = qkdnet::decode_at_sink(run->plan, r.transcript, sink_keys);
    bool same = decoded.size() == r.shared.size();
    for (std::size_t i = 0; same && i < decoded.size(); ++i) {
      same = decoded[i].bits == r.shared[i].bits && decoded[i].origin == r.shared[i].origin;
    }
    doc["sink_decodes"] = same;

    qkdnet::RunRecord record = record_of(*run);
    qkdnet::VariableIndex index(record.keys);
    auto eve = qkdnet::AdversaryModel::eavesdropper();
    auto rate_verdict = qkdnet::audit_run(record, eve, final_key(*run, index, "rate"));
    ordered_json audit;
    audit["rate_key_compromised"] = rate_verdict.compromised;
    audit["rate_key_derivable_bits"] = rate_verdict.derivable_bits;
    if (!r.shared.empty()) {
      auto secure_verdict = qkdnet::audit_run(record, eve, final_key(*run, index, "secure"));
      audit["secure_key_compromised"] = secure_verdict.compromised;
      audit["secure_key_derivable_bits"] = secure_verdict.derivable_bits;
    }
    audit["derivable_key_ids"] = rate_verdict.derivable_key_ids;
    audit["transcript_rank"] = rate_verdict.coalition_rank;
    audit["variables"] = rate_verdict.variables;
    doc["eavesdropper"] = std::move(audit);
    put(out, doc.dump(2) + "\n");
  });
}

qkdn_status qkdn_run_replay(const qkdn_run* run, const char* transcript_jsonl, int* matches) {
  return guarded([&] {
    require(run, "run");
    require(transcript_jsonl, "transcript");
    require(matches, "output");
    auto transcript = qkdnet::transcript_from_jsonl(transcript_jsonl);
    qkdnet::KeyRing sink_keys;
    const auto& sink = run->plan.orientation.sink;
    for (const auto& [id, key] : run->initial) {
      if (key.owners.first == sink || key.owners.second == sink) sink_keys.emplace(id, key);
    }
    auto decoded = qkdnet::decode_at_sink(run->plan, transcript, sink_keys);
    bool same = decoded.size() == run->result.shared.size();
    for (std::size_t i = 0; same && i < decoded.size(); ++i) {
      same = decoded[i].bits == run->result.shared[i].bits &&
             decoded[i].origin == run->result.shared[i].origin;
    }
    *matches = same ? 1 : 0;
  });
}

qkdn_status qkdn_run_audit(const qkdn_run* run, const char* mode, const char* const* members,
                           size_t member_count, size_t bound, const char* key, int* compromised,
                           char** report_json) {
  return guarded([&] {
    require(run, "run");
    require(mode, "mode");
    require(key, "key");
    if (member_count) require(members, "members");
    qkdnet::AdversaryModel adversary;
    std::string m = mode;
    if (m == "trusted") adversary.mode = qkdnet::AdversaryModel::Mode::Trusted;
    else if (m == "dishonest") adversary.mode = qkdnet::AdversaryModel::Mode::Dishonest;
    else if (m == "collective") adversary.mode = qkdnet::AdversaryModel::Mode::Collective;
    else throw ArgumentError("unknown adversary mode '" + m + "'");
    for (size_t i = 0; i < member_count; ++i) {
      require(members[i], "member");
      adversary.members.insert(members[i]);
    }
    adversary.bound = bound;
    auto record = record_of(*run);
    qkdnet::VariableIndex index(record.keys);
    auto verdict = qkdnet::audit_run(record, adversary, final_key(*run, index, key));
    if (compromised) *compromised = verdict.compromised ? 1 : 0;
    if (report_json) *report_json = dup(qkdnet::audit_report_json(adversary, verdict));
  });
}

qkdn_status qkdn_trust_eval(const char* assessment_json, int paper_literal,
                            uint64_t monte_carlo_samples, uint64_t seed, char** out) {
  return guarded([&] {
    require(assessment_json, "assessment");
    auto assess = parse_assessment(qkdnet::detail::parse_json(assessment_json));
    auto cross = qkdnet::cross_points_of(assess.paths.paths);
    qkdnet::OracleOptions options;
    options.monte_carlo = monte_carlo_samples > 0;
    if (options.monte_carlo) options.samples = monte_carlo_samples;
    options.seed = seed;

    ordered_json doc;
    doc["paths"] = assess.paths.paths;
    doc["cross_points"] = std::vector<std::string>(cross.begin(), cross.end());
    doc["path_trust"] = qkdnet::path_trusts(assess);
    if (cross.empty()) {
      doc["trust_xor"] = qkdnet::trust_xor(assess);
    } else {
      doc["trust_xor"] = nullptr;
    }
    auto broadcasting = qkdnet::compromise_oracle(assess, qkdnet::AdversaryMode::Broadcasting, options);
    auto pooling = qkdnet::compromise_oracle(assess, qkdnet::AdversaryMode::Pooling, options);
    doc["oracle"] = {{"broadcasting", oracle_json(broadcasting)}, {"pooling", oracle_json(pooling)}};
    if (paper_literal) {
      double literal = qkdnet::compromise_probability_closed(assess);
      ordered_json lit;
      lit["compromise"] = literal;
      lit["oracle_compromise"] = broadcasting.probability;
      lit["gap"] = literal - broadcasting.probability;
      lit["note"] =
          "literal form: its single-honest-path term lacks the T_k factor, so the "
          "all-dishonest event is counted twice; the enumeration value is authoritative";
      doc["paper_literal"] = std::move(lit);
    }
    put(out, doc.dump(2) + "\n");
  });
}

qkdn_status qkdn_trust_assessment_auto(const qkdn_network* net, const qkdn_trust_table* table,
                                       const char* source, const char* sink, char** out) {
  return guarded([&] {
    require(net, "network");
    require(table, "table");
    require(source, "source");
    require(sink, "sink");
    std::size_t count = qkdnet::max_disjoint_paths(net->net, source, sink);
    if (count == 0) throw qkdnet::InfeasibleError(std::string("no path between ") + source + " and " + sink, 0.0);
    auto paths = qkdnet::find_mnops(net->net, source, sink, count);
    ordered_json doc;
    doc["paths"] = paths.paths;
    ordered_json trust = ordered_json::object();
    ordered_json rates = ordered_json::array();
    for (const auto& p : paths.paths) {
      for (const auto& n : p) {
        auto it = table->table.trust.find(n);
        if (it == table->table.trust.end()) {
          throw qkdnet::InputError("trust table of " + table->table.evaluator + " has no entry for '" + n + "'");
        }
        trust[n] = it->second;
      }
      rates.push_back(qkdnet::path_rate_bps(net->net, source, sink, p));
    }
    doc["trust"] = std::move(trust);
    doc["rates"] = std::move(rates);
    put(out, doc.dump(2) + "\n");
  });
}

qkdn_status qkdn_trust_optimize(const char* assessment_json, double t_min, unsigned min_subset,
                                char** table_csv, char** best_json) {
  return guarded([&] {
    require(assessment_json, "assessment");
    json doc = qkdnet::detail::parse_json(assessment_json);
    auto assess = parse_assessment(doc);
    if (!qkdnet::cross_points_of(assess.paths.paths).empty()) {
      throw qkdnet::InputError("partitioning needs non-overlapping paths");
    }
    auto trust = qkdnet::path_trusts(assess);
    std::vector<double> rates(trust.size(), 1.0);
    if (doc.contains("rates")) {
      const auto& jr = doc["rates"];
      if (!jr.is_array() || jr.size() != trust.size()) {
        throw qkdnet::InputError("/rates: expected one number per path");
      }
      for (std::size_t i = 0; i < jr.size(); ++i) {
        if (!jr[i].is_number()) throw qkdnet::InputError("/rates/" + std::to_string(i) + ": expected a number");
        rates[i] = jr[i].get<double>();
      }
    }
    std::vector<qkdnet::PathOption> options;
    for (std::size_t i = 0; i < trust.size(); ++i) options.push_back({rates[i], trust[i]});
    auto search = qkdnet::optimize_partition(options, t_min, min_subset);
    if (table_csv) *table_csv = dup(qkdnet::partition_table_csv(search));
    if (best_json) {
      ordered_json best;
      best["partition"] = qkdnet::format_partition(search.best.subsets);
      best["subsets"] = search.best.subsets;
      best["subset_trust"] = search.best.subset_trust;
      best["subset_rate"] = search.best.subset_rate;
      best["trust"] = search.best.trust;
      best["rate"] = search.best.rate;
      *best_json = dup(best.dump(2) + "\n");
    }
  });
}

qkdn_status qkdn_trust_frontier_csv(unsigned n, double t_lo, double t_hi, double step, char** out) {
  return guarded([&] { put(out, qkdnet::frontier_csv(n, t_lo, t_hi, step)); });
}

qkdn_status qkdn_trust_symmetric(unsigned m, unsigned n_prime, double trust, double* out) {
  return guarded([&] {
    require(out, "output");
    *out = qkdnet::trust_symmetric(m, n_prime, trust);
  });
}

qkdn_status qkdn_trust_xor(const double* path_trust, size_t count, double* out) {
  return guarded([&] {
    require(out, "output");
    if (count) require(path_trust, "path_trust");
    *out = qkdnet::trust_xor(std::span<const double>(path_trust, count));
  });
}

qkdn_status qkdn_wc_key_length(double insecurity, double comm_bits, uint64_t* out) {
  return guarded([&] {
    require(out, "output");
    *out = qkdnet::wc_key_length(insecurity, comm_bits);
  });
}

qkdn_status qkdn_round_size(double insecurity, double comm_ratio, double reuse_fraction,
                            uint64_t cap, uint64_t* out) {
  return guarded([&] {
    require(out, "output");
    *out = qkdnet::round_size_fixed_point(insecurity, comm_ratio, reuse_fraction,
                                          cap ? cap : qkdnet::kDefaultRoundCap);
  });
}

qkdn_status qkdn_wc_size(qkdn_wc_params* params) {
  return guarded([&] {
    require(params, "params");
    qkdnet::WcParams p;
    p.insecurity = params->insecurity;
    p.comm_ratio = params->comm_ratio;
    p.reuse_fraction = params->reuse_fraction;
    switch (params->d_convention) {
      case QKDN_D_ROUND: p.d_convention = qkdnet::DConvention::Round; break;
      case QKDN_D_COMM: p.d_convention = qkdnet::DConvention::Comm; break;
      default: throw ArgumentError("unknown d convention");
    }
    p = qkdnet::size_wegman_carter(p);
    params->round_bits = p.round_bits;
    params->comm_bits = p.comm_bits;
    params->tag_bits = p.tag_bits;
    params->key_bits = p.key_bits;
  });
}

qkdn_status qkdn_siat_plan(const qkdn_network* net, const char* intermediary, const char* u,
                           const char* v, uint64_t tag_key_bits, uint64_t round_bits,
                           qkdn_siat* out) {
  return guarded([&] {
    require(net, "network");
    require(intermediary, "intermediary");
    require(u, "u");
    require(v, "v");
    require(out, "output");
    auto plan = qkdnet::siat_plan(net->net, intermediary, u, v, tag_key_bits, round_bits);
    *out = {plan.rate_xu, plan.rate_xv, plan.rate_uv, plan.tag_transfer_seconds,
            plan.qkd_round_seconds, plan.trust_window_seconds};
  });
}

qkdn_status qkdn_siat_table_csv(const qkdn_network* net, const char* new_user,
                                uint64_t tag_key_bits, uint64_t round_bits, char** out) {
  return guarded([&] {
    require(net, "network");
    require(new_user, "new_user");
    auto rows = qkdnet::siat_plan_all(net->net, new_user, tag_key_bits, round_bits);
    put(out, qkdnet::siat_table_csv(rows));
  });
}

qkdn_status qkdn_key_scaling(uint64_t n, uint64_t c_a, uint64_t* out) {
  return guarded([&] {
    require(out, "output");
    *out = qkdnet::key_scaling(n, c_a);
  });
}

qkdn_status qkdn_flooded_siat(const qkdn_network* net, const qkdn_trust_table* u_table,
                              const qkdn_trust_table* v_table, const char* u, const char* v,
                              double t_min, unsigned min_subset, uint64_t tag_key_bits,
                              uint64_t round_bits, char** report_json, char** table_csv) {
  return guarded([&] {
    require(net, "network");
    require(u_table, "u_table");
    require(v_table, "v_table");
    require(u, "u");
    require(v, "v");
    auto result = qkdnet::flooded_siat(net->net, u_table->table, v_table->table, u, v, t_min,
                                       min_subset, tag_key_bits, round_bits);
    if (report_json) *report_json = dup(qkdnet::flooded_siat_json(result));
    if (table_csv) *table_csv = dup(qkdnet::partition_table_csv(result.search));
  });
}

}  // extern "C"
