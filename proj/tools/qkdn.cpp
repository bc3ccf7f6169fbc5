// Command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qkdnet/qkdnet.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kEmpty = 1, kInput = 2, kInternal = 3 };

struct Failure {
  int code;
  std::string message;
};

int exit_code(qkdn_status s) {
  switch (s) {
    case QKDN_OK: return kOk;
    case QKDN_INFEASIBLE: return kEmpty;
    case QKDN_INTERNAL: return kInternal;
    default: return kInput;
  }
}

void check(qkdn_status s) {
  if (s != QKDN_OK) throw Failure{exit_code(s), qkdn_last_error()};
}

struct CStr {
  char* p = nullptr;
  ~CStr() { qkdn_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Net = Handle<qkdn_network, qkdn_network_free>;
using Table = Handle<qkdn_trust_table, qkdn_trust_table_free>;
using Plan = Handle<qkdn_plan, qkdn_plan_free>;
using Run = Handle<qkdn_run, qkdn_run_free>;

std::string fmt(double x, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kInput, "cannot open '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Options {
  std::string network;
  std::vector<std::string> trust;
  std::uint64_t seed = 1;
  double t_min = 0.9925;
  unsigned min_subset = 3;
  double c = 1e-9;
  double g = 720000;
  double f = 0.1;
  std::string out;
  std::string d_convention = "round";
  double block_seconds = 0;
  bool paper_literal = false;
  std::size_t orientation_limit = 20;
  std::uint64_t samples = 0;
};

fs::path out_path(const Options& o, const std::string& name) {
  fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kInput, "cannot create '" + dir.string() + "': " + ec.message()};
  return dir / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kInput, "cannot write '" + path.string() + "'"};
}

void load_network(const Options& o, Net& net) {
  if (o.network.empty()) throw Failure{kInput, "--network is required"};
  check(qkdn_network_load_file(o.network.c_str(), o.block_seconds, net.out()));
}

void load_table(const std::string& path, Table& table) {
  check(qkdn_trust_table_load_file(path.c_str(), table.out()));
}

qkdn_wc_params wc_params(const Options& o) {
  qkdn_wc_params p{};
  p.insecurity = o.c;
  p.comm_ratio = o.g;
  p.reuse_fraction = o.f;
  if (o.d_convention == "round") p.d_convention = QKDN_D_ROUND;
  else if (o.d_convention == "comm") p.d_convention = QKDN_D_COMM;
  else throw Failure{kInput, "--d-convention must be 'round' or 'comm'"};
  check(qkdn_wc_size(&p));
  return p;
}

// Sizes come from --c/--g/--f unless given explicitly.
struct Sizes {
  std::uint64_t tag_bits = 0;
  std::uint64_t round_bits = 0;
};

Sizes sizes(const Options& o, std::uint64_t tag_override, std::uint64_t round_override) {
  Sizes s{tag_override, round_override};
  if (!s.tag_bits || !s.round_bits) {
    auto p = wc_params(o);
    if (!s.round_bits) s.round_bits = p.round_bits;
    if (!s.tag_bits) {
      double d = p.d_convention == QKDN_D_ROUND ? static_cast<double>(s.round_bits)
                                                : o.g * static_cast<double>(s.round_bits);
      check(qkdn_wc_key_length(o.c, d, &s.tag_bits));
    }
  }
  return s;
}

std::string assessment_text(const Options& o, const std::string& paths_file,
                            const std::vector<std::string>& ends) {
  if (!paths_file.empty()) return read_file(paths_file);
  if (ends.size() != 2) throw Failure{kInput, "give SOURCE SINK or --paths"};
  if (o.trust.empty()) throw Failure{kInput, "--trust is required with SOURCE SINK"};
  Net net;
  load_network(o, net);
  Table table;
  load_table(o.trust.front(), table);
  CStr doc;
  check(qkdn_trust_assessment_auto(net.get(), table.get(), ends[0].c_str(), ends[1].c_str(), doc.out()));
  return doc.str();
}

int cmd_topology_validate(const Options& o) {
  Net net;
  load_network(o, net);
  CStr doc;
  check(qkdn_network_to_json(net.get(), doc.out()));
  json j = json::parse(doc.str());
  std::cout << "valid: " << j["nodes"].size() << " nodes, " << j["links"].size() << " links, unit "
            << j["unit"].get<std::string>() << "\n";
  if (!o.out.empty()) write_file(out_path(o, "network.json"), doc.str());
  return kOk;
}

int cmd_flood_plan(const Options& o, const std::string& source, const std::string& sink) {
  Net net;
  load_network(o, net);
  std::int64_t value = 0;
  int exhaustive = 0;
  std::size_t optimal = 0;
  check(qkdn_flood_value(net.get(), source.c_str(), sink.c_str(), o.orientation_limit, &value,
                         &exhaustive, &optimal));
  if (value == 0) throw Failure{kEmpty, "no path between " + source + " and " + sink};
  Plan plan;
  check(qkdn_flood_plan(net.get(), source.c_str(), sink.c_str(), o.orientation_limit, plan.out()));
  CStr doc;
  check(qkdn_plan_to_json(plan.get(), doc.out()));
  json j = json::parse(doc.str());

  std::cout << "optimal flood value: " << value << "\n";
  if (exhaustive) {
    std::cout << "optimal orientations: " << optimal << "\n";
  } else {
    std::cout << "orientations not enumerated (limit " << o.orientation_limit
              << "); orientation derived from the undirected flow\n";
  }
  std::cout << "orientation:\n";
  for (const auto& a : j["arcs"]) {
    std::cout << "  " << a["from"].get<std::string>() << " -> " << a["to"].get<std::string>()
              << "  flow " << a["flow"] << "/" << a["capacity"] << "\n";
  }
  std::cout << "order:";
  for (const auto& n : j["order"]) std::cout << ' ' << n.get<std::string>();
  std::cout << "\n";
  for (const auto& [node, outs] : j["outputs"].items()) {
    std::cout << "  " << node << " outputs:";
    for (const auto& x : outs) std::cout << ' ' << x.get<std::string>();
    std::cout << "\n";
  }
  auto path = out_path(o, "plan.json");
  write_file(path, doc.str());
  std::cout << "plan written to " << path.string() << "\n";
  return kOk;
}

void load_run(const Options& o, const std::string& plan_file, Plan& plan, Run& run) {
  check(qkdn_plan_load_json(read_file(plan_file).c_str(), plan.out()));
  check(qkdn_flood_run(plan.get(), o.seed, run.out()));
}

int cmd_flood_run(const Options& o, const std::string& plan_file) {
  Plan plan;
  Run run;
  load_run(o, plan_file, plan, run);
  CStr transcript, report;
  check(qkdn_run_transcript_jsonl(run.get(), transcript.out()));
  check(qkdn_run_report_json(run.get(), report.out()));
  auto tpath = out_path(o, "transcript.jsonl");
  auto rpath = out_path(o, "run.json");
  write_file(tpath, transcript.str());
  write_file(rpath, report.str());

  json r = json::parse(report.str());
  std::cout << "announcements: " << r["announcements"] << "\n";
  std::cout << "rate key: " << r["rate_key"]["length"] << " bits " << r["rate_key"]["hex"].get<std::string>()
            << "\n";
  if (r.contains("secure_key")) {
    std::cout << "secure key: " << r["secure_key"]["length"] << " bits "
              << r["secure_key"]["hex"].get<std::string>() << "\n";
  }
  std::cout << "retained surplus entries: " << r["retained"].size() << "\n";
  bool decodes = r["sink_decodes"].get<bool>();
  bool rate_leak = r["eavesdropper"]["rate_key_compromised"].get<bool>();
  bool secure_leak = r["eavesdropper"].value("secure_key_compromised", false);
  std::cout << "sink reconstruction: " << (decodes ? "ok" : "MISMATCH") << "\n";
  std::cout << "eavesdropper audit: " << (rate_leak || secure_leak ? "FAIL" : "pass")
            << " (derivable rate-key bits " << r["eavesdropper"]["rate_key_derivable_bits"] << ")\n";
  std::cout << "transcript written to " << tpath.string() << "\nreport written to " << rpath.string()
            << "\n";
  return decodes && !rate_leak && !secure_leak ? kOk : kEmpty;
}

int cmd_flood_replay(const Options& o, const std::string& plan_file, const std::string& transcript_file) {
  Plan plan;
  Run run;
  load_run(o, plan_file, plan, run);
  int matches = 0;
  check(qkdn_run_replay(run.get(), read_file(transcript_file).c_str(), &matches));
  std::cout << (matches ? "match: sink key equals the source's designated bits\n"
                        : "mismatch: sink key differs from the source's designated bits\n");
  return matches ? kOk : kEmpty;
}

int cmd_audit(const Options& o, const std::string& plan_file, const std::string& mode,
              const std::vector<std::string>& members, std::size_t bound, const std::string& key) {
  Plan plan;
  Run run;
  load_run(o, plan_file, plan, run);
  std::vector<const char*> ptrs;
  for (const auto& m : members) ptrs.push_back(m.c_str());
  int compromised = 0;
  CStr report;
  check(qkdn_run_audit(run.get(), mode.c_str(), ptrs.data(), ptrs.size(), bound, key.c_str(),
                       &compromised, report.out()));
  std::cout << report.str();
  if (!o.out.empty()) write_file(out_path(o, "audit.json"), report.str());
  return compromised ? kEmpty : kOk;
}

int cmd_trust_eval(const Options& o, const std::string& paths_file, const std::vector<std::string>& ends) {
  CStr doc;
  check(qkdn_trust_eval(assessment_text(o, paths_file, ends).c_str(), o.paper_literal ? 1 : 0,
                        o.samples, o.seed, doc.out()));
  json j = json::parse(doc.str());
  std::cout << "paths: " << j["paths"].size();
  if (j["cross_points"].empty()) {
    std::cout << " (non-overlapping)\n";
  } else {
    std::cout << " (cross-points:";
    for (const auto& x : j["cross_points"]) std::cout << ' ' << x.get<std::string>();
    std::cout << ")\n";
  }
  if (j["trust_xor"].is_number()) {
    std::cout << "trust (closed form): " << fmt(j["trust_xor"].get<double>()) << "\n";
  } else {
    std::cout << "trust (closed form): n/a for overlapping paths\n";
  }
  const auto& b = j["oracle"]["broadcasting"];
  const auto& p = j["oracle"]["pooling"];
  std::cout << "trust (enumeration, broadcasting): " << fmt(b["trust"].get<double>()) << "\n";
  std::cout << "compromise (enumeration, broadcasting): " << fmt(b["compromise"].get<double>()) << "\n";
  std::cout << "compromise (enumeration, pooling): " << fmt(p["compromise"].get<double>()) << "\n";
  if (!b["exact"].get<bool>()) {
    std::cout << "monte carlo: " << b["samples"] << " samples, 95% interval [" << fmt(b["ci95"][0].get<double>())
              << ", " << fmt(b["ci95"][1].get<double>()) << "]\n";
  }
  if (j.contains("paper_literal")) {
    const auto& l = j["paper_literal"];
    std::cout << "literal compromise expression: " << fmt(l["compromise"].get<double>())
              << " vs enumeration " << fmt(l["oracle_compromise"].get<double>()) << " (gap "
              << fmt(l["gap"].get<double>()) << ")\n";
    std::cout << "note: " << l["note"].get<std::string>() << "\n";
  }
  if (!o.out.empty()) write_file(out_path(o, "trust_eval.json"), doc.str());
  return kOk;
}

int cmd_trust_optimize(const Options& o, const std::string& paths_file, const std::vector<std::string>& ends) {
  CStr table, best;
  qkdn_status s = qkdn_trust_optimize(assessment_text(o, paths_file, ends).c_str(), o.t_min,
                                      o.min_subset, table.out(), best.out());
  if (s == QKDN_INFEASIBLE) {
    throw Failure{kEmpty, std::string(qkdn_last_error())};
  }
  check(s);
  std::cout << table.str();
  json j = json::parse(best.str());
  std::cout << "best: " << j["partition"].get<std::string>() << " trust " << fmt(j["trust"].get<double>())
            << " rate " << fmt(j["rate"].get<double>()) << "\n";
  if (!o.out.empty()) write_file(out_path(o, "partitions.csv"), table.str());
  return kOk;
}

int cmd_trust_frontier(const Options& o, unsigned n, double lo, double hi, double step) {
  CStr csv;
  check(qkdn_trust_frontier_csv(n, lo, hi, step, csv.out()));
  std::cout << csv.str();
  if (!o.out.empty()) write_file(out_path(o, "frontier.csv"), csv.str());
  return kOk;
}

int cmd_siat_size(const Options& o) {
  auto p = wc_params(o);
  std::cout << "round bits a: " << p.round_bits << "\n";
  std::cout << "classical communication d: " << fmt(p.comm_bits) << " (" << o.d_convention << ")\n";
  std::cout << "tag bits b: " << p.tag_bits << "\n";
  std::cout << "tag key bits s: " << p.key_bits << "\n";
  return kOk;
}

int cmd_siat_plan(const Options& o, const std::string& x, const std::string& u, const std::string& v,
                  std::uint64_t tag_bits, std::uint64_t round_bits) {
  Net net;
  load_network(o, net);
  auto s = sizes(o, tag_bits, round_bits);
  qkdn_siat plan{};
  check(qkdn_siat_plan(net.get(), x.c_str(), u.c_str(), v.c_str(), s.tag_bits, s.round_bits, &plan));
  std::cout << "intermediary " << x << " for " << u << "-" << v << "\n";
  std::cout << "tag key: " << s.tag_bits << " bits over min(" << fmt(plan.rate_xu) << ", "
            << fmt(plan.rate_xv) << ") bit/s = " << fmt(plan.tag_transfer_seconds, "%.2f") << " s\n";
  std::cout << "first round: " << s.round_bits << " bits at " << fmt(plan.rate_uv)
            << " bit/s = " << fmt(plan.qkd_round_seconds, "%.2f") << " s\n";
  std::cout << "trust window: " << fmt(plan.trust_window_seconds, "%.2f") << " s\n";
  return kOk;
}

int cmd_siat_table(const Options& o, const std::string& user, std::uint64_t tag_bits, std::uint64_t round_bits) {
  Net net;
  load_network(o, net);
  auto s = sizes(o, tag_bits, round_bits);
  CStr csv;
  check(qkdn_siat_table_csv(net.get(), user.c_str(), s.tag_bits, s.round_bits, csv.out()));
  std::cout << csv.str();
  if (!o.out.empty()) write_file(out_path(o, "siat_table.csv"), csv.str());
  return kOk;
}

int cmd_siat_scale(const Options& o, std::uint64_t n_lo, std::uint64_t n_hi, std::uint64_t ca_lo,
                   std::uint64_t ca_hi) {
  std::ostringstream csv;
  csv << "# pre-shared authentication keys for n users tolerating c_a colluding nodes\n";
  csv << "n,c_a,keys\n";
  for (std::uint64_t ca = ca_lo; ca <= ca_hi; ++ca) {
    for (std::uint64_t n = std::max(n_lo, ca + 2); n <= n_hi; ++n) {
      std::uint64_t k = 0;
      check(qkdn_key_scaling(n, ca, &k));
      csv << n << ',' << ca << ',' << k << '\n';
    }
  }
  std::cout << csv.str();
  if (!o.out.empty()) write_file(out_path(o, "key_scaling.csv"), csv.str());
  return kOk;
}

int cmd_siat_flooded(const Options& o, const std::string& u, const std::string& v, std::uint64_t tag_bits,
                     std::uint64_t round_bits) {
  if (o.trust.size() != 2) throw Failure{kInput, "give --trust twice: the tables of both end users"};
  Net net;
  load_network(o, net);
  Table tu, tv;
  load_table(o.trust[0], tu);
  load_table(o.trust[1], tv);
  auto s = sizes(o, tag_bits, round_bits);
  CStr report, table;
  qkdn_status st = qkdn_flooded_siat(net.get(), tu.get(), tv.get(), u.c_str(), v.c_str(), o.t_min,
                                     o.min_subset, s.tag_bits, s.round_bits, report.out(), table.out());
  if (st == QKDN_INFEASIBLE) {
    throw Failure{kEmpty, std::string(qkdn_last_error()) + " (best " + fmt(qkdn_last_error_value()) + ")"};
  }
  check(st);
  json j = json::parse(report.str());
  std::cout << "mutual peers:";
  for (const auto& p : j["peers"]) std::cout << ' ' << p.get<std::string>();
  std::cout << "\ndisjoint paths: " << j["paths"].size() << "\n";
  std::cout << table.str();
  std::cout << "chosen: " << j["partition"].get<std::string>() << " trust " << fmt(j["trust"].get<double>())
            << " (enumeration " << fmt(j["oracle_trust"].get<double>()) << ") rate "
            << fmt(j["rate_bps"].get<double>()) << " bit/s\n";
  std::cout << "trust window: " << fmt(j["trust_window_s"].get<double>(), "%.2f") << " s\n";
  if (!o.out.empty()) {
    write_file(out_path(o, "flooded_siat.json"), report.str());
    write_file(out_path(o, "flooded_partitions.csv"), table.str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Key relay planning for trusted-node QKD networks"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file with option values; flags given on the command line win");

  Options o;
  app.add_option("--network", o.network, "Network description (JSON)");
  app.add_option("--trust", o.trust, "Trust table (JSON); repeat for a second end user")->take_all();
  app.add_option("--seed", o.seed, "Seed for simulated key material")->capture_default_str();
  app.add_option("--t-min", o.t_min, "Minimum end-to-end trust")->capture_default_str();
  app.add_option("--min-subset", o.min_subset, "Smallest number of paths XORed together")->capture_default_str();
  app.add_option("--c", o.c, "Authentication insecurity")->capture_default_str();
  app.add_option("--g", o.g, "Classical bits exchanged per key bit")->capture_default_str();
  app.add_option("--f", o.f, "Fraction of each round kept for authentication")->capture_default_str();
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--d-convention", o.d_convention, "Message volume for the tag key: round or comm")
      ->check(CLI::IsMember({"round", "comm"}))
      ->capture_default_str();
  app.add_option("--block-seconds", o.block_seconds, "Override the planning block length");
  app.add_flag("--paper-literal", o.paper_literal, "Also report the literal compromise expression");
  app.add_option("--orientation-limit", o.orientation_limit, "Largest number of links to enumerate")
      ->capture_default_str();
  app.add_option("--samples", o.samples, "Monte Carlo samples for large path sets (0: exact only)");

  int rc = kOk;
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto* s = parent->add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  auto* topology = sub(&app, "topology", "Network files");
  topology->require_subcommand(1);
  auto* validate = sub(topology, "validate", "Check a network description");
  validate->callback([&] { rc = cmd_topology_validate(o); });

  auto* flood = sub(&app, "flood", "Flooding plans and runs");
  flood->require_subcommand(1);
  std::string source, sink, plan_file, transcript_file;
  auto* fplan = sub(flood, "plan", "Optimal flooding plan between two users");
  fplan->add_option("source", source)->required();
  fplan->add_option("sink", sink)->required();
  fplan->callback([&] { rc = cmd_flood_plan(o, source, sink); });
  auto* frun = sub(flood, "run", "Execute a plan with seeded keys");
  frun->add_option("plan", plan_file)->required()->check(CLI::ExistingFile);
  frun->callback([&] { rc = cmd_flood_run(o, plan_file); });
  auto* freplay = sub(flood, "replay", "Decode a (possibly altered) transcript at the sink");
  freplay->add_option("plan", plan_file)->required()->check(CLI::ExistingFile);
  freplay->add_option("transcript", transcript_file)->required()->check(CLI::ExistingFile);
  freplay->callback([&] { rc = cmd_flood_replay(o, plan_file, transcript_file); });

  auto* trust = sub(&app, "trust", "Trust evaluation");
  trust->require_subcommand(1);
  std::string paths_file;
  std::vector<std::string> ends;
  auto* teval = sub(trust, "eval", "Closed forms next to the enumeration");
  teval->add_option("--paths", paths_file, "Assessment file: paths and node trust");
  teval->add_option("ends", ends, "SOURCE SINK (paths found in --network)")->expected(0, 2);
  teval->callback([&] { rc = cmd_trust_eval(o, paths_file, ends); });
  auto* topt = sub(trust, "optimize", "Best partition of the paths into XOR groups");
  topt->add_option("--paths", paths_file, "Assessment file: paths, node trust, optional rates");
  topt->add_option("ends", ends, "SOURCE SINK (paths found in --network)")->expected(0, 2);
  topt->callback([&] { rc = cmd_trust_optimize(o, paths_file, ends); });
  unsigned n_inter = 6;
  double t_lo = 0.8, t_hi = 1.0, t_step = 0.01;
  auto* tfront = sub(trust, "frontier", "Trust against rate for equal-trust intermediaries (CSV)");
  tfront->add_option("--n", n_inter, "Number of intermediaries")->capture_default_str();
  tfront->add_option("--t-lo", t_lo)->capture_default_str();
  tfront->add_option("--t-hi", t_hi)->capture_default_str();
  tfront->add_option("--step", t_step)->capture_default_str();
  tfront->callback([&] { rc = cmd_trust_frontier(o, n_inter, t_lo, t_hi, t_step); });

  auto* siat = sub(&app, "siat", "Inaugural authentication planning");
  siat->require_subcommand(1);
  std::uint64_t tag_bits = 0, round_bits = 0;
  std::string x, u, v, user;
  auto add_sizes = [&](CLI::App* s) {
    s->add_option("--tag-bits", tag_bits, "Tag key length s (default: from --c/--g/--f)");
    s->add_option("--round-bits", round_bits, "Round length a (default: from --c/--g/--f)");
  };
  auto* ssize = sub(siat, "size", "Authentication key sizes");
  ssize->callback([&] { rc = cmd_siat_size(o); });
  auto* splan = sub(siat, "plan", "Trust window through one intermediary");
  splan->add_option("intermediary", x)->required();
  splan->add_option("u", u)->required();
  splan->add_option("v", v)->required();
  add_sizes(splan);
  splan->callback([&] { rc = cmd_siat_plan(o, x, u, v, tag_bits, round_bits); });
  auto* stable = sub(siat, "table", "Trust windows for a joining user (CSV)");
  stable->add_option("user", user)->required();
  add_sizes(stable);
  stable->callback([&] { rc = cmd_siat_table(o, user, tag_bits, round_bits); });
  std::uint64_t n_lo = 3, n_hi = 10, ca_lo = 0, ca_hi = 0;
  auto* sscale = sub(siat, "scale", "Pre-shared key count over n and c_a (CSV)");
  sscale->add_option("--n-min", n_lo)->capture_default_str();
  sscale->add_option("--n-max", n_hi)->capture_default_str();
  sscale->add_option("--ca-min", ca_lo)->capture_default_str();
  sscale->add_option("--ca-max", ca_hi)->capture_default_str();
  sscale->callback([&] { rc = cmd_siat_scale(o, n_lo, n_hi, ca_lo, ca_hi); });
  auto* sflood = sub(siat, "flooded", "Inaugural key over mutual peers, grouped to meet --t-min");
  sflood->add_option("u", u)->required();
  sflood->add_option("v", v)->required();
  add_sizes(sflood);
  sflood->callback([&] { rc = cmd_siat_flooded(o, u, v, tag_bits, round_bits); });

  std::string mode = "collective", key = "secure";
  std::vector<std::string> members;
  std::size_t bound = 0;
  auto* audit = sub(&app, "audit", "What an adversary derives from a seeded run");
  audit->add_option("plan", plan_file)->required()->check(CLI::ExistingFile);
  audit->add_option("--mode", mode)->check(CLI::IsMember({"trusted", "dishonest", "collective"}))
      ->capture_default_str();
  audit->add_option("--members", members, "Adversary nodes")->delimiter(',');
  audit->add_option("--bound", bound, "Coalition bound c_a (0: unbounded)");
  audit->add_option("--key", key, "Final key: rate or secure")->check(CLI::IsMember({"rate", "secure"}))
      ->capture_default_str();
  audit->callback([&] { rc = cmd_audit(o, plan_file, mode, members, bound, key); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  }
  return rc;
}
