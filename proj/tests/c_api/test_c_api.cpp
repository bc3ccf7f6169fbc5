// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "qkdnet/qkdnet.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  qkdn_string_free(s);
  return out;
}

struct Net {
  qkdn_network* p = nullptr;
  explicit Net(const char* file) { REQUIRE(qkdn_network_load_file(file, 0, &p) == QKDN_OK); }
  ~Net() { qkdn_network_free(p); }
};

}  // namespace

TEST_CASE("argument and input errors map to statuses") {
  qkdn_network* net = nullptr;
  CHECK(qkdn_network_load_file(nullptr, 0, &net) == QKDN_INVALID_ARGUMENT);
  CHECK(qkdn_network_load_file(QKDN_TEST_DATA "/diamond.json", 0, nullptr) == QKDN_INVALID_ARGUMENT);
  CHECK(qkdn_network_load_file(QKDN_TEST_DATA "/no_such_file.json", 0, &net) == QKDN_IO);
  CHECK(std::string(qkdn_last_error()).find("no_such_file") != std::string::npos);
  CHECK(qkdn_network_load_file(QKDN_TEST_DATA "/bad_selfloop.json", 0, &net) == QKDN_INPUT);
  CHECK(qkdn_network_load_json("{not json", 0, &net) == QKDN_INPUT);
  CHECK(net == nullptr);
  qkdn_network_free(nullptr);
  qkdn_string_free(nullptr);
  CHECK(std::string(qkdn_version()).size() > 0);
}

TEST_CASE("flood value, plan and run round trip") {
  Net net(QKDN_TEST_DATA "/diamond.json");
  int64_t value = 0;
  int exhaustive = 0;
  size_t count = 0;
  REQUIRE(qkdn_flood_value(net.p, "A", "B", 20, &value, &exhaustive, &count) == QKDN_OK);
  CHECK(value == 3);
  CHECK(exhaustive == 1);
  CHECK(count >= 1);

  qkdn_plan* plan = nullptr;
  REQUIRE(qkdn_flood_plan(net.p, "A", "B", 20, &plan) == QKDN_OK);
  char* json = nullptr;
  REQUIRE(qkdn_plan_to_json(plan, &json) == QKDN_OK);
  std::string plan_text = take(json);
  qkdn_plan* again = nullptr;
  REQUIRE(qkdn_plan_load_json(plan_text.c_str(), &again) == QKDN_OK);
  REQUIRE(qkdn_plan_to_json(again, &json) == QKDN_OK);
  CHECK(take(json) == plan_text);
  qkdn_plan_free(again);

  qkdn_run* run = nullptr;
  REQUIRE(qkdn_flood_run(plan, 9, &run) == QKDN_OK);
  REQUIRE(qkdn_run_transcript_jsonl(run, &json) == QKDN_OK);
  std::string transcript = take(json);
  int matches = 0;
  REQUIRE(qkdn_run_replay(run, transcript.c_str(), &matches) == QKDN_OK);
  CHECK(matches == 1);

  std::string tampered = transcript;
  auto pos = tampered.find("\"ciphertext\":\"");
  REQUIRE(pos != std::string::npos);
  pos += 14;
  int nibble = std::stoi(std::string(1, tampered[pos]), nullptr, 16) ^ 8;
  tampered[pos] = "0123456789abcdef"[nibble];
  REQUIRE(qkdn_run_replay(run, tampered.c_str(), &matches) == QKDN_OK);
  CHECK(matches == 0);

  REQUIRE(qkdn_run_report_json(run, &json) == QKDN_OK);
  std::string report = take(json);
  CHECK(report.find("\"rate_key_compromised\": false") != std::string::npos);

  const char* members[] = {"C", "D"};
  int compromised = -1;
  REQUIRE(qkdn_run_audit(run, "collective", members, 2, 2, "rate", &compromised, &json) == QKDN_OK);
  take(json);
  CHECK(compromised == 1);
  REQUIRE(qkdn_run_audit(run, "collective", members, 1, 0, "rate", &compromised, nullptr) == QKDN_OK);
  CHECK(compromised == 0);
  CHECK(qkdn_run_audit(run, "sneaky", members, 1, 0, "rate", &compromised, nullptr) ==
        QKDN_INVALID_ARGUMENT);
  CHECK(qkdn_run_audit(run, "collective", members, 2, 1, "rate", &compromised, nullptr) == QKDN_INPUT);

  qkdn_run_free(run);
  qkdn_plan_free(plan);
}

TEST_CASE("disconnected pair is infeasible") {
  Net net(QKDN_TEST_DATA "/disconnected.json");
  qkdn_plan* plan = nullptr;
  CHECK(qkdn_flood_plan(net.p, "A", "B", 20, &plan) == QKDN_INFEASIBLE);
  CHECK(plan == nullptr);
  CHECK(qkdn_last_error_value() == 0.0);
}

TEST_CASE("trust entry points") {
  double t = 0;
  const double paths[] = {0.9, 0.9};
  REQUIRE(qkdn_trust_xor(paths, 2, &t) == QKDN_OK);
  CHECK(t == doctest::Approx(0.81));
  REQUIRE(qkdn_trust_symmetric(1, 3, 0.9, &t) == QKDN_OK);
  CHECK(t == doctest::Approx(0.972));
  CHECK(qkdn_trust_xor(nullptr, 2, &t) == QKDN_INVALID_ARGUMENT);

  char* out = nullptr;
  const char* assess = R"({"paths": [["C"], ["D"]], "trust": {"C": 0.9, "D": 0.9}})";
  REQUIRE(qkdn_trust_eval(assess, 1, 0, 1, &out) == QKDN_OK);
  std::string eval = take(out);
  CHECK(eval.find("paper_literal") != std::string::npos);

  const char* six = R"({"paths": [["a"],["b"],["c"],["d"],["e"],["f"]],
    "trust": {"a":0.99,"b":0.99,"c":0.99,"d":0.99,"e":0.99,"f":0.99}})";
  char* table = nullptr;
  char* best = nullptr;
  REQUIRE(qkdn_trust_optimize(six, 0.9925, 3, &table, &best) == QKDN_OK);
  CHECK(take(best).find("{0 1 2}|{3 4 5}") != std::string::npos);
  CHECK(take(table).find("partition,subsets,trust,rate,feasible,best") != std::string::npos);
  CHECK(qkdn_trust_optimize(six, 1.0, 3, &table, &best) == QKDN_INFEASIBLE);
  CHECK(qkdn_last_error_value() < 1.0);
  CHECK(qkdn_last_error_value() > 0.99);

  REQUIRE(qkdn_trust_frontier_csv(6, 0.8, 1.0, 0.1, &out) == QKDN_OK);
  CHECK(take(out).find("on_frontier") != std::string::npos);
}

TEST_CASE("authentication sizing and trust window") {
  uint64_t s = 0;
  REQUIRE(qkdn_wc_key_length(1e-9, 50563, &s) == QKDN_OK);
  CHECK(s == 2179);
  uint64_t a = 0;
  REQUIRE(qkdn_round_size(1e-9, 720000, 0.1, 0, &a) == QKDN_OK);
  CHECK(a == 50563);
  qkdn_wc_params p{1e-9, 720000, 0.1, QKDN_D_ROUND, 0, 0, 0, 0};
  REQUIRE(qkdn_wc_size(&p) == QKDN_OK);
  CHECK(p.round_bits == 50563);
  CHECK(p.tag_bits == 31);

  Net net(QKDN_TEST_DATA "/eight_users.json");
  qkdn_siat siat{};
  REQUIRE(qkdn_siat_plan(net.p, "B", "A", "I", 2179, 50563, &siat) == QKDN_OK);
  CHECK(std::abs(siat.tag_transfer_seconds - 62.80) < 0.01);
  CHECK(std::abs(siat.trust_window_seconds - 1835.69) < 0.01);
  CHECK(qkdn_siat_plan(net.p, "Z", "A", "I", 2179, 50563, &siat) == QKDN_INPUT);

  uint64_t k = 0;
  REQUIRE(qkdn_key_scaling(10, 0, &k) == QKDN_OK);
  CHECK(k == 17);

  qkdn_trust_table* tu = nullptr;
  qkdn_trust_table* tv = nullptr;
  Net six(QKDN_TEST_DATA "/six_peers.json");
  REQUIRE(qkdn_trust_table_load_file(QKDN_TEST_DATA "/trust_u.json", &tu) == QKDN_OK);
  REQUIRE(qkdn_trust_table_load_file(QKDN_TEST_DATA "/trust_v.json", &tv) == QKDN_OK);
  char* report = nullptr;
  char* table = nullptr;
  REQUIRE(qkdn_flooded_siat(six.p, tu, tv, "U", "V", 0.99, 3, 2179, 50563, &report, &table) == QKDN_OK);
  CHECK(take(report).find("trust_window_s") != std::string::npos);
  take(table);
  qkdn_trust_table_free(tu);
  qkdn_trust_table_free(tv);
}
