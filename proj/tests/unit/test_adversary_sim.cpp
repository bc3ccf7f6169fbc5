#include <doctest.h>

#include "qkdnet/adversary_sim.hpp"
#include "qkdnet/error.hpp"

using namespace qkdnet;

namespace {

struct Scenario {
  FloodPlan plan;
  RunRecord record;
  FloodResult result;
};

Scenario run(const Network& net, const std::string& s, const std::string& t, std::uint64_t seed) {
  Scenario sc;
  sc.plan = make_flood_plan(net, s, t);
  sc.record.keys = generate_keys(sc.plan, seed);
  sc.record.source = s;
  sc.record.sink = t;
  auto working = sc.record.keys;
  sc.result = run_flood(sc.plan, working);
  sc.record.transcript = sc.result.transcript;
  return sc;
}

Gf2Vector unit(const VariableIndex& index, const std::string& key, std::size_t bit) {
  Gf2Vector v(index.size());
  v.set(index.variable(key, bit));
  return v;
}

AdversaryModel model(AdversaryModel::Mode mode, std::set<std::string> members) {
  AdversaryModel m;
  m.mode = mode;
  m.members = std::move(members);
  return m;
}

}  // namespace

TEST_CASE("GF(2) vectors") {
  Gf2Vector v(130);
  CHECK(v.is_zero());
  CHECK(v.lowest() == 130);
  v.set(129);
  v.set(64);
  CHECK(v.lowest() == 64);
  Gf2Vector w(130);
  w.set(64);
  v ^= w;
  CHECK(v.lowest() == 129);
  CHECK_THROWS_AS(v ^= Gf2Vector(3), InputError);
}

TEST_CASE("knowledge base rank arithmetic") {
  KeyRing keys;
  for (auto [a, b, bits] : {std::tuple{"A", "C", "1010"}, std::tuple{"C", "B", "0110"}}) {
    auto k = make_link_key(a, b, BitString::from_binary(bits));
    keys.emplace(k.id, k);
  }
  VariableIndex index(keys);
  CHECK(index.size() == 8);
  KnowledgeBase kb(index);
  kb.ingest_key(keys.at("A-C"));
  CHECK(kb.rank() == 4);
  kb.ingest_key(keys.at("A-C"));
  CHECK(kb.rank() == 4);

  KnowledgeBase eve(index);
  Announcement a{"C", "B-C", 0, {{"A-C", 0, 4}}, BitString::from_binary("1100")};
  eve.ingest_transcript({a});
  CHECK(eve.rank() == 4);
  CHECK_FALSE(eve.can_derive_key("A-C"));
  Gf2Vector x(index.size());
  x.set(index.variable("A-C", 2));
  x.set(index.variable("B-C", 2));
  CHECK(eve.can_derive(x));
  CHECK(eve.evaluate(x) == false);
  Gf2Vector y(index.size());
  y.set(index.variable("A-C", 0));
  y.set(index.variable("B-C", 0));
  CHECK(eve.evaluate(y) == true);
  CHECK_FALSE(eve.evaluate(unit(index, "A-C", 2)).has_value());

  eve.ingest_key(keys.at("A-C"));
  CHECK(eve.rank() == 8);
  CHECK(eve.can_derive_key("B-C"));
  CHECK(eve.evaluate(unit(index, "B-C", 0)) == false);
  CHECK(eve.evaluate(unit(index, "B-C", 1)) == true);
}

TEST_CASE("chain: the relay reads everything, an eavesdropper only the XOR") {
  auto sc = run(load_network_file(QKDN_TEST_DATA "/chain.json"), "A", "B", 2);
  VariableIndex index(sc.record.keys);
  auto final_key = rate_key_expression(index, sc.result.shared);

  KnowledgeBase c(index);
  c.ingest_key(sc.record.keys.at("A-C"));
  c.ingest_key(sc.record.keys.at("B-C"));
  c.ingest_transcript(sc.record.transcript);
  CHECK(c.can_derive_key("A-C"));
  CHECK(c.can_derive_key("B-C"));

  KnowledgeBase eve(index);
  eve.ingest_transcript(sc.record.transcript);
  CHECK_FALSE(eve.can_derive_key("A-C"));
  CHECK_FALSE(eve.can_derive(final_key));

  auto trusted = audit_run(sc.record, model(AdversaryModel::Mode::Trusted, {"C"}), final_key);
  CHECK(trusted.compromised);
  CHECK(trusted.culprit == "C");
  CHECK_FALSE(audit_run(sc.record, AdversaryModel::eavesdropper(), final_key).compromised);
}

TEST_CASE("diamond: the sink derives every shared fragment") {
  auto sc = run(load_network_file(QKDN_TEST_DATA "/diamond.json"), "A", "B", 6);
  VariableIndex index(sc.record.keys);
  KnowledgeBase b(index);
  for (const auto& [id, k] : sc.record.keys) {
    if (k.owners.first == "B" || k.owners.second == "B") b.ingest_key(k);
  }
  b.ingest_transcript(sc.record.transcript);
  CHECK(b.can_derive(unit(index, "A-C", 0)));
  CHECK(b.can_derive(unit(index, "A-C", 1)));
  CHECK(b.can_derive(unit(index, "A-D", 0)));
  CHECK(b.can_derive(rate_key_expression(index, sc.result.shared)));
  CHECK(b.can_derive(secure_key_expression(index, sc.result.shared)));
  for (std::size_t i = 0; i < sc.result.shared.size(); ++i) {
    CHECK(b.evaluate(unit(index, sc.result.shared[i].origin[0].key_id, sc.result.shared[i].origin[0].begin)) ==
          sc.result.shared[i].bits[0]);
  }
}

TEST_CASE("diamond: C alone derives only its own part") {
  auto sc = run(load_network_file(QKDN_TEST_DATA "/diamond.json"), "A", "B", 6);
  VariableIndex index(sc.record.keys);
  auto final_key = rate_key_expression(index, sc.result.shared);
  auto v = audit_run(sc.record, model(AdversaryModel::Mode::Collective, {"C"}), final_key);
  CHECK_FALSE(v.compromised);
  CHECK(v.derivable_bits == 2);
  CHECK(v.final_bits == 3);
  CHECK(std::find(v.derivable_key_ids.begin(), v.derivable_key_ids.end(), "A-D") == v.derivable_key_ids.end());
  auto both = audit_run(sc.record, model(AdversaryModel::Mode::Collective, {"C", "D"}), final_key);
  CHECK(both.compromised);
  AdversaryModel bounded = model(AdversaryModel::Mode::Collective, {"C", "D"});
  bounded.bound = 1;
  CHECK_THROWS_AS(audit_run(sc.record, bounded, final_key), InputError);
}

TEST_CASE("XOR key over three single-hop paths survives any one dishonest node") {
  Network net({"A", "B", "C", "D", "E"},
              {{"A", "C", 1}, {"A", "D", 1}, {"A", "E", 1}, {"B", "C", 1}, {"B", "D", 1}, {"B", "E", 1}});
  auto sc = run(net, "A", "B", 8);
  VariableIndex index(sc.record.keys);
  auto final_key = secure_key_expression(index, sc.result.shared);
  for (const auto* node : {"C", "D", "E"}) {
    CHECK_FALSE(audit_run(sc.record, model(AdversaryModel::Mode::Dishonest, {node}), final_key).compromised);
    CHECK_FALSE(audit_run(sc.record, model(AdversaryModel::Mode::Collective, {node}), final_key).compromised);
  }
  auto two = audit_run(sc.record, model(AdversaryModel::Mode::Dishonest, {"C", "D"}), final_key);
  CHECK(two.compromised);
  CHECK(two.culprit == "E");
}

TEST_CASE("adding facts never removes knowledge") {
  auto sc = run(load_network_file(QKDN_TEST_DATA "/diamond.json"), "A", "B", 12);
  VariableIndex index(sc.record.keys);
  KnowledgeBase kb(index);
  std::vector<Gf2Vector> probes;
  for (const auto& [id, range] : index.keys()) {
    for (std::size_t b = 0; b < range.second; ++b) probes.push_back(unit(index, id, b));
  }
  std::vector<bool> known(probes.size(), false);
  auto step = [&] {
    for (std::size_t i = 0; i < probes.size(); ++i) {
      bool now = kb.can_derive(probes[i]);
      CHECK((now || !known[i]));
      known[i] = now;
    }
  };
  kb.ingest_transcript(sc.record.transcript);
  step();
  for (const auto& [id, key] : sc.record.keys) {
    kb.ingest_key(key);
    step();
  }
  CHECK(kb.rank() == index.size());
}

TEST_CASE("unknown adversary members are rejected") {
  auto sc = run(load_network_file(QKDN_TEST_DATA "/diamond.json"), "A", "B", 1);
  VariableIndex index(sc.record.keys);
  CHECK_THROWS_AS(audit_run(sc.record, model(AdversaryModel::Mode::Trusted, {"Z"}),
                            rate_key_expression(index, sc.result.shared)),
                  InputError);
}
