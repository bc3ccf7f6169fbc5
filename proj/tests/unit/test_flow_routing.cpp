#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "qkdnet/error.hpp"
#include "qkdnet/flow_routing.hpp"

using namespace qkdnet;

namespace {

Network diamond() { return load_network_file(QKDN_TEST_DATA "/diamond.json"); }

}  // namespace

TEST_CASE("diamond flood value and orientations") {
  auto net = diamond();
  auto free_links = intermediary_links(net, "A", "B");
  REQUIRE(free_links.size() == 1);
  CHECK(free_links[0] == Link{"C", "D", 1});
  OrientationEnumerator all(net, "A", "B");
  CHECK(all.size() == 2);
  auto best = optimal_flood_value(net, "A", "B");
  CHECK(best.value == 3);
  CHECK(best.exhaustive);
  REQUIRE(best.optimal.size() == 1);
  CHECK(best.indices[0] == 0);  // C -> D
  CHECK(best.value == oracle::brute_force_min_cut(net, "A", "B"));
}

TEST_CASE("orientation index bits reverse intermediary links") {
  auto net = diamond();
  auto forward = orient(net, "A", "B", 0);
  auto reverse = orient(net, "A", "B", 1);
  auto has = [](const DirectedNetwork& d, const std::string& f, const std::string& t) {
    for (const auto& a : d.arcs) {
      if (a.from == f && a.to == t) return true;
    }
    return false;
  };
  CHECK(has(forward, "C", "D"));
  CHECK(has(reverse, "D", "C"));
  for (const auto& d : {forward, reverse}) {
    CHECK(has(d, "A", "C"));
    CHECK(has(d, "A", "D"));
    CHECK(has(d, "C", "B"));
    CHECK(has(d, "D", "B"));
  }
}

TEST_CASE("max flow with a useless reversed link") {
  // A-C=2, A-D=1, C-D=1, C-B=1, D-B=2: with D -> C, C can forward only one
  // of its two bits and D only gets one bit, so the flow drops to 2.
  auto net = diamond();
  auto reverse = orient(net, "A", "B", 1);
  CHECK(max_flow(reverse).value == 2);
}

TEST_CASE("orientation limit") {
  auto net = diamond();
  CHECK_THROWS_AS(OrientationEnumerator(net, "A", "B", 0), LimitError);
  auto best = optimal_flood_value(net, "A", "B", 0);
  CHECK_FALSE(best.exhaustive);
  CHECK(best.value == 3);
  REQUIRE(best.optimal.size() == 1);
  CHECK(is_acyclic(best.optimal[0]));
  CHECK(max_flow(best.optimal[0]).value == 3);
}

TEST_CASE("undirected max flow equals the independent oracles") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    auto net = oracle::random_network(rng, 6, 9, 10);
    auto flow = undirected_max_flow(net, "A", "B");
    CHECK(flow.value == oracle::simple_max_flow(net, "A", "B"));
    CHECK(flow.value == oracle::brute_force_min_cut(net, "A", "B"));
  }
}

TEST_CASE("topological order prefers the smallest ready node") {
  DirectedNetwork d{{"A", "B", "C", "D"}, "A", "B", {{"A", "D", 1}, {"A", "C", 1}, {"C", "B", 1}, {"D", "B", 1}}};
  CHECK(topological_order(d) == std::vector<std::string>{"A", "C", "D", "B"});
  DirectedNetwork cyclic{{"A", "B", "C", "D"}, "A", "B", {{"C", "D", 1}, {"D", "C", 1}}};
  CHECK_FALSE(is_acyclic(cyclic));
  CHECK_THROWS_AS(topological_order(cyclic), InputError);
}

TEST_CASE("flood plan of the diamond") {
  auto plan = make_flood_plan(diamond(), "A", "B");
  CHECK(plan.value == 3);
  CHECK(plan.order == std::vector<std::string>{"C", "D"});
  CHECK(plan.outputs.at("C") == std::vector<std::string>{"B", "D"});
  CHECK(plan.outputs.at("D") == std::vector<std::string>{"B"});
  CHECK(plan.flow("A", "C") == 2);
  CHECK(plan.flow("C", "D") == 1);
  CHECK(plan.flow("D", "B") == 2);
  CHECK(plan.flow("B", "A") == 0);
}

TEST_CASE("chain plan is a single path") {
  auto plan = make_flood_plan(load_network_file(QKDN_TEST_DATA "/chain.json"), "A", "B");
  CHECK(plan.value == 10);
  CHECK(plan.order == std::vector<std::string>{"C"});
}

TEST_CASE("disconnected pair has no plan") {
  auto net = load_network_file(QKDN_TEST_DATA "/disconnected.json");
  CHECK(optimal_flood_value(net, "A", "B").value == 0);
  CHECK_THROWS_AS(make_flood_plan(net, "A", "B"), InfeasibleError);
}

TEST_CASE("plan JSON round trip and validation") {
  auto plan = make_flood_plan(diamond(), "A", "B");
  auto text = plan_to_json(plan);
  auto back = plan_from_json(text);
  CHECK(plan_to_json(back) == text);
  std::string broken = text;
  auto at = broken.find("\"flow\": 2");
  REQUIRE(at != std::string::npos);
  broken.replace(at, 9, "\"flow\": 5");
  CHECK_THROWS_AS(plan_from_json(broken), InputError);
}

TEST_CASE("non-overlapping paths") {
  auto net = diamond();
  auto paths = find_mnops(net, "A", "B", 2);
  CHECK(paths.paths == std::vector<std::vector<std::string>>{{"C"}, {"D"}});
  CHECK(paths.cross_points.empty());
  CHECK(max_disjoint_paths(net, "A", "B") == 2);
  try {
    find_mnops(net, "A", "B", 3);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.best() == 2);
  }
  CHECK_THROWS_AS(find_mnops(net, "A", "B", 0), InputError);
}

TEST_CASE("a direct link is a path without interior nodes") {
  Network net({"A", "B", "C"}, {{"A", "B", 1}, {"A", "C", 1}, {"B", "C", 1}});
  auto paths = find_mnops(net, "A", "B", 2);
  CHECK(paths.paths == std::vector<std::vector<std::string>>{{}, {"C"}});
  CHECK(path_rate_bps(net, "A", "B", {}) == 1);
}

TEST_CASE("cross points of overlapping paths") {
  std::vector<std::vector<std::string>> paths{{"C", "E"}, {"D", "E"}, {"F"}};
  CHECK(cross_points_of(paths) == std::set<std::string>{"E"});
}
