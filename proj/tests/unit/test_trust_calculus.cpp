#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "qkdnet/error.hpp"
#include "qkdnet/trust_calculus.hpp"

using namespace qkdnet;

namespace {

TrustAssessment single_hop(const std::vector<double>& t) {
  std::vector<std::vector<std::string>> paths;
  std::map<std::string, double> trust;
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string id = "N" + std::to_string(i);
    paths.push_back({id});
    trust[id] = t[i];
  }
  return make_assessment(paths, trust);
}

}  // namespace

TEST_CASE("literal compromise expression") {
  CHECK(compromise_probability_closed(single_hop({0.3})) == 1.0);
  CHECK(compromise_probability_closed(single_hop({1.0, 1.0})) == 0.0);
  CHECK(compromise_probability_closed(single_hop({0.9, 0.9})) == doctest::Approx(0.21).epsilon(1e-12));
  auto missing = make_assessment({{"C"}, {"D"}}, {{"C", 0.9}});
  CHECK_THROWS_AS(compromise_probability_closed(missing), InputError);
}

TEST_CASE("XOR trust over disjoint paths") {
  CHECK(trust_xor(single_hop({0.9, 0.9})) == doctest::Approx(0.81).epsilon(1e-12));
  CHECK(trust_xor(single_hop({1, 1, 1})) == 1.0);
  CHECK(trust_xor(single_hop({1, 1, 0})) == 1.0);
  auto overlap = make_assessment({{"C", "E"}, {"D", "E"}}, {{"C", 1}, {"D", 1}, {"E", 1}});
  CHECK_THROWS_AS(trust_xor(overlap), InputError);
}

TEST_CASE("partitioned trust") {
  std::vector<double> t{0.9, 0.9, 0.9, 0.9};
  std::vector<std::vector<std::size_t>> whole{{0, 1, 2, 3}};
  CHECK(trust_partitioned(whole, t) == doctest::Approx(trust_xor(t)).epsilon(1e-12));
  std::vector<std::vector<std::size_t>> halves{{0, 1}, {2, 3}};
  CHECK(trust_partitioned(halves, t) == doctest::Approx(0.6561).epsilon(1e-12));
  std::vector<double> z{0.0, 1.0, 1.0, 1.0};
  std::vector<std::vector<std::size_t>> zero{{0, 1}, {2, 3}};
  CHECK(trust_partitioned(zero, z) == 0.0);
  std::vector<std::vector<std::size_t>> twice{{0, 1}, {1, 2, 3}};
  CHECK_THROWS_AS(trust_partitioned(twice, t), InputError);
}

TEST_CASE("symmetric trust") {
  for (double T : {0.0, 0.3, 0.9, 1.0}) CHECK(trust_symmetric(1, 2, T) == doctest::Approx(T * T).epsilon(1e-15));
  for (unsigned m = 1; m < 4; ++m) {
    for (unsigned n = 2; n < 6; ++n) CHECK(trust_symmetric(m, n, 1.0) == 1.0);
  }
  CHECK(std::abs(trust_symmetric(1, 3, 0.9) - 0.972) < 1e-15);
  CHECK(trust_symmetric(2, 3, 0.99) == doctest::Approx(0.999404088804).epsilon(1e-12));
}

TEST_CASE("oracle on small instances") {
  auto two = single_hop({0.9, 0.9});
  CHECK(compromise_oracle(two, AdversaryMode::Broadcasting).probability == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(compromise_oracle(two, AdversaryMode::Pooling).probability == doctest::Approx(0.01).epsilon(1e-12));
  auto many = single_hop(std::vector<double>(21, 0.9));
  CHECK_THROWS_AS(compromise_oracle(many, AdversaryMode::Broadcasting), LimitError);
}

TEST_CASE("oracle agrees with path-level enumeration") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    int paths = 2 + static_cast<int>(rng() % 4);
    std::vector<std::vector<std::string>> p;
    std::map<std::string, double> trust;
    std::vector<double> path_t;
    int id = 0;
    for (int i = 0; i < paths; ++i) {
      int len = 1 + static_cast<int>(rng() % 3);
      std::vector<std::string> path;
      double t = 1.0;
      for (int j = 0; j < len; ++j) {
        std::string n = "n" + std::to_string(id++);
        trust[n] = u(rng);
        t *= trust[n];
        path.push_back(n);
      }
      path_t.push_back(t);
      p.push_back(path);
    }
    auto assess = make_assessment(p, trust);
    double oracle_trust = 1.0 - compromise_oracle(assess, AdversaryMode::Broadcasting).probability;
    CHECK(std::abs(oracle_trust - oracle::path_level_trust(path_t)) < 1e-12);
    CHECK(std::abs(trust_xor(assess) - oracle_trust) < 1e-12);
  }
}

TEST_CASE("honest cross-point reads the key when every other path is exposed") {
  // Paths C-E and D-E meet at E; F is a separate path.
  auto paths = std::vector<std::vector<std::string>>{{"C", "E"}, {"D", "E"}, {"F"}};
  CHECK(is_compromised(paths, {{"F", true}}, AdversaryMode::Broadcasting));
  CHECK_FALSE(is_compromised(paths, {{"C", true}}, AdversaryMode::Broadcasting));
  CHECK(is_compromised(paths, {{"E", true}}, AdversaryMode::Broadcasting));  // two paths exposed
  CHECK_FALSE(is_compromised(paths, {{"E", true}}, AdversaryMode::Pooling));
  CHECK(is_compromised(paths, {{"E", true}, {"F", true}}, AdversaryMode::Pooling));
  CHECK_FALSE(is_compromised(paths, {}, AdversaryMode::Broadcasting));
}

TEST_CASE("oracle over overlapping paths matches the per-assignment rule") {
  auto paths = std::vector<std::vector<std::string>>{{"C", "E"}, {"D", "E"}, {"F"}};
  std::map<std::string, double> trust{{"C", 0.9}, {"D", 0.8}, {"E", 0.95}, {"F", 0.7}};
  std::vector<std::string> nodes{"C", "D", "E", "F"};
  for (auto mode : {AdversaryMode::Broadcasting, AdversaryMode::Pooling}) {
    double p = 0.0;
    for (int mask = 0; mask < 16; ++mask) {
      std::map<std::string, bool> bad;
      double w = 1.0;
      for (int j = 0; j < 4; ++j) {
        bool d = (mask >> j) & 1;
        bad[nodes[j]] = d;
        w *= d ? 1.0 - trust[nodes[j]] : trust[nodes[j]];
      }
      if (is_compromised(paths, bad, mode)) p += w;
    }
    auto assess = make_assessment(paths, trust);
    CHECK(compromise_oracle(assess, mode).probability == doctest::Approx(p).epsilon(1e-14));
  }
}

TEST_CASE("bounded adversaries against enough disjoint paths") {
  for (int ca = 0; ca <= 3; ++ca) {
    std::vector<std::vector<std::string>> pool_paths, bcast_paths;
    for (int i = 0; i < ca + 1; ++i) pool_paths.push_back({"n" + std::to_string(i)});
    for (int i = 0; i < ca + 2; ++i) bcast_paths.push_back({"n" + std::to_string(i)});
    for (int mask = 0; mask < (1 << (ca + 2)); ++mask) {
      if (std::popcount(static_cast<unsigned>(mask)) != ca) continue;
      std::map<std::string, bool> bad;
      for (int i = 0; i < ca + 2; ++i) bad["n" + std::to_string(i)] = (mask >> i) & 1;
      CHECK_FALSE(is_compromised(bcast_paths, bad, AdversaryMode::Broadcasting));
      if (!((mask >> (ca + 1)) & 1)) CHECK_FALSE(is_compromised(pool_paths, bad, AdversaryMode::Pooling));
    }
  }
}

TEST_CASE("Monte Carlo beyond the exact limit") {
  std::vector<double> t(24, 0.8);
  auto assess = single_hop(t);
  OracleOptions opt;
  opt.monte_carlo = true;
  opt.samples = 200000;
  opt.seed = 42;
  auto r = compromise_oracle(assess, AdversaryMode::Broadcasting, opt);
  CHECK_FALSE(r.exact);
  CHECK(r.samples == 200000);
  double exact = 1.0 - trust_xor(assess);
  CHECK(r.ci_low <= r.probability);
  CHECK(r.probability <= r.ci_high);
  // Exact value is below 1e-14; the interval must still cover it.
  CHECK(r.ci_low <= exact + 1e-12);
  auto again = compromise_oracle(assess, AdversaryMode::Broadcasting, opt);
  CHECK(again.probability == r.probability);

  std::vector<double> mid(22, 0.3);
  auto assess2 = single_hop(mid);
  auto r2 = compromise_oracle(assess2, AdversaryMode::Broadcasting, opt);
  double exact2 = 1.0 - oracle::path_level_trust(std::vector<double>(22, 0.3));
  CHECK(r2.ci_low <= exact2);
  CHECK(exact2 <= r2.ci_high);
}

TEST_CASE("partition optimizer on six equal paths") {
  std::vector<PathOption> six(6, PathOption{1.0, 0.99});
  auto s = optimize_partition(six, 0.9925, 3);
  CHECK(s.best.subsets == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3, 4, 5}});
  CHECK(s.best.rate == 2.0);
  CHECK(s.best.trust == doctest::Approx(trust_symmetric(2, 3, 0.99)).epsilon(1e-12));
  CHECK(s.table.size() == 11);  // {6} plus ten {3,3}

  auto vacuous = optimize_partition(six, 0.0, 3);
  CHECK(vacuous.best.subsets.size() == 2);

  try {
    optimize_partition(six, 1.0, 3);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(e.best() == doctest::Approx(trust_symmetric(1, 6, 0.99)).epsilon(1e-12));
    CHECK(std::string(e.what()).find("no feasible partition") == 0);
  }
  std::vector<PathOption> two(2, PathOption{1.0, 0.99});
  CHECK_THROWS_AS(optimize_partition(two, 0.5, 3), InfeasibleError);
  std::vector<PathOption> lots(13, PathOption{1.0, 0.99});
  CHECK_THROWS_AS(optimize_partition(lots, 0.5, 3), LimitError);
}

TEST_CASE("optimizer ties prefer higher trust") {
  // Same total rate either way; {0 1 2}{3 4 5} groups the weak paths together.
  std::vector<PathOption> p{{1, 0.999}, {1, 0.999}, {1, 0.999}, {1, 0.5}, {1, 0.5}, {1, 0.5}};
  auto s = optimize_partition(p, 0.0, 3);
  double best = 0;
  for (const auto& part : s.table) {
    if (part.subsets.size() == 2) best = std::max(best, part.trust);
  }
  CHECK(s.best.trust == best);
}

TEST_CASE("frontier") {
  auto ones = trust_rate_frontier(6, 1.0);
  REQUIRE(ones.size() == 3);
  unsigned best_m = 0;
  for (const auto& p : ones) {
    CHECK(p.trust == 1.0);
    best_m = std::max(best_m, p.m);
  }
  CHECK(best_m == 3);
  for (const auto& p : ones) CHECK(p.on_frontier == (p.m == 3));

  auto four = trust_rate_frontier(4, 0.9);
  REQUIRE(four.size() == 2);
  CHECK(four[0].m == 1);
  CHECK(four[0].trust == trust_symmetric(1, 4, 0.9));
  CHECK(four[1].m == 2);
  CHECK(four[1].trust == doctest::Approx(0.81 * 0.81).epsilon(1e-12));

  auto csv = frontier_csv(6, 0.99, 0.99, 0.01);
  CHECK(csv.find("0.99,3,2,0.99940408880") != std::string::npos);
}
