#include <doctest.h>

#include <cmath>
#include <set>

#include "audit.hpp"
#include "clique_checks.hpp"
#include "mbg/clique_game.hpp"
#include "mbg/strategies.hpp"

using namespace mbg;

namespace {

std::vector<Label> random_graph(std::uint32_t v, double p, Rng& rng) {
  std::vector<Label> out;
  for (std::uint32_t a = 0; a < v; ++a)
    for (std::uint32_t c = a + 1; c < v; ++c)
      if (rng.bernoulli(p)) out.push_back(edge(a, c));
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.below(i)]);
  return out;
}

// Tries every vertex subset of size k.
bool brute_clique(const std::vector<Label>& edges, std::uint32_t v, int k) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> es;
  for (const Label& e : edges) es.insert({e.first, e.second});
  for (std::uint32_t mask = 0; mask < (1u << v); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    bool ok = true;
    for (std::uint32_t a = 0; a < v && ok; ++a)
      for (std::uint32_t c = a + 1; c < v && ok; ++c)
        if ((mask >> a & 1) && (mask >> c & 1) && !es.count({a, c})) ok = false;
    if (ok) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("alpha_k") {
  CHECK(clique::alpha_k(3) == doctest::Approx(1.0 / (11.0 / 4 - 1)));
  CHECK(clique::alpha_k(5) == doctest::Approx(0.1));
  CHECK_THROWS(clique::alpha_k(2));
}

TEST_CASE("clique plan identities") {
  const audit::QuietWarnings quiet;
  for (int k = 3; k <= 10; ++k)
    for (std::uint32_t n : {1000u, 10000u, 100000u, 1000000u}) {
      const auto p = clique::clique_plan(n, 1, k);
      REQUIRE(p.ells.size() == static_cast<std::size_t>(k - 2));
      CHECK(p.ells[0] == n);
      CHECK(p.r == doctest::Approx(std::pow(n, -p.alpha)).epsilon(1e-14));
      for (int i = 1; i <= k - 3; ++i) {
        const double lhs = p.ells[i] * p.ells[i] / p.ells[i - 1];
        CHECK(std::abs(lhs - p.r) <= 1e-12 * p.r);
        CHECK(p.star_thresholds[i - 1] == doctest::Approx(10.0 * k * 2 * p.ells[i] / p.ells[i - 1]));
        CHECK(p.star_targets[i - 1] == static_cast<std::uint32_t>(std::ceil(p.ells[i] - 1e-9)));
      }
      CHECK(p.ell == p.ells.back());
      CHECK(p.matching_threshold == doctest::Approx(20.0 * k * std::pow(p.ell, -9.0 / 7)));
      CHECK(p.extend_threshold == doctest::Approx(10.0 * k * k * std::pow(p.ell, -8.0 / 7)));
      CHECK(p.matching_target <= p.matching_edges_target);
    }
}

TEST_CASE("contains_clique agrees with subset enumeration") {
  Rng rng(21);
  for (int t = 0; t < 300; ++t) {
    const auto v = static_cast<std::uint32_t>(3 + rng.below(8));
    const auto edges = random_graph(v, rng.uniform(), rng);
    for (int k = 3; k <= 5; ++k) CHECK(clique::contains_clique(edges, k) == brute_clique(edges, v, k));
  }
}

TEST_CASE("CliqueGoal tracks every prefix") {
  Rng rng(22);
  for (int t = 0; t < 150; ++t) {
    const auto v = static_cast<std::uint32_t>(3 + rng.below(8));
    const int k = static_cast<int>(3 + rng.below(3));
    const auto edges = random_graph(v, 0.3 + 0.7 * rng.uniform(), rng);
    clique::CliqueGoal goal(k, v);
    std::vector<Label> prefix;
    for (const Label& e : edges) {
      prefix.push_back(e);
      CHECK(goal.add(e) == brute_clique(prefix, v, k));
    }
  }
}

TEST_CASE("extract_matching is a maximal matching taken in order") {
  Rng rng(23);
  for (int t = 0; t < 200; ++t) {
    const auto v = static_cast<std::uint32_t>(2 + rng.below(15));
    const auto edges = random_graph(v, rng.uniform(), rng);
    const auto m = clique::extract_matching(edges);
    std::set<std::uint32_t> used;
    for (const Label& e : m) {
      CHECK(used.insert(e.first).second);
      CHECK(used.insert(e.second).second);
    }
    for (const Label& e : edges) CHECK((used.count(e.first) || used.count(e.second)));
    if (!edges.empty()) CHECK(m.front() == edges.front());
  }
}

TEST_CASE("triangle parameters") {
  const auto p = clique::triangle_params(3000, 3);
  CHECK(p.star_target == static_cast<std::uint32_t>(std::ceil(std::cbrt(3000.0))));
  CHECK(p.star_threshold == doctest::Approx(32.0 * std::pow(3000.0, -2.0 / 3)));
  CHECK(p.closing_threshold == doctest::Approx(160.0 * std::pow(3000.0, -1.0 / 3) * std::log(3000.0)));
  CHECK(p.halfway == edge_count(3000) / 2);
}

TEST_CASE("triangle Maker: legal games, and every success owns a triangle") {
  const audit::QuietWarnings quiet;
  int wins = 0;
  for (std::uint64_t s = 0; s < 12; ++s) {
    const std::uint32_t n = 150;
    const std::uint32_t b = static_cast<std::uint32_t>(s % 3);
    const GameRules rules{b, 1, Protocol::purchase};
    clique::TriangleMaker maker(clique::triangle_params(n, b));
    MimicBreaker breaker(std::make_unique<clique::TriangleMaker>(clique::triangle_params(n, b)));
    clique::CliqueGoal goal(3, n);
    audit::Auditor a(rules, edge_count(n));
    GameState st(generate_market(edge_count(n), s, LabelScheme::edges(n)), rules);
    const auto o = play(st, goal, maker, breaker, &a);
    CHECK(a.ok());
    for (const auto& e : audit::check_final(st, o, a)) FAIL_CHECK(e);
    CHECK(o.success == clique::contains_clique(o.maker_items, 3));
    wins += o.success;
  }
  CHECK(wins > 0);
}

TEST_CASE("k-phase clique Maker: audited games obey the strategy rules") {
  const audit::QuietWarnings quiet;
  std::size_t total_takes = 0;
  for (std::uint64_t s = 0; s < 18; ++s) {
    const std::uint32_t n = 60 + 30 * static_cast<std::uint32_t>(s % 3);
    const std::uint32_t b = static_cast<std::uint32_t>(s % 2);
    const auto plan = clique::clique_plan(n, b, 3);
    const auto rules = clique::kclique_rules(plan);
    clique::KCliqueMaker maker(plan);
    std::unique_ptr<Strategy> breaker;
    if (s % 3 == 0) breaker = std::make_unique<MimicBreaker>(std::make_unique<clique::KCliqueMaker>(plan));
    else breaker = std::make_unique<RandomTaker>(0.1, s);
    clique::CliqueGoal goal(3, n);
    audit::Auditor a(rules, edge_count(n));
    GameState st(generate_market(edge_count(n), 100 + s, LabelScheme::edges(n)), rules);
    const auto o = play(st, goal, maker, *breaker, &a);
    CHECK(a.ok());
    CHECK(o.success == clique::contains_clique(o.maker_items, 3));
    const auto& core = maker.core();
    const auto errs = audit::check_clique_log(plan, core.log(), core.roots(), core.leaf_sets(),
                                              phase_ends64(edge_count(n), 3),
                                              [&](Label e) { return st.market().position_of(e); });
    for (const auto& e : errs) FAIL_CHECK(e);
    // Every purchase the strategy logged is one the engine executed.
    std::set<std::uint64_t> logged;
    for (const auto& r : core.log()) logged.insert(r.position);
    CHECK(logged.size() == o.maker_positions.size());
    total_takes += logged.size();
  }
  CHECK(total_takes > 0);
}

TEST_CASE("dry run at k = 4, 5 with n = 1e5 is legal") {
  const audit::QuietWarnings quiet;
  const std::uint32_t n = 100000;
  for (int k : {4, 5}) {
    const auto plan = clique::clique_plan(n, 1, k);
    for (int i = 1; i <= k - 3; ++i)
      CHECK(std::abs(plan.ells[i] * plan.ells[i] / plan.ells[i - 1] - plan.r) <= 1e-12 * plan.r);
    for (std::uint64_t seed : {1u, 2u}) {
      const auto r = clique::dry_run(plan, seed);
      const std::uint64_t total = edge_count(n);
      const auto errs = audit::check_clique_log(plan, r.log, r.roots, r.leaf_sets,
                                                phase_ends64(total, static_cast<std::uint32_t>(k)),
                                                [&](Label e) { return clique::dry_run_position(seed, e, total); });
      for (const auto& e : errs) FAIL_CHECK(e);
      CHECK(r.roots.size() <= static_cast<std::size_t>(k - 3));
      CHECK(!r.log.empty());
      if (r.success) CHECK(clique::contains_clique(r.maker_edges, k));
      else CHECK(r.failed_phase.has_value());
    }
  }
}
