#include <doctest.h>

#include <cmath>
#include <sstream>

#include "audit.hpp"
#include "mbg/diagnostics.hpp"
#include "mbg/item_game.hpp"
#include "mbg/oracle.hpp"

using namespace mbg;

namespace {

item::ThresholdSchedule schedule(std::vector<double> v, item::Role role) {
  item::ThresholdSchedule s;
  s.values = std::move(v);
  s.role = role;
  return s;
}

// Breaker removes the first j with c_j <= b_j, Maker buys the first other i
// with c_i <= m_i. Returns mean and standard error.
std::pair<double, double> simulate(const item::ThresholdSchedule& b, const item::ThresholdSchedule& m, int samples,
                                   std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t n = m.size();
  std::vector<double> c(n);
  double sum = 0, sumsq = 0;
  for (int s = 0; s < samples; ++s) {
    for (auto& x : c) x = rng.uniform();
    std::size_t removed = n;
    for (std::size_t j = 0; j < n; ++j)
      if (c[j] <= b[j]) {
        removed = j;
        break;
      }
    double cost = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != removed && c[i] <= m[i]) {
        cost = c[i];
        break;
      }
    sum += cost;
    sumsq += cost * cost;
  }
  const double mean = sum / samples;
  return {mean, std::sqrt((sumsq / samples - mean * mean) / samples)};
}

}  // namespace

TEST_CASE("single threshold Maker") {
  const auto m = item::single_threshold_maker(6);
  REQUIRE(m.size() == 6);
  for (std::uint32_t i = 1; i < 6; ++i) CHECK(m[i - 1] == doctest::Approx(2.0 / (6 - i + 1)));
  CHECK(m[5] == 1.0);
}

TEST_CASE("closed form spot values") {
  for (std::uint32_t n : {5u, 40u, 1000u}) {
    const auto b = item::breaker_closed_form(n);
    CHECK(std::abs(b[n - 1]) <= 1e-12);
    CHECK(std::abs(b[n - 2] - 0.5) <= 1e-12);
    CHECK(std::abs(b[n - 4] - 7.0 / 18.0) <= 1e-12);
  }
}

TEST_CASE("closed form equals backward induction against m~") {
  for (std::uint32_t n : {2u, 3u, 10u, 200u, 1000u}) {
    const auto closed = item::breaker_closed_form(n);
    const auto best = item::breaker_best_response(item::single_threshold_maker(n));
    double worst = 0;
    for (std::uint32_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(closed[i] - best[i]));
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("expected cost: two-item formula") {
  // E = b1/2 + (m1^2 - b1^2)/2 + (1 - m1)/2 for b = (b1, 0), m = (m1, 1), b1 <= m1.
  for (auto [b1, m1] : {std::pair{0.2, 0.6}, std::pair{0.0, 0.5}, std::pair{0.3, 0.3}, std::pair{0.5, 1.0}}) {
    const double want = b1 / 2 + (m1 * m1 - b1 * b1) / 2 + (1 - m1) / 2;
    const double got = item::expected_cost(schedule({b1, 0.0}, item::Role::breaker), schedule({m1, 1.0}, item::Role::maker));
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
  }
  CHECK(item::expected_cost(schedule({0.0}, item::Role::breaker), schedule({1.0}, item::Role::maker)) == doctest::Approx(0.5));
}

TEST_CASE("expected cost agrees with direct simulation") {
  const std::uint64_t seeds[] = {11, 12, 13};
  int k = 0;
  for (std::uint32_t n : {3u, 8u, 25u}) {
    const auto m = item::single_threshold_maker(n);
    const auto b = item::breaker_closed_form(n);
    const auto [mean, se] = simulate(b, m, 400000, seeds[k++]);
    const double exact = item::expected_cost(b, m);
    CHECK(std::abs(mean - exact) <= 4 * se);
  }
  // An arbitrary pair, with Breaker thresholds above Maker's in places.
  Rng rng(5);
  std::vector<double> bv(12), mv(12);
  for (auto& x : bv) x = rng.uniform() * 0.5;
  for (auto& x : mv) x = rng.uniform();
  mv.back() = 1.0;
  const auto bs = schedule(bv, item::Role::breaker), ms = schedule(mv, item::Role::maker);
  const audit::QuietWarnings quiet;
  const auto [mean, se] = simulate(bs, ms, 400000, 99);
  CHECK(std::abs(mean - item::expected_cost(bs, ms)) <= 4 * se);
}

TEST_CASE("expected cost is the continuum limit of the grid enumeration") {
  const auto m = item::single_threshold_maker(4);
  const auto b = item::breaker_closed_form(4);
  const double exact = item::expected_cost(b, m);
  const double coarse = std::abs(oracle::item_policy_value(b, m, 8) - exact);
  const double fine = std::abs(oracle::item_policy_value(b, m, 40) - exact);
  CHECK(fine < coarse);
  CHECK(fine < 0.01);
}

TEST_CASE("best response beats perturbed Breaker schedules") {
  const auto m = item::single_threshold_maker(30);
  const auto best = item::breaker_best_response(m);
  const double v = item::expected_cost(best, m);
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    auto p = best.values;
    const auto i = rng.below(p.size());
    p[i] = std::clamp(p[i] + (rng.uniform() - 0.5) * 0.2, 0.0, m[i]);
    CHECK(item::expected_cost(schedule(p, item::Role::breaker), m) <= v + 1e-15);
  }
}

TEST_CASE("phased plan shape") {
  const audit::QuietWarnings quiet;
  for (std::uint32_t b : {1u, 3u, 10u}) {
    const auto plan = item::phased_maker_plan(1000, b);
    CHECK(plan.phase_count() == b + 1);
    CHECK(plan.alpha == doctest::Approx(10 + 10 * std::ceil(std::log(static_cast<double>(b)))));
    CHECK(plan.phase_ends.back() == 1000);
    for (std::uint32_t j = 0; j < plan.phase_count(); ++j) CHECK(plan.schedule[plan.phase_ends[j] - 1] == 1.0);
    for (double t : plan.schedule.values) {
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
    }
    // alpha/(N + alpha - i) at the start of a phase.
    CHECK(plan.schedule[0] == doctest::Approx(std::min(1.0, plan.alpha / (plan.N + plan.alpha - 1))));
  }
}

TEST_CASE("phased plan warns outside its range") {
  std::vector<std::string> seen;
  auto prev = set_warning_sink([&](const std::string& s) { seen.push_back(s); });
  item::phased_maker_plan(200, 1);
  item::phased_maker_plan(1000000, 2);
  set_warning_sink(prev);
  CHECK(seen.size() == 1);
}

TEST_CASE("cheap grab threshold") {
  CHECK(item::cheap_grab_threshold(1000, 10) == doctest::Approx(10.0 / 2000));
}

TEST_CASE("phased Maker always buys against cheap grab") {
  const audit::QuietWarnings quiet;
  for (std::uint64_t s = 0; s < 300; ++s) {
    Rng rng(s);
    const auto n = static_cast<std::uint32_t>(20 + rng.below(400));
    const auto b = static_cast<std::uint32_t>(1 + rng.below(6));
    const auto plan = item::phased_maker_plan(n, b);
    item::PhasedMaker maker(plan);
    auto breaker = item::cheap_grab_breaker(n, b);
    AnyItemGoal goal;
    audit::Auditor a(GameRules{b, 1, Protocol::purchase}, n);
    GameState st(generate_market(n, s), GameRules{b, 1, Protocol::purchase});
    const auto o = play(st, goal, maker, *breaker, &a);
    CHECK(o.success);
    CHECK(a.ok());
  }
}

TEST_CASE("engine simulation of m~ against b* matches the formula") {
  const std::uint32_t n = 30;
  const auto m = item::single_threshold_maker(n);
  const auto b = item::breaker_closed_form(n);
  double sum = 0, sumsq = 0;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    item::ScheduleMaker maker(m);
    ThresholdTaker breaker(b.values);
    AnyItemGoal goal;
    const auto o = play(generate_market(n, trial_seed(77, t)), GameRules{1, 1, Protocol::purchase}, goal, maker, breaker);
    REQUIRE(o.success);
    sum += o.maker_cost;
    sumsq += o.maker_cost * o.maker_cost;
  }
  const double mean = sum / trials;
  const double se = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - item::expected_cost(b, m)) <= 4 * se);
}

TEST_CASE("schedule files round-trip exactly") {
  const auto b = item::breaker_closed_form(50);
  std::stringstream ss;
  item::write_schedule(ss, b);
  const auto back = item::read_schedule(ss, item::Role::breaker);
  CHECK(back.values == b.values);
  std::stringstream bad("0.5\n1.5\n");
  CHECK_THROWS(item::read_schedule(bad, item::Role::maker));
  std::stringstream junk("0.5\nabc\n");
  CHECK_THROWS(item::read_schedule(junk, item::Role::maker));
}
