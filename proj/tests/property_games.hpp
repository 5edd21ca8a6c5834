#pragma once

// Random legal games across all four game types, each played twice: once on
// the drawn stream and once on a copy whose unrevealed tail has been
// reshuffled and repriced. Strategies only see revealed items, so both runs
// must make identical decisions.

#include <fmt/format.h>

#include <algorithm>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "audit.hpp"
#include "mbg/box_game.hpp"
#include "mbg/clique_game.hpp"
#include "mbg/item_game.hpp"
#include "mbg/path_game.hpp"
#include "mbg/strategies.hpp"

namespace audit {

struct GameSetup {
  std::string name;
  Market market;
  GameRules rules;
  bool deferred = false;  // adaptive box ordering
  std::uint32_t boxes = 0, per_box = 0;
  std::function<std::unique_ptr<Goal>()> goal;
  std::function<std::unique_ptr<Strategy>()> maker;
  std::function<std::unique_ptr<Strategy>()> breaker;
};

struct PropertyReport {
  std::string name;
  std::vector<std::string> errors;
  std::uint64_t steps = 0;
};

inline std::unique_ptr<Strategy> random_legal(Rng& rng, std::uint64_t seed, std::uint32_t n) {
  switch (rng.below(4)) {
    case 0: return std::make_unique<RandomTaker>(rng.uniform(), seed);
    case 1: return std::make_unique<GreedyTaker>();
    case 2: return std::make_unique<NeverTaker>();
    default: {
      std::vector<double> t(n);
      for (auto& x : t) x = rng.uniform();
      return std::make_unique<ThresholdTaker>(t);
    }
  }
}

inline GameSetup draw_game(std::uint64_t seed) {
  Rng rng(seed);
  GameSetup g;
  const std::uint64_t s1 = sub_seed(seed, 11), s2 = sub_seed(seed, 12);
  const auto kind = rng.below(4);
  if (kind == 0) {
    const auto n = static_cast<std::uint32_t>(1 + rng.below(60));
    const auto b = static_cast<std::uint32_t>(rng.below(5));
    const auto phases = static_cast<std::uint32_t>(1 + rng.below(std::min<std::uint32_t>(n, 6)));
    g.name = fmt::format("item n={} b={} phases={}", n, b, phases);
    g.market = generate_market(n, sub_seed(seed, 1));
    g.rules = {b, phases, Protocol::purchase};
    g.goal = [] { return std::make_unique<AnyItemGoal>(); };
    const auto mk = rng.below(4);
    const double pm = rng.uniform();
    auto shadow = [=]() -> std::unique_ptr<MakerStrategy> {
      if (mk == 0 && b >= 1) return std::make_unique<item::PhasedMaker>(item::phased_maker_plan(n, b, false));
      return std::make_unique<item::ScheduleMaker>(item::single_threshold_maker(n));
    };
    g.maker = [=]() -> std::unique_ptr<Strategy> {
      if (mk <= 1) return shadow();
      if (mk == 2) return std::make_unique<RandomTaker>(pm, s1);
      return std::make_unique<GreedyTaker>();
    };
    const auto bk = rng.below(4);
    const double pb = rng.uniform();
    g.breaker = [=]() -> std::unique_ptr<Strategy> {
      if (bk == 0 && b >= 1) return item::cheap_grab_breaker(n, b);
      if (bk == 1) return std::make_unique<MimicBreaker>(shadow());
      if (bk == 2) return std::make_unique<NeverTaker>();
      return std::make_unique<RandomTaker>(pb, s2);
    };
  } else if (kind == 1 || kind == 2) {
    const auto v = static_cast<std::uint32_t>(4 + rng.below(7));
    const auto b = static_cast<std::uint32_t>(rng.below(4));
    g.market = generate_market(edge_count(v), sub_seed(seed, 1), LabelScheme::edges(v));
    const auto mk = rng.below(3);
    if (kind == 1) {
      const auto plan = clique::clique_plan(v, b, 3);
      const auto tri = clique::triangle_params(v, b);
      const bool kc = mk == 1;
      g.rules = {b, kc ? 3u : static_cast<std::uint32_t>(1 + rng.below(3)), Protocol::purchase};
      if (mk == 0) g.rules.phase_count = 1;
      g.name = fmt::format("clique v={} b={} phases={} maker={}", v, b, g.rules.phase_count, mk);
      g.goal = [v] { return std::make_unique<clique::CliqueGoal>(3, v); };
      auto shadow = [=]() -> std::unique_ptr<MakerStrategy> {
        if (kc) return std::make_unique<clique::KCliqueMaker>(plan);
        return std::make_unique<clique::TriangleMaker>(tri);
      };
      const std::uint64_t ms = rng.next();
      g.maker = [=]() -> std::unique_ptr<Strategy> {
        if (mk <= 1) return shadow();
        Rng r(ms);
        return random_legal(r, s1, static_cast<std::uint32_t>(edge_count(v)));
      };
      const bool mimic = rng.below(3) == 0;
      const std::uint64_t bs = rng.next();
      g.breaker = [=]() -> std::unique_ptr<Strategy> {
        if (mimic && mk <= 1) return std::make_unique<MimicBreaker>(shadow());
        Rng r(bs);
        return random_legal(r, s2, static_cast<std::uint32_t>(edge_count(v)));
      };
    } else {
      const bool tree = mk == 0;
      const auto plan = path::path_plan(v, std::min<std::uint32_t>(b, 1), path::PathOverrides{1, 20.0});
      if (tree) g.rules = {plan.b, plan.phase_count(), Protocol::purchase};
      else g.rules = {b, static_cast<std::uint32_t>(1 + rng.below(4)), Protocol::purchase};
      g.name = fmt::format("path v={} b={} phases={} tree={}", v, g.rules.b, g.rules.phase_count, tree);
      g.goal = [v] { return std::make_unique<path::PathGoal>(v, 0, 1); };
      const std::uint64_t ms = rng.next(), bs = rng.next();
      g.maker = [=]() -> std::unique_ptr<Strategy> {
        if (tree) return std::make_unique<path::PathMaker>(plan, 0, 1);
        Rng r(ms);
        return random_legal(r, s1, static_cast<std::uint32_t>(edge_count(v)));
      };
      g.breaker = [=]() -> std::unique_ptr<Strategy> {
        if (tree && bs % 2 == 0) return std::make_unique<MimicBreaker>(std::make_unique<path::PathMaker>(plan, 0, 1));
        Rng r(bs);
        return random_legal(r, s2, static_cast<std::uint32_t>(edge_count(v)));
      };
    }
  } else {
    box::BoxConfig c;
    c.n = static_cast<std::uint32_t>(1 + rng.below(5));
    c.m = static_cast<std::uint32_t>(1 + rng.below(6));
    c.b = static_cast<std::uint32_t>(1 + rng.below(3));
    c.seed = sub_seed(seed, 1);
    const auto ord = rng.below(3);
    c.ordering = ord == 0 ? box::Ordering::random : ord == 1 ? box::Ordering::scripted : box::Ordering::adversarial;
    if (c.ordering == box::Ordering::scripted) {
      for (std::uint32_t x = 0; x < c.n; ++x) c.script.insert(c.script.end(), c.m, x);
      for (std::size_t i = c.script.size(); i > 1; --i) std::swap(c.script[i - 1], c.script[rng.below(i)]);
    }
    g.name = fmt::format("box n={} m={} b={} ordering={}", c.n, c.m, c.b, box::to_string(c.ordering));
    g.market = box_market(c);
    g.deferred = c.ordering == box::Ordering::adversarial;
    g.boxes = c.n;
    g.per_box = c.m;
    g.rules = {c.b, 1, Protocol::box};
    g.goal = [c] { return std::make_unique<box::BoxGoal>(c.n, c.m); };
    const auto mk = rng.below(3), bk = rng.below(4);
    const std::uint64_t ms = rng.next(), bs = rng.next();
    const std::uint32_t size = c.n * c.m;
    g.maker = [=]() -> std::unique_ptr<Strategy> {
      if (mk == 0) return std::make_unique<box::MinBoxMaker>(c.n);
      Rng r(ms);
      return random_legal(r, s1, size);
    };
    g.breaker = [=]() -> std::unique_ptr<Strategy> {
      if (bk == 0) return std::make_unique<box::FocusBreaker>(c.n);
      if (bk == 1) return std::make_unique<MimicBreaker>(std::make_unique<box::MinBoxMaker>(c.n));
      Rng r(bs);
      return random_legal(r, s2, size);
    };
  }
  return g;
}

struct Run {
  Outcome outcome;
  std::vector<StepRecord> steps;
  std::vector<std::string> errors;
  std::uint32_t frontier = 0;
};

inline Run play_audited(const GameSetup& g, Market market) {
  std::unique_ptr<box::AdversarialOrder> order;
  if (g.deferred) order = std::make_unique<box::AdversarialOrder>(g.boxes, g.per_box);
  const std::uint64_t n = market.size();
  GameState state(std::move(market), g.rules, order.get());
  auto goal = g.goal();
  auto maker = g.maker();
  auto breaker = g.breaker();
  Auditor a(g.rules, n);
  Run r;
  r.outcome = play(state, *goal, *maker, *breaker, &a);
  r.errors = a.errors;
  for (auto& e : check_final(state, r.outcome, a)) r.errors.push_back(e);
  r.steps = std::move(a.steps);
  r.frontier = state.frontier();
  return r;
}

// Same labels and costs up to `frontier`; everything after it reshuffled
// and repriced.
inline Market perturb_tail(const Market& m, std::uint32_t frontier, std::uint64_t seed) {
  std::vector<Item> items(m.items().begin(), m.items().end());
  Rng rng(seed);
  for (std::size_t i = items.size(); i > frontier + 1; --i) {
    const std::size_t j = frontier + rng.below(i - frontier);
    std::swap(items[i - 1].label, items[j].label);
  }
  for (std::size_t i = frontier; i < items.size(); ++i) items[i].cost = rng.uniform();
  return Market(m.scheme(), std::move(items));
}

inline PropertyReport check_random_game(std::uint64_t seed) {
  // Tiny instances sit far outside the asymptotic regimes on purpose.
  const QuietWarnings quiet;
  const GameSetup g = draw_game(seed);
  PropertyReport rep;
  rep.name = g.name;
  const Run first = play_audited(g, g.market);
  rep.errors = first.errors;
  rep.steps = first.steps.size();
  const Market replay_market = g.deferred ? g.market : perturb_tail(g.market, first.frontier, sub_seed(seed, 99));
  const Run second = play_audited(g, replay_market);
  if (second.steps != first.steps) rep.errors.push_back("decisions changed when unrevealed items changed");
  if (second.outcome.success != first.outcome.success || second.outcome.maker_cost != first.outcome.maker_cost ||
      second.outcome.maker_items != first.outcome.maker_items)
    rep.errors.push_back("outcome changed when unrevealed items changed");
  return rep;
}

}  // namespace audit
