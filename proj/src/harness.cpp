#include "mbg/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <thread>

#include "mbg/clique_game.hpp"
#include "mbg/item_game.hpp"
#include "mbg/oracle.hpp"
#include "mbg/path_game.hpp"
#include "mbg/strategies.hpp"

namespace mbg::harness {

const char* to_string(Game g) {
  switch (g) {
    case Game::item: return "item";
    case Game::clique: return "clique";
    case Game::path: return "path";
    case Game::box: return "box";
  }
  return "?";
}

Game parse_game(const std::string& s) {
  for (Game g : {Game::item, Game::clique, Game::path, Game::box})
    if (s == to_string(g)) return g;
  throw ConfigError("unknown game '" + s + "' (item, clique, path, box)");
}

std::vector<std::string> maker_catalog(Game g) {
  switch (g) {
    case Game::item: return {"phased", "single", "dp", "greedy"};
    case Game::clique: return {"kclique", "triangle"};
    case Game::path: return {"tree"};
    case Game::box: return {"minbox", "greedy", "random"};
  }
  return {};
}

std::vector<std::string> breaker_catalog(Game g) {
  switch (g) {
    case Game::item: return {"cheap", "closed", "best", "mimic", "random", "greedy", "none"};
    case Game::clique:
    case Game::path: return {"mimic", "random", "greedy", "none"};
    case Game::box: return {"focus", "mimic", "random", "greedy", "none"};
  }
  return {};
}

namespace {

std::string list(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

void check_name(const std::string& name, const std::vector<std::string>& catalog, const char* role, Game g) {
  if (std::find(catalog.begin(), catalog.end(), name) == catalog.end())
    throw ConfigError(fmt::format("unknown {} strategy '{}' for the {} game; available: {}", role, name,
                                  to_string(g), list(catalog)));
}

}  // namespace

void TrialConfig::resolve() {
  if (maker.empty()) {
    switch (game) {
      case Game::item: maker = b >= 1 ? "phased" : "dp"; break;
      case Game::clique: maker = "kclique"; break;
      case Game::path: maker = "tree"; break;
      case Game::box: maker = "minbox"; break;
    }
  }
  if (breaker.empty()) {
    switch (game) {
      case Game::item: breaker = b >= 1 ? "cheap" : "none"; break;
      case Game::clique:
      case Game::path: breaker = "mimic"; break;
      case Game::box: breaker = "focus"; break;
    }
  }
  check_name(maker, maker_catalog(game), "maker", game);
  check_name(breaker, breaker_catalog(game), "breaker", game);
  if (n < 1) throw ConfigError("--n must be at least 1");
  if (phases < 1) throw ConfigError("--phases must be at least 1");
  if (game == Game::item && maker == "phased" && b < 1) throw ConfigError("the phased maker needs b >= 1");
  if (game == Game::item && breaker == "cheap" && b < 1) throw ConfigError("the cheap-grab breaker needs b >= 1");
  if (game == Game::item && breaker == "closed" && n < 2) throw ConfigError("the closed-form breaker needs n >= 2");
  if (game == Game::clique) {
    if (k < 3) throw ConfigError("--k must be at least 3");
    if (maker == "triangle" && k != 3) throw ConfigError("the triangle maker needs k = 3");
    if (n < 3) throw ConfigError("clique games need n >= 3");
  }
  if (game == Game::path && n < 3) throw ConfigError("path games need n >= 3");
  if (game == Game::box) {
    if (m < 1 || b < 1) throw ConfigError("box games need m, b >= 1");
    box::BoxConfig c;
    c.n = n;
    c.m = m;
    c.b = b;
    c.ordering = ordering;
    c.script = script;
    try {
      c.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
}

std::string TrialConfig::canonical() const {
  std::string s = fmt::format("game={} n={} b={}", to_string(game), n, b);
  switch (game) {
    case Game::item: s += fmt::format(" phases={}", phases); break;
    case Game::clique: s += fmt::format(" k={}", k); break;
    case Game::path:
      if (path_k) s += fmt::format(" override_k={}", *path_k);
      if (override_scale) s += fmt::format(" override_scale={:.17g}", *override_scale);
      break;
    case Game::box:
      s += fmt::format(" m={} ordering={} eps={:.17g}", m, box::to_string(ordering), eps);
      if (ordering == box::Ordering::scripted) {
        std::uint64_t h = 0;
        for (std::uint32_t x : script) h = mix64(h ^ (x + kGoldenGamma));
        s += fmt::format(" script_hash={:016x}", h);
      }
      break;
  }
  s += fmt::format(" maker={} breaker={} trials={} seed={}", maker, breaker, trials, master_seed);
  return s;
}

// ---------------------------------------------------------------------------
// Single trials

namespace {

// Everything derived from the config alone, built once per run and shared
// read-only by all trials.
struct Prepared {
  TrialConfig config;
  std::optional<item::PhasePlan> phase_plan;
  item::ThresholdSchedule maker_schedule;
  item::ThresholdSchedule breaker_schedule;
  std::optional<clique::CliquePlan> clique_plan;
  std::optional<clique::TriangleParams> triangle;
  std::optional<path::PathPlan> path_plan;
};

item::ThresholdSchedule schedule_for(const TrialConfig& c, const std::optional<item::PhasePlan>& plan) {
  if (c.maker == "single") return item::single_threshold_maker(c.n);
  if (c.maker == "phased") return plan->schedule;
  item::ThresholdSchedule s;
  s.role = item::Role::maker;
  if (c.maker == "dp") {
    const auto dp = oracle::item_b0_dp(c.n);
    for (std::uint32_t i = 1; i <= c.n; ++i) s.values.push_back(dp.threshold(i));
  } else {
    s.values.assign(c.n, 1.0);
  }
  return s;
}

Prepared prepare(const TrialConfig& c) {
  Prepared p;
  p.config = c;
  switch (c.game) {
    case Game::item:
      if (c.maker == "phased") p.phase_plan = item::phased_maker_plan(c.n, c.b);
      p.maker_schedule = schedule_for(c, p.phase_plan);
      if (c.breaker == "closed") p.breaker_schedule = item::breaker_closed_form(c.n);
      if (c.breaker == "best") p.breaker_schedule = item::breaker_best_response(p.maker_schedule);
      break;
    case Game::clique:
      if (c.maker == "triangle") p.triangle = clique::triangle_params(c.n, c.b);
      else p.clique_plan = clique::clique_plan(c.n, c.b, c.k);
      break;
    case Game::path:
      try {
        p.path_plan = path::path_plan(c.n, c.b, path::PathOverrides{c.path_k, c.override_scale});
      } catch (const std::domain_error& e) {
        throw ConfigError(e.what());
      }
      break;
    case Game::box: break;
  }
  return p;
}

using ShadowFactory = std::function<std::unique_ptr<MakerStrategy>()>;

std::unique_ptr<Strategy> generic_breaker(const std::string& name, std::uint64_t seed, const ShadowFactory& shadow) {
  if (name == "mimic") return std::make_unique<MimicBreaker>(shadow());
  if (name == "random") return std::make_unique<RandomTaker>(0.5, sub_seed(seed, 1));
  if (name == "greedy") return std::make_unique<GreedyTaker>();
  return std::make_unique<NeverTaker>();
}

TrialResult item_trial(const Prepared& p, std::uint64_t seed) {
  const TrialConfig& c = p.config;
  ShadowFactory make = [&p]() -> std::unique_ptr<MakerStrategy> {
    if (p.phase_plan) return std::make_unique<item::PhasedMaker>(*p.phase_plan);
    return std::make_unique<item::ScheduleMaker>(p.maker_schedule);
  };
  Market market = generate_market(c.n, sub_seed(seed, 0));
  auto maker = make();
  std::unique_ptr<Strategy> breaker;
  if (c.breaker == "cheap") breaker = item::cheap_grab_breaker(c.n, c.b);
  else if (c.breaker == "closed" || c.breaker == "best")
    breaker = std::make_unique<ThresholdTaker>(p.breaker_schedule.values);
  else breaker = generic_breaker(c.breaker, seed, make);
  AnyItemGoal goal;
  const Outcome o = play(std::move(market), GameRules{c.b, c.phases, Protocol::purchase}, goal, *maker, *breaker);
  return TrialResult{o.success, o.maker_cost, o.failed_phase, true};
}

TrialResult clique_trial(const Prepared& p, std::uint64_t seed) {
  const TrialConfig& c = p.config;
  ShadowFactory make;
  GameRules rules{c.b, 1, Protocol::purchase};
  if (p.triangle) {
    make = [&p] { return std::make_unique<clique::TriangleMaker>(*p.triangle); };
  } else {
    rules = clique::kclique_rules(*p.clique_plan);
    make = [&p] { return std::make_unique<clique::KCliqueMaker>(*p.clique_plan); };
  }
  Market market = generate_market(edge_count(c.n), sub_seed(seed, 0), LabelScheme::edges(c.n));
  auto maker = make();
  auto breaker = generic_breaker(c.breaker, seed, make);
  clique::CliqueGoal goal(c.k, c.n);
  const Outcome o = play(std::move(market), rules, goal, *maker, *breaker);
  const bool ok = !o.success || clique::contains_clique(o.maker_items, c.k);
  return TrialResult{o.success, o.maker_cost, o.failed_phase, ok};
}

TrialResult path_trial(const Prepared& p, std::uint64_t seed) {
  const TrialConfig& c = p.config;
  const path::PathPlan& plan = *p.path_plan;
  ShadowFactory make = [&plan] { return std::make_unique<path::PathMaker>(plan, 0, 1); };
  Market market = generate_market(edge_count(c.n), sub_seed(seed, 0), LabelScheme::edges(c.n));
  auto maker = make();
  auto breaker = generic_breaker(c.breaker, seed, make);
  path::PathGoal goal(c.n, 0, 1);
  const Outcome o = play(std::move(market), GameRules{c.b, plan.phase_count(), Protocol::purchase}, goal, *maker,
                         *breaker);
  const bool ok = !o.success || path::path_exists(o.maker_items, c.n, 0, 1);
  return TrialResult{o.success, o.maker_cost, o.failed_phase, ok};
}

TrialResult box_trial(const Prepared& p, std::uint64_t seed) {
  const TrialConfig& c = p.config;
  box::BoxConfig bc;
  bc.n = c.n;
  bc.m = c.m;
  bc.b = c.b;
  bc.ordering = c.ordering;
  bc.seed = sub_seed(seed, 0);
  bc.script = c.script;
  bc.eps = c.eps;
  ShadowFactory make = [&c] { return std::make_unique<box::MinBoxMaker>(c.n); };
  std::unique_ptr<Strategy> maker;
  if (c.maker == "minbox") maker = make();
  else if (c.maker == "greedy") maker = std::make_unique<GreedyTaker>();
  else maker = std::make_unique<RandomTaker>(0.5, sub_seed(seed, 2));
  std::unique_ptr<Strategy> breaker;
  if (c.breaker == "focus") breaker = std::make_unique<box::FocusBreaker>(c.n);
  else breaker = generic_breaker(c.breaker, seed, make);
  const auto r = box::play_box(bc, *maker, *breaker);
  const bool ok = c.maker != "minbox" || r.damage_bound_held;
  return TrialResult{r.outcome.success, r.outcome.maker_cost, r.outcome.failed_phase, ok};
}

TrialResult run_prepared(const Prepared& p, std::uint64_t t) {
  const std::uint64_t seed = trial_seed(p.config.master_seed, t);
  switch (p.config.game) {
    case Game::item: return item_trial(p, seed);
    case Game::clique: return clique_trial(p, seed);
    case Game::path: return path_trial(p, seed);
    case Game::box: return box_trial(p, seed);
  }
  throw ConfigError("unknown game");
}

}  // namespace

TrialResult run_trial(const TrialConfig& config, std::uint64_t t) {
  TrialConfig c = config;
  c.resolve();
  return run_prepared(prepare(c), t);
}

// ---------------------------------------------------------------------------
// Aggregation

void TrialAggregate::add(const TrialResult& r) {
  ++trials;
  if (r.success) {
    ++success_count;
    sum_success += r.cost;
  } else if (r.failed_phase) {
    ++failure_histogram[*r.failed_phase];
  }
  if (!r.checks_passed) ++check_failures;
  sum_all += r.cost;
  sumsq_all += r.cost * r.cost;
  const double delta = r.cost - welford_mean;
  welford_mean += delta / static_cast<double>(trials);
  welford_m2 += delta * (r.cost - welford_mean);
  if (trials == 1) {
    min_cost = max_cost = r.cost;
  } else {
    min_cost = std::min(min_cost, r.cost);
    max_cost = std::max(max_cost, r.cost);
  }
}

double TrialAggregate::success_rate() const {
  return trials == 0 ? 0.0 : static_cast<double>(success_count) / static_cast<double>(trials);
}

double TrialAggregate::mean_cost_all() const { return trials == 0 ? 0.0 : sum_all / static_cast<double>(trials); }

double TrialAggregate::mean_cost_success() const {
  return success_count == 0 ? std::numeric_limits<double>::quiet_NaN()
                            : sum_success / static_cast<double>(success_count);
}

double TrialAggregate::stderr_all() const {
  if (trials < 2) return 0.0;
  const double var = std::max(0.0, welford_m2 / static_cast<double>(trials - 1));
  return std::sqrt(var / static_cast<double>(trials));
}

unsigned default_jobs() {
  if (const char* env = std::getenv("PG_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

TrialAggregate run_trials(const TrialConfig& input, unsigned jobs) {
  TrialConfig config = input;
  config.resolve();
  if (jobs == 0) jobs = default_jobs();
  const Prepared prepared = prepare(config);
  TrialAggregate agg;
  agg.config = config.canonical();
  agg.seed = config.master_seed;

  constexpr std::uint64_t kBlock = 1 << 14;
  std::vector<TrialResult> block;
  for (std::uint64_t start = 0; start < config.trials; start += kBlock) {
    const std::uint64_t count = std::min(kBlock, config.trials - start);
    block.assign(count, TrialResult{});
    if (jobs <= 1 || count == 1) {
      for (std::uint64_t i = 0; i < count; ++i) block[i] = run_prepared(prepared, start + i);
    } else {
      std::atomic<std::uint64_t> next{0};
      std::exception_ptr error;
      std::mutex error_mutex;
      auto worker = [&] {
        for (std::uint64_t i; (i = next.fetch_add(1)) < count;) {
          try {
            block[i] = run_prepared(prepared, start + i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(jobs, count));
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
      if (error) std::rethrow_exception(error);
    }
    for (const TrialResult& r : block) agg.add(r);
  }
  return agg;
}

Interval confidence_interval(const TrialAggregate& agg, double level) {
  if (agg.trials < 2) throw std::domain_error("confidence interval needs at least two trials (variance undefined)");
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("confidence level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  const double mean = agg.mean_cost_all(), half = z * agg.stderr_all();
  return {mean - half, mean + half};
}

// ---------------------------------------------------------------------------
// Export

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  throw ConfigError("unknown format '" + s + "' (json, csv)");
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = {
      "config",       "seed",        "trials",        "success_count", "success_rate",
      "mean_cost_all", "mean_cost_success", "stderr", "ci95_lo",       "ci95_hi",
      "min_cost",     "max_cost",    "check_failures", "histogram"};
  return cols;
}

namespace {

std::string num(double x) {
  if (std::isnan(x) || std::isinf(x)) return "null";
  return fmt::format("{:.17g}", x);
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::optional<Interval> ci95(const TrialAggregate& agg) {
  if (agg.trials < 2) return std::nullopt;
  return confidence_interval(agg, 0.95);
}

}  // namespace

void write_json(const TrialAggregate& agg, std::ostream& out) {
  const auto ci = ci95(agg);
  out << "{\n";
  out << "  \"config\": " << json_string(agg.config) << ",\n";
  out << "  \"seed\": " << agg.seed << ",\n";
  out << "  \"trials\": " << agg.trials << ",\n";
  out << "  \"success_count\": " << agg.success_count << ",\n";
  out << "  \"success_rate\": " << num(agg.success_rate()) << ",\n";
  out << "  \"mean_cost_all\": " << num(agg.mean_cost_all()) << ",\n";
  out << "  \"mean_cost_success\": " << num(agg.mean_cost_success()) << ",\n";
  out << "  \"stderr\": " << num(agg.stderr_all()) << ",\n";
  out << "  \"ci95\": " << (ci ? "[" + num(ci->lo) + ", " + num(ci->hi) + "]" : std::string("null")) << ",\n";
  out << "  \"min_cost\": " << num(agg.min_cost) << ",\n";
  out << "  \"max_cost\": " << num(agg.max_cost) << ",\n";
  out << "  \"check_failures\": " << agg.check_failures << ",\n";
  out << "  \"histogram\": {";
  bool first = true;
  for (const auto& [phase, count] : agg.failure_histogram) {
    out << (first ? "" : ", ") << "\"" << phase << "\": " << count;
    first = false;
  }
  out << "}\n}\n";
}

void write_csv(const TrialAggregate& agg, std::ostream& out) {
  const auto ci = ci95(agg);
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  std::string hist;
  for (const auto& [phase, count] : agg.failure_histogram) hist += fmt::format("{}{}:{}", hist.empty() ? "" : ";", phase, count);
  auto blank_null = [](const std::string& s) { return s == "null" ? std::string() : s; };
  out << '"' << agg.config << '"' << ',' << agg.seed << ',' << agg.trials << ',' << agg.success_count << ','
      << num(agg.success_rate()) << ',' << num(agg.mean_cost_all()) << ',' << blank_null(num(agg.mean_cost_success()))
      << ',' << num(agg.stderr_all()) << ',' << (ci ? num(ci->lo) : "") << ',' << (ci ? num(ci->hi) : "") << ','
      << num(agg.min_cost) << ',' << num(agg.max_cost) << ',' << agg.check_failures << ',' << hist << '\n';
}

void export_aggregate(const TrialAggregate& agg, Format format, const std::string& destination) {
  auto emit = [&](std::ostream& os) {
    if (format == Format::json) write_json(agg, os);
    else write_csv(agg, os);
  };
  if (destination.empty() || destination == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream f(destination);
  if (!f) throw std::runtime_error("cannot open output file '" + destination + "'");
  emit(f);
  f.close();
  if (!f) throw std::runtime_error("failed writing output file '" + destination + "'");
}

}  // namespace mbg::harness
