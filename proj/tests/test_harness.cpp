#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "audit.hpp"
#include "json.hpp"
#include "mbg/harness.hpp"
#include "mbg/oracle.hpp"

using namespace mbg;
using harness::TrialConfig;

namespace {

TrialConfig item_config(std::uint32_t n, std::uint32_t b, std::uint64_t trials, std::uint64_t seed = 5) {
  TrialConfig c;
  c.game = harness::Game::item;
  c.n = n;
  c.b = b;
  c.trials = trials;
  c.master_seed = seed;
  return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

}  // namespace

TEST_CASE("aggregate statistics match a direct recount") {
  const audit::QuietWarnings quiet;
  auto c = item_config(40, 1, 500);
  c.resolve();
  const auto agg = harness::run_trials(c, 1);
  std::vector<double> costs;
  std::uint64_t wins = 0;
  for (std::uint64_t t = 0; t < c.trials; ++t) {
    const auto r = harness::run_trial(c, t);
    costs.push_back(r.cost);
    wins += r.success;
  }
  double mean = 0;
  for (double x : costs) mean += x;
  mean /= costs.size();
  double ss = 0;
  for (double x : costs) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (costs.size() - 1) / costs.size());
  CHECK(agg.trials == 500);
  CHECK(agg.success_count == wins);
  CHECK(agg.mean_cost_all() == doctest::Approx(mean).epsilon(1e-12));
  CHECK(agg.stderr_all() == doctest::Approx(se).epsilon(1e-9));
  CHECK(agg.min_cost == *std::min_element(costs.begin(), costs.end()));
  CHECK(agg.max_cost == *std::max_element(costs.begin(), costs.end()));
}

TEST_CASE("b = 0 default Maker reproduces the stopping value") {
  auto c = item_config(25, 0, 200000, 9);
  const auto agg = harness::run_trials(c, 1);
  CHECK(agg.success_rate() == 1.0);
  CHECK(std::abs(agg.mean_cost_all() - oracle::item_b0_dp(25).v1()) <= 4 * agg.stderr_all());
}

TEST_CASE("confidence intervals") {
  harness::TrialAggregate a;
  for (int i = 0; i < 10; ++i) a.add({true, 0.25, {}, true});
  const auto d = harness::confidence_interval(a, 0.95);
  CHECK(d.lo == 0.25);
  CHECK(d.hi == 0.25);

  harness::TrialAggregate b;
  for (int i = 0; i < 100; ++i) b.add({true, (i % 7) / 7.0, {}, true});
  const auto i95 = harness::confidence_interval(b, 0.95);
  const auto i99 = harness::confidence_interval(b, 0.99);
  CHECK((i95.hi - i95.lo) / (2 * b.stderr_all()) == doctest::Approx(1.959963985).epsilon(1e-8));
  CHECK(i99.lo < i95.lo);
  CHECK(i99.hi > i95.hi);

  harness::TrialAggregate one;
  one.add({true, 0.5, {}, true});
  CHECK_THROWS_AS(harness::confidence_interval(one, 0.95), std::domain_error);
  CHECK_THROWS_AS(harness::confidence_interval(b, 1.5), std::domain_error);
}

TEST_CASE("zero trials") {
  const audit::QuietWarnings quiet;
  const auto agg = harness::run_trials(item_config(10, 1, 0), 2);
  CHECK(agg.trials == 0);
  CHECK(agg.success_rate() == 0.0);
  CHECK(std::isnan(agg.mean_cost_success()));
  std::ostringstream js;
  harness::write_json(agg, js);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j["mean_cost_success"].is_null());
  CHECK(j["ci95"].is_null());
}

TEST_CASE("runs are reproducible and independent of the worker count") {
  const audit::QuietWarnings quiet;
  std::vector<TrialConfig> configs;
  configs.push_back(item_config(60, 2, 40000, 3));
  auto cl = TrialConfig{};
  cl.game = harness::Game::clique;
  cl.n = 40;
  cl.b = 1;
  cl.trials = 30;
  configs.push_back(cl);
  auto bx = TrialConfig{};
  bx.game = harness::Game::box;
  bx.n = 3;
  bx.b = 2;
  bx.m = 5;
  bx.trials = 3000;
  configs.push_back(bx);
  for (const auto& c : configs) {
    const auto one = harness::run_trials(c, 1);
    const auto again = harness::run_trials(c, 1);
    const auto eight = harness::run_trials(c, 8);
    CHECK(one == again);
    CHECK(one == eight);
    std::ostringstream a, b;
    harness::write_json(one, a);
    harness::write_json(eight, b);
    CHECK(a.str() == b.str());
  }
  // Seeds matter.
  CHECK_FALSE(harness::run_trials(item_config(60, 2, 2000, 3), 1) == harness::run_trials(item_config(60, 2, 2000, 4), 1));
}

TEST_CASE("PG_JOBS sets the default worker count") {
  setenv("PG_JOBS", "3", 1);
  CHECK(harness::default_jobs() == 3);
  setenv("PG_JOBS", "junk", 1);
  CHECK(harness::default_jobs() >= 1);
  unsetenv("PG_JOBS");
}

TEST_CASE("JSON export round-trips") {
  const audit::QuietWarnings quiet;
  TrialConfig c;
  c.game = harness::Game::clique;
  c.n = 30;
  c.b = 2;
  c.trials = 200;
  const auto agg = harness::run_trials(c, 1);
  std::ostringstream out;
  harness::write_json(agg, out);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["config"] == agg.config);
  CHECK(j["seed"] == agg.seed);
  CHECK(j["trials"] == 200);
  CHECK(j["success_count"] == agg.success_count);
  CHECK(j["success_rate"].get<double>() == agg.success_rate());
  CHECK(j["mean_cost_all"].get<double>() == agg.mean_cost_all());
  CHECK(j["stderr"].get<double>() == agg.stderr_all());
  CHECK(j["ci95"].size() == 2);
  CHECK(j["ci95"][0].get<double>() == harness::confidence_interval(agg, 0.95).lo);
  CHECK(j["check_failures"] == 0);
  std::uint64_t hist = 0;
  for (auto& [k, v] : j["histogram"].items()) hist += v.get<std::uint64_t>();
  CHECK(hist <= agg.trials - agg.success_count);
  CHECK(agg.success_count < agg.trials);
}

TEST_CASE("CSV export has the documented columns") {
  const audit::QuietWarnings quiet;
  const auto agg = harness::run_trials(item_config(30, 1, 100), 1);
  std::ostringstream out;
  harness::write_csv(agg, out);
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  CHECK_FALSE(static_cast<bool>(std::getline(in, extra)));
  const auto cols = split(header, ',');
  CHECK(cols == harness::csv_columns());
  CHECK(cols.front() == "config");
  CHECK(split(row, ',').size() == cols.size());
}

TEST_CASE("configuration errors") {
  const audit::QuietWarnings quiet;
  auto bad_maker = item_config(30, 1, 10);
  bad_maker.maker = "nope";
  CHECK_THROWS_AS(bad_maker.resolve(), harness::ConfigError);
  auto phased0 = item_config(30, 0, 10);
  phased0.maker = "phased";
  CHECK_THROWS_AS(phased0.resolve(), harness::ConfigError);
  TrialConfig tri;
  tri.game = harness::Game::clique;
  tri.k = 4;
  tri.maker = "triangle";
  CHECK_THROWS_AS(tri.resolve(), harness::ConfigError);
  TrialConfig k2;
  k2.game = harness::Game::clique;
  k2.k = 2;
  CHECK_THROWS_AS(k2.resolve(), harness::ConfigError);
  TrialConfig path_default;
  path_default.game = harness::Game::path;
  path_default.n = 2000;
  CHECK_THROWS_AS(harness::run_trials(path_default, 1), harness::ConfigError);
  TrialConfig bx;
  bx.game = harness::Game::box;
  bx.m = 0;
  CHECK_THROWS_AS(bx.resolve(), harness::ConfigError);
  CHECK_THROWS(harness::parse_game("chess"));
  CHECK_THROWS(harness::parse_format("xml"));
  auto ok = item_config(30, 1, 10);
  ok.resolve();
  CHECK(ok.maker == "phased");
  CHECK(ok.breaker == "cheap");
  CHECK(ok.canonical().find("game=item") == 0);
  CHECK(ok.canonical().find("seed=5") != std::string::npos);
}

TEST_CASE("exporting to an unwritable path names the path") {
  const audit::QuietWarnings quiet;
  const auto agg = harness::run_trials(item_config(10, 1, 5), 1);
  try {
    harness::export_aggregate(agg, harness::Format::json, "/nonexistent_dir/out.json");
    FAIL("no exception");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent_dir/out.json") != std::string::npos);
  }
}
