// Command-line front end: Monte Carlo runs, exact oracles and schedule tables.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "mbg/box_game.hpp"
#include "mbg/clique_game.hpp"
#include "mbg/harness.hpp"
#include "mbg/item_game.hpp"
#include "mbg/oracle.hpp"
#include "mbg/path_game.hpp"

using namespace mbg;

namespace {

constexpr int kConfigError = 1;
constexpr int kAssertFailed = 2;

struct RunOptions {
  harness::TrialConfig config;
  std::string format = "json";
  std::string out = "-";
  unsigned jobs = 0;
  std::string script_path;
  bool show_plan = false;
  std::optional<double> assert_success;
  std::optional<double> assert_mean_max;
};

void add_shared(CLI::App* app, RunOptions& o) {
  app->add_option("--n", o.config.n, "stream size / vertex count / box count");
  app->add_option("--b", o.config.b, "Breaker's bias");
  app->add_option("--trials", o.config.trials, "number of trials");
  app->add_option("--seed", o.config.master_seed, "master seed");
  app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", o.out, "output file, - for stdout");
  app->add_option("--jobs", o.jobs, "worker threads (default: PG_JOBS, else all cores)");
  app->add_option("--maker", o.config.maker, "Maker strategy");
  app->add_option("--breaker", o.config.breaker, "Breaker strategy");
  app->add_option("--assert-success", o.assert_success, "exit 2 unless success rate >= this");
  app->add_option("--assert-mean-max", o.assert_mean_max, "exit 2 unless mean cost over all trials <= this");
}

int finish_run(RunOptions& o) {
  if (o.config.game == harness::Game::box && !o.script_path.empty()) {
    std::ifstream f(o.script_path);
    if (!f) throw std::runtime_error("cannot open ordering file '" + o.script_path + "'");
    o.config.script = box::read_script(f, o.config.n, o.config.m);
    o.config.ordering = box::Ordering::scripted;
  }
  if (o.show_plan) {
    if (o.config.game == harness::Game::clique) clique::clique_plan(o.config.n, o.config.b, o.config.k).dump(std::cout);
    else if (o.config.game == harness::Game::path)
      path::path_plan(o.config.n, o.config.b, {o.config.path_k, o.config.override_scale}).dump(std::cout);
    else if (o.config.game == harness::Game::item)
      item::write_schedule(std::cout, item::phased_maker_plan(o.config.n, o.config.b).schedule);
    return 0;
  }
  const auto agg = harness::run_trials(o.config, o.jobs);
  harness::export_aggregate(agg, harness::parse_format(o.format), o.out);
  int code = 0;
  if (agg.check_failures > 0) {
    std::cerr << "assertion failed: " << agg.check_failures << " trials failed the independent outcome check\n";
    code = kAssertFailed;
  }
  if (o.assert_success && !(agg.success_rate() >= *o.assert_success)) {
    std::cerr << fmt::format("assertion failed: success rate {} < {}\n", agg.success_rate(), *o.assert_success);
    code = kAssertFailed;
  }
  if (o.assert_mean_max && !(agg.mean_cost_all() <= *o.assert_mean_max)) {
    std::cerr << fmt::format("assertion failed: mean cost {} > {}\n", agg.mean_cost_all(), *o.assert_mean_max);
    code = kAssertFailed;
  }
  return code;
}

std::vector<std::uint32_t> parse_sequence(const std::string& s) {
  std::vector<std::uint32_t> out;
  std::stringstream in(s);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    std::size_t used = 0;
    const unsigned long v = std::stoul(tok, &used);
    if (used != tok.size()) throw harness::ConfigError("bad box id '" + tok + "' in --sequence");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

void print_schedules(std::uint32_t n, std::uint32_t b) {
  const auto m = item::single_threshold_maker(n);
  const auto closed = item::breaker_closed_form(n);
  const auto best = item::breaker_best_response(m);
  std::cout << fmt::format("# n={} b={}\n", n, b);
  std::cout << fmt::format("# E[cost] (b*, m~) = {:.17g}\n", item::expected_cost(closed, m));
  std::cout << fmt::format("{:>8} {:>24} {:>24} {:>24}", "i", "m_tilde", "b_star", "best_response");
  std::optional<item::PhasePlan> plan;
  if (b >= 1) {
    plan = item::phased_maker_plan(n, b);
    std::cout << fmt::format(" {:>6} {:>24}", "phase", "phased");
  }
  std::cout << '\n';
  for (std::uint32_t i = 0; i < n; ++i) {
    std::cout << fmt::format("{:>8} {:>24.17g} {:>24.17g} {:>24.17g}", i + 1, m[i], closed[i], best[i]);
    if (plan) std::cout << fmt::format(" {:>6} {:>24.17g}", plan->phase_of(i + 1) + 1, plan->schedule[i]);
    std::cout << '\n';
  }
}

void write_file(const std::string& path, const item::ThresholdSchedule& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file '" + path + "'");
  item::write_schedule(f, s);
  if (!f) throw std::runtime_error("failed writing output file '" + path + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online Maker-Breaker purchase games: simulation, oracles, schedules"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  RunOptions item_o, clique_o, path_o, box_o;
  item_o.config.game = harness::Game::item;
  clique_o.config.game = harness::Game::clique;
  path_o.config.game = harness::Game::path;
  box_o.config.game = harness::Game::box;
  clique_o.config.n = 3000;
  clique_o.config.trials = 100;
  path_o.config.n = 2000;
  path_o.config.trials = 100;
  box_o.config.n = 2;
  box_o.config.trials = 100;

  auto* item_cmd = app.add_subcommand("item", "item game: buy any single item");
  add_shared(item_cmd, item_o);
  item_cmd->add_option("--phases", item_o.config.phases, "phase count of the restricted game");
  item_cmd->add_flag("--plan", item_o.show_plan, "print the phased Maker schedule and exit");

  auto* clique_cmd = app.add_subcommand("clique", "clique game on the edges of K_n");
  add_shared(clique_cmd, clique_o);
  clique_cmd->add_option("--k", clique_o.config.k, "clique order");
  clique_cmd->add_flag("--plan", clique_o.show_plan, "print the strategy plan and exit");

  auto* path_cmd = app.add_subcommand("path", "connect vertices 0 and 1 of K_n");
  add_shared(path_cmd, path_o);
  std::optional<int> path_k;
  std::optional<double> scale;
  path_cmd->add_option("--k", path_k, "override the tree depth");
  path_cmd->add_option("--override-scale", scale, "multiply growth and connect thresholds");
  path_cmd->add_flag("--plan", path_o.show_plan, "print the strategy plan and exit");

  auto* box_cmd = app.add_subcommand("box", "ordered box game");
  add_shared(box_cmd, box_o);
  std::optional<std::uint32_t> box_m;
  std::string ordering = "random";
  box_cmd->add_option("--m", box_m, "balls per box (default bn+1)");
  box_cmd->add_option("--eps", box_o.config.eps, "epsilon of the random-order regime");
  box_cmd->add_option("--ordering", ordering, "random, adversarial or scripted")
      ->check(CLI::IsMember({"random", "adversarial", "scripted"}));
  box_cmd->add_option("--script", box_o.script_path, "file of 0-based box ids, one per line");

  auto* oracle_cmd = app.add_subcommand("oracle", "exact oracles");
  oracle_cmd->require_subcommand(1);
  std::uint32_t on = 2, ob = 1, om = 1, og = 2;
  std::string omode = "adversarial", osequence, assert_winner, oout = "-";
  bool ominbox = false;
  std::optional<double> assert_value_max;
  auto* obox = oracle_cmd->add_subcommand("box", "box game minimax winner");
  obox->add_option("--n", on, "boxes");
  obox->add_option("--b", ob, "Breaker's bias");
  obox->add_option("--m", om, "balls per box");
  obox->add_option("--ordering", omode, "adversarial or fixed")->check(CLI::IsMember({"adversarial", "fixed"}));
  obox->add_option("--sequence", osequence, "fixed ordering as comma-separated 0-based box ids");
  obox->add_flag("--minbox", ominbox, "restrict Maker to the min-box rule");
  obox->add_option("--assert-winner", assert_winner, "exit 2 unless this player wins")
      ->check(CLI::IsMember({"maker", "breaker"}));
  auto* ob0 = oracle_cmd->add_subcommand("b0", "optimal stopping values for b = 0");
  ob0->add_option("--n", on, "stream size");
  ob0->add_option("--assert-value-max", assert_value_max, "exit 2 unless n*v_1 <= this");
  auto* oitem = oracle_cmd->add_subcommand("item", "discretised item game value");
  oitem->add_option("--n", on, "stream size");
  oitem->add_option("--b", ob, "Breaker's bias");
  oitem->add_option("--grid", og, "cost grid size");
  for (auto* sub : {obox, ob0, oitem}) sub->add_option("--out", oout, "output file, - for stdout");

  auto* sched_cmd = app.add_subcommand("schedules", "print m~, b* and best-response tables");
  std::uint32_t sn = 10, sb = 0;
  std::string write_maker, write_breaker;
  sched_cmd->add_option("--n", sn, "stream size");
  sched_cmd->add_option("--b", sb, "Breaker's bias (adds the phased plan column when >= 1)");
  sched_cmd->add_option("--write-maker", write_maker, "write m~ to this file");
  sched_cmd->add_option("--write-breaker", write_breaker, "write b* to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*item_cmd) return finish_run(item_o);
    if (*clique_cmd) return finish_run(clique_o);
    if (*path_cmd) {
      path_o.config.path_k = path_k;
      path_o.config.override_scale = scale;
      return finish_run(path_o);
    }
    if (*box_cmd) {
      box_o.config.m = box_m ? *box_m : box::box_threshold(box_o.config.n, box_o.config.b);
      box_o.config.ordering = ordering == "adversarial" ? box::Ordering::adversarial
                              : ordering == "scripted"  ? box::Ordering::scripted
                                                        : box::Ordering::random;
      if (box_o.config.ordering == box::Ordering::scripted && box_o.script_path.empty())
        throw harness::ConfigError("--ordering scripted needs --script");
      return finish_run(box_o);
    }
    if (*sched_cmd) {
      print_schedules(sn, sb);
      if (!write_maker.empty()) write_file(write_maker, item::single_threshold_maker(sn));
      if (!write_breaker.empty()) write_file(write_breaker, item::breaker_closed_form(sn));
      return 0;
    }
    // oracle
    std::string record;
    int code = 0;
    if (*obox) {
      oracle::BoxQuery q;
      q.n = on;
      q.b = ob;
      q.m = om;
      q.minbox_maker = ominbox;
      q.mode = omode == "fixed" ? oracle::BoxMode::fixed : oracle::BoxMode::adversarial;
      if (q.mode == oracle::BoxMode::fixed) {
        if (osequence.empty()) throw harness::ConfigError("--ordering fixed needs --sequence");
        q.sequence = parse_sequence(osequence);
      }
      const auto r = oracle::box_minimax(q);
      record = oracle::box_record(q, r);
      if (!assert_winner.empty() && assert_winner != to_string(r.winner)) {
        std::cerr << "assertion failed: winner is " << to_string(r.winner) << '\n';
        code = kAssertFailed;
      }
    } else if (*ob0) {
      const auto dp = oracle::item_b0_dp(on);
      record = oracle::b0_record(on, dp);
      if (assert_value_max && !(on * dp.v1() <= *assert_value_max)) {
        std::cerr << fmt::format("assertion failed: n*v_1 = {} > {}\n", on * dp.v1(), *assert_value_max);
        code = kAssertFailed;
      }
    } else {
      record = oracle::discrete_record(on, ob, og, oracle::item_discrete_minimax(on, ob, og));
    }
    if (oout == "-") {
      std::cout << record << '\n';
    } else {
      std::ofstream f(oout);
      if (!(f << record << '\n')) throw std::runtime_error("cannot write output file '" + oout + "'");
    }
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
}
