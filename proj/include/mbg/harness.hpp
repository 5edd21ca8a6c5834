#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mbg/box_game.hpp"

namespace mbg::harness {

enum class Game : std::uint8_t { item, clique, path, box };

const char* to_string(Game g);
Game parse_game(const std::string& s);

struct TrialConfig {
  Game game = Game::item;
  std::uint32_t n = 100;
  std::uint32_t b = 1;
  std::uint32_t phases = 1;  // item game only
  int k = 3;                  // clique order
  std::optional<int> path_k;  // path depth override
  std::optional<double> override_scale;
  std::uint32_t m = 1;  // balls per box
  box::Ordering ordering = box::Ordering::random;
  std::vector<std::uint32_t> script;
  double eps = 0.5;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 1;
  std::string maker;    // empty = game default
  std::string breaker;  // empty = game default

  // Fills in default strategy names and checks them against the catalog;
  // throws ConfigError.
  void resolve();
  // Canonical one-line description embedded in every output.
  std::string canonical() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> maker_catalog(Game g);
std::vector<std::string> breaker_catalog(Game g);

struct TrialResult {
  bool success = false;
  double cost = 0.0;
  std::optional<int> failed_phase;
  bool checks_passed = true;  // game-specific independent checks on the outcome
};

// Plays trial t of the configuration (seed = trial_seed(master_seed, t)).
TrialResult run_trial(const TrialConfig& config, std::uint64_t t);

struct TrialAggregate {
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  std::uint64_t success_count = 0;
  std::uint64_t check_failures = 0;
  double sum_all = 0.0;
  double sumsq_all = 0.0;
  double sum_success = 0.0;
  double welford_mean = 0.0;
  double welford_m2 = 0.0;
  double min_cost = 0.0;
  double max_cost = 0.0;
  std::map<int, std::uint64_t> failure_histogram;

  // Folds one more trial in; callers add trials in index order.
  void add(const TrialResult& r);

  double success_rate() const;
  double mean_cost_all() const;
  double mean_cost_success() const;  // NaN without successes
  double stderr_all() const;         // 0 for fewer than two trials
  friend bool operator==(const TrialAggregate&, const TrialAggregate&) = default;
};

// jobs = 0 means: PG_JOBS from the environment, else hardware concurrency.
unsigned default_jobs();
TrialAggregate run_trials(const TrialConfig& config, unsigned jobs = 0);

struct Interval {
  double lo = 0.0, hi = 0.0;
};

// mean +- z(level) * stderr. Throws std::domain_error for fewer than two trials.
Interval confidence_interval(const TrialAggregate& agg, double level);

enum class Format : std::uint8_t { json, csv };
Format parse_format(const std::string& s);

// CSV columns, in order.
const std::vector<std::string>& csv_columns();

void write_json(const TrialAggregate& agg, std::ostream& out);
void write_csv(const TrialAggregate& agg, std::ostream& out);
// Writes to `destination` ("-" = stdout). I/O failures throw
// std::runtime_error naming the path.
void export_aggregate(const TrialAggregate& agg, Format format, const std::string& destination);

}  // namespace mbg::harness
