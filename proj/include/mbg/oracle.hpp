#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/item_game.hpp"

namespace mbg::oracle {

// ---------------------------------------------------------------------------
// Box game minimax

enum class BoxMode : std::uint8_t { fixed, adversarial };

struct BoxQuery {
  std::uint32_t n = 1, m = 1, b = 1;
  BoxMode mode = BoxMode::adversarial;
  std::vector<std::uint32_t> sequence;  // fixed mode: box id per position
  // Restrict Maker to the min-box rule instead of optimal play.
  bool minbox_maker = false;
};

struct MinimaxResult {
  Player winner = Player::maker;
  std::uint64_t node_count = 0;
  std::uint64_t table_size = 0;
};

constexpr std::uint32_t kAdversarialBallLimit = 12;
constexpr std::uint32_t kFixedBallLimit = 16;

// Exact winner of the ordered box game (Maker moves first). Throws
// std::invalid_argument when n*m exceeds the mode's ball limit.
MinimaxResult box_minimax(const BoxQuery& query);

// Every distinct ordering of n boxes with m balls each (multiset
// permutations), in lexicographic order.
std::vector<std::vector<std::uint32_t>> all_orderings(std::uint32_t n, std::uint32_t m);

// ---------------------------------------------------------------------------
// b = 0 optimal stopping

struct StoppingDP {
  std::vector<double> v;  // v[0] = v_1 ... v[n-1] = v_n
  double v1() const { return v.front(); }
  // Optimal acceptance threshold at 1-based position i (= v_{i+1}, 1 at i = n).
  double threshold(std::size_t i) const { return i >= v.size() ? 1.0 : v[i]; }
};

StoppingDP item_b0_dp(std::uint32_t n);

// ---------------------------------------------------------------------------
// Discretised item game

constexpr std::uint32_t kDiscreteMaxN = 6;
constexpr std::uint32_t kDiscreteMaxB = 2;
constexpr std::uint32_t kDiscreteMaxGrid = 5;

// Grid costs (2j-1)/(2g), j = 1..g, each with probability 1/g.
std::vector<double> cost_grid(std::uint32_t g);

struct DiscreteResult {
  double value = 0.0;
  std::uint64_t node_count = 0;
};

// Game value (Maker minimises, Breaker maximises expected cost): Breaker's
// turn comes first and may take up to b items online, then Maker buys one
// item. Exhaustive over all cost assignments and decisions. Needs n > b.
DiscreteResult item_discrete_minimax(std::uint32_t n, std::uint32_t b, std::uint32_t g);

// Expected Maker cost of two fixed threshold schedules (Breaker removes the
// first j with c_j <= b_j, Maker buys the first remaining i with c_i <= m_i)
// by enumerating all g^n grid cost vectors. Limited to g^n <= 1e7.
double item_policy_value(const item::ThresholdSchedule& breaker, const item::ThresholdSchedule& maker,
                         std::uint32_t g);

// ---------------------------------------------------------------------------
// JSON records {inputs, value/winner, node_count}

std::string box_record(const BoxQuery& query, const MinimaxResult& result);
std::string b0_record(std::uint32_t n, const StoppingDP& dp);
std::string discrete_record(std::uint32_t n, std::uint32_t b, std::uint32_t g, const DiscreteResult& result);

}  // namespace mbg::oracle
