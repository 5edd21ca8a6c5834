#include "mbg/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "json.hpp"

namespace mbg::oracle {

// ---------------------------------------------------------------------------
// Box game

namespace {

constexpr std::uint8_t kNone = 0, kMaker = 1, kBreaker = 2;

class BoxSearch {
 public:
  explicit BoxSearch(const BoxQuery& q)
      : q_(q),
        total_(q.n * q.m),
        box_(total_ + 1, 0),
        owner_(total_ + 1, kNone),
        covered_(q.n, 0),
        lost_(q.n, 0),
        stock_(q.n, q.m) {
    if (q.mode == BoxMode::fixed)
      for (std::uint32_t i = 0; i < total_; ++i) box_[i + 1] = q.sequence[i];
  }

  bool run() { return solve(); }
  std::uint64_t nodes() const { return nodes_; }
  std::uint64_t table() const { return memo_.size(); }

 private:
  bool all_covered() const {
    return std::all_of(covered_.begin(), covered_.end(), [](std::uint8_t c) { return c > 0; });
  }
  bool breaker_won() const {
    for (std::uint32_t x = 0; x < q_.n; ++x)
      if (!covered_[x] && lost_[x] >= q_.m) return true;
    return false;
  }
  std::uint32_t hi() const { return std::max(mp_, bp_); }
  std::uint32_t lo() const { return std::min(mp_, bp_); }

  std::string key() const {
    std::string k;
    const std::uint32_t l = lo(), h = hi();
    k.push_back(static_cast<char>(turn_));
    k.push_back(static_cast<char>(q_left_));
    if (q_.mode == BoxMode::fixed) {
      k.push_back(static_cast<char>(mp_));
      k.push_back(static_cast<char>(bp_));
      for (std::uint32_t p = l + 1; p <= h; ++p) k.push_back(static_cast<char>(owner_[p]));
      for (std::uint32_t x = 0; x < q_.n; ++x) {
        k.push_back(static_cast<char>(covered_[x]));
        k.push_back(static_cast<char>(lost_[x]));
      }
      return k;
    }
    // Adversarial: relabel boxes by first appearance in the live segment,
    // then by (covered, lost, stock) for boxes that do not appear.
    std::vector<std::uint32_t> first(q_.n, UINT32_MAX);
    for (std::uint32_t p = l + 1; p <= h; ++p) first[box_[p]] = std::min(first[box_[p]], p);
    std::vector<std::uint32_t> order(q_.n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return std::tie(first[a], covered_[a], lost_[a], stock_[a]) < std::tie(first[b], covered_[b], lost_[b], stock_[b]);
    });
    std::vector<std::uint32_t> rank(q_.n);
    for (std::uint32_t i = 0; i < q_.n; ++i) rank[order[i]] = i;
    k.push_back(static_cast<char>(mp_ - l));
    k.push_back(static_cast<char>(bp_ - l));
    k.push_back(static_cast<char>(h - l));
    for (std::uint32_t p = l + 1; p <= h; ++p) {
      k.push_back(static_cast<char>(rank[box_[p]]));
      k.push_back(static_cast<char>(owner_[p]));
    }
    for (std::uint32_t x : order) {
      k.push_back(static_cast<char>(covered_[x]));
      k.push_back(static_cast<char>(lost_[x]));
      k.push_back(static_cast<char>(stock_[x]));
    }
    return k;
  }

  // Boxes the ordering may reveal next, with interchangeable ones collapsed.
  std::vector<std::uint32_t> reveal_choices(std::uint32_t pos) const {
    if (q_.mode == BoxMode::fixed) return {box_[pos]};
    std::vector<std::uint32_t> out;
    std::vector<char> in_segment(q_.n, 0);
    for (std::uint32_t p = lo() + 1; p <= hi(); ++p) in_segment[box_[p]] = 1;
    for (std::uint32_t x = 0; x < q_.n; ++x) {
      if (stock_[x] == 0) continue;
      bool dup = false;
      if (!in_segment[x])
        for (std::uint32_t y : out)
          if (!in_segment[y] && covered_[y] == covered_[x] && lost_[y] == lost_[x] && stock_[y] == stock_[x]) {
            dup = true;
            break;
          }
      if (!dup) out.push_back(x);
    }
    return out;
  }

  bool minbox_takes(std::uint32_t x) const {
    if (covered_[x]) return false;
    std::uint32_t worst = 0;
    for (std::uint32_t y = 0; y < q_.n; ++y)
      if (!covered_[y]) worst = std::max<std::uint32_t>(worst, lost_[y]);
    return lost_[x] == worst;
  }

  bool solve() {
    ++nodes_;
    if (all_covered()) return true;
    if (breaker_won()) return false;
    const std::string k = key();
    if (auto it = memo_.find(k); it != memo_.end()) return it->second;
    const bool r = turn_ == kMaker ? maker_move() : breaker_move();
    memo_.emplace(k, r);
    return r;
  }

  // Maker wins iff it wins against every box the ordering may reveal.
  template <class F>
  bool reveal_then(std::uint32_t pos, F&& f) {
    if (pos <= hi()) return f();
    for (std::uint32_t x : reveal_choices(pos)) {
      const std::uint32_t saved_box = box_[pos];
      box_[pos] = x;
      if (q_.mode == BoxMode::adversarial) --stock_[x];
      const bool r = f();
      if (q_.mode == BoxMode::adversarial) ++stock_[x];
      box_[pos] = saved_box;
      if (!r) return false;
    }
    return true;
  }

  bool maker_move() {
    if (mp_ == total_) return false;
    const std::uint32_t x = mp_ + 1;
    return reveal_then(x, [&] {
      const std::uint32_t bx = box_[x];
      if (owner_[x] == kBreaker) {
        ++mp_;
        const bool r = solve();
        --mp_;
        return r;
      }
      const bool minbox_take = q_.minbox_maker && minbox_takes(bx);
      // Take the ball and hand the turn to Breaker.
      if (!q_.minbox_maker || minbox_take) {
        owner_[x] = kMaker;
        ++covered_[bx];
        ++mp_;
        turn_ = kBreaker;
        q_left_ = q_.b;
        bool r;
        if (all_covered()) r = true;
        else if (mp_ == total_) r = false;
        else r = solve();
        turn_ = kMaker;
        q_left_ = 0;
        --mp_;
        --covered_[bx];
        owner_[x] = kNone;
        if (r) return true;
      }
      // Pass it; the ball now belongs to Breaker.
      if (!q_.minbox_maker || !minbox_take) {
        ++lost_[bx];
        ++mp_;
        const bool r = solve();
        --mp_;
        --lost_[bx];
        if (r) return true;
      }
      return false;
    });
  }

  bool breaker_move() {
    if (q_left_ == 0 || bp_ == total_) {
      const std::uint8_t saved_q = q_left_;
      turn_ = kMaker;
      q_left_ = 0;
      const bool r = solve();
      turn_ = kBreaker;
      q_left_ = saved_q;
      return r;
    }
    const std::uint32_t x = bp_ + 1;
    return reveal_then(x, [&] {
      const std::uint32_t bx = box_[x];
      ++bp_;
      bool r = solve();  // pass (the only move over a Maker ball)
      --bp_;
      if (!r || owner_[x] != kNone) return r;
      owner_[x] = kBreaker;
      const bool ahead = x > mp_;
      if (ahead) ++lost_[bx];
      ++bp_;
      --q_left_;
      r = solve();
      ++q_left_;
      --bp_;
      if (ahead) --lost_[bx];
      owner_[x] = kNone;
      return r;
    });
  }

  BoxQuery q_;
  std::uint32_t total_;
  std::vector<std::uint32_t> box_;
  std::vector<std::uint8_t> owner_;
  std::vector<std::uint8_t> covered_;
  std::vector<std::uint8_t> lost_;
  std::vector<std::uint8_t> stock_;
  std::uint32_t mp_ = 0, bp_ = 0;
  std::uint8_t turn_ = kMaker;
  std::uint8_t q_left_ = 0;
  std::uint64_t nodes_ = 0;
  std::unordered_map<std::string, bool> memo_;
};

}  // namespace

MinimaxResult box_minimax(const BoxQuery& query) {
  if (query.n < 1 || query.m < 1 || query.b < 1) throw std::invalid_argument("box_minimax needs n, m, b >= 1");
  const std::uint32_t balls = query.n * query.m;
  const std::uint32_t limit = query.mode == BoxMode::adversarial ? kAdversarialBallLimit : kFixedBallLimit;
  if (balls > limit)
    throw std::invalid_argument(fmt::format("box_minimax: n*m = {} exceeds the {} limit of {}", balls,
                                            query.mode == BoxMode::adversarial ? "adversarial" : "fixed", limit));
  if (query.mode == BoxMode::fixed) {
    if (query.sequence.size() != balls) throw std::invalid_argument("box_minimax: sequence length must be n*m");
    std::vector<std::uint32_t> count(query.n, 0);
    for (std::uint32_t x : query.sequence) {
      if (x >= query.n) throw std::invalid_argument("box_minimax: sequence names a box outside 0..n-1");
      ++count[x];
    }
    for (std::uint32_t c : count)
      if (c != query.m) throw std::invalid_argument("box_minimax: sequence must hold m balls of every box");
  }
  BoxSearch s(query);
  MinimaxResult r;
  r.winner = s.run() ? Player::maker : Player::breaker;
  r.node_count = s.nodes();
  r.table_size = s.table();
  return r;
}

std::vector<std::vector<std::uint32_t>> all_orderings(std::uint32_t n, std::uint32_t m) {
  std::vector<std::uint32_t> seq;
  for (std::uint32_t x = 0; x < n; ++x) seq.insert(seq.end(), m, x);
  std::vector<std::vector<std::uint32_t>> out;
  do out.push_back(seq);
  while (std::next_permutation(seq.begin(), seq.end()));
  return out;
}

// ---------------------------------------------------------------------------
// Stopping DP

StoppingDP item_b0_dp(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("item_b0_dp needs n >= 1");
  StoppingDP dp;
  dp.v.assign(n, 0.0);
  dp.v[n - 1] = 0.5;
  for (std::size_t i = n - 1; i-- > 0;) dp.v[i] = dp.v[i + 1] - dp.v[i + 1] * dp.v[i + 1] / 2.0;
  return dp;
}

// ---------------------------------------------------------------------------
// Discrete item game

std::vector<double> cost_grid(std::uint32_t g) {
  if (g < 1) throw std::invalid_argument("grid size must be positive");
  std::vector<double> c(g);
  for (std::uint32_t j = 0; j < g; ++j) c[j] = (2.0 * j + 1.0) / (2.0 * g);
  return c;
}

namespace {

class DiscreteSearch {
 public:
  DiscreteSearch(std::uint32_t n, std::uint32_t b, std::uint32_t g)
      : n_(n), b_(b), grid_(cost_grid(g)), cost_(n, 0.0), owned_(n, 0) {}

  double run() { return breaker(0, b_); }
  std::uint64_t nodes() const { return nodes_; }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // Breaker's first turn: item i is revealed, Breaker takes it or moves on.
  double breaker(std::uint32_t i, std::uint32_t quota) {
    ++nodes_;
    if (quota == 0 || i == n_) return maker(0, i);
    double sum = 0.0;
    for (double c : grid_) {
      cost_[i] = c;
      const double pass = breaker(i + 1, quota);
      owned_[i] = 1;
      const double take = breaker(i + 1, quota - 1);
      owned_[i] = 0;
      sum += std::max(pass, take);
    }
    return sum / static_cast<double>(grid_.size());
  }

  // Maker scans from position p; items before `frontier` are already known.
  double maker(std::uint32_t p, std::uint32_t frontier) {
    ++nodes_;
    if (p == n_) return kInf;
    if (p < frontier) {
      if (owned_[p]) return maker(p + 1, frontier);
      return std::min(cost_[p], maker(p + 1, frontier));
    }
    double sum = 0.0;
    for (double c : grid_) {
      cost_[p] = c;
      sum += std::min(c, maker(p + 1, p + 1));
    }
    return sum / static_cast<double>(grid_.size());
  }

  std::uint32_t n_, b_;
  std::vector<double> grid_;
  std::vector<double> cost_;
  std::vector<char> owned_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

DiscreteResult item_discrete_minimax(std::uint32_t n, std::uint32_t b, std::uint32_t g) {
  if (n < 1 || n > kDiscreteMaxN || b > kDiscreteMaxB || g < 1 || g > kDiscreteMaxGrid)
    throw std::invalid_argument(fmt::format("item_discrete_minimax: need 1 <= n <= {}, b <= {}, 1 <= g <= {}",
                                            kDiscreteMaxN, kDiscreteMaxB, kDiscreteMaxGrid));
  if (n <= b) throw std::invalid_argument("item_discrete_minimax: need n > b so that Maker can buy something");
  DiscreteSearch s(n, b, g);
  DiscreteResult r;
  r.value = s.run();
  r.node_count = s.nodes();
  return r;
}

double item_policy_value(const item::ThresholdSchedule& breaker, const item::ThresholdSchedule& maker,
                         std::uint32_t g) {
  const std::size_t n = maker.size();
  if (breaker.size() != n) throw std::invalid_argument("item_policy_value: schedule lengths differ");
  if (n == 0) throw std::invalid_argument("item_policy_value: empty schedules");
  if (std::pow(static_cast<double>(g), static_cast<double>(n)) > 1e7)
    throw std::invalid_argument("item_policy_value: g^n exceeds 1e7");
  const std::vector<double> grid = cost_grid(g);
  std::vector<std::uint32_t> idx(n, 0);
  double total = 0.0;
  std::uint64_t count = 0;
  while (true) {
    std::size_t removed = n;
    for (std::size_t j = 0; j < n; ++j)
      if (grid[idx[j]] <= breaker[j]) {
        removed = j;
        break;
      }
    double paid = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      if (i != removed && grid[idx[i]] <= maker[i]) {
        paid = grid[idx[i]];
        break;
      }
    total += paid;
    ++count;
    std::size_t d = 0;
    while (d < n && ++idx[d] == g) idx[d++] = 0;
    if (d == n) break;
  }
  return total / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// JSON

std::string box_record(const BoxQuery& q, const MinimaxResult& r) {
  nlohmann::ordered_json j;
  j["inputs"] = {{"oracle", "box"},
                 {"n", q.n},
                 {"m", q.m},
                 {"b", q.b},
                 {"mode", q.mode == BoxMode::fixed ? "fixed" : "adversarial"},
                 {"maker", q.minbox_maker ? "minbox" : "optimal"}};
  if (q.mode == BoxMode::fixed) j["inputs"]["sequence"] = q.sequence;
  j["winner"] = to_string(r.winner);
  j["node_count"] = r.node_count;
  j["table_size"] = r.table_size;
  return j.dump();
}

std::string b0_record(std::uint32_t n, const StoppingDP& dp) {
  nlohmann::ordered_json j;
  j["inputs"] = {{"oracle", "b0"}, {"n", n}};
  j["value"] = dp.v1();
  j["n_times_value"] = n * dp.v1();
  j["node_count"] = n;
  return j.dump();
}

std::string discrete_record(std::uint32_t n, std::uint32_t b, std::uint32_t g, const DiscreteResult& r) {
  nlohmann::ordered_json j;
  j["inputs"] = {{"oracle", "item"}, {"n", n}, {"b", b}, {"grid", g}};
  j["value"] = r.value;
  j["node_count"] = r.node_count;
  return j.dump();
}

}  // namespace mbg::oracle
