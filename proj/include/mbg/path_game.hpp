#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/strategies.hpp"

namespace mbg::path {

// ceil(ln ln n)
int path_depth(std::uint32_t n);

struct PathOverrides {
  std::optional<int> k;
  std::optional<double> threshold_scale;  // multiplies growth and connect thresholds
  bool any() const { return k.has_value() || threshold_scale.has_value(); }
};

struct PathPlan {
  std::uint32_t n = 0;
  std::uint32_t b = 0;
  int k = 1;
  double p_edge = 0.0;     // n^{-1+1/(3k)}
  double eps = 0.0;        // n^{-1/(9k)}
  double branching = 0.0;  // (1-eps) n p / (3k)
  double scale = 1.0;
  double growth_threshold = 0.0;  // scale (b+1) p
  std::vector<std::uint32_t> tree_targets;  // floor(branching^i), i = 1..k
  bool degenerate = false;
  PathOverrides overrides;

  std::uint32_t phase_count() const { return static_cast<std::uint32_t>(3 * k); }
  // scale (b+1) ln^2 n / (|T| |T'|)
  double connect_threshold(std::size_t tree_u, std::size_t tree_v) const;
  void dump(std::ostream& out) const;
};

// Throws std::domain_error("asymptotic regime unreachable at this n") when
// the plan is degenerate and no override was supplied.
PathPlan path_plan(std::uint32_t n, std::uint32_t b, PathOverrides overrides = {});

struct Tree {
  std::uint32_t root = 0;
  std::vector<std::int64_t> parent;  // -1 outside the tree, root maps to itself
  std::vector<std::uint32_t> depth;
  std::vector<std::uint32_t> vertices;

  explicit Tree(std::uint32_t n = 0, std::uint32_t r = 0);
  bool contains(std::uint32_t v) const { return parent[v] >= 0; }
  void attach(std::uint32_t child, std::uint32_t par);
};

// Checks that `t` is a tree on its vertex list, rooted at t.root, using only
// edges from `owned`.
bool tree_valid(const Tree& t, const std::vector<Label>& owned);

enum class PathStage : std::uint8_t { grow_u, grow_v, connect, done };

class PathMaker final : public MakerStrategy {
 public:
  PathMaker(const PathPlan& plan, std::uint32_t u, std::uint32_t v);
  bool wants(const View& view, const Item& item) override;
  void passed(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;
  bool would_take(const View& view, const Item& item) const override;
  std::optional<int> gave_up() const override { return failed_; }
  int stage() const override { return phase_; }

  const Tree& tree_u() const { return tu_; }
  const Tree& tree_v() const { return tv_; }
  PathStage current_stage() const { return stage_; }
  double growth_spend(int tree) const { return spend_[tree]; }
  // Threshold the connect stage used (0 until it starts).
  double connect_threshold() const { return connect_; }

 private:
  void advance(const View& view, std::uint32_t position);
  void enter_phase(int phase);

  PathPlan plan_;
  std::uint32_t u_, v_;
  Tree tu_, tv_;
  PathStage stage_ = PathStage::grow_u;
  int phase_ = 0;  // 1-based once started
  std::uint32_t level_depth_ = 0;  // growth from vertices of depth <= this
  std::uint32_t level_count_ = 0;
  bool level_done_ = false;
  double connect_ = 0.0;
  double spend_[2] = {0.0, 0.0};
  std::optional<int> failed_;
};

// Maker wins once u and v are joined by Maker-owned edges.
class PathGoal final : public Goal {
 public:
  PathGoal(std::uint32_t vertices, std::uint32_t u, std::uint32_t v);
  void on_take(const GameState& state, const Item& item, Player who) override;
  Status status() const override { return done_ ? Status::maker_won : Status::open; }

 private:
  std::uint32_t find(std::uint32_t x);
  std::vector<std::uint32_t> parent_;
  std::uint32_t u_, v_;
  bool done_ = false;
};

// Independent breadth-first check on a finished game.
bool path_exists(const std::vector<Label>& edges, std::uint32_t vertices, std::uint32_t u, std::uint32_t v);

}  // namespace mbg::path
