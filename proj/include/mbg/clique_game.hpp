#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/item_game.hpp"
#include "mbg/strategies.hpp"

namespace mbg::clique {

double alpha_k(int k);

struct CliquePlan {
  int k = 3;
  std::uint32_t n = 0;
  std::uint32_t b = 0;
  double alpha = 0.0;
  double r = 0.0;
  std::vector<double> ells;             // l_0 .. l_{k-3}
  std::vector<double> star_thresholds;  // phases 1 .. k-3
  double matching_threshold = 0.0;
  double extend_threshold = 0.0;
  double ell = 0.0;  // l_{k-3}

  // Integer targets, rounded up.
  std::vector<std::uint32_t> star_targets;  // ceil(l_i), i = 1..k-3
  std::uint32_t matching_edges_target = 0;  // ceil(2 l^{5/7})
  std::uint32_t matching_target = 0;        // ceil(l^{5/7})
  std::uint32_t closing_target = 0;         // ceil(l^{4/7})

  int star_phases() const { return k - 3; }
  void dump(std::ostream& out) const;
};

CliquePlan clique_plan(std::uint32_t n, std::uint32_t b, int k);

// Greedy maximal matching over edges in the given order.
std::vector<Label> extract_matching(const std::vector<Label>& edges);

// Goal: Maker owns a k-clique. Checked incrementally on every Maker take.
class CliqueGoal final : public Goal {
 public:
  CliqueGoal(int k, std::uint32_t vertices);
  void on_take(const GameState& state, const Item& item, Player who) override;
  Status status() const override { return done_ ? Status::maker_won : Status::open; }
  // Adds an edge outside of a game; returns true once a k-clique exists.
  bool add(Label e);

 private:
  bool extend(std::vector<std::uint32_t>& candidates, int need) const;
  bool adjacent(std::uint32_t u, std::uint32_t v) const;

  int k_;
  std::vector<std::vector<std::uint32_t>> adj_;
  std::unordered_set<std::uint64_t> edges_;
  std::uint32_t vertices_;
  bool done_ = false;
};

// Independent check used on finished games: does the edge set contain a k-clique?
bool contains_clique(const std::vector<Label>& edges, int k);

// ---------------------------------------------------------------------------
// Unrestricted triangle strategy.

struct TriangleParams {
  std::uint32_t n = 0;
  std::uint32_t b = 0;
  std::uint32_t root = 0;
  std::uint32_t star_target = 0;  // ceil(n^{1/3})
  double star_threshold = 0.0;    // 8(b+1) n^{-2/3}
  double closing_threshold = 0.0; // 40(b+1) n^{-1/3} ln n
  std::uint64_t halfway = 0;      // star must be complete by this position
};

TriangleParams triangle_params(std::uint32_t n, std::uint32_t b);

class TriangleMaker final : public MakerStrategy {
 public:
  explicit TriangleMaker(TriangleParams params);
  bool wants(const View& view, const Item& item) override;
  void passed(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;
  bool would_take(const View& view, const Item& item) const override;
  std::optional<int> gave_up() const override { return failed_; }
  int stage() const override { return stage_; }

  const std::vector<std::uint32_t>& leaves() const { return leaves_; }
  double star_cost() const { return star_cost_; }

 private:
  void check_deadline(std::uint32_t position);

  TriangleParams p_;
  int stage_ = 1;
  std::vector<char> in_star_;
  std::vector<std::uint32_t> leaves_;
  double star_cost_ = 0.0;
  std::optional<int> failed_;
};

// ---------------------------------------------------------------------------
// k-phase restricted k-clique strategy.

enum class Stage : std::uint8_t { star, matching, extension, closing, done };

// What the strategy may ask about an edge: whether anyone has been offered it
// yet, and if so where it sits and who owns it.
class EdgeOracle {
 public:
  virtual ~EdgeOracle() = default;
  virtual bool revealed(Label e) const = 0;
  virtual std::uint64_t position(Label e) const = 0;  // revealed edges only
  virtual Owner owner(Label e) const = 0;             // revealed edges only
  virtual std::uint64_t maker_pointer() const = 0;
};

struct TakeRecord {
  std::uint64_t position = 0;
  Label edge;
  double cost = 0.0;
  Stage stage = Stage::star;
  int phase = 0;  // 1-based phase the strategy was working on
  double threshold = 0.0;
  // Extension takes only: the closing edge registered with this take, and
  // how far the stream had been revealed at that moment.
  std::optional<Label> closing;
  std::uint64_t frontier = 0;
};

// The decision logic, independent of how the stream is stored, so it can be
// driven by the engine or by the sparse dry-run below.
class CliqueCore {
 public:
  CliqueCore(const CliquePlan& plan, std::vector<std::uint64_t> phase_ends);

  // Called for every item Maker's pointer reaches, before any decision.
  void advance(std::uint64_t position);
  bool would_take(std::uint64_t position, Label e, double cost, const EdgeOracle& oracle) const;
  // Offer of an unowned item; returns the decision.
  bool offer(std::uint64_t position, Label e, double cost, const EdgeOracle& oracle);
  // Item already owned by Breaker passes under Maker's pointer.
  void pass_owned(std::uint64_t position, Label e, double cost);
  // Maker's purchase has been executed.
  void taken(std::uint64_t position, Label e, double cost, std::uint64_t frontier, const EdgeOracle& oracle);

  Stage stage() const { return stage_; }
  int phase() const { return phase_; }  // 1-based
  std::optional<int> failed() const { return failed_; }

  const CliquePlan& plan() const { return plan_; }
  const std::vector<std::uint32_t>& roots() const { return roots_; }
  const std::vector<std::vector<std::uint32_t>>& leaf_sets() const { return leaf_sets_; }
  const std::vector<Label>& matching() const { return matching_; }
  const std::vector<Label>& matching_pool() const { return pool_; }
  const std::vector<TakeRecord>& log() const { return log_; }
  std::uint32_t closing_candidates() const { return closing_count_; }
  const std::vector<char>& in_l() const { return in_l_; }

 private:
  std::uint32_t phase_index(std::uint64_t position) const;  // 0-based
  void enter_phase(std::uint32_t phase);
  void fail(int phase);
  double threshold_now() const;
  std::optional<Label> closing_for(Label e, const EdgeOracle& oracle) const;
  void start_closing(const EdgeOracle& oracle);
  std::uint64_t key(Label e) const { return (static_cast<std::uint64_t>(e.first) << 32) | e.second; }

  CliquePlan plan_;
  std::vector<std::uint64_t> ends_;
  Stage stage_ = Stage::star;
  int phase_ = 1;
  bool target_met_ = false;
  std::optional<int> failed_;

  std::vector<char> in_l_;  // current leaf set L_{i-1} (or L for the last stages)
  std::vector<std::uint32_t> roots_;
  std::vector<std::vector<std::uint32_t>> leaf_sets_;
  std::vector<std::uint32_t> current_leaves_;

  std::vector<Label> pool_;      // edges bought in the matching phase
  std::vector<Label> matching_;
  std::vector<std::int64_t> partner_;  // matching partner per vertex, -1 if unmatched

  std::unordered_set<std::uint64_t> pending_;       // registered closing edges
  std::uint32_t extensions_ = 0;
  std::unordered_map<std::uint64_t, char> candidates_;  // closing stream membership
  std::uint32_t closing_count_ = 0;
  std::uint32_t closing_seen_ = 0;
  std::optional<item::PhaseAttempts> closing_;

  std::vector<TakeRecord> log_;
};

class KCliqueMaker final : public MakerStrategy {
 public:
  explicit KCliqueMaker(const CliquePlan& plan);
  bool wants(const View& view, const Item& item) override;
  void passed(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;
  bool would_take(const View& view, const Item& item) const override;
  std::optional<int> gave_up() const override { return core_.failed(); }
  int stage() const override { return core_.phase(); }

  const CliqueCore& core() const { return core_; }

 private:
  CliqueCore core_;
  bool started_ = false;
};

// Phase count the engine must be configured with for kclique_maker.
inline GameRules kclique_rules(const CliquePlan& plan) {
  return GameRules{plan.b, static_cast<std::uint32_t>(plan.k), Protocol::purchase};
}

// ---------------------------------------------------------------------------
// Dry run for sizes whose edge stream cannot be materialised. Only edges the
// strategy could care about are placed: each edge gets a pseudo-random
// position and cost from a hash of (seed, edge). Breaker is modelled as
// taking the first b of every b+1 edges the strategy would buy.

struct DryRunResult {
  bool success = false;
  std::optional<int> failed_phase;
  double maker_cost = 0.0;
  std::vector<Label> maker_edges;
  std::vector<TakeRecord> log;
  std::vector<std::uint32_t> roots;
  std::vector<std::vector<std::uint32_t>> leaf_sets;
  std::vector<Label> matching;
  std::uint64_t edges_examined = 0;
};

std::uint64_t dry_run_position(std::uint64_t seed, Label e, std::uint64_t total);
double dry_run_cost(std::uint64_t seed, Label e);
DryRunResult dry_run(const CliquePlan& plan, std::uint64_t seed);

}  // namespace mbg::clique
