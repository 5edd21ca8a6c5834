#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/strategies.hpp"

namespace mbg::box {

enum class Ordering : std::uint8_t { random, adversarial, scripted };

const char* to_string(Ordering o);

// Boxes and balls are 0-based: box 0 is "the first box".
struct BoxConfig {
  std::uint32_t n = 1;  // boxes
  std::uint32_t m = 1;  // balls per box
  std::uint32_t b = 1;  // Breaker quota
  Ordering ordering = Ordering::random;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> script;  // box id per position, scripted mode
  double eps = 0.5;

  double b0() const;  // 100 eps^-2 ln n
  void validate() const;
};

std::uint32_t box_threshold(std::uint32_t n, std::uint32_t b);

// One box id per line, exactly m lines per box.
std::vector<std::uint32_t> read_script(std::istream& in, std::uint32_t n, std::uint32_t m);

// Per-box accounting. A ball belongs to Breaker once Breaker took it or
// Maker's pointer passed it without taking it.
class BoxGoal final : public Goal {
 public:
  BoxGoal(std::uint32_t n, std::uint32_t m);
  void on_take(const GameState& state, const Item& item, Player who) override;
  void on_maker_pass(const GameState& state, const Item& item) override;
  Status status() const override;

  std::uint32_t maker_count(std::uint32_t box) const { return maker_[box]; }
  std::uint32_t breaker_or_rejected(std::uint32_t box) const { return lost_[box]; }
  bool covered(std::uint32_t box) const { return maker_[box] > 0; }
  // Largest breaker_or_rejected count over boxes Maker has not covered.
  std::uint32_t worst_uncovered() const;

 private:
  std::uint32_t n_, m_;
  std::vector<std::uint32_t> maker_, lost_;
  std::uint32_t covered_ = 0;
  bool breaker_won_ = false;
};

// Takes a ball iff its box is uncovered and has the fewest balls not
// belonging to Breaker among uncovered boxes.
class MinBoxMaker final : public MakerStrategy {
 public:
  explicit MinBoxMaker(std::uint32_t n) : lost_(n, 0), covered_(n, 0) {}
  bool wants(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;
  bool would_take(const View& view, const Item& item) const override;

 private:
  std::vector<std::uint32_t> lost_;
  std::vector<char> covered_;
};

// Takes only balls of its focus box that lie ahead of Maker's pointer; moves
// to the lowest-id box without a Maker ball once Maker takes from the focus.
class FocusBreaker final : public Strategy {
 public:
  explicit FocusBreaker(std::uint32_t n) : maker_has_(n, 0) {}
  bool wants(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;
  std::int64_t focus() const { return focus_; }

 private:
  std::vector<char> maker_has_;
  std::int64_t focus_ = 0;  // -1 once every box has a Maker ball
};

// Adaptive ordering: Breaker's scans are fed box-0 balls and Maker's scans
// balls of other boxes while stock lasts, otherwise the lowest-id box with
// stock.
class AdversarialOrder final : public OrderSource {
 public:
  AdversarialOrder(std::uint32_t n, std::uint32_t m) : used_(n, 0), m_(m) {}
  std::pair<Label, double> next(const GameState& state, Player revealer) override;

 private:
  std::vector<std::uint32_t> used_;
  std::uint32_t m_;
};

Market box_market(const BoxConfig& config);

struct BoxResult {
  Outcome outcome;
  bool damage_bound_held = true;  // uncovered boxes <= b i after Breaker turn i
  std::uint32_t breaker_turns = 0;
  std::uint32_t first_violation_turn = 0;
  std::vector<std::uint32_t> final_lost;
  std::vector<std::uint32_t> box_sequence;  // box of every revealed position
};

BoxResult play_box(const BoxConfig& config, Strategy& maker, Strategy& breaker, Observer* observer = nullptr);

}  // namespace mbg::box
