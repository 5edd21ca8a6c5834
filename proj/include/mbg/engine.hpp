#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mbg/rng.hpp"

namespace mbg {

enum class Player : std::uint8_t { maker, breaker };
enum class Owner : std::uint8_t { none, maker, breaker };

constexpr Owner owner_of(Player p) { return p == Player::maker ? Owner::maker : Owner::breaker; }
constexpr Player opponent(Player p) { return p == Player::maker ? Player::breaker : Player::maker; }
const char* to_string(Player p);

// Raised whenever a caller breaks the turn protocol: taking an owned item,
// moving a pointer backwards, revealing out of order, entering a gated phase.
class ProtocolViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Raised when a View is asked for something its player cannot know yet.
class HiddenInformation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Game-specific identity of an item. Plain items use `first` only; edges of
// K_v store first < second; balls store (box, ball).
struct Label {
  std::uint32_t first = 0;
  std::uint32_t second = 0;
  friend bool operator==(const Label&, const Label&) = default;
};

enum class LabelKind : std::uint8_t { plain, edge, ball };

// The label universe together with a dense id for every label.
class LabelScheme {
 public:
  LabelScheme() = default;
  static LabelScheme plain(std::uint64_t count);
  static LabelScheme edges(std::uint32_t vertices);
  static LabelScheme balls(std::uint32_t boxes, std::uint32_t per_box);

  LabelKind kind() const { return kind_; }
  std::uint64_t size() const;
  std::uint32_t vertices() const { return a_; }   // edge schemes
  std::uint32_t boxes() const { return a_; }      // ball schemes
  std::uint32_t per_box() const { return b_; }    // ball schemes

  std::uint64_t id(Label label) const;
  bool contains(Label label) const;
  std::string format(Label label) const;
  std::string describe() const;

  // Calls f(label) for every label in id order.
  void for_each(const std::function<void(Label)>& f) const;

 private:
  LabelKind kind_ = LabelKind::plain;
  std::uint32_t a_ = 0;
  std::uint32_t b_ = 0;
  std::uint64_t plain_count_ = 0;
};

inline Label edge(std::uint32_t u, std::uint32_t v) { return u < v ? Label{u, v} : Label{v, u}; }
std::uint64_t edge_count(std::uint32_t vertices);

struct Item {
  std::uint32_t position = 0;  // 1-based
  Label label;
  double cost = 0.0;
  Owner owner = Owner::none;
  bool revealed = false;
};

// A permutation of labeled, priced items. Labels may be deferred (assigned
// at reveal time by an OrderSource), which is how adaptive orderings work.
class Market {
 public:
  Market() = default;
  Market(LabelScheme scheme, std::vector<Item> items);
  static Market deferred(LabelScheme scheme);

  std::size_t size() const { return items_.size(); }
  const LabelScheme& scheme() const { return scheme_; }
  const Item& at(std::uint32_t position) const;
  std::span<const Item> items() const { return items_; }
  bool is_deferred() const { return deferred_; }

  // 0 when the label has not been placed yet (deferred markets only).
  std::uint32_t position_of(Label label) const;

  // `position,label,cost` per line, cost at 17 significant digits.
  void write_csv(std::ostream& out) const;

 private:
  friend class GameState;
  void place(std::uint32_t position, Label label, double cost);

  LabelScheme scheme_;
  std::vector<Item> items_;
  std::vector<std::uint32_t> position_of_;
  bool deferred_ = false;
};

using CostSampler = std::function<double(Rng&)>;

// Uniformly random permutation of the scheme's labels with i.i.d. costs
// (uniform on [0,1] unless a sampler is given). Deterministic in the seed.
Market generate_market(std::uint64_t n, std::uint64_t seed, const LabelScheme& scheme,
                       const CostSampler& sampler = {});
Market generate_market(std::uint64_t n, std::uint64_t seed);

enum class Protocol : std::uint8_t { purchase, box };

struct GameRules {
  std::uint32_t b = 1;
  std::uint32_t phase_count = 1;
  Protocol protocol = Protocol::purchase;
};

// Last position of each phase. The n mod p leftover items go to the earliest
// phases, so the sizes are ceil(n/p) first, then floor(n/p).
std::vector<std::uint32_t> phase_ends(std::uint64_t n, std::uint32_t phases);
std::vector<std::uint64_t> phase_ends64(std::uint64_t n, std::uint32_t phases);

class GameState;

class OrderSource {
 public:
  virtual ~OrderSource() = default;
  // Label and cost of the item at the next unrevealed position, chosen when
  // `revealer` moves onto it.
  virtual std::pair<Label, double> next(const GameState& state, Player revealer) = 0;
};

class GameState {
 public:
  GameState(Market market, GameRules rules, OrderSource* order = nullptr);

  const Market& market() const { return market_; }
  const GameRules& rules() const { return rules_; }
  std::uint32_t n() const { return static_cast<std::uint32_t>(market_.size()); }

  // Pointer = number of items the player has moved past (0 = before item 1).
  std::uint32_t pointer(Player p) const { return p == Player::maker ? maker_ptr_ : breaker_ptr_; }
  std::uint32_t frontier() const { return frontier_; }
  double maker_cost() const { return maker_cost_; }
  Player turn() const { return turn_; }
  void set_turn(Player p) { turn_ = p; }

  std::span<const std::uint32_t> phase_ends() const { return phase_ends_; }
  std::uint32_t phase_of(std::uint32_t position) const;
  // True iff Breaker may step onto its next item.
  bool breaker_may_advance() const;

  // Reveals the item at frontier()+1; any other position is a violation.
  const Item& reveal(std::uint32_t position);
  // Moves a player's pointer forward to `to`, revealing as needed.
  void move_pointer(Player who, std::uint32_t to);
  // Moves one step and returns the item stepped onto.
  const Item& step(Player who);
  // Takes the item the player's pointer is currently on.
  void take(Player who, std::uint32_t position);

  std::span<const std::uint32_t> taken_positions(Player p) const {
    return p == Player::maker ? maker_taken_ : breaker_taken_;
  }

 private:
  Market market_;
  GameRules rules_;
  OrderSource* order_;
  std::vector<std::uint32_t> phase_ends_;
  std::uint32_t phase_len_ = 0;    // floor(n/p)
  std::uint32_t long_phases_ = 0;  // n mod p
  std::uint32_t maker_ptr_ = 0;
  std::uint32_t breaker_ptr_ = 0;
  std::uint32_t frontier_ = 0;
  double maker_cost_ = 0.0;
  Player turn_ = Player::breaker;
  std::vector<std::uint32_t> maker_taken_;
  std::vector<std::uint32_t> breaker_taken_;
};

bool phase_gate(const GameState& state);

// Everything one player is allowed to know. Reading an unrevealed item throws
// HiddenInformation.
class View {
 public:
  View(const GameState& state, Player viewer) : state_(&state), viewer_(viewer) {}

  Player viewer() const { return viewer_; }
  std::uint32_t n() const { return state_->n(); }
  std::uint32_t b() const { return state_->rules().b; }
  const LabelScheme& scheme() const { return state_->market().scheme(); }
  std::uint32_t pointer(Player p) const { return state_->pointer(p); }
  std::uint32_t frontier() const { return state_->frontier(); }
  double maker_cost() const { return state_->maker_cost(); }

  const Item& item(std::uint32_t position) const;
  bool revealed(Label label) const;
  // Position of a revealed label; throws HiddenInformation otherwise.
  std::uint32_t position_of(Label label) const;

  std::uint32_t phase_count() const { return state_->rules().phase_count; }
  std::uint32_t phase_of(std::uint32_t position) const { return state_->phase_of(position); }
  std::uint32_t phase_end(std::uint32_t phase) const { return state_->phase_ends()[phase]; }

  std::span<const std::uint32_t> taken_positions(Player p) const { return state_->taken_positions(p); }

 private:
  const GameState* state_;
  Player viewer_;
};

// A player's decision rule. `wants` is asked about every unowned item the
// player's pointer moves onto; `passed` reports items the pointer moves over
// that the opponent already owns; `observe` reports every successful take.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual bool wants(const View& view, const Item& item) = 0;
  virtual void passed(const View&, const Item&) {}
  virtual void observe(const View&, const Item&, Player) {}
  // Set once the strategy has abandoned the game; holds the failed phase.
  virtual std::optional<int> gave_up() const { return std::nullopt; }
  // Phase/stage the strategy is working on (reported when the stream ends).
  virtual int stage() const { return 0; }
};

enum class Status : std::uint8_t { open, maker_won, breaker_won };

// Incremental goal test fed with every take and every Maker rejection.
class Goal {
 public:
  virtual ~Goal() = default;
  virtual void on_take(const GameState&, const Item&, Player) {}
  virtual void on_maker_pass(const GameState&, const Item&) {}
  virtual Status status() const = 0;
};

class AnyItemGoal final : public Goal {
 public:
  void on_take(const GameState&, const Item&, Player who) override {
    if (who == Player::maker) done_ = true;
  }
  Status status() const override { return done_ ? Status::maker_won : Status::open; }

 private:
  bool done_ = false;
};

class Observer {
 public:
  virtual ~Observer() = default;
  virtual void on_step(const GameState&, Player, const Item&, bool /*took*/) {}
  virtual void on_turn_end(const GameState&, Player) {}
};

struct Outcome {
  bool success = false;
  Status status = Status::open;
  double maker_cost = 0.0;
  std::vector<Label> maker_items;
  std::vector<Label> breaker_items;
  std::vector<std::uint32_t> maker_positions;
  std::vector<std::uint32_t> breaker_positions;
  std::uint32_t completing_position = 0;  // M: the goal-completing Maker purchase
  std::uint32_t turns_used = 0;
  std::optional<int> failed_phase;
  std::uint32_t final_maker_pointer = 0;
  std::uint32_t final_breaker_pointer = 0;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

struct PlayOptions {
  Observer* observer = nullptr;
  OrderSource* order = nullptr;
};

// Runs one game to completion. Purchase protocol: Breaker first, b takes per
// turn; Maker buys one item per turn. Box protocol: Maker first.
Outcome play(Market market, const GameRules& rules, Goal& goal, Strategy& maker, Strategy& breaker,
             const PlayOptions& options = {});

// Same, but leaves the final state with the caller.
Outcome play(GameState& state, Goal& goal, Strategy& maker, Strategy& breaker, Observer* observer = nullptr);

}  // namespace mbg
