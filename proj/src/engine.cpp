#include "mbg/engine.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <utility>

namespace mbg {

const char* to_string(Player p) { return p == Player::maker ? "maker" : "breaker"; }

// ---------------------------------------------------------------------------
// Labels

LabelScheme LabelScheme::plain(std::uint64_t count) {
  LabelScheme s;
  s.kind_ = LabelKind::plain;
  s.plain_count_ = count;
  return s;
}

LabelScheme LabelScheme::edges(std::uint32_t vertices) {
  LabelScheme s;
  s.kind_ = LabelKind::edge;
  s.a_ = vertices;
  return s;
}

LabelScheme LabelScheme::balls(std::uint32_t boxes, std::uint32_t per_box) {
  LabelScheme s;
  s.kind_ = LabelKind::ball;
  s.a_ = boxes;
  s.b_ = per_box;
  return s;
}

std::uint64_t edge_count(std::uint32_t vertices) {
  return static_cast<std::uint64_t>(vertices) * (vertices == 0 ? 0 : vertices - 1) / 2;
}

std::uint64_t LabelScheme::size() const {
  switch (kind_) {
    case LabelKind::plain: return plain_count_;
    case LabelKind::edge: return edge_count(a_);
    case LabelKind::ball: return static_cast<std::uint64_t>(a_) * b_;
  }
  return 0;
}

bool LabelScheme::contains(Label l) const {
  switch (kind_) {
    case LabelKind::plain: return l.second == 0 && l.first < plain_count_;
    case LabelKind::edge: return l.first < l.second && l.second < a_;
    case LabelKind::ball: return l.first < a_ && l.second < b_;
  }
  return false;
}

std::uint64_t LabelScheme::id(Label l) const {
  switch (kind_) {
    case LabelKind::plain: return l.first;
    case LabelKind::edge: {
      const std::uint64_t u = l.first, v = l.second, n = a_;
      return u * (2 * n - u - 1) / 2 + (v - u - 1);
    }
    case LabelKind::ball: return static_cast<std::uint64_t>(l.first) * b_ + l.second;
  }
  return 0;
}

std::string LabelScheme::format(Label l) const {
  switch (kind_) {
    case LabelKind::plain: return fmt::format("{}", l.first);
    case LabelKind::edge: return fmt::format("{}-{}", l.first, l.second);
    case LabelKind::ball: return fmt::format("{}:{}", l.first, l.second);
  }
  return {};
}

std::string LabelScheme::describe() const {
  switch (kind_) {
    case LabelKind::plain: return fmt::format("plain({})", plain_count_);
    case LabelKind::edge: return fmt::format("edges(K_{})", a_);
    case LabelKind::ball: return fmt::format("balls({}x{})", a_, b_);
  }
  return {};
}

void LabelScheme::for_each(const std::function<void(Label)>& f) const {
  switch (kind_) {
    case LabelKind::plain:
      for (std::uint64_t i = 0; i < plain_count_; ++i) f(Label{static_cast<std::uint32_t>(i), 0});
      break;
    case LabelKind::edge:
      for (std::uint32_t u = 0; u < a_; ++u)
        for (std::uint32_t v = u + 1; v < a_; ++v) f(Label{u, v});
      break;
    case LabelKind::ball:
      for (std::uint32_t x = 0; x < a_; ++x)
        for (std::uint32_t y = 0; y < b_; ++y) f(Label{x, y});
      break;
  }
}

// ---------------------------------------------------------------------------
// Market

Market::Market(LabelScheme scheme, std::vector<Item> items) : scheme_(std::move(scheme)), items_(std::move(items)) {
  if (items_.empty()) throw std::invalid_argument("market must contain at least one item");
  if (items_.size() > UINT32_MAX - 1) throw std::invalid_argument("market too large");
  if (scheme_.size() != items_.size())
    throw std::invalid_argument(fmt::format("label universe {} has {} labels but market has {} items",
                                            scheme_.describe(), scheme_.size(), items_.size()));
  position_of_.assign(items_.size(), 0);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Item& it = items_[i];
    if (it.position != i + 1) throw std::invalid_argument("item positions must be 1..n without gaps");
    if (!scheme_.contains(it.label)) throw std::invalid_argument("label outside the label universe");
    if (!(it.cost >= 0.0 && it.cost <= 1.0)) throw std::invalid_argument("item cost outside [0,1]");
    auto& slot = position_of_[scheme_.id(it.label)];
    if (slot != 0) throw std::invalid_argument("duplicate label " + scheme_.format(it.label));
    slot = it.position;
  }
}

Market Market::deferred(LabelScheme scheme) {
  Market m;
  const std::uint64_t n = scheme.size();
  if (n == 0) throw std::invalid_argument("market must contain at least one item");
  m.scheme_ = std::move(scheme);
  m.items_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.items_[i].position = static_cast<std::uint32_t>(i + 1);
  m.position_of_.assign(n, 0);
  m.deferred_ = true;
  return m;
}

const Item& Market::at(std::uint32_t position) const {
  if (position == 0 || position > items_.size())
    throw std::out_of_range(fmt::format("position {} outside 1..{}", position, items_.size()));
  return items_[position - 1];
}

std::uint32_t Market::position_of(Label label) const {
  if (!scheme_.contains(label)) return 0;
  return position_of_[scheme_.id(label)];
}

void Market::place(std::uint32_t position, Label label, double cost) {
  if (!scheme_.contains(label)) throw ProtocolViolation("order source produced a label outside the universe");
  auto& slot = position_of_[scheme_.id(label)];
  if (slot != 0) throw ProtocolViolation("order source produced label " + scheme_.format(label) + " twice");
  slot = position;
  Item& it = items_[position - 1];
  it.label = label;
  it.cost = cost;
}

void Market::write_csv(std::ostream& out) const {
  for (const Item& it : items_) out << fmt::format("{},{},{:.17g}\n", it.position, scheme_.format(it.label), it.cost);
}

Market generate_market(std::uint64_t n, std::uint64_t seed, const LabelScheme& scheme, const CostSampler& sampler) {
  if (n == 0) throw std::invalid_argument("generate_market: n must be at least 1");
  if (scheme.size() != n)
    throw std::invalid_argument(
        fmt::format("generate_market: n = {} but {} has {} labels", n, scheme.describe(), scheme.size()));
  std::vector<Item> items;
  items.reserve(n);
  scheme.for_each([&](Label l) { items.push_back(Item{0, l, 0.0, Owner::none, false}); });

  Rng rng(seed);
  for (std::uint64_t i = n - 1; i > 0; --i) std::swap(items[i], items[rng.below(i + 1)]);
  for (std::uint64_t i = 0; i < n; ++i) {
    items[i].position = static_cast<std::uint32_t>(i + 1);
    const double c = sampler ? sampler(rng) : rng.uniform();
    items[i].cost = std::clamp(c, 0.0, 1.0);
  }
  return Market(scheme, std::move(items));
}

Market generate_market(std::uint64_t n, std::uint64_t seed) {
  return generate_market(n, seed, LabelScheme::plain(n));
}

// ---------------------------------------------------------------------------
// Game state

std::vector<std::uint64_t> phase_ends64(std::uint64_t n, std::uint32_t phases) {
  if (phases == 0) throw std::invalid_argument("phase count must be positive");
  std::vector<std::uint64_t> ends(phases);
  const std::uint64_t q = n / phases, r = n % phases;
  std::uint64_t end = 0;
  for (std::uint32_t j = 0; j < phases; ++j) {
    end += q + (j < r ? 1 : 0);
    ends[j] = end;
  }
  return ends;
}

std::vector<std::uint32_t> phase_ends(std::uint64_t n, std::uint32_t phases) {
  if (n > UINT32_MAX) throw std::invalid_argument("phase_ends: stream too long for 32-bit positions");
  const auto wide = phase_ends64(n, phases);
  return std::vector<std::uint32_t>(wide.begin(), wide.end());
}

GameState::GameState(Market market, GameRules rules, OrderSource* order)
    : market_(std::move(market)), rules_(rules), order_(order) {
  if (market_.size() == 0) throw std::invalid_argument("empty market");
  if (market_.is_deferred() && order_ == nullptr)
    throw std::invalid_argument("a deferred market needs an order source");
  for (const Item& it : market_.items())
    if (it.owner != Owner::none || it.revealed) throw std::invalid_argument("market is not fresh");
  phase_ends_ = mbg::phase_ends(market_.size(), rules_.phase_count);
  phase_len_ = static_cast<std::uint32_t>(market_.size() / rules_.phase_count);
  long_phases_ = static_cast<std::uint32_t>(market_.size() % rules_.phase_count);
  turn_ = rules_.protocol == Protocol::purchase ? Player::breaker : Player::maker;
}

std::uint32_t GameState::phase_of(std::uint32_t position) const {
  const std::uint64_t idx = position - 1;
  const std::uint64_t long_len = phase_len_ + 1;
  const std::uint64_t long_span = long_len * long_phases_;
  if (idx < long_span) return static_cast<std::uint32_t>(idx / long_len);
  return static_cast<std::uint32_t>(long_phases_ + (idx - long_span) / phase_len_);
}

bool GameState::breaker_may_advance() const {
  if (rules_.phase_count <= 1) return true;
  const std::uint32_t next = breaker_ptr_ + 1;
  if (next > n()) return true;
  const std::uint32_t j = phase_of(next);
  if (j == 0) return true;
  return maker_ptr_ >= phase_ends_[j - 1];
}

bool phase_gate(const GameState& state) { return state.breaker_may_advance(); }

const Item& GameState::reveal(std::uint32_t position) {
  if (position != frontier_ + 1 || position > n())
    throw ProtocolViolation(fmt::format("reveal of position {} out of order (frontier {})", position, frontier_));
  if (market_.is_deferred()) {
    auto [label, cost] = order_->next(*this, turn_);
    market_.place(position, label, cost);
  }
  Item& it = market_.items_[position - 1];
  it.revealed = true;
  frontier_ = position;
  return it;
}

void GameState::move_pointer(Player who, std::uint32_t to) {
  std::uint32_t& ptr = who == Player::maker ? maker_ptr_ : breaker_ptr_;
  if (to < ptr) throw ProtocolViolation(fmt::format("{} pointer regression {} -> {}", to_string(who), ptr, to));
  if (to > n()) throw ProtocolViolation(fmt::format("{} pointer past end of stream", to_string(who)));
  while (ptr < to) {
    if (who == Player::breaker && !breaker_may_advance())
      throw ProtocolViolation(fmt::format("breaker may not enter phase {} yet", phase_of(ptr + 1) + 1));
    const std::uint32_t next = ptr + 1;
    if (next > frontier_) {
      const Player saved = turn_;
      turn_ = who;
      reveal(next);
      turn_ = saved;
    }
    ptr = next;
  }
}

const Item& GameState::step(Player who) {
  move_pointer(who, pointer(who) + 1);
  return market_.items_[pointer(who) - 1];
}

void GameState::take(Player who, std::uint32_t position) {
  if (position == 0 || position != pointer(who))
    throw ProtocolViolation(
        fmt::format("{} may only take the item under its pointer ({}), not {}", to_string(who), pointer(who), position));
  Item& it = market_.items_[position - 1];
  if (it.owner != Owner::none)
    throw ProtocolViolation(fmt::format("{} tried to take owned item at position {}", to_string(who), position));
  it.owner = owner_of(who);
  if (who == Player::maker) {
    maker_cost_ += it.cost;
    maker_taken_.push_back(position);
  } else {
    breaker_taken_.push_back(position);
  }
}

// ---------------------------------------------------------------------------
// View

const Item& View::item(std::uint32_t position) const {
  if (position == 0 || position > state_->frontier())
    throw HiddenInformation(fmt::format("position {} is not revealed (frontier {})", position, state_->frontier()));
  return state_->market().at(position);
}

bool View::revealed(Label label) const {
  const std::uint32_t pos = state_->market().position_of(label);
  return pos != 0 && pos <= state_->frontier();
}

std::uint32_t View::position_of(Label label) const {
  if (!revealed(label)) throw HiddenInformation("label " + scheme().format(label) + " is not revealed");
  return state_->market().position_of(label);
}

// ---------------------------------------------------------------------------
// Turn protocol

Outcome play(GameState& st, Goal& goal, Strategy& maker, Strategy& breaker, Observer* obs) {
  const View mv(st, Player::maker);
  const View bv(st, Player::breaker);
  const std::uint32_t n = st.n();
  const std::uint32_t b = st.rules().b;
  const bool phased = st.rules().phase_count > 1;

  auto decided = [&] { return goal.status() != Status::open; };
  auto notify_take = [&](const Item& it, Player who) {
    goal.on_take(st, it, who);
    maker.observe(mv, it, who);
    breaker.observe(bv, it, who);
  };

  std::uint32_t turns = 0;
  std::uint32_t completing = 0;
  Player turn = st.turn();

  while (!decided() && !maker.gave_up()) {
    st.set_turn(turn);
    if (turn == Player::breaker) {
      std::uint32_t taken = 0;
      while (taken < b && st.pointer(Player::breaker) < n && !decided()) {
        if (!phase_gate(st)) break;
        const Item& it = st.step(Player::breaker);
        bool took = false;
        if (it.owner == Owner::none) {
          if (breaker.wants(bv, it)) {
            st.take(Player::breaker, it.position);
            took = true;
            ++taken;
            notify_take(it, Player::breaker);
          }
        } else {
          breaker.passed(bv, it);
        }
        if (obs) obs->on_step(st, Player::breaker, it, took);
      }
    } else {
      if (st.pointer(Player::maker) >= n) break;
      // While Breaker waits at a phase boundary, Maker may clear the rest of
      // the phase with any number of purchases.
      const bool blocked = phased && st.pointer(Player::breaker) < n && !phase_gate(st);
      const std::uint32_t limit = blocked ? st.pointer(Player::breaker) : n;
      while (st.pointer(Player::maker) < limit) {
        const Item& it = st.step(Player::maker);
        bool took = false;
        if (it.owner == Owner::breaker) {
          maker.passed(mv, it);
        } else if (maker.wants(mv, it)) {
          st.take(Player::maker, it.position);
          took = true;
          notify_take(it, Player::maker);
          if (goal.status() == Status::maker_won) completing = it.position;
        } else {
          goal.on_maker_pass(st, it);
        }
        if (obs) obs->on_step(st, Player::maker, it, took);
        if (decided() || maker.gave_up() || (took && !blocked)) break;
      }
    }
    ++turns;
    if (obs) obs->on_turn_end(st, turn);
    if (turn == Player::maker && st.pointer(Player::maker) >= n) break;
    turn = opponent(turn);
  }

  Outcome out;
  out.status = goal.status();
  out.success = out.status == Status::maker_won;
  out.maker_cost = st.maker_cost();
  out.completing_position = completing;
  out.turns_used = turns;
  out.final_maker_pointer = st.pointer(Player::maker);
  out.final_breaker_pointer = st.pointer(Player::breaker);
  for (auto p : st.taken_positions(Player::maker)) {
    out.maker_positions.push_back(p);
    out.maker_items.push_back(st.market().at(p).label);
  }
  for (auto p : st.taken_positions(Player::breaker)) {
    out.breaker_positions.push_back(p);
    out.breaker_items.push_back(st.market().at(p).label);
  }
  if (!out.success) {
    if (auto g = maker.gave_up()) out.failed_phase = *g;
    else if (maker.stage() > 0) out.failed_phase = maker.stage();
  }
  return out;
}

Outcome play(Market market, const GameRules& rules, Goal& goal, Strategy& maker, Strategy& breaker,
             const PlayOptions& options) {
  GameState state(std::move(market), rules, options.order);
  return play(state, goal, maker, breaker, options.observer);
}

}  // namespace mbg
