#include "mbg/box_game.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <string>

namespace mbg::box {

const char* to_string(Ordering o) {
  switch (o) {
    case Ordering::random: return "random";
    case Ordering::adversarial: return "adversarial";
    case Ordering::scripted: return "scripted";
  }
  return "?";
}

double BoxConfig::b0() const { return 100.0 / (eps * eps) * std::log(static_cast<double>(n)); }

void BoxConfig::validate() const {
  if (n < 1 || m < 1 || b < 1) throw std::invalid_argument("box game needs n, m, b >= 1");
  if (ordering != Ordering::scripted) return;
  if (script.size() != static_cast<std::size_t>(n) * m)
    throw std::invalid_argument(fmt::format("scripted ordering has {} entries, expected {}", script.size(),
                                            static_cast<std::size_t>(n) * m));
  std::vector<std::uint32_t> count(n, 0);
  for (std::uint32_t x : script) {
    if (x >= n) throw std::invalid_argument(fmt::format("scripted ordering names box {} (n = {})", x, n));
    ++count[x];
  }
  for (std::uint32_t x = 0; x < n; ++x)
    if (count[x] != m)
      throw std::invalid_argument(fmt::format("scripted ordering has {} balls of box {}, expected {}", count[x], x, m));
}

std::uint32_t box_threshold(std::uint32_t n, std::uint32_t b) {
  if (n < 1 || b < 1) throw std::invalid_argument("box_threshold needs n, b >= 1");
  return b * n + 1;
}

std::vector<std::uint32_t> read_script(std::istream& in, std::uint32_t n, std::uint32_t m) {
  std::vector<std::uint32_t> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(line, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(fmt::format("ordering line {}: not a box id: '{}'", lineno, line));
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw std::invalid_argument(fmt::format("ordering line {}: trailing characters", lineno));
    out.push_back(static_cast<std::uint32_t>(v));
  }
  BoxConfig c;
  c.n = n;
  c.m = m;
  c.ordering = Ordering::scripted;
  c.script = out;
  c.validate();
  return out;
}

// ---------------------------------------------------------------------------

BoxGoal::BoxGoal(std::uint32_t n, std::uint32_t m) : n_(n), m_(m), maker_(n, 0), lost_(n, 0) {}

void BoxGoal::on_take(const GameState& state, const Item& item, Player who) {
  const std::uint32_t x = item.label.first;
  if (who == Player::maker) {
    if (maker_[x]++ == 0) ++covered_;
    return;
  }
  // A ball Maker already passed was counted when it was passed.
  if (item.position > state.pointer(Player::maker)) ++lost_[x];
  if (maker_[x] == 0 && lost_[x] >= m_) breaker_won_ = true;
}

void BoxGoal::on_maker_pass(const GameState&, const Item& item) {
  const std::uint32_t x = item.label.first;
  ++lost_[x];
  if (maker_[x] == 0 && lost_[x] >= m_) breaker_won_ = true;
}

Status BoxGoal::status() const {
  if (covered_ == n_) return Status::maker_won;
  if (breaker_won_) return Status::breaker_won;
  return Status::open;
}

std::uint32_t BoxGoal::worst_uncovered() const {
  std::uint32_t w = 0;
  for (std::uint32_t x = 0; x < n_; ++x)
    if (maker_[x] == 0) w = std::max(w, lost_[x]);
  return w;
}

// ---------------------------------------------------------------------------

bool MinBoxMaker::would_take(const View&, const Item& item) const {
  const std::uint32_t x = item.label.first;
  if (covered_[x]) return false;
  std::uint32_t worst = 0;
  for (std::size_t y = 0; y < lost_.size(); ++y)
    if (!covered_[y]) worst = std::max(worst, lost_[y]);
  return lost_[x] == worst;
}

bool MinBoxMaker::wants(const View& view, const Item& item) {
  const bool take = would_take(view, item);
  if (!take) ++lost_[item.label.first];
  return take;
}

void MinBoxMaker::observe(const View& view, const Item& item, Player taker) {
  if (taker == Player::maker) covered_[item.label.first] = 1;
  else if (item.position > view.pointer(Player::maker)) ++lost_[item.label.first];
}

bool FocusBreaker::wants(const View& view, const Item& item) {
  if (focus_ < 0 || item.position <= view.pointer(Player::maker)) return false;
  return item.label.first == focus_;
}

void FocusBreaker::observe(const View&, const Item& item, Player taker) {
  if (taker != Player::maker) return;
  const std::uint32_t x = item.label.first;
  maker_has_[x] = 1;
  if (static_cast<std::int64_t>(x) != focus_) return;
  focus_ = -1;
  for (std::size_t y = 0; y < maker_has_.size(); ++y)
    if (!maker_has_[y]) {
      focus_ = static_cast<std::int64_t>(y);
      break;
    }
}

std::pair<Label, double> AdversarialOrder::next(const GameState& state, Player revealer) {
  const std::uint32_t n = static_cast<std::uint32_t>(used_.size());
  auto has = [&](std::uint32_t x) { return used_[x] < m_; };
  std::int64_t pick = -1;
  if (revealer == Player::breaker) {
    if (has(0)) pick = 0;
  } else {
    std::vector<char> covered(n, 0);
    for (std::uint32_t p : state.taken_positions(Player::maker)) covered[state.market().at(p).label.first] = 1;
    for (std::uint32_t x = 1; x < n && pick < 0; ++x)
      if (has(x) && !covered[x]) pick = x;
    for (std::uint32_t x = 1; x < n && pick < 0; ++x)
      if (has(x)) pick = x;
  }
  for (std::uint32_t x = 0; x < n && pick < 0; ++x)
    if (has(x)) pick = x;
  if (pick < 0) throw ProtocolViolation("adversarial ordering ran out of balls");
  const auto x = static_cast<std::uint32_t>(pick);
  return {Label{x, used_[x]++}, 0.0};
}

Market box_market(const BoxConfig& config) {
  config.validate();
  const LabelScheme scheme = LabelScheme::balls(config.n, config.m);
  switch (config.ordering) {
    case Ordering::random:
      return generate_market(scheme.size(), config.seed, scheme, [](Rng&) { return 0.0; });
    case Ordering::adversarial:
      return Market::deferred(scheme);
    case Ordering::scripted: {
      std::vector<Item> items;
      std::vector<std::uint32_t> next(config.n, 0);
      for (std::size_t i = 0; i < config.script.size(); ++i) {
        const std::uint32_t x = config.script[i];
        items.push_back(Item{static_cast<std::uint32_t>(i + 1), Label{x, next[x]++}, 0.0, Owner::none, false});
      }
      return Market(scheme, std::move(items));
    }
  }
  throw std::invalid_argument("unknown ordering");
}

namespace {

class DamageCheck final : public Observer {
 public:
  DamageCheck(const BoxGoal& goal, std::uint32_t b, Observer* inner, BoxResult& res)
      : goal_(goal), b_(b), inner_(inner), res_(res) {}
  void on_step(const GameState& s, Player p, const Item& it, bool took) override {
    if (inner_) inner_->on_step(s, p, it, took);
  }
  void on_turn_end(const GameState& s, Player p) override {
    if (p == Player::breaker) {
      const std::uint32_t i = ++res_.breaker_turns;
      if (goal_.worst_uncovered() > static_cast<std::uint64_t>(b_) * i && res_.damage_bound_held) {
        res_.damage_bound_held = false;
        res_.first_violation_turn = i;
      }
    }
    if (inner_) inner_->on_turn_end(s, p);
  }

 private:
  const BoxGoal& goal_;
  std::uint32_t b_;
  Observer* inner_;
  BoxResult& res_;
};

}  // namespace

BoxResult play_box(const BoxConfig& config, Strategy& maker, Strategy& breaker, Observer* observer) {
  BoxResult res;
  Market market = box_market(config);
  std::unique_ptr<AdversarialOrder> order;
  if (config.ordering == Ordering::adversarial) order = std::make_unique<AdversarialOrder>(config.n, config.m);
  GameState state(std::move(market), GameRules{config.b, 1, Protocol::box}, order.get());
  BoxGoal goal(config.n, config.m);
  DamageCheck check(goal, config.b, observer, res);
  res.outcome = play(state, goal, maker, breaker, &check);
  for (std::uint32_t x = 0; x < config.n; ++x) res.final_lost.push_back(goal.breaker_or_rejected(x));
  for (std::uint32_t p = 1; p <= state.frontier(); ++p) res.box_sequence.push_back(state.market().at(p).label.first);
  return res;
}

}  // namespace mbg::box
