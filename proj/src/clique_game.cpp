#include "mbg/clique_game.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mbg/diagnostics.hpp"

namespace mbg::clique {

namespace {

// Rounds up, ignoring floating-point noise on values that are integers.
std::uint32_t round_up(double x) { return static_cast<std::uint32_t>(std::ceil(x * (1.0 - 1e-12))); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += fmt::format("{}{:.17g}", i ? "," : "", v[i]);
  return s;
}

}  // namespace

double alpha_k(int k) {
  if (k < 3) throw std::invalid_argument(fmt::format("alpha_k needs k >= 3, got {}", k));
  return 1.0 / (11.0 * std::ldexp(1.0, k - 5) - 1.0);
}

CliquePlan clique_plan(std::uint32_t n, std::uint32_t b, int k) {
  CliquePlan p;
  p.k = k;
  p.n = n;
  p.b = b;
  p.alpha = alpha_k(k);
  if (n < 3) throw std::invalid_argument("clique_plan needs n >= 3");
  const double nn = n;
  if (static_cast<double>(b) >= std::pow(nn, 11.0 * p.alpha / 4.0))
    warn(fmt::format("clique plan: b = {} is not small against n^(11 alpha_k / 4) = {:.3g}", b,
                     std::pow(nn, 11.0 * p.alpha / 4.0)));
  p.r = std::pow(nn, -p.alpha);
  for (int i = 0; i <= k - 3; ++i) p.ells.push_back(p.r * std::pow(nn / p.r, std::ldexp(1.0, -i)));
  p.ells[0] = nn;
  const double kb = 10.0 * k * (b + 1.0);
  for (int i = 1; i <= k - 3; ++i) {
    p.star_thresholds.push_back(kb * p.ells[i] / p.ells[i - 1]);
    p.star_targets.push_back(round_up(p.ells[i]));
  }
  p.ell = p.ells.back();
  p.matching_threshold = kb * std::pow(p.ell, -9.0 / 7.0);
  p.extend_threshold = 5.0 * (b + 1.0) * k * k * std::pow(p.ell, -8.0 / 7.0);
  p.matching_edges_target = round_up(2.0 * std::pow(p.ell, 5.0 / 7.0));
  p.matching_target = round_up(std::pow(p.ell, 5.0 / 7.0));
  p.closing_target = round_up(std::pow(p.ell, 4.0 / 7.0));
  return p;
}

void CliquePlan::dump(std::ostream& out) const {
  out << fmt::format("k={}\nn={}\nb={}\nalpha_k={:.17g}\nr={:.17g}\nells={}\n", k, n, b, alpha, r, join(ells));
  out << fmt::format("star_thresholds={}\n", join(star_thresholds));
  std::string targets;
  for (std::size_t i = 0; i < star_targets.size(); ++i) targets += fmt::format("{}{}", i ? "," : "", star_targets[i]);
  out << fmt::format("star_targets={}\n", targets);
  out << fmt::format("matching_threshold={:.17g}\nextend_threshold={:.17g}\n", matching_threshold, extend_threshold);
  out << fmt::format("matching_edges_target={}\nmatching_target={}\nclosing_target={}\n", matching_edges_target,
                     matching_target, closing_target);
}

std::vector<Label> extract_matching(const std::vector<Label>& edges) {
  std::unordered_set<std::uint32_t> used;
  std::vector<Label> out;
  for (const Label& e : edges) {
    if (e.first == e.second || used.count(e.first) || used.count(e.second)) continue;
    used.insert(e.first);
    used.insert(e.second);
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Goal

CliqueGoal::CliqueGoal(int k, std::uint32_t vertices) : k_(k), adj_(vertices), vertices_(vertices) {
  if (k < 2) throw std::invalid_argument("clique goal needs k >= 2");
}

bool CliqueGoal::adjacent(std::uint32_t u, std::uint32_t v) const {
  const Label e = edge(u, v);
  return edges_.count((static_cast<std::uint64_t>(e.first) << 32) | e.second) != 0;
}

bool CliqueGoal::extend(std::vector<std::uint32_t>& candidates, int need) const {
  if (need == 0) return true;
  if (static_cast<int>(candidates.size()) < need) return false;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::vector<std::uint32_t> next;
    for (std::size_t j = i + 1; j < candidates.size(); ++j)
      if (adjacent(candidates[i], candidates[j])) next.push_back(candidates[j]);
    if (extend(next, need - 1)) return true;
  }
  return false;
}

bool CliqueGoal::add(Label e) {
  if (done_) return true;
  if (e.first >= vertices_ || e.second >= vertices_ || e.first == e.second)
    throw std::invalid_argument("clique goal: edge outside the vertex set");
  const std::uint64_t key = (static_cast<std::uint64_t>(e.first) << 32) | e.second;
  if (!edges_.insert(key).second) return done_;
  adj_[e.first].push_back(e.second);
  adj_[e.second].push_back(e.first);
  std::vector<std::uint32_t> common;
  for (std::uint32_t w : adj_[e.first])
    if (w != e.second && adjacent(w, e.second)) common.push_back(w);
  done_ = extend(common, k_ - 2);
  return done_;
}

void CliqueGoal::on_take(const GameState&, const Item& item, Player who) {
  if (who == Player::maker) add(item.label);
}

bool contains_clique(const std::vector<Label>& edges, int k) {
  if (k <= 1) return true;
  std::vector<std::uint32_t> ids;
  for (const Label& e : edges) {
    ids.push_back(e.first);
    ids.push_back(e.second);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const std::size_t m = ids.size();
  if (static_cast<int>(m) < k) return false;
  auto index = [&](std::uint32_t v) { return std::lower_bound(ids.begin(), ids.end(), v) - ids.begin(); };
  std::vector<std::vector<char>> a(m, std::vector<char>(m, 0));
  for (const Label& e : edges) {
    const auto i = index(e.first), j = index(e.second);
    a[i][j] = a[j][i] = 1;
  }
  // Grow cliques in increasing index order.
  std::vector<std::size_t> chosen;
  auto search = [&](auto&& self, std::size_t from) -> bool {
    if (static_cast<int>(chosen.size()) == k) return true;
    for (std::size_t v = from; v < m; ++v) {
      bool ok = true;
      for (std::size_t c : chosen)
        if (!a[c][v]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      chosen.push_back(v);
      if (self(self, v + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return search(search, 0);
}

// ---------------------------------------------------------------------------
// Unrestricted triangle

TriangleParams triangle_params(std::uint32_t n, std::uint32_t b) {
  if (n < 3) throw std::invalid_argument("triangle strategy needs n >= 3");
  const double nn = n;
  if (b > std::pow(nn, 2.0 / 3.0) / 10.0)
    warn(fmt::format("triangle strategy: b = {} exceeds n^(2/3)/10 = {:.3g}", b, std::pow(nn, 2.0 / 3.0) / 10.0));
  TriangleParams p;
  p.n = n;
  p.b = b;
  p.root = 0;
  p.star_target = round_up(std::cbrt(nn));
  p.star_threshold = 8.0 * (b + 1.0) * std::pow(nn, -2.0 / 3.0);
  p.closing_threshold = 40.0 * (b + 1.0) * std::pow(nn, -1.0 / 3.0) * std::log(nn);
  p.halfway = edge_count(n) / 2;
  return p;
}

TriangleMaker::TriangleMaker(TriangleParams params) : p_(params), in_star_(params.n, 0) {}

void TriangleMaker::check_deadline(std::uint32_t position) {
  if (stage_ == 1 && !failed_ && position > p_.halfway) failed_ = 1;
}

bool TriangleMaker::would_take(const View&, const Item& item) const {
  if (failed_) return false;
  const Label e = item.label;
  if (stage_ == 1) {
    if (item.position > p_.halfway) return false;
    if (e.first != p_.root && e.second != p_.root) return false;
    return item.cost <= p_.star_threshold;
  }
  if (stage_ == 2) return in_star_[e.first] && in_star_[e.second] && item.cost <= p_.closing_threshold;
  return false;
}

bool TriangleMaker::wants(const View& view, const Item& item) {
  check_deadline(item.position);
  return would_take(view, item);
}

void TriangleMaker::passed(const View&, const Item& item) { check_deadline(item.position); }

void TriangleMaker::observe(const View&, const Item& item, Player taker) {
  if (taker != Player::maker) return;
  if (stage_ == 1) {
    const std::uint32_t leaf = item.label.first == p_.root ? item.label.second : item.label.first;
    in_star_[leaf] = 1;
    leaves_.push_back(leaf);
    star_cost_ += item.cost;
    if (leaves_.size() >= p_.star_target) stage_ = 2;
  } else if (stage_ == 2) {
    stage_ = 3;
  }
}

// ---------------------------------------------------------------------------
// k-clique core

CliqueCore::CliqueCore(const CliquePlan& plan, std::vector<std::uint64_t> phase_ends)
    : plan_(plan), ends_(std::move(phase_ends)), in_l_(plan.n, 1), partner_(plan.n, -1) {
  if (ends_.size() != static_cast<std::size_t>(plan_.k))
    throw std::invalid_argument(fmt::format("k-clique strategy needs {} phases, got {}", plan_.k, ends_.size()));
  enter_phase(0);
}

std::uint32_t CliqueCore::phase_index(std::uint64_t position) const {
  return static_cast<std::uint32_t>(std::lower_bound(ends_.begin(), ends_.end(), position) - ends_.begin());
}

void CliqueCore::fail(int phase) {
  if (!failed_) failed_ = phase;
}

void CliqueCore::enter_phase(std::uint32_t j) {
  phase_ = static_cast<int>(j) + 1;
  if (stage_ == Stage::closing || stage_ == Stage::done) return;
  target_met_ = false;
  const int k = plan_.k;
  if (phase_ <= k - 3) {
    stage_ = Stage::star;
    std::uint32_t root = 0;
    while (root < plan_.n && !in_l_[root]) ++root;
    if (root == plan_.n) {
      fail(phase_);
      return;
    }
    roots_.push_back(root);
    current_leaves_.clear();
  } else if (phase_ == k - 2) {
    stage_ = Stage::matching;
  } else if (phase_ == k - 1) {
    stage_ = Stage::extension;
  } else {
    // Reaching the last phase without having started to close means the
    // extension phase came up short.
    fail(phase_ - 1);
  }
}

void CliqueCore::advance(std::uint64_t position) {
  if (failed_ || stage_ == Stage::done) return;
  const std::uint32_t target = phase_index(position);
  while (!failed_ && static_cast<std::uint32_t>(phase_ - 1) < target) {
    if (stage_ != Stage::closing && !target_met_) {
      fail(phase_);
      return;
    }
    enter_phase(static_cast<std::uint32_t>(phase_));
  }
}

double CliqueCore::threshold_now() const {
  switch (stage_) {
    case Stage::star: return plan_.star_thresholds[phase_ - 1];
    case Stage::matching: return plan_.matching_threshold;
    case Stage::extension: return plan_.extend_threshold;
    default: return 0.0;
  }
}

std::optional<Label> CliqueCore::closing_for(Label e, const EdgeOracle& oracle) const {
  const std::uint32_t ends[2][2] = {{e.first, e.second}, {e.second, e.first}};
  for (const auto& [a, c] : ends) {
    const std::int64_t y = partner_[a];
    if (y < 0 || static_cast<std::uint32_t>(y) == c) continue;
    const Label closing = edge(static_cast<std::uint32_t>(y), c);
    if (pending_.count(key(closing))) continue;
    if (oracle.revealed(closing)) continue;
    return closing;
  }
  return std::nullopt;
}

bool CliqueCore::would_take(std::uint64_t position, Label e, double cost, const EdgeOracle& oracle) const {
  if (failed_ || stage_ == Stage::done) return false;
  if (stage_ != Stage::closing && (target_met_ || phase_index(position) + 1 != static_cast<std::uint32_t>(phase_)))
    return false;
  switch (stage_) {
    case Stage::star: {
      const std::uint32_t root = roots_.back();
      std::uint32_t other;
      if (e.first == root) other = e.second;
      else if (e.second == root) other = e.first;
      else return false;
      return in_l_[other] && cost <= threshold_now();
    }
    case Stage::matching:
      return in_l_[e.first] && in_l_[e.second] && cost <= plan_.matching_threshold;
    case Stage::extension:
      return in_l_[e.first] && in_l_[e.second] && cost <= plan_.extend_threshold &&
             closing_for(e, oracle).has_value();
    case Stage::closing: {
      if (!candidates_.count(key(e))) return false;
      return closing_->would_take(closing_seen_ + 1, cost);
    }
    default: return false;
  }
}

bool CliqueCore::offer(std::uint64_t position, Label e, double cost, const EdgeOracle& oracle) {
  advance(position);
  if (stage_ == Stage::closing && !failed_ && candidates_.count(key(e))) return closing_->offer(++closing_seen_, cost);
  return would_take(position, e, cost, oracle);
}

void CliqueCore::pass_owned(std::uint64_t position, Label e, double cost) {
  advance(position);
  if (stage_ == Stage::closing && !failed_ && candidates_.count(key(e))) closing_->pass_owned(++closing_seen_, cost);
}

void CliqueCore::start_closing(const EdgeOracle& oracle) {
  stage_ = Stage::closing;
  const std::uint64_t mp = oracle.maker_pointer();
  for (std::uint64_t k : pending_) {
    const Label e{static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu)};
    if (!oracle.revealed(e) || (oracle.position(e) > mp && oracle.owner(e) == Owner::none)) candidates_[k] = 1;
  }
  closing_count_ = static_cast<std::uint32_t>(candidates_.size());
  if (closing_count_ == 0) {
    fail(phase_);
    return;
  }
  closing_ = plan_.b >= 1 ? item::attempts_for(item::phased_maker_plan(closing_count_, plan_.b, false))
                          : item::attempts_for(item::single_threshold_maker(closing_count_));
}

void CliqueCore::taken(std::uint64_t position, Label e, double cost, std::uint64_t frontier,
                       const EdgeOracle& oracle) {
  TakeRecord rec;
  rec.position = position;
  rec.edge = e;
  rec.cost = cost;
  rec.stage = stage_;
  rec.phase = phase_;
  rec.threshold = stage_ == Stage::closing ? closing_->threshold(closing_seen_) : threshold_now();
  rec.frontier = frontier;

  switch (stage_) {
    case Stage::star: {
      const std::uint32_t root = roots_.back();
      const std::uint32_t leaf = e.first == root ? e.second : e.first;
      current_leaves_.push_back(leaf);
      if (current_leaves_.size() >= plan_.star_targets[phase_ - 1]) {
        std::fill(in_l_.begin(), in_l_.end(), 0);
        for (std::uint32_t v : current_leaves_) in_l_[v] = 1;
        leaf_sets_.push_back(current_leaves_);
        target_met_ = true;
      }
      break;
    }
    case Stage::matching:
      pool_.push_back(e);
      if (pool_.size() >= plan_.matching_edges_target) {
        target_met_ = true;
        matching_ = extract_matching(pool_);
        if (matching_.size() < plan_.matching_target) {
          fail(phase_);
          break;
        }
        matching_.resize(plan_.matching_target);
        for (const Label& m : matching_) {
          partner_[m.first] = m.second;
          partner_[m.second] = m.first;
        }
      }
      break;
    case Stage::extension: {
      const auto closing = closing_for(e, oracle);
      rec.closing = closing;
      if (closing) pending_.insert(key(*closing));
      if (++extensions_ >= plan_.closing_target) {
        target_met_ = true;
        start_closing(oracle);
      }
      break;
    }
    case Stage::closing:
      stage_ = Stage::done;
      break;
    default:
      break;
  }
  log_.push_back(rec);
}

// ---------------------------------------------------------------------------
// Engine adapter

namespace {

class ViewOracle final : public EdgeOracle {
 public:
  explicit ViewOracle(const View& v) : v_(v) {}
  bool revealed(Label e) const override { return v_.revealed(e); }
  std::uint64_t position(Label e) const override { return v_.position_of(e); }
  Owner owner(Label e) const override { return v_.item(v_.position_of(e)).owner; }
  std::uint64_t maker_pointer() const override { return v_.pointer(Player::maker); }

 private:
  const View& v_;
};

}  // namespace

KCliqueMaker::KCliqueMaker(const CliquePlan& plan)
    : core_(plan, phase_ends64(edge_count(plan.n), static_cast<std::uint32_t>(plan.k))) {}

bool KCliqueMaker::wants(const View& view, const Item& item) {
  if (!started_) {
    if (view.phase_count() != static_cast<std::uint32_t>(core_.plan().k))
      throw std::invalid_argument(
          fmt::format("k-clique strategy needs a {}-phase game, got {}", core_.plan().k, view.phase_count()));
    started_ = true;
  }
  return core_.offer(item.position, item.label, item.cost, ViewOracle(view));
}

void KCliqueMaker::passed(const View&, const Item& item) { core_.pass_owned(item.position, item.label, item.cost); }

void KCliqueMaker::observe(const View& view, const Item& item, Player taker) {
  if (taker == Player::maker) core_.taken(item.position, item.label, item.cost, view.frontier(), ViewOracle(view));
}

bool KCliqueMaker::would_take(const View& view, const Item& item) const {
  return core_.would_take(item.position, item.label, item.cost, ViewOracle(view));
}

// ---------------------------------------------------------------------------
// Dry run

std::uint64_t dry_run_position(std::uint64_t seed, Label e, std::uint64_t total) {
  const std::uint64_t k = (static_cast<std::uint64_t>(e.first) << 32) | e.second;
  return 1 + mix64(sub_seed(seed, 1) ^ mix64(k + 1)) % total;
}

double dry_run_cost(std::uint64_t seed, Label e) {
  const std::uint64_t k = (static_cast<std::uint64_t>(e.first) << 32) | e.second;
  return static_cast<double>(mix64(sub_seed(seed, 2) ^ mix64(k + 1)) >> 11) * 0x1.0p-53;
}

namespace {

struct SparseEdge {
  std::uint64_t position;
  Label e;
  double cost;
};

class DryOracle final : public EdgeOracle {
 public:
  DryOracle(std::uint64_t seed, std::uint64_t total) : seed_(seed), total_(total) {}
  bool revealed(Label e) const override { return dry_run_position(seed_, e, total_) <= frontier; }
  std::uint64_t position(Label e) const override { return dry_run_position(seed_, e, total_); }
  Owner owner(Label e) const override {
    const std::uint64_t k = (static_cast<std::uint64_t>(e.first) << 32) | e.second;
    if (maker.count(k)) return Owner::maker;
    if (breaker.count(k)) return Owner::breaker;
    return Owner::none;
  }
  std::uint64_t maker_pointer() const override { return frontier; }

  std::uint64_t frontier = 0;
  std::unordered_set<std::uint64_t> maker, breaker;

 private:
  std::uint64_t seed_, total_;
};

}  // namespace

DryRunResult dry_run(const CliquePlan& plan, std::uint64_t seed) {
  const std::uint64_t total = edge_count(plan.n);
  const auto ends = phase_ends64(total, static_cast<std::uint32_t>(plan.k));
  CliqueCore core(plan, ends);
  DryOracle oracle(seed, total);
  DryRunResult res;
  std::uint64_t cursor = 0;  // last position processed
  std::uint64_t wanted = 0;  // edges the strategy wanted so far, for the Breaker model
  auto key = [](Label e) { return (static_cast<std::uint64_t>(e.first) << 32) | e.second; };

  while (!core.failed() && core.stage() != Stage::done && cursor < total) {
    // Edges the current stage can possibly use.
    std::vector<SparseEdge> stream;
    const auto& in_l = core.in_l();
    auto add = [&](std::uint32_t u, std::uint32_t v) {
      const Label e = edge(u, v);
      const std::uint64_t pos = dry_run_position(seed, e, total);
      if (pos > cursor) stream.push_back({pos, e, dry_run_cost(seed, e)});
    };
    if (core.stage() == Stage::star) {
      const std::uint32_t root = core.roots().back();
      for (std::uint32_t w = 0; w < plan.n; ++w)
        if (w != root && in_l[w]) add(root, w);
    } else {
      std::vector<std::uint32_t> l;
      for (std::uint32_t w = 0; w < plan.n; ++w)
        if (in_l[w]) l.push_back(w);
      for (std::size_t i = 0; i < l.size(); ++i)
        for (std::size_t j = i + 1; j < l.size(); ++j) add(l[i], l[j]);
    }
    std::sort(stream.begin(), stream.end(), [](const SparseEdge& a, const SparseEdge& b) {
      return a.position != b.position ? a.position < b.position : a.e.first != b.e.first ? a.e.first < b.e.first
                                                                                         : a.e.second < b.e.second;
    });

    const Stage stage = core.stage();
    const int phase = core.phase();
    const std::uint64_t phase_end = ends[phase - 1];
    bool restart = false;
    for (const SparseEdge& s : stream) {
      if (stage != Stage::closing && s.position > phase_end) break;
      const std::uint64_t k = key(s.e);
      if (oracle.maker.count(k) || oracle.breaker.count(k)) continue;
      ++res.edges_examined;
      oracle.frontier = s.position;
      cursor = s.position;
      core.advance(s.position);
      if (core.failed() || core.stage() == Stage::done) break;
      if (core.would_take(s.position, s.e, s.cost, oracle) && (wanted++ % (plan.b + 1)) < plan.b) {
        oracle.breaker.insert(k);
        core.pass_owned(s.position, s.e, s.cost);
      } else if (core.offer(s.position, s.e, s.cost, oracle)) {
        oracle.maker.insert(k);
        res.maker_edges.push_back(s.e);
        res.maker_cost += s.cost;
        core.taken(s.position, s.e, s.cost, oracle.frontier, oracle);
      }
      if (core.stage() != stage || core.phase() != phase) {
        restart = true;
        break;
      }
    }
    if (restart || core.failed() || core.stage() == Stage::done) continue;
    // The stage's candidate edges are used up: move on to the next phase.
    if (stage == Stage::closing || phase >= plan.k) break;
    cursor = std::max(cursor, phase_end);
    core.advance(phase_end + 1);
  }

  res.failed_phase = core.failed();
  if (!res.failed_phase && core.stage() != Stage::done) res.failed_phase = core.phase();
  res.success = contains_clique(res.maker_edges, plan.k);
  res.log = core.log();
  res.roots = core.roots();
  res.leaf_sets = core.leaf_sets();
  res.matching = core.matching();
  return res;
}

}  // namespace mbg::clique
