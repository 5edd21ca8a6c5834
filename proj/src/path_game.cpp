#include "mbg/path_game.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <unordered_set>

#include "mbg/diagnostics.hpp"

namespace mbg::path {

int path_depth(std::uint32_t n) {
  if (n < 3) throw std::invalid_argument("path_depth needs n >= 3");
  return static_cast<int>(std::ceil(std::log(std::log(static_cast<double>(n)))));
}

PathPlan path_plan(std::uint32_t n, std::uint32_t b, PathOverrides overrides) {
  if (n < 3) throw std::invalid_argument("path_plan needs n >= 3");
  PathPlan p;
  p.n = n;
  p.b = b;
  p.overrides = overrides;
  p.k = overrides.k.value_or(path_depth(n));
  if (p.k < 1) throw std::invalid_argument("path_plan: k must be at least 1");
  p.scale = overrides.threshold_scale.value_or(1.0);
  if (!(p.scale > 0.0)) throw std::invalid_argument("path_plan: threshold scale must be positive");
  const double nn = n, k = p.k;
  p.p_edge = std::pow(nn, -1.0 + 1.0 / (3.0 * k));
  p.eps = std::pow(nn, -1.0 / (9.0 * k));
  p.branching = (1.0 - p.eps) * nn * p.p_edge / (3.0 * k);
  if ((b + 1.0) * p.p_edge > 1.0)
    throw std::domain_error(fmt::format("path_plan: (b+1) p = {:.6g} exceeds 1", (b + 1.0) * p.p_edge));
  if (static_cast<double>(b) > std::pow(nn, 1.0 - 1.0 / k))
    warn(fmt::format("path plan: b = {} exceeds n^(1-1/k) = {:.3g}", b, std::pow(nn, 1.0 - 1.0 / k)));
  p.growth_threshold = p.scale * (b + 1.0) * p.p_edge;
  p.degenerate = p.branching <= 1.0;
  if (p.degenerate && !overrides.any()) throw std::domain_error("asymptotic regime unreachable at this n");
  for (int i = 1; i <= p.k; ++i)
    p.tree_targets.push_back(static_cast<std::uint32_t>(std::floor(std::pow(p.branching, i))));
  return p;
}

double PathPlan::connect_threshold(std::size_t tree_u, std::size_t tree_v) const {
  const double ln = std::log(static_cast<double>(n));
  return scale * (b + 1.0) * ln * ln / (static_cast<double>(tree_u) * static_cast<double>(tree_v));
}

void PathPlan::dump(std::ostream& out) const {
  out << fmt::format("n={}\nb={}\nk={}\np_edge={:.17g}\neps={:.17g}\nbranching={:.17g}\n", n, b, k, p_edge, eps,
                     branching);
  out << fmt::format("growth_threshold={:.17g}\nphase_count={}\ndegenerate={}\n", growth_threshold, phase_count(),
                     degenerate);
  std::string t;
  for (std::size_t i = 0; i < tree_targets.size(); ++i) t += fmt::format("{}{}", i ? "," : "", tree_targets[i]);
  out << "tree_targets=" << t << '\n';
  if (overrides.k) out << "override_k=" << *overrides.k << '\n';
  if (overrides.threshold_scale) out << fmt::format("override_threshold_scale={:.17g}\n", *overrides.threshold_scale);
}

// ---------------------------------------------------------------------------

Tree::Tree(std::uint32_t n, std::uint32_t r) : root(r), parent(n, -1), depth(n, 0) {
  if (n > 0) {
    parent[r] = r;
    vertices.push_back(r);
  }
}

void Tree::attach(std::uint32_t child, std::uint32_t par) {
  if (contains(child) || !contains(par)) throw std::logic_error("tree attach would not add a new leaf");
  parent[child] = par;
  depth[child] = depth[par] + 1;
  vertices.push_back(child);
}

bool tree_valid(const Tree& t, const std::vector<Label>& owned) {
  std::unordered_set<std::uint64_t> have;
  for (const Label& e : owned) have.insert((static_cast<std::uint64_t>(e.first) << 32) | e.second);
  if (t.parent.empty() || t.parent[t.root] != static_cast<std::int64_t>(t.root)) return false;
  std::size_t members = 0;
  for (std::uint32_t v = 0; v < t.parent.size(); ++v) {
    if (t.parent[v] < 0) continue;
    ++members;
    // Walk to the root; more than |tree| steps means a cycle.
    std::uint32_t x = v;
    for (std::size_t steps = 0; x != t.root; ++steps) {
      if (steps > t.vertices.size()) return false;
      const std::int64_t p = t.parent[x];
      if (p < 0) return false;
      const Label e = edge(x, static_cast<std::uint32_t>(p));
      if (!have.count((static_cast<std::uint64_t>(e.first) << 32) | e.second)) return false;
      x = static_cast<std::uint32_t>(p);
    }
  }
  return members == t.vertices.size();
}

// ---------------------------------------------------------------------------

PathMaker::PathMaker(const PathPlan& plan, std::uint32_t u, std::uint32_t v)
    : plan_(plan), u_(u), v_(v), tu_(plan.n, u), tv_(plan.n, v) {
  if (u >= plan.n || v >= plan.n || u == v) throw std::invalid_argument("path endpoints must be distinct vertices");
}

void PathMaker::enter_phase(int phase) {
  phase_ = phase;
  const int k = plan_.k;
  level_count_ = 0;
  level_done_ = false;
  if (phase <= 2 * k) {
    stage_ = phase <= k ? PathStage::grow_u : PathStage::grow_v;
    const int level = phase <= k ? phase : phase - k;
    level_depth_ = static_cast<std::uint32_t>(level - 1);
    if (plan_.tree_targets[level - 1] == 0) level_done_ = true;
  } else if (stage_ != PathStage::connect && stage_ != PathStage::done) {
    stage_ = PathStage::connect;
    connect_ = plan_.connect_threshold(tu_.vertices.size(), tv_.vertices.size());
  }
}

void PathMaker::advance(const View& view, std::uint32_t position) {
  if (failed_ || stage_ == PathStage::done) return;
  if (view.phase_count() != plan_.phase_count())
    throw std::invalid_argument(
        fmt::format("path strategy needs a {}-phase game, got {}", plan_.phase_count(), view.phase_count()));
  const int target = static_cast<int>(view.phase_of(position)) + 1;
  while (!failed_ && phase_ < target) {
    if (phase_ >= 1 && stage_ != PathStage::connect && !level_done_) {
      failed_ = phase_;
      return;
    }
    enter_phase(phase_ + 1);
  }
}

bool PathMaker::would_take(const View& view, const Item& item) const {
  if (failed_ || stage_ == PathStage::done) return false;
  const auto [a, c] = item.label;
  if (stage_ == PathStage::connect)
    return ((tu_.contains(a) && tv_.contains(c)) || (tu_.contains(c) && tv_.contains(a))) && item.cost <= connect_;
  if (level_done_ || static_cast<int>(view.phase_of(item.position)) + 1 != phase_) return false;
  const Tree& t = stage_ == PathStage::grow_u ? tu_ : tv_;
  const bool ina = t.contains(a), inc = t.contains(c);
  if (ina == inc) return false;
  const std::uint32_t inside = ina ? a : c;
  return t.depth[inside] <= level_depth_ && item.cost <= plan_.growth_threshold;
}

bool PathMaker::wants(const View& view, const Item& item) {
  advance(view, item.position);
  return would_take(view, item);
}

void PathMaker::passed(const View& view, const Item& item) { advance(view, item.position); }

void PathMaker::observe(const View&, const Item& item, Player taker) {
  if (taker != Player::maker) return;
  const auto [a, c] = item.label;
  if (stage_ == PathStage::connect) {
    stage_ = PathStage::done;
    return;
  }
  const int which = stage_ == PathStage::grow_u ? 0 : 1;
  Tree& t = which == 0 ? tu_ : tv_;
  if (t.contains(a)) t.attach(c, a);
  else t.attach(a, c);
  spend_[which] += item.cost;
  const int level = stage_ == PathStage::grow_u ? phase_ : phase_ - plan_.k;
  if (++level_count_ >= plan_.tree_targets[level - 1]) level_done_ = true;
}

// ---------------------------------------------------------------------------

PathGoal::PathGoal(std::uint32_t vertices, std::uint32_t u, std::uint32_t v) : parent_(vertices), u_(u), v_(v) {
  std::iota(parent_.begin(), parent_.end(), 0u);
}

std::uint32_t PathGoal::find(std::uint32_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void PathGoal::on_take(const GameState&, const Item& item, Player who) {
  if (who != Player::maker || done_) return;
  const std::uint32_t a = find(item.label.first), c = find(item.label.second);
  if (a != c) parent_[a] = c;
  done_ = find(u_) == find(v_);
}

bool path_exists(const std::vector<Label>& edges, std::uint32_t vertices, std::uint32_t u, std::uint32_t v) {
  std::vector<std::vector<std::uint32_t>> adj(vertices);
  for (const Label& e : edges) {
    adj[e.first].push_back(e.second);
    adj[e.second].push_back(e.first);
  }
  std::vector<char> seen(vertices, 0);
  std::queue<std::uint32_t> q;
  q.push(u);
  seen[u] = 1;
  while (!q.empty()) {
    const std::uint32_t x = q.front();
    q.pop();
    if (x == v) return true;
    for (std::uint32_t y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        q.push(y);
      }
  }
  return false;
}

}  // namespace mbg::path
