#include "mbg/item_game.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "mbg/diagnostics.hpp"

namespace mbg::item {

std::uint32_t PhasePlan::phase_of(std::uint32_t position) const {
  auto it = std::lower_bound(phase_ends.begin(), phase_ends.end(), position);
  return static_cast<std::uint32_t>(it - phase_ends.begin());
}

double phased_alpha(std::uint32_t b) { return 10.0 + 10.0 * std::ceil(std::log(static_cast<double>(b))); }

PhasePlan phased_maker_plan(std::uint32_t n, std::uint32_t b, bool check_range) {
  if (b < 1) throw std::invalid_argument("phased_maker_plan needs b >= 1; use single_threshold_maker for b = 0");
  if (n < 1) throw std::invalid_argument("phased_maker_plan needs n >= 1");
  const double ln = std::log(static_cast<double>(n));
  if (check_range && n > 1 && static_cast<double>(b) > n / std::pow(ln, 4))
    warn(fmt::format("phased plan: b = {} exceeds n/ln^4 n = {:.3g}", b, n / std::pow(ln, 4)));

  PhasePlan plan;
  plan.n = n;
  plan.b = b;
  plan.alpha = phased_alpha(b);
  plan.N = static_cast<double>(n) / (b + 1);
  plan.phase_ends = mbg::phase_ends(n, b + 1);
  plan.schedule.role = Role::maker;
  plan.schedule.values.resize(n);
  std::uint32_t start = 1;
  for (std::uint32_t end : plan.phase_ends) {
    for (std::uint32_t pos = start; pos <= end; ++pos) {
      const double i = pos - start + 1;
      const double m = pos == end ? 1.0 : std::min(1.0, plan.alpha / (plan.N + plan.alpha - i));
      plan.schedule.values[pos - 1] = m;
    }
    start = end + 1;
  }
  return plan;
}

ThresholdSchedule single_threshold_maker(std::uint32_t n) {
  if (n < 1) throw std::invalid_argument("single_threshold_maker needs n >= 1");
  ThresholdSchedule s;
  s.role = Role::maker;
  s.values.resize(n);
  for (std::uint32_t i = 1; i < n; ++i) s.values[i - 1] = 2.0 / (n - i + 1);
  s.values[n - 1] = 1.0;
  return s;
}

ThresholdSchedule breaker_best_response(const ThresholdSchedule& maker) {
  const std::size_t n = maker.size();
  ThresholdSchedule out;
  out.role = Role::breaker;
  out.values.assign(n, 0.0);
  // tail = sum over l > i of prod_{i<k<l}(1 - m_k) * m_l^2 / 2; dc/db_i is
  // proportional to tail - b_i.
  double tail = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    out.values[i] = std::clamp(tail, 0.0, maker[i]);
    tail = maker[i] * maker[i] / 2.0 + (1.0 - maker[i]) * tail;
  }
  return out;
}

ThresholdSchedule breaker_closed_form(std::uint32_t n) {
  if (n < 2) throw std::invalid_argument("breaker_closed_form needs n >= 2");
  ThresholdSchedule out;
  out.role = Role::breaker;
  out.values.assign(n, 0.0);
  std::vector<double> harmonic(n + 1, 0.0);
  for (std::uint32_t l = 1; l <= n; ++l) harmonic[l] = harmonic[l - 1] + 1.0 / l;
  out.values[n - 1] = 0.0;
  out.values[n - 2] = 0.5;
  for (std::uint32_t i = 1; i + 2 <= n; ++i) {
    const double d = n - i;
    out.values[i - 1] = 2.0 / (d - 1) - 2.0 / (d * (d - 1)) * harmonic[n - i];
  }
  return out;
}

double expected_cost(const ThresholdSchedule& breaker, const ThresholdSchedule& maker) {
  if (breaker.size() != maker.size())
    throw std::invalid_argument(
        fmt::format("expected_cost: schedules differ in length ({} vs {})", breaker.size(), maker.size()));
  for (std::size_t i = 0; i < maker.size(); ++i)
    if (breaker[i] > maker[i]) {
      warn(fmt::format("expected_cost: b_{} = {} exceeds m_{} = {}; formula assumes b <= m", i + 1, breaker[i],
                       i + 1, maker[i]));
      break;
    }
  // prefix: probability that nothing has been removed or bought before i.
  // pending: probability that Breaker removed an earlier item and Maker is
  // still looking. With b_i > m_i, Breaker removes items Maker would skip.
  double prefix = 1.0;
  double pending = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < maker.size(); ++i) {
    const double m = maker[i], b = breaker[i];
    total += prefix * std::max(0.0, m * m - b * b) / 2.0 + pending * m * m / 2.0;
    pending = pending * (1.0 - m) + prefix * b;
    prefix *= 1.0 - std::max(m, b);
  }
  return total;
}

double cheap_grab_threshold(std::uint32_t n, std::uint32_t b) {
  return static_cast<double>(b) / (2.0 * static_cast<double>(n));
}

std::unique_ptr<Strategy> cheap_grab_breaker(std::uint32_t n, std::uint32_t b) {
  if (b < 1) throw std::invalid_argument("cheap_grab_breaker needs b >= 1");
  return std::make_unique<ThresholdTaker>(ThresholdTaker::constant(n, cheap_grab_threshold(n, b)));
}

// ---------------------------------------------------------------------------

PhaseAttempts::PhaseAttempts(std::vector<std::uint32_t> phase_ends, std::vector<double> thresholds, bool one_per_phase)
    : ends_(std::move(phase_ends)),
      thresholds_(std::move(thresholds)),
      attempted_(ends_.size(), 0),
      one_per_phase_(one_per_phase) {}

std::uint32_t PhaseAttempts::phase_of(std::uint32_t index) const {
  return static_cast<std::uint32_t>(std::lower_bound(ends_.begin(), ends_.end(), index) - ends_.begin());
}

bool PhaseAttempts::would_take(std::uint32_t index, double cost) const {
  if (index == 0 || index > thresholds_.size()) return false;
  if (one_per_phase_ && attempted_[phase_of(index)]) return false;
  return cost <= thresholds_[index - 1];
}

bool PhaseAttempts::offer(std::uint32_t index, double cost) {
  const bool take = would_take(index, cost);
  if (take && one_per_phase_) attempted_[phase_of(index)] = 1;
  return take;
}

void PhaseAttempts::pass_owned(std::uint32_t index, double cost) {
  if (one_per_phase_ && would_take(index, cost)) attempted_[phase_of(index)] = 1;
}

PhaseAttempts attempts_for(const PhasePlan& plan) {
  return PhaseAttempts(plan.phase_ends, plan.schedule.values, true);
}

PhaseAttempts attempts_for(const ThresholdSchedule& schedule) {
  return PhaseAttempts({static_cast<std::uint32_t>(schedule.size())}, schedule.values, false);
}

bool PhasedMaker::wants(const View&, const Item& item) { return attempts_.offer(item.position, item.cost); }

void PhasedMaker::passed(const View&, const Item& item) { attempts_.pass_owned(item.position, item.cost); }

bool PhasedMaker::would_take(const View&, const Item& item) const {
  return attempts_.would_take(item.position, item.cost);
}

// ---------------------------------------------------------------------------

void write_schedule(std::ostream& out, const ThresholdSchedule& schedule) {
  for (double v : schedule.values) out << fmt::format("{:.17g}\n", v);
}

ThresholdSchedule read_schedule(std::istream& in, Role role) {
  ThresholdSchedule s;
  s.role = role;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument(fmt::format("schedule line {}: not a number: '{}'", lineno, line));
    }
    if (line.find_first_not_of(" \t\r", used) != std::string::npos)
      throw std::invalid_argument(fmt::format("schedule line {}: trailing characters", lineno));
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument(fmt::format("schedule line {}: {} outside [0,1]", lineno, v));
    s.values.push_back(v);
  }
  return s;
}

}  // namespace mbg::item
