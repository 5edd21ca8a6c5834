#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/strategies.hpp"

namespace mbg::item {

enum class Role : std::uint8_t { maker, breaker };

// Per-position acceptance thresholds t_1..t_n, each in [0,1].
struct ThresholdSchedule {
  std::vector<double> values;
  Role role = Role::maker;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

// Maker's phased plan for b >= 1: b+1 blocks of about N = n/(b+1) positions,
// with thresholds alpha/(N + alpha - i) counted from each block's start and
// the last threshold of every block forced to 1.
struct PhasePlan {
  std::uint32_t n = 0;
  std::uint32_t b = 0;
  double alpha = 0.0;
  double N = 0.0;
  std::vector<std::uint32_t> phase_ends;
  ThresholdSchedule schedule;

  std::uint32_t phase_count() const { return static_cast<std::uint32_t>(phase_ends.size()); }
  std::uint32_t phase_of(std::uint32_t position) const;
  std::uint32_t phase_start(std::uint32_t phase) const { return phase == 0 ? 1 : phase_ends[phase - 1] + 1; }
};

double phased_alpha(std::uint32_t b);
// check_range = false skips the warning for b above n/ln^4 n, for callers that
// apply the plan to short sub-streams on purpose.
PhasePlan phased_maker_plan(std::uint32_t n, std::uint32_t b, bool check_range = true);

// m~_i = 2/(n-i+1) for i < n and 1 at i = n.
ThresholdSchedule single_threshold_maker(std::uint32_t n);

// Breaker's best response to a fixed Maker schedule, by backward induction on
// the stationarity condition of the expected-cost functional.
ThresholdSchedule breaker_best_response(const ThresholdSchedule& maker);

// Closed form of the best response against single_threshold_maker(n).
ThresholdSchedule breaker_closed_form(std::uint32_t n);

// E[c_M] when Breaker removes the first j with c_j <= b_j and Maker then
// buys the first remaining i with c_i <= m_i. Linear time.
double expected_cost(const ThresholdSchedule& breaker, const ThresholdSchedule& maker);

double cheap_grab_threshold(std::uint32_t n, std::uint32_t b);
std::unique_ptr<Strategy> cheap_grab_breaker(std::uint32_t n, std::uint32_t b);

// Tracks which of a plan's blocks have already had their attempt. Positions
// are 1-based indices into whatever sub-stream the plan is applied to.
class PhaseAttempts {
 public:
  // one_per_phase = false gives the plain "first available item under the
  // threshold" rule.
  PhaseAttempts(std::vector<std::uint32_t> phase_ends, std::vector<double> thresholds, bool one_per_phase);

  bool would_take(std::uint32_t index, double cost) const;
  // Item offered to Maker; returns true if it should be bought.
  bool offer(std::uint32_t index, double cost);
  // Item Maker passed because Breaker already owns it.
  void pass_owned(std::uint32_t index, double cost);
  std::uint32_t length() const { return static_cast<std::uint32_t>(thresholds_.size()); }
  double threshold(std::uint32_t index) const { return thresholds_.at(index - 1); }

 private:
  std::uint32_t phase_of(std::uint32_t index) const;

  std::vector<std::uint32_t> ends_;
  std::vector<double> thresholds_;
  std::vector<char> attempted_;
  bool one_per_phase_;
};

PhaseAttempts attempts_for(const PhasePlan& plan);
PhaseAttempts attempts_for(const ThresholdSchedule& schedule);

// Maker following a PhasePlan over the whole stream.
class PhasedMaker final : public MakerStrategy {
 public:
  explicit PhasedMaker(const PhasePlan& plan) : attempts_(attempts_for(plan)) {}
  bool wants(const View& view, const Item& item) override;
  void passed(const View& view, const Item& item) override;
  bool would_take(const View& view, const Item& item) const override;

 private:
  PhaseAttempts attempts_;
};

// Maker buying the first available item with c_i <= t_i.
class ScheduleMaker final : public MakerStrategy {
 public:
  explicit ScheduleMaker(ThresholdSchedule schedule) : schedule_(std::move(schedule)) {}
  bool wants(const View& view, const Item& item) override { return would_take(view, item); }
  bool would_take(const View&, const Item& item) const override {
    return item.position <= schedule_.size() && item.cost <= schedule_[item.position - 1];
  }

 private:
  ThresholdSchedule schedule_;
};

// Plain-text schedules: one threshold per line at 17 significant digits.
void write_schedule(std::ostream& out, const ThresholdSchedule& schedule);
ThresholdSchedule read_schedule(std::istream& in, Role role);

}  // namespace mbg::item
