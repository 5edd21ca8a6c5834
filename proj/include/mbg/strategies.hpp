#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mbg/engine.hpp"
#include "mbg/rng.hpp"

namespace mbg {

// A Maker strategy that can also answer "would you take this item right
// now?" without changing state. Breakers that imitate Maker rely on it.
class MakerStrategy : public Strategy {
 public:
  virtual bool would_take(const View& view, const Item& item) const = 0;
};

// Takes every offered item whose cost is at most the threshold for its
// position. Works for either role; the engine enforces the quota.
class ThresholdTaker final : public Strategy {
 public:
  explicit ThresholdTaker(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {}
  static ThresholdTaker constant(std::uint32_t n, double threshold) {
    return ThresholdTaker(std::vector<double>(n, threshold));
  }
  bool wants(const View&, const Item& item) override {
    return item.position <= thresholds_.size() && item.cost <= thresholds_[item.position - 1];
  }

 private:
  std::vector<double> thresholds_;
};

class GreedyTaker final : public Strategy {
 public:
  bool wants(const View&, const Item&) override { return true; }
};

class NeverTaker final : public Strategy {
 public:
  bool wants(const View&, const Item&) override { return false; }
};

// Takes each offered item independently with probability p.
class RandomTaker final : public Strategy {
 public:
  RandomTaker(double p, std::uint64_t seed) : p_(p), rng_(seed) {}
  bool wants(const View&, const Item&) override { return rng_.bernoulli(p_); }

 private:
  double p_;
  Rng rng_;
};

// Breaker that keeps a private copy of Maker's strategy, replays Maker's
// visible history into it, and grabs whatever that copy would buy next.
// Only items ahead of Maker's pointer are taken.
class MimicBreaker final : public Strategy {
 public:
  explicit MimicBreaker(std::unique_ptr<MakerStrategy> shadow) : shadow_(std::move(shadow)) {}
  bool wants(const View& view, const Item& item) override;
  void observe(const View& view, const Item& item, Player taker) override;

 private:
  void sync(const View& view);

  std::unique_ptr<MakerStrategy> shadow_;
  std::uint32_t synced_ = 0;
};

}  // namespace mbg
