#include "mbg/strategies.hpp"

namespace mbg {

void MimicBreaker::sync(const View& view) {
  const std::uint32_t target = view.pointer(Player::maker);
  for (; synced_ < target; ++synced_) {
    const Item& it = view.item(synced_ + 1);
    switch (it.owner) {
      case Owner::breaker:
        shadow_->passed(view, it);
        break;
      case Owner::maker:
        shadow_->wants(view, it);
        shadow_->observe(view, it, Player::maker);
        break;
      case Owner::none:
        shadow_->wants(view, it);
        break;
    }
  }
}

bool MimicBreaker::wants(const View& view, const Item& item) {
  sync(view);
  if (item.position <= view.pointer(Player::maker)) return false;
  return shadow_->would_take(view, item);
}

void MimicBreaker::observe(const View& view, const Item& item, Player taker) {
  if (taker == Player::breaker) shadow_->observe(view, item, Player::breaker);
}

}  // namespace mbg
