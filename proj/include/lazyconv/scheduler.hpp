#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lazyconv {

using ChannelId = std::uint32_t;
inline constexpr ChannelId kNoChannel = UINT32_MAX;

/// Wait map W (kept in both directions) and the duplicate-free active queue
/// Q. Channel ids are dense indices handed out by add_channel().
class Scheduler {
 public:
  Scheduler();

  ChannelId add_channel();
  std::size_t channel_count() const { return waiters_.size(); }

  /// The root is needed by a sentinel waiter that unneed never removes.
  void set_root(ChannelId root);
  ChannelId root() const { return root_; }

  // Queue.
  bool in_queue(ChannelId c) const { return in_q_[c]; }
  std::size_t queue_size() const { return q_size_; }
  void push_back(ChannelId c);
  void remove(ChannelId c);
  std::optional<ChannelId> pop_head();
  std::vector<ChannelId> queue_contents() const;

  // W(beta) and its inverse.
  const std::vector<ChannelId>& waiters(ChannelId beta) const { return waiters_[beta]; }
  const std::vector<ChannelId>& waits_on(ChannelId alpha) const { return waits_on_[alpha]; }
  bool is_finished(ChannelId c) const { return finished_[c]; }

  /// need(alpha, beta): if W(beta) is empty, beta is appended to Q.
  void need(ChannelId alpha, ChannelId beta);
  /// Records alpha in W(beta) without touching Q; used when beta is itself
  /// blocked on processes that are already queued.
  void add_waiter(ChannelId alpha, ChannelId beta);
  /// finish(alpha): Q . (W(alpha) \ Q), then W(alpha) := {}.
  void finish(ChannelId alpha);
  /// Reference-count style cancellation; cascades through waits_on.
  void unneed(ChannelId alpha, ChannelId beta);

  /// Marks alpha as created in the active state, needed by `by`.
  void activate(ChannelId alpha, ChannelId by);

  /// True once a need, activation or root marking has targeted c.
  bool demanded(ChannelId c) const { return demanded_[c]; }

  std::uint64_t unneed_warnings() const { return unneed_warnings_; }

  /// Channels whose scheduling state changed since the last call.
  std::vector<ChannelId> take_touched();
  void set_tracking(bool on) { tracking_ = on; }

  /// Checks the invariants restricted to one channel; returns an empty
  /// string when they hold. `stepping` is the channel currently executing.
  std::string check_channel(ChannelId c) const;
  /// Whole-state check (quadratic; for tests).
  std::string check_all() const;

 private:
  void touch(ChannelId c) {
    if (tracking_) touched_.push_back(c);
  }
  static bool erase_from(std::vector<ChannelId>& v, ChannelId x);
  static bool contains(const std::vector<ChannelId>& v, ChannelId x);

  std::vector<std::vector<ChannelId>> waiters_;
  std::vector<std::vector<ChannelId>> waits_on_;
  std::vector<ChannelId> prev_, next_;
  std::vector<bool> in_q_, finished_, demanded_;
  ChannelId head_ = kNoChannel, tail_ = kNoChannel;
  std::size_t q_size_ = 0;
  ChannelId root_ = kNoChannel;
  std::uint64_t unneed_warnings_ = 0;
  bool tracking_ = false;
  std::vector<ChannelId> touched_;
};

}  // namespace lazyconv
