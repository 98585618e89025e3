#include "lazyconv/scheduler.hpp"

#include <algorithm>
#include <stdexcept>

namespace lazyconv {

Scheduler::Scheduler() = default;

ChannelId Scheduler::add_channel() {
  auto id = static_cast<ChannelId>(waiters_.size());
  if (id == kNoChannel) throw std::length_error("channel ids exhausted");
  waiters_.emplace_back();
  waits_on_.emplace_back();
  prev_.push_back(kNoChannel);
  next_.push_back(kNoChannel);
  in_q_.push_back(false);
  finished_.push_back(false);
  demanded_.push_back(false);
  return id;
}

void Scheduler::set_root(ChannelId root) {
  root_ = root;
  demanded_[root] = true;
}

bool Scheduler::contains(const std::vector<ChannelId>& v, ChannelId x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

bool Scheduler::erase_from(std::vector<ChannelId>& v, ChannelId x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it == v.end()) return false;
  *it = v.back();
  v.pop_back();
  return true;
}

void Scheduler::push_back(ChannelId c) {
  if (in_q_[c]) throw std::logic_error("channel queued twice");
  if (finished_[c]) throw std::logic_error("finished channel queued");
  in_q_[c] = true;
  prev_[c] = tail_;
  next_[c] = kNoChannel;
  if (tail_ != kNoChannel)
    next_[tail_] = c;
  else
    head_ = c;
  tail_ = c;
  ++q_size_;
  touch(c);
}

void Scheduler::remove(ChannelId c) {
  if (!in_q_[c]) return;
  ChannelId p = prev_[c], n = next_[c];
  if (p != kNoChannel)
    next_[p] = n;
  else
    head_ = n;
  if (n != kNoChannel)
    prev_[n] = p;
  else
    tail_ = p;
  prev_[c] = next_[c] = kNoChannel;
  in_q_[c] = false;
  --q_size_;
  touch(c);
}

std::optional<ChannelId> Scheduler::pop_head() {
  if (head_ == kNoChannel) return std::nullopt;
  ChannelId c = head_;
  remove(c);
  return c;
}

std::vector<ChannelId> Scheduler::queue_contents() const {
  std::vector<ChannelId> out;
  for (ChannelId c = head_; c != kNoChannel; c = next_[c]) out.push_back(c);
  return out;
}

void Scheduler::need(ChannelId alpha, ChannelId beta) {
  demanded_[beta] = true;
  touch(alpha);
  touch(beta);
  if (!waiters_[beta].empty()) {
    if (!contains(waiters_[beta], alpha)) {
      waiters_[beta].push_back(alpha);
      waits_on_[alpha].push_back(beta);
    }
    return;
  }
  waiters_[beta].push_back(alpha);
  waits_on_[alpha].push_back(beta);
  // A root, or a process that was restarted while W(beta) was empty, may
  // already sit in the queue.
  if (!in_q_[beta]) push_back(beta);
}

void Scheduler::add_waiter(ChannelId alpha, ChannelId beta) {
  demanded_[beta] = true;
  touch(alpha);
  touch(beta);
  if (contains(waiters_[beta], alpha)) return;
  waiters_[beta].push_back(alpha);
  waits_on_[alpha].push_back(beta);
}

void Scheduler::activate(ChannelId alpha, ChannelId by) { need(by, alpha); }

void Scheduler::finish(ChannelId alpha) {
  if (finished_[alpha]) throw std::logic_error("channel " + std::to_string(alpha) + " finished twice");
  finished_[alpha] = true;
  remove(alpha);
  touch(alpha);
  std::vector<ChannelId> ws;
  ws.swap(waiters_[alpha]);
  for (ChannelId w : ws) {
    erase_from(waits_on_[w], alpha);
    if (!in_q_[w]) push_back(w);
    touch(w);
  }
}

void Scheduler::unneed(ChannelId alpha, ChannelId beta) {
  std::vector<std::pair<ChannelId, ChannelId>> work{{alpha, beta}};
  while (!work.empty()) {
    auto [a, b] = work.back();
    work.pop_back();
    touch(a);
    touch(b);
    if (!erase_from(waiters_[b], a)) {
      ++unneed_warnings_;
      continue;
    }
    erase_from(waits_on_[a], b);
    if (!waiters_[b].empty() || b == root_ || finished_[b]) continue;
    remove(b);
    for (ChannelId g : waits_on_[b]) work.emplace_back(b, g);
  }
}

std::vector<ChannelId> Scheduler::take_touched() {
  std::vector<ChannelId> out;
  out.swap(touched_);
  return out;
}

std::string Scheduler::check_channel(ChannelId c) const {
  auto fail = [c](const std::string& what) { return "channel " + std::to_string(c) + ": " + what; };
  if (in_q_[c]) {
    if (finished_[c]) return fail("finished but queued");
    if (waiters_[c].empty() && c != root_) return fail("queued without waiters");
    ChannelId p = prev_[c], n = next_[c];
    if (p == kNoChannel ? head_ != c : next_[p] != c) return fail("broken queue link (prev)");
    if (n == kNoChannel ? tail_ != c : prev_[n] != c) return fail("broken queue link (next)");
  }
  if (finished_[c] && !waiters_[c].empty()) return fail("finished with waiters");
  for (ChannelId w : waiters_[c])
    if (!contains(waits_on_[w], c)) return fail("W not inverse (waiter " + std::to_string(w) + ")");
  for (ChannelId d : waits_on_[c])
    if (!contains(waiters_[d], c)) return fail("W not inverse (dependency " + std::to_string(d) + ")");
  std::vector<ChannelId> ws = waiters_[c];
  std::sort(ws.begin(), ws.end());
  if (std::adjacent_find(ws.begin(), ws.end()) != ws.end()) return fail("duplicate waiter");
  return {};
}

std::string Scheduler::check_all() const {
  std::size_t n = 0;
  std::vector<bool> seen(waiters_.size(), false);
  for (ChannelId c = head_; c != kNoChannel; c = next_[c]) {
    if (seen[c]) return "queue contains channel " + std::to_string(c) + " twice";
    seen[c] = true;
    ++n;
    if (n > waiters_.size()) return "queue cycle";
  }
  if (n != q_size_) return "queue size mismatch";
  for (ChannelId c = 0; c < waiters_.size(); ++c) {
    if (seen[c] != in_q_[c]) return "queue membership flag mismatch at " + std::to_string(c);
    std::string e = check_channel(c);
    if (!e.empty()) return e;
  }
  return {};
}

}  // namespace lazyconv
