#include "lipstream/clock.hpp"

#include <stdexcept>
#include <utility>

namespace lipstream {

MediaClock::MediaClock(Mode mode) : mode_(mode) {
  epoch_ = std::chrono::steady_clock::now();
  if (mode_ == Mode::Real) {
    driver_ = std::thread([this] { real_loop(); });
  }
}

MediaClock::~MediaClock() {
  if (mode_ == Mode::Real) {
    {
      std::lock_guard<std::mutex> lk(mu_);
      stop_ = true;
    }
    cv_.notify_all();
    driver_.join();
  }
}

Timestamp MediaClock::real_now_locked() const {
  auto d = std::chrono::steady_clock::now() - epoch_;
  return std::chrono::duration_cast<std::chrono::milliseconds>(d).count();
}

Timestamp MediaClock::now() const {
  std::lock_guard<std::mutex> lk(mu_);
  return mode_ == Mode::Real ? real_now_locked() : now_;
}

MediaClock::TimerId MediaClock::call_at(Timestamp due, Callback cb) {
  std::unique_lock<std::mutex> lk(mu_);
  Timestamp base = mode_ == Mode::Real ? real_now_locked() : now_;
  if (due < base) due = base;
  std::uint64_t seq = next_seq_++;
  timers_.emplace(Key{due, seq}, std::move(cb));
  index_.emplace(seq, Key{due, seq});
  lk.unlock();
  cv_.notify_all();
  return seq;
}

MediaClock::TimerId MediaClock::call_after(DurationMs delta, Callback cb) {
  if (delta < 0) throw std::invalid_argument("MediaClock: negative delay");
  std::lock_guard<std::mutex> lk(mu_);
  Timestamp base = mode_ == Mode::Real ? real_now_locked() : now_;
  std::uint64_t seq = next_seq_++;
  timers_.emplace(Key{base + delta, seq}, std::move(cb));
  index_.emplace(seq, Key{base + delta, seq});
  cv_.notify_all();
  return seq;
}

MediaClock::TimerId MediaClock::post(Callback cb) {
  return call_after(0, std::move(cb));
}

bool MediaClock::cancel(TimerId id) {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = index_.find(id);
  if (it == index_.end()) return false;
  timers_.erase(it->second);
  index_.erase(it);
  return true;
}

Timestamp MediaClock::advance(DurationMs delta) {
  if (mode_ != Mode::Virtual)
    throw std::logic_error("MediaClock::advance on a real-mode clock");
  if (delta < 0) throw std::invalid_argument("MediaClock: negative delta");

  std::unique_lock<std::mutex> lk(mu_);
  if (advancing_)
    throw std::logic_error("MediaClock::advance re-entered from a callback");
  advancing_ = true;
  const Timestamp horizon = now_ + delta;
  while (!timers_.empty()) {
    auto it = timers_.begin();
    if (it->first.due > horizon) break;
    Callback cb = std::move(it->second);
    now_ = it->first.due;
    index_.erase(it->first.seq);
    timers_.erase(it);
    lk.unlock();
    cb();
    lk.lock();
  }
  now_ = horizon;
  advancing_ = false;
  return now_;
}

Timestamp MediaClock::run_until_idle() {
  if (mode_ != Mode::Virtual)
    throw std::logic_error("MediaClock::run_until_idle on a real-mode clock");
  std::unique_lock<std::mutex> lk(mu_);
  if (advancing_)
    throw std::logic_error("MediaClock::advance re-entered from a callback");
  advancing_ = true;
  while (!timers_.empty()) {
    auto it = timers_.begin();
    Callback cb = std::move(it->second);
    now_ = std::max(now_, it->first.due);
    index_.erase(it->first.seq);
    timers_.erase(it);
    lk.unlock();
    cb();
    lk.lock();
  }
  advancing_ = false;
  return now_;
}

std::size_t MediaClock::pending_timers() const {
  std::lock_guard<std::mutex> lk(mu_);
  return timers_.size();
}

void MediaClock::real_loop() {
  std::unique_lock<std::mutex> lk(mu_);
  while (!stop_) {
    if (timers_.empty()) {
      cv_.wait(lk, [this] { return stop_ || !timers_.empty(); });
      continue;
    }
    auto it = timers_.begin();
    Timestamp due = it->first.due;
    Timestamp current = real_now_locked();
    if (due > current) {
      cv_.wait_for(lk, std::chrono::milliseconds(due - current));
      continue;  // re-evaluate: earlier timer may have been added
    }
    Callback cb = std::move(it->second);
    index_.erase(it->first.seq);
    timers_.erase(it);
    lk.unlock();
    cb();
    lk.lock();
  }
}

}  // namespace lipstream
