#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

namespace lipstream {

// Milliseconds since stream epoch (per-run start). 1 ms resolution everywhere;
// nothing in the system carries sub-millisecond time.
using Timestamp = std::int64_t;
using DurationMs = std::int64_t;

// Single time source for the whole system. Virtual mode advances only via
// advance()/run_until_idle() from one driver context; real mode runs a
// background dispatch thread against the steady clock. Timers due at the same
// instant fire in registration order.
class MediaClock {
 public:
  enum class Mode { Virtual, Real };
  using TimerId = std::uint64_t;
  using Callback = std::function<void()>;

  explicit MediaClock(Mode mode = Mode::Virtual);
  ~MediaClock();

  MediaClock(const MediaClock&) = delete;
  MediaClock& operator=(const MediaClock&) = delete;

  Mode mode() const { return mode_; }
  Timestamp now() const;

  // Schedules cb at absolute virtual time `due` (clamped to now if earlier).
  TimerId call_at(Timestamp due, Callback cb);
  TimerId call_after(DurationMs delta, Callback cb);
  // Schedules cb at the current instant; runs after already-queued work.
  TimerId post(Callback cb);
  // True if the timer was still pending.
  bool cancel(TimerId id);

  // Virtual mode only. Runs every timer due in (now, now+delta], advancing
  // now to each timer's due time, then leaves now at the horizon. Callbacks
  // may schedule further timers; those inside the horizon fire in the same
  // call. Must not be called from within a timer callback.
  Timestamp advance(DurationMs delta);

  // Virtual mode only: drains the timer queue completely, advancing now as
  // far as the last timer. Returns the final now.
  Timestamp run_until_idle();

  std::size_t pending_timers() const;

 private:
  struct Key {
    Timestamp due;
    std::uint64_t seq;
    bool operator<(const Key& o) const {
      return due != o.due ? due < o.due : seq < o.seq;
    }
  };

  void real_loop();
  Timestamp real_now_locked() const;

  const Mode mode_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::map<Key, Callback> timers_;
  std::map<TimerId, Key> index_;
  Timestamp now_ = 0;
  std::uint64_t next_seq_ = 1;
  bool advancing_ = false;
  bool stop_ = false;
  std::chrono::steady_clock::time_point epoch_;
  std::thread driver_;
};

}  // namespace lipstream
