#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "lipstream/clock.hpp"
#include "lipstream/journal.hpp"
#include "lipstream/uuid.hpp"

namespace lipstream {

struct Message {
  Uuid uuid;  // stable across redeliveries; keys the journal
  std::shared_ptr<const std::vector<std::uint8_t>> payload;

  std::size_t size() const { return payload ? payload->size() : 0; }
};

// Opaque handle for one in-flight delivery. Settling it twice throws.
struct DeliveryToken {
  std::uint64_t value = 0;
};

struct Envelope {
  Message msg;
  DeliveryToken token;
  int attempt = 1;  // 1 on first delivery
  bool redelivered = false;
};

struct QueueOptions {
  std::size_t budget_bytes = std::size_t(64) << 20;
  int max_attempts = 3;
  DurationMs redelivery_base_ms = 100;
  int redelivery_factor = 2;
  // Rebuild the ready set from an existing journal before opening a fresh
  // one. Recovered messages are re-admitted, so attempt counters reset.
  bool recover = false;
};

struct QueueStats {
  std::uint64_t published = 0;
  std::uint64_t acked = 0;
  std::uint64_t dead_lettered = 0;
  std::uint64_t redeliveries = 0;
  std::size_t used_bytes = 0;
  std::size_t max_used_bytes = 0;
  std::size_t depth = 0;
  std::size_t inflight = 0;
};

// In-process message broker driven entirely by a MediaClock: consumer
// callbacks, admission notifications and redeliveries are clock events, so
// runs on a virtual clock replay deterministically.
//
// Per queue: byte budget charged from admission to settle (ack or dead
// letter), FIFO admission for parked publishers, per-consumer prefetch with
// round-robin dispatch, exponential redelivery backoff, and a journal that
// records admission, ack, and dead-letter so a crash replays exactly once.
// Declaring "jobs" also declares "jobs.dlq"; dead letters keep their uuid
// and payload, and the dead-letter queue itself has no journal and no
// budget gate.
class Broker {
 public:
  using ConsumerFn = std::function<void(const Envelope&)>;

  // journal_dir empty → journals are null sinks (benchmark mode).
  explicit Broker(MediaClock& clock, std::string journal_dir = "");

  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  void declare_queue(const std::string& name, QueueOptions opts = {});
  bool has_queue(const std::string& name) const;
  static std::string dlq_name(const std::string& queue) {
    return queue + ".dlq";
  }

  // done runs (as a clock event) once the queue accepts the message; parked
  // publishers admit in publish order. A payload larger than the queue's
  // whole budget throws.
  void publish(const std::string& queue, Message msg,
               std::function<void()> done = nullptr);

  // fn runs as a clock event per delivery, at most prefetch unsettled
  // deliveries at a time. Returns the consumer id.
  std::uint64_t subscribe(const std::string& queue, int prefetch,
                          ConsumerFn fn);
  void unsubscribe(const std::string& queue, std::uint64_t consumer_id);

  void ack(const DeliveryToken& token);
  // Failed delivery: redeliver after base * factor^(attempt-1) ms, in
  // arrival order relative to other ready messages; after max_attempts
  // failures the message moves to the dead-letter queue.
  void nack(const DeliveryToken& token);
  // Settle an in-flight delivery straight to the dead-letter queue. For
  // failures the consumer knows retrying cannot fix.
  void dead_letter_inflight(const DeliveryToken& token);

  QueueStats stats(const std::string& queue) const;
  void flush_journals();

 private:
  struct ReadyEntry {
    Message msg;
    int attempts_done = 0;
    Timestamp admitted_ts = 0;
  };

  struct Consumer {
    std::uint64_t id = 0;
    int prefetch = 1;
    int in_flight = 0;
    ConsumerFn fn;
  };

  struct PendingPublish {
    Message msg;
    std::function<void()> done;
  };

  struct Queue {
    std::string name;
    QueueOptions opts;
    bool is_dlq = false;
    std::uint64_t next_seq = 0;
    std::map<std::uint64_t, ReadyEntry> ready;
    std::deque<PendingPublish> parked;
    std::vector<Consumer> consumers;
    std::size_t rr_cursor = 0;
    JournalWriter journal;
    QueueStats stats;
  };

  struct Inflight {
    std::string queue;
    std::uint64_t seq = 0;
    ReadyEntry entry;
    std::uint64_t consumer_id = 0;
  };

  Queue& queue_at(const std::string& name);
  const Queue& queue_at(const std::string& name) const;
  std::string journal_path(const std::string& name) const;
  void recover_locked(Queue& q);
  // _locked methods assume mu_ is held. User code never runs under the
  // lock: every callback leaves through clock_.post.
  void admit_locked(Queue& q, ReadyEntry entry, std::function<void()> done);
  void drain_parked_locked(Queue& q);
  void dispatch_locked(Queue& q);
  void requeue_locked(Queue& q, std::uint64_t seq, ReadyEntry entry);
  void move_to_dlq_locked(Queue& src, ReadyEntry entry);
  void release_consumer_locked(Queue& q, std::uint64_t consumer_id);

  MediaClock& clock_;
  const std::string journal_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Queue>> queues_;
  std::unordered_map<std::uint64_t, Inflight> inflight_;
  std::uint64_t next_token_ = 1;
  std::uint64_t next_consumer_ = 1;
};

}  // namespace lipstream
