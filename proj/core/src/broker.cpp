#include "lipstream/broker.hpp"

#include <algorithm>
#include <filesystem>
#include <stdexcept>

#include "lipstream/log.hpp"

namespace lipstream {

Broker::Broker(MediaClock& clock, std::string journal_dir)
    : clock_(clock), journal_dir_(std::move(journal_dir)) {}

std::string Broker::journal_path(const std::string& name) const {
  return journal_dir_ + "/" + name + ".journal";
}

Broker::Queue& Broker::queue_at(const std::string& name) {
  auto it = queues_.find(name);
  if (it == queues_.end())
    throw std::out_of_range("broker: unknown queue " + name);
  return *it->second;
}

const Broker::Queue& Broker::queue_at(const std::string& name) const {
  auto it = queues_.find(name);
  if (it == queues_.end())
    throw std::out_of_range("broker: unknown queue " + name);
  return *it->second;
}

void Broker::declare_queue(const std::string& name, QueueOptions opts) {
  if (name.empty()) throw std::invalid_argument("broker: empty queue name");
  if (name.size() > 4 && name.rfind(".dlq") == name.size() - 4)
    throw std::invalid_argument("broker: the .dlq suffix is reserved");
  if (opts.max_attempts < 1 || opts.redelivery_base_ms < 0 ||
      opts.redelivery_factor < 1)
    throw std::invalid_argument("broker: bad queue options");
  std::lock_guard<std::mutex> lk(mu_);
  if (queues_.count(name))
    throw std::invalid_argument("broker: queue already declared: " + name);
  auto q = std::make_unique<Queue>();
  q->name = name;
  q->opts = opts;
  if (opts.recover && !journal_dir_.empty()) recover_locked(*q);
  if (!journal_dir_.empty()) q->journal = JournalWriter(journal_path(name));
  // Recovered messages are re-admitted into the fresh journal so one more
  // replay still sees them; attempt counters start over.
  std::map<std::uint64_t, ReadyEntry> recovered;
  recovered.swap(q->ready);
  q->next_seq = 0;
  auto d = std::make_unique<Queue>();
  d->name = dlq_name(name);
  d->opts = opts;
  d->opts.budget_bytes = SIZE_MAX;
  d->is_dlq = true;
  Queue& qr = *q;
  queues_.emplace(d->name, std::move(d));
  queues_.emplace(name, std::move(q));
  for (auto& [seq, entry] : recovered) {
    entry.attempts_done = 0;
    admit_locked(qr, std::move(entry), nullptr);
  }
}

void Broker::recover_locked(Queue& q) {
  auto path = journal_path(q.name);
  if (!std::filesystem::exists(path)) return;
  auto records = read_journal(path);
  struct Pub {
    Uuid uuid;
    std::vector<std::uint8_t> payload;
    bool settled = false;
  };
  std::vector<Pub> pubs;
  std::unordered_map<Uuid, std::vector<std::size_t>, UuidHash> open;
  for (auto& rec : records) {
    if (rec.kind == JournalKind::Publish) {
      open[rec.uuid].push_back(pubs.size());
      pubs.push_back({rec.uuid, std::move(rec.payload), false});
    } else {
      auto it = open.find(rec.uuid);
      if (it == open.end() || it->second.empty())
        throw std::runtime_error("journal: " + path +
                                 ": settle without matching publish");
      pubs[it->second.front()].settled = true;
      it->second.erase(it->second.begin());
    }
  }
  std::uint64_t seq = 0;
  for (auto& p : pubs) {
    if (p.settled) continue;
    ReadyEntry entry;
    entry.msg.uuid = p.uuid;
    entry.msg.payload = std::make_shared<const std::vector<std::uint8_t>>(
        std::move(p.payload));
    q.ready.emplace(seq++, std::move(entry));
  }
}

bool Broker::has_queue(const std::string& name) const {
  std::lock_guard<std::mutex> lk(mu_);
  return queues_.count(name) != 0;
}

void Broker::publish(const std::string& queue, Message msg,
                     std::function<void()> done) {
  std::lock_guard<std::mutex> lk(mu_);
  Queue& q = queue_at(queue);
  if (!q.is_dlq) {
    if (msg.size() > q.opts.budget_bytes)
      throw std::invalid_argument(
          "broker: message exceeds queue budget on " + queue);
    if (!q.parked.empty() ||
        q.stats.used_bytes + msg.size() > q.opts.budget_bytes) {
      q.parked.push_back({std::move(msg), std::move(done)});
      return;
    }
  }
  ReadyEntry entry;
  entry.msg = std::move(msg);
  admit_locked(q, std::move(entry), std::move(done));
}

void Broker::admit_locked(Queue& q, ReadyEntry entry,
                          std::function<void()> done) {
  entry.admitted_ts = clock_.now();
  std::uint64_t seq = q.next_seq++;
  const auto& msg = entry.msg;
  q.journal.append(JournalKind::Publish, msg.uuid, entry.admitted_ts,
                   msg.payload ? msg.payload->data() : nullptr, msg.size());
  q.stats.used_bytes += msg.size();
  q.stats.max_used_bytes =
      std::max(q.stats.max_used_bytes, q.stats.used_bytes);
  q.stats.published += 1;
  q.ready.emplace(seq, std::move(entry));
  if (done) clock_.post(std::move(done));
  dispatch_locked(q);
}

void Broker::drain_parked_locked(Queue& q) {
  while (!q.parked.empty() &&
         q.stats.used_bytes + q.parked.front().msg.size() <=
             q.opts.budget_bytes) {
    PendingPublish p = std::move(q.parked.front());
    q.parked.pop_front();
    ReadyEntry entry;
    entry.msg = std::move(p.msg);
    admit_locked(q, std::move(entry), std::move(p.done));
  }
}

void Broker::dispatch_locked(Queue& q) {
  while (!q.ready.empty() && !q.consumers.empty()) {
    std::size_t n = q.consumers.size();
    std::size_t pick = n;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t idx = (q.rr_cursor + k) % n;
      if (q.consumers[idx].in_flight < q.consumers[idx].prefetch) {
        pick = idx;
        break;
      }
    }
    if (pick == n) return;
    q.rr_cursor = (pick + 1) % n;
    Consumer& c = q.consumers[pick];
    auto it = q.ready.begin();
    Inflight rec;
    rec.queue = q.name;
    rec.seq = it->first;
    rec.entry = std::move(it->second);
    rec.consumer_id = c.id;
    q.ready.erase(it);
    rec.entry.attempts_done += 1;
    c.in_flight += 1;
    q.stats.inflight += 1;
    Envelope env;
    env.msg = rec.entry.msg;
    env.token = DeliveryToken{next_token_++};
    env.attempt = rec.entry.attempts_done;
    env.redelivered = rec.entry.attempts_done > 1;
    inflight_.emplace(env.token.value, std::move(rec));
    clock_.post([fn = c.fn, env] { fn(env); });
  }
}

std::uint64_t Broker::subscribe(const std::string& queue, int prefetch,
                                ConsumerFn fn) {
  if (prefetch < 1) throw std::invalid_argument("broker: prefetch < 1");
  if (!fn) throw std::invalid_argument("broker: null consumer");
  std::lock_guard<std::mutex> lk(mu_);
  Queue& q = queue_at(queue);
  Consumer c;
  std::uint64_t id = next_consumer_++;
  c.id = id;
  c.prefetch = prefetch;
  c.fn = std::move(fn);
  q.consumers.push_back(std::move(c));
  dispatch_locked(q);
  return id;
}

void Broker::unsubscribe(const std::string& queue,
                         std::uint64_t consumer_id) {
  std::lock_guard<std::mutex> lk(mu_);
  Queue& q = queue_at(queue);
  for (std::size_t i = 0; i < q.consumers.size(); ++i) {
    if (q.consumers[i].id != consumer_id) continue;
    q.consumers.erase(q.consumers.begin() + static_cast<std::ptrdiff_t>(i));
    if (q.rr_cursor > i) --q.rr_cursor;
    if (!q.consumers.empty()) q.rr_cursor %= q.consumers.size();
    return;
  }
  throw std::out_of_range("broker: unknown consumer on " + queue);
}

void Broker::release_consumer_locked(Queue& q, std::uint64_t consumer_id) {
  q.stats.inflight -= 1;
  for (auto& c : q.consumers) {
    if (c.id == consumer_id) {
      c.in_flight -= 1;
      return;
    }
  }
  // Consumer unsubscribed with the delivery still out; nothing to release.
}

void Broker::ack(const DeliveryToken& token) {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = inflight_.find(token.value);
  if (it == inflight_.end())
    throw std::logic_error("broker: unknown or already settled token");
  Inflight rec = std::move(it->second);
  inflight_.erase(it);
  Queue& q = queue_at(rec.queue);
  q.journal.append(JournalKind::Ack, rec.entry.msg.uuid, clock_.now());
  q.stats.used_bytes -= rec.entry.msg.size();
  q.stats.acked += 1;
  release_consumer_locked(q, rec.consumer_id);
  drain_parked_locked(q);
  dispatch_locked(q);
}

void Broker::nack(const DeliveryToken& token) {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = inflight_.find(token.value);
  if (it == inflight_.end())
    throw std::logic_error("broker: unknown or already settled token");
  Inflight rec = std::move(it->second);
  inflight_.erase(it);
  Queue& q = queue_at(rec.queue);
  release_consumer_locked(q, rec.consumer_id);
  if (rec.entry.attempts_done >= q.opts.max_attempts) {
    move_to_dlq_locked(q, std::move(rec.entry));
    drain_parked_locked(q);
  } else {
    DurationMs delay = q.opts.redelivery_base_ms;
    for (int i = 1; i < rec.entry.attempts_done; ++i)
      delay *= q.opts.redelivery_factor;
    q.stats.redeliveries += 1;
    clock_.call_after(delay, [this, name = rec.queue, seq = rec.seq,
                              entry = std::move(rec.entry)]() mutable {
      std::lock_guard<std::mutex> lk(mu_);
      requeue_locked(queue_at(name), seq, std::move(entry));
    });
  }
  dispatch_locked(q);
}

void Broker::requeue_locked(Queue& q, std::uint64_t seq, ReadyEntry entry) {
  q.ready.emplace(seq, std::move(entry));
  dispatch_locked(q);
}

void Broker::dead_letter_inflight(const DeliveryToken& token) {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = inflight_.find(token.value);
  if (it == inflight_.end())
    throw std::logic_error("broker: unknown or already settled token");
  Inflight rec = std::move(it->second);
  inflight_.erase(it);
  Queue& q = queue_at(rec.queue);
  release_consumer_locked(q, rec.consumer_id);
  move_to_dlq_locked(q, std::move(rec.entry));
  drain_parked_locked(q);
  dispatch_locked(q);
}

void Broker::move_to_dlq_locked(Queue& src, ReadyEntry entry) {
  src.journal.append(JournalKind::DeadLetter, entry.msg.uuid, clock_.now());
  src.stats.used_bytes -= entry.msg.size();
  src.stats.dead_lettered += 1;
  if (src.is_dlq) {
    // Terminal queue: an exhausted dead letter has nowhere left to go.
    log_warn("broker: dropping exhausted message on ", src.name);
    return;
  }
  Queue& d = queue_at(dlq_name(src.name));
  entry.attempts_done = 0;
  admit_locked(d, std::move(entry), nullptr);
}

QueueStats Broker::stats(const std::string& queue) const {
  std::lock_guard<std::mutex> lk(mu_);
  const Queue& q = queue_at(queue);
  QueueStats s = q.stats;
  s.depth = q.ready.size();
  return s;
}

void Broker::flush_journals() {
  std::lock_guard<std::mutex> lk(mu_);
  for (auto& [name, q] : queues_) q->journal.flush();
}

}  // namespace lipstream
