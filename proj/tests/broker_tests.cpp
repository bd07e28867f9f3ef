#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "doctest.h"
#include "lipstream/broker.hpp"
#include "lipstream/rng.hpp"
#include "test_util.hpp"

using namespace lipstream;

namespace {

Message make_msg(std::uint64_t seed, std::uint64_t i, std::size_t bytes) {
  Message m;
  m.uuid = derive_uuid(seed, 7, i);
  auto payload = std::make_shared<std::vector<std::uint8_t>>(bytes);
  std::uint64_t state = mix_u64(seed, i);
  for (auto& b : *payload)
    b = static_cast<std::uint8_t>(splitmix64(state) & 0xff);
  m.payload = std::move(payload);
  return m;
}

}  // namespace

TEST_SUITE("broker") {

TEST_CASE("prefetch 2 stalls the third delivery until an ack") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");
  std::vector<Envelope> got;
  broker.subscribe("jobs", 2, [&](const Envelope& env) {
    got.push_back(env);
  });
  for (int i = 0; i < 3; ++i) broker.publish("jobs", make_msg(1, i, 8));
  clk.run_until_idle();
  CHECK(got.size() == 2);
  CHECK(broker.stats("jobs").inflight == 2);
  CHECK(broker.stats("jobs").depth == 1);
  broker.ack(got[0].token);
  clk.run_until_idle();
  REQUIRE(got.size() == 3);
  CHECK(got[2].msg.uuid == derive_uuid(1, 7, 2));
  broker.ack(got[1].token);
  broker.ack(got[2].token);
  clk.run_until_idle();
  CHECK(broker.stats("jobs").acked == 3);
  CHECK(broker.stats("jobs").inflight == 0);
}

TEST_CASE("redelivery backs off 100, 200, then 400 ms") {
  MediaClock clk;
  Broker broker(clk);
  QueueOptions opts;
  opts.max_attempts = 5;
  broker.declare_queue("jobs", opts);
  std::vector<Timestamp> delivery_times;
  std::vector<int> attempts;
  broker.subscribe("jobs", 1, [&](const Envelope& env) {
    delivery_times.push_back(clk.now());
    attempts.push_back(env.attempt);
    if (delivery_times.size() < 4)
      broker.nack(env.token);
    else
      broker.ack(env.token);
  });
  broker.publish("jobs", make_msg(2, 0, 8));
  clk.run_until_idle();
  CHECK(delivery_times == std::vector<Timestamp>{0, 100, 300, 700});
  CHECK(attempts == std::vector<int>{1, 2, 3, 4});
  CHECK(broker.stats("jobs").redeliveries == 3);
  CHECK(broker.stats("jobs").acked == 1);
}

TEST_CASE("a message dead-letters after exactly three attempts") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");  // default max_attempts = 3
  int deliveries = 0;
  broker.subscribe("jobs", 1, [&](const Envelope& env) {
    ++deliveries;
    broker.nack(env.token);
  });
  Message m = make_msg(3, 0, 16);
  Uuid uuid = m.uuid;
  broker.publish("jobs", std::move(m));
  clk.run_until_idle();
  CHECK(deliveries == 3);
  CHECK(broker.stats("jobs").dead_lettered == 1);
  CHECK(broker.stats("jobs").inflight == 0);
  CHECK(broker.stats("jobs.dlq").depth == 1);

  // The dead letter keeps its identity and payload.
  std::vector<Envelope> dlq;
  broker.subscribe("jobs.dlq", 1, [&](const Envelope& env) {
    dlq.push_back(env);
    broker.ack(env.token);
  });
  clk.run_until_idle();
  REQUIRE(dlq.size() == 1);
  CHECK(dlq[0].msg.uuid == uuid);
  CHECK(dlq[0].msg.size() == 16);
}

TEST_CASE("dead_letter_inflight settles without retries") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");
  int deliveries = 0;
  broker.subscribe("jobs", 1, [&](const Envelope& env) {
    ++deliveries;
    broker.dead_letter_inflight(env.token);
  });
  broker.publish("jobs", make_msg(4, 0, 8));
  clk.run_until_idle();
  CHECK(deliveries == 1);
  CHECK(broker.stats("jobs").dead_lettered == 1);
  CHECK(broker.stats("jobs").redeliveries == 0);
  CHECK(broker.stats("jobs.dlq").depth == 1);
}

TEST_CASE("settling a delivery twice throws") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");
  DeliveryToken token;
  broker.subscribe("jobs", 1, [&](const Envelope& env) { token = env.token; });
  broker.publish("jobs", make_msg(5, 0, 8));
  clk.run_until_idle();
  broker.ack(token);
  CHECK_THROWS(broker.ack(token));
  CHECK_THROWS(broker.nack(token));
  CHECK_THROWS(broker.dead_letter_inflight(token));
}

TEST_CASE("publishing over the whole budget throws") {
  MediaClock clk;
  Broker broker(clk);
  QueueOptions opts;
  opts.budget_bytes = 100;
  broker.declare_queue("jobs", opts);
  CHECK_THROWS(broker.publish("jobs", make_msg(6, 0, 101)));
  broker.publish("jobs", make_msg(6, 1, 100));  // exactly at budget is fine
  clk.run_until_idle();
  CHECK(broker.stats("jobs").published == 1);
}

TEST_CASE("byte budget parks publishers and admits them in order") {
  MediaClock clk;
  Broker broker(clk);
  QueueOptions opts;
  opts.budget_bytes = 1000;
  broker.declare_queue("jobs", opts);

  std::vector<int> admitted;
  bool over_budget_seen = false;
  auto probe = [&] {
    over_budget_seen =
        over_budget_seen || broker.stats("jobs").used_bytes > 1000;
  };
  broker.subscribe("jobs", 1, [&](const Envelope& env) {
    probe();
    clk.call_after(10, [&, token = env.token] {
      broker.ack(token);
      probe();
    });
  });
  for (int i = 0; i < 10; ++i)
    broker.publish("jobs", make_msg(7, i, 300), [&, i] {
      admitted.push_back(i);
      probe();
    });
  clk.run_until_idle();
  CHECK(admitted == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK_FALSE(over_budget_seen);
  CHECK(broker.stats("jobs").acked == 10);
  CHECK(broker.stats("jobs").max_used_bytes <= 1000);
  CHECK(broker.stats("jobs").used_bytes == 0);
}

TEST_CASE("round-robin dispatch across consumers") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");
  std::vector<int> consumer_for_msg;
  for (int c = 0; c < 2; ++c)
    broker.subscribe("jobs", 4, [&, c](const Envelope& env) {
      consumer_for_msg.push_back(c);
      broker.ack(env.token);
    });
  for (int i = 0; i < 6; ++i) broker.publish("jobs", make_msg(8, i, 8));
  clk.run_until_idle();
  REQUIRE(consumer_for_msg.size() == 6);
  int first = 0, second = 0;
  for (int c : consumer_for_msg) (c == 0 ? first : second)++;
  CHECK(first == 3);
  CHECK(second == 3);
}

TEST_CASE("unsubscribe stops delivery; messages wait for the next consumer") {
  MediaClock clk;
  Broker broker(clk);
  broker.declare_queue("jobs");
  auto id = broker.subscribe("jobs", 1, [&](const Envelope& env) {
    broker.ack(env.token);
  });
  broker.publish("jobs", make_msg(9, 0, 8));
  clk.run_until_idle();
  CHECK(broker.stats("jobs").acked == 1);
  broker.unsubscribe("jobs", id);
  broker.publish("jobs", make_msg(9, 1, 8));
  clk.run_until_idle();
  CHECK(broker.stats("jobs").depth == 1);
  int late = 0;
  broker.subscribe("jobs", 1, [&](const Envelope& env) {
    ++late;
    broker.ack(env.token);
  });
  clk.run_until_idle();
  CHECK(late == 1);
  CHECK(broker.stats("jobs").depth == 0);
}

TEST_CASE("journal recovery re-admits exactly the unsettled messages") {
  MediaClock clk;
  TempDir tmp("journal");
  std::vector<Uuid> acked_ids;
  std::vector<Uuid> all_ids;
  {
    Broker broker(clk, tmp.path.string());
    broker.declare_queue("jobs");
    std::vector<Envelope> held;
    broker.subscribe("jobs", 5, [&](const Envelope& env) {
      held.push_back(env);
    });
    for (int i = 0; i < 5; ++i) {
      Message m = make_msg(10, i, 24);
      all_ids.push_back(m.uuid);
      broker.publish("jobs", std::move(m));
    }
    clk.run_until_idle();
    REQUIRE(held.size() == 5);
    broker.ack(held[1].token);
    broker.ack(held[3].token);
    acked_ids = {held[1].msg.uuid, held[3].msg.uuid};
    clk.run_until_idle();
    broker.flush_journals();
  }

  Broker broker(clk, tmp.path.string());
  QueueOptions opts;
  opts.recover = true;
  broker.declare_queue("jobs", opts);
  std::vector<Envelope> recovered;
  broker.subscribe("jobs", 8, [&](const Envelope& env) {
    recovered.push_back(env);
    broker.ack(env.token);
  });
  clk.run_until_idle();
  REQUIRE(recovered.size() == 3);
  for (const auto& env : recovered) {
    CHECK(env.attempt == 1);  // attempts reset on re-admission
    CHECK(env.msg.size() == 24);
    for (const auto& a : acked_ids) CHECK(env.msg.uuid != a);
  }
  // Recovery preserves publish order of the survivors.
  CHECK(recovered[0].msg.uuid == all_ids[0]);
  CHECK(recovered[1].msg.uuid == all_ids[2]);
  CHECK(recovered[2].msg.uuid == all_ids[4]);
}

TEST_CASE("exactly-once settlement across 10k randomized operations") {
  MediaClock clk;
  TempDir tmp("xo");
  Broker broker(clk, tmp.path.string());
  QueueOptions opts;
  opts.budget_bytes = 1 << 20;
  broker.declare_queue("jobs", opts);

  const int kMessages = 10000;
  std::unordered_map<Uuid, int, UuidHash> settled;
  std::unordered_map<Uuid, int, UuidHash> deliveries;
  bool over_budget = false;

  broker.subscribe("jobs", 4, [&](const Envelope& env) {
    deliveries[env.msg.uuid] += 1;
    CHECK(env.attempt == deliveries[env.msg.uuid]);
    over_budget = over_budget || broker.stats("jobs").used_bytes > (1u << 20);
    std::uint64_t h = mix_u64(mix_uuid(0xfa11, env.msg.uuid),
                              std::uint64_t(env.attempt));
    if (u64_to_unit(h) < 0.25)
      broker.nack(env.token);  // third failure dead-letters
    else
      settled[env.msg.uuid] += 1, broker.ack(env.token);
  });
  broker.subscribe("jobs.dlq", 64, [&](const Envelope& env) {
    settled[env.msg.uuid] += 1;
    broker.ack(env.token);
  });

  std::uint64_t state = 4242;
  for (int i = 0; i < kMessages; ++i) {
    Timestamp at = Timestamp(splitmix64(state) % 5000);
    std::size_t bytes = 1 + std::size_t(splitmix64(state) % 64);
    clk.call_at(at, [&broker, msg = make_msg(11, std::uint64_t(i), bytes)]()
                    mutable { broker.publish("jobs", std::move(msg)); });
  }
  clk.run_until_idle();

  auto st = broker.stats("jobs");
  CHECK(st.published == kMessages);
  CHECK(st.acked + st.dead_lettered == kMessages);
  CHECK(st.dead_lettered > 0);  // the failure path actually ran
  CHECK(st.inflight == 0);
  CHECK(st.used_bytes == 0);
  CHECK_FALSE(over_budget);
  CHECK(settled.size() == kMessages);
  int exactly_once = 0;
  for (const auto& [uuid, n] : settled) {
    if (n == 1) ++exactly_once;
    CHECK(deliveries[uuid] <= 3);
  }
  CHECK(exactly_once == kMessages);

  // The journal agrees: replaying publishes minus settlements leaves nothing.
  broker.flush_journals();
  auto records = read_journal(tmp.file("jobs.journal"));
  std::unordered_map<Uuid, int, UuidHash> live;
  for (const auto& r : records) {
    if (r.kind == JournalKind::Publish)
      live[r.uuid] += 1;
    else
      live[r.uuid] -= 1;
  }
  for (const auto& [uuid, n] : live) CHECK(n == 0);
}

TEST_CASE("publishing to an undeclared queue throws") {
  MediaClock clk;
  Broker broker(clk);
  CHECK_THROWS(broker.publish("nope", make_msg(12, 0, 8)));
  CHECK_THROWS(broker.subscribe("nope", 1, [](const Envelope&) {}));
  CHECK_THROWS(broker.stats("nope"));
  CHECK_FALSE(broker.has_queue("nope"));
}

}  // TEST_SUITE
