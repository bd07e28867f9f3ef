#include "lipstream/worker.hpp"

#include "lipstream/log.hpp"

namespace lipstream {

StageWorker::StageWorker(MediaClock& clock, Broker& broker,
                         std::string in_queue, std::string out_queue,
                         StageProfile profile, StageFn fn, int prefetch)
    : clock_(clock),
      broker_(broker),
      out_queue_(std::move(out_queue)),
      profile_(std::move(profile)),
      fn_(std::move(fn)) {
  broker_.subscribe(in_queue, prefetch,
                    [this](const Envelope& env) { on_delivery(env); });
}

void StageWorker::on_delivery(const Envelope& env) {
  Result r;
  try {
    r = fn_(env);
  } catch (const std::exception& e) {
    stats_.failed += 1;
    log_warn("worker ", profile_.name, ": ", e.what());
    broker_.nack(env.token);
    return;
  }
  DurationMs svc = service_ms(profile_, r.media_ms, env.msg.uuid);
  stats_.busy_ms += svc;
  stats_.processed += 1;
  clock_.call_after(svc, [this, out = std::move(r.out), token = env.token] {
    broker_.publish(out_queue_, out,
                    [this, token] { broker_.ack(token); });
  });
}

}  // namespace lipstream
