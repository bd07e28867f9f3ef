#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "lipstream/broker.hpp"
#include "lipstream/stage.hpp"

namespace lipstream {

struct WorkerStats {
  std::int64_t processed = 0;
  std::int64_t failed = 0;
  DurationMs busy_ms = 0;
};

// One model replica: consumes its input queue, transforms, charges the
// profile's service time on the virtual clock, then publishes downstream.
// The upstream delivery is acked only after the downstream queue admits the
// result, so a full queue backpressures through the chain.
class StageWorker {
 public:
  struct Result {
    Message out;
    DurationMs media_ms = 0;  // what the service charge is billed on
  };
  // Runs on delivery; a throw nacks the message.
  using StageFn = std::function<Result(const Envelope&)>;

  StageWorker(MediaClock& clock, Broker& broker, std::string in_queue,
              std::string out_queue, StageProfile profile, StageFn fn,
              int prefetch = 1);

  StageWorker(const StageWorker&) = delete;
  StageWorker& operator=(const StageWorker&) = delete;

  const WorkerStats& stats() const { return stats_; }
  const StageProfile& profile() const { return profile_; }

 private:
  void on_delivery(const Envelope& env);

  MediaClock& clock_;
  Broker& broker_;
  std::string out_queue_;
  StageProfile profile_;
  StageFn fn_;
  WorkerStats stats_;
};

}  // namespace lipstream
