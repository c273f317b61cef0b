#pragma once

#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <mutex>

#include "privacycube/gateway/config.hpp"
#include "privacycube/gateway/pipeline.hpp"

namespace privacycube::gateway {

enum ExitCode : int {
  kExitOk = 0,
  kExitDiverged = 1,
  kExitConfig = 2,
  kExitInput = 3,
};

// Set once to ask a running gateway to shut down.
class StopSignal {
 public:
  void request() {
    {
      std::lock_guard lock(mutex_);
      requested_ = true;
    }
    cv_.notify_all();
  }

  bool requested() const {
    std::lock_guard lock(mutex_);
    return requested_;
  }

  // True when stop was requested before the deadline.
  template <class Rep, class Period>
  bool wait_for(std::chrono::duration<Rep, Period> d) const {
    std::unique_lock lock(mutex_);
    return cv_.wait_for(lock, d, [this] { return requested_; });
  }

 private:
  mutable std::mutex mutex_;
  mutable std::condition_variable cv_;
  bool requested_ = false;
};

struct RunReport {
  int exit_code = kExitOk;
  std::string diagnostic;  // set for non-zero exits
  std::filesystem::path run_dir;
  PipelineStats stats;
  std::string final_snapshot;
  std::uint16_t listen_port = 0;
};

struct RunHooks {
  // Called once the state stream (if any) is serving, before ingestion starts.
  std::function<void(const RunReport&)> on_ready;
};

// Runs the gateway until the source is exhausted (file modes, unpaced
// simulation) or `stop` is requested. Startup failures are reported through
// the exit code and diagnostic; nothing is thrown.
RunReport run_gateway(const GatewayConfig& config, const StopSignal& stop, RunHooks hooks = {});

}  // namespace privacycube::gateway
