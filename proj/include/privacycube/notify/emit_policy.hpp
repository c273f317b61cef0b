#pragma once

#include <string>
#include <unordered_map>

namespace privacycube::notify {

inline constexpr double kDefaultEmitWindowSeconds = 60.0;

// Per-device debounce: at most one notification per device per window.
class EmitPolicy {
 public:
  explicit EmitPolicy(double window_seconds = kDefaultEmitWindowSeconds)
      : window_(window_seconds) {}

  // True iff the device has never emitted or now - last_emit >= window.
  // A true result records `now` as the device's last emit.
  bool should_emit(const std::string& device_id, double now) {
    auto [it, first] = last_emit_.try_emplace(device_id, now);
    if (first) return true;
    if (now - it->second >= window_) {
      it->second = now;
      return true;
    }
    return false;
  }

  double window() const { return window_; }

 private:
  double window_;
  std::unordered_map<std::string, double> last_emit_;
};

}  // namespace privacycube::notify
