#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace privacycube::gateway {

class TopicError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The only topics the system uses.
bool is_known_topic(std::string_view topic);

// Throws TopicError when the payload does not match the topic's schema.
void validate_payload(std::string_view topic, std::string_view payload);

// In-process pub/sub. Handlers run synchronously on the publishing thread;
// slow subscribers should hand off to their own executor.
class Broker {
 public:
  using Handler = std::function<void(std::string_view topic, const std::string& payload)>;

  class Subscription {
   public:
    Subscription() = default;
    Subscription(Subscription&& other) noexcept { *this = std::move(other); }
    Subscription& operator=(Subscription&& other) noexcept;
    ~Subscription() { reset(); }

    void reset();

   private:
    friend class Broker;
    Subscription(Broker* broker, std::uint64_t id) : broker_(broker), id_(id) {}

    Broker* broker_ = nullptr;
    std::uint64_t id_ = 0;
  };

  Subscription subscribe(std::string_view topic, Handler handler);

  // Validates topic and payload, then fans out. Throws TopicError.
  void publish(std::string_view topic, const std::string& payload);

  std::uint64_t published_count() const;

 private:
  void unsubscribe(std::uint64_t id);

  struct Entry {
    std::string topic;
    std::shared_ptr<const Handler> handler;
  };

  mutable std::mutex mutex_;
  std::map<std::uint64_t, Entry> subscribers_;
  std::uint64_t next_id_ = 1;
  std::uint64_t published_ = 0;
};

}  // namespace privacycube::gateway
