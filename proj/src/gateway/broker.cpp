#include "privacycube/gateway/broker.hpp"

#include <json.hpp>

#include "privacycube/cube/cube_state.hpp"
#include "privacycube/notify/notification.hpp"

namespace privacycube::gateway {

bool is_known_topic(std::string_view topic) {
  return topic == notify::kNotificationsTopic || topic == cube::kStateTopic ||
         topic == cube::kTapsTopic;
}

void validate_payload(std::string_view topic, std::string_view payload) {
  if (!is_known_topic(topic)) throw TopicError("unknown topic " + std::string(topic));
  try {
    if (topic == notify::kNotificationsTopic) {
      notify::decode_notification(payload);
    } else if (topic == cube::kTapsTopic) {
      cube::tap_from_json(nlohmann::json::parse(payload));
    } else {
      const auto j = nlohmann::json::parse(payload);
      if (!j.is_object() || !j.contains("faces") || !j.contains("rooms") ||
          !j.contains("selected_room")) {
        throw std::invalid_argument("snapshot lacks faces/rooms/selected_room");
      }
    }
  } catch (const std::exception& e) {
    throw TopicError("invalid payload on " + std::string(topic) + ": " + e.what());
  }
}

Broker::Subscription& Broker::Subscription::operator=(Subscription&& other) noexcept {
  if (this != &other) {
    reset();
    broker_ = std::exchange(other.broker_, nullptr);
    id_ = std::exchange(other.id_, 0);
  }
  return *this;
}

void Broker::Subscription::reset() {
  if (broker_ != nullptr) broker_->unsubscribe(id_);
  broker_ = nullptr;
}

Broker::Subscription Broker::subscribe(std::string_view topic, Handler handler) {
  if (!is_known_topic(topic)) throw TopicError("unknown topic " + std::string(topic));
  std::lock_guard lock(mutex_);
  const auto id = next_id_++;
  subscribers_.emplace(id, Entry{std::string(topic),
                                 std::make_shared<const Handler>(std::move(handler))});
  return Subscription(this, id);
}

void Broker::unsubscribe(std::uint64_t id) {
  std::lock_guard lock(mutex_);
  subscribers_.erase(id);
}

void Broker::publish(std::string_view topic, const std::string& payload) {
  validate_payload(topic, payload);
  std::vector<std::shared_ptr<const Handler>> targets;
  {
    std::lock_guard lock(mutex_);
    ++published_;
    for (const auto& [id, entry] : subscribers_) {
      if (entry.topic == topic) targets.push_back(entry.handler);
    }
  }
  for (const auto& h : targets) (*h)(topic, payload);
}

std::uint64_t Broker::published_count() const {
  std::lock_guard lock(mutex_);
  return published_;
}

}  // namespace privacycube::gateway
