#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <thread>

#include <json.hpp>

#include "privacycube/gateway/broker.hpp"
#include "privacycube/policy/types.hpp"

namespace privacycube::gateway {

struct ListenAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port
};

// Envelope sent to and accepted from UI clients.
std::string make_envelope(std::string_view topic, const std::string& payload, std::uint64_t seq);

// WebSocket bridge for browser UIs. Forwards every message on the state and
// notification topics as {"topic","payload","seq"}; a new client first gets
// the latest state. Inbound envelopes on the taps topic are published to the
// broker. {"select_room": "<RoomId>"} switches the cube's page.
class StateStreamServer {
 public:
  using RoomHandler = std::function<void(policy::RoomId)>;

  StateStreamServer(Broker& broker, ListenAddress listen, RoomHandler on_room = {});
  ~StateStreamServer();

  StateStreamServer(const StateStreamServer&) = delete;
  StateStreamServer& operator=(const StateStreamServer&) = delete;

  // Binds and starts serving on a background thread. Throws
  // boost::system::system_error when the address cannot be bound.
  void start();
  void stop();

  std::uint16_t port() const { return bound_port_; }
  std::uint64_t rejected_messages() const;

 private:
  struct Impl;
  class Session;

  void accept();
  void forward(std::string_view topic, const std::string& payload);
  void handle_inbound(const std::string& text);

  Broker& broker_;
  ListenAddress listen_;
  RoomHandler on_room_;
  std::unique_ptr<Impl> impl_;
  std::uint16_t bound_port_ = 0;
  Broker::Subscription state_sub_;
  Broker::Subscription notify_sub_;
  std::thread worker_;
};

}  // namespace privacycube::gateway
