#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

// Minimal MQTT 3.1.1 client: clean session, QoS 0 only. Enough to mirror the
// gateway topics onto an external broker.
namespace privacycube::gateway::mqtt {

enum class PacketType : std::uint8_t {
  Connect = 1,
  Connack = 2,
  Publish = 3,
  Puback = 4,
  Subscribe = 8,
  Suback = 9,
  Pingreq = 12,
  Pingresp = 13,
  Disconnect = 14,
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxRemainingLength = 268'435'455;

// Variable-length "remaining length" field, 1..4 bytes.
void encode_remaining_length(std::size_t value, std::string& out);

struct DecodedLength {
  std::size_t value = 0;
  std::size_t consumed = 0;
};

// nullopt while more bytes are needed; throws ProtocolError past 4 bytes.
std::optional<DecodedLength> decode_remaining_length(std::string_view bytes);

std::string encode_connect(std::string_view client_id, std::uint16_t keepalive_seconds);
std::string encode_publish(std::string_view topic, std::string_view payload);
std::string encode_subscribe(std::uint16_t packet_id, std::string_view topic_filter);
std::string encode_pingreq();
std::string encode_disconnect();

struct Packet {
  PacketType type = PacketType::Connect;
  std::uint8_t flags = 0;
  std::string body;
};

// Splits a byte stream into packets.
class FrameReader {
 public:
  void append(std::string_view bytes) { buffer_.append(bytes); }
  // Throws ProtocolError on a malformed fixed header.
  std::optional<Packet> next();

 private:
  std::string buffer_;
};

struct PublishMessage {
  std::string topic;
  std::string payload;
};

PublishMessage parse_publish(const Packet& packet);
// CONNACK return code (0 = accepted).
std::uint8_t parse_connack(const Packet& packet);

// Blocking client. Inbound PUBLISH handlers run on the client's reader thread.
class Client {
 public:
  using Handler = std::function<void(const std::string& topic, const std::string& payload)>;

  Client(std::string host, std::uint16_t port, std::string client_id,
         std::uint16_t keepalive_seconds = 60);
  ~Client();

  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  // Connects and waits for CONNACK. Throws ProtocolError or
  // boost::system::system_error.
  void connect();
  void subscribe(const std::string& topic, Handler handler);
  // Thread-safe.
  void publish(std::string_view topic, std::string_view payload);
  void close();

  bool connected() const { return connected_.load(); }

 private:
  struct Impl;

  void read_loop();
  void ping_loop();
  void send(const std::string& bytes);

  std::string host_;
  std::uint16_t port_;
  std::string client_id_;
  std::uint16_t keepalive_;
  std::unique_ptr<Impl> impl_;
  std::mutex write_mutex_;
  std::mutex handlers_mutex_;
  std::map<std::string, Handler> handlers_;
  std::uint16_t next_packet_id_ = 1;
  std::atomic<bool> connected_{false};
  std::mutex ping_mutex_;
  std::condition_variable ping_wake_;
  bool closing_ = false;
  std::thread reader_;
  std::thread pinger_;
};

}  // namespace privacycube::gateway::mqtt
