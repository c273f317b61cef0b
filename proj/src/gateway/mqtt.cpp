#include "privacycube/gateway/mqtt.hpp"

#include <array>
#include <chrono>

#include <boost/asio.hpp>

namespace privacycube::gateway::mqtt {
namespace {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

void put_u16(std::uint16_t v, std::string& out) {
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v & 0xff));
}

void put_string(std::string_view s, std::string& out) {
  if (s.size() > 0xffff) throw ProtocolError("string field longer than 65535 bytes");
  put_u16(static_cast<std::uint16_t>(s.size()), out);
  out.append(s);
}

std::string frame(PacketType type, std::uint8_t flags, std::string_view body) {
  std::string out;
  out.push_back(static_cast<char>((static_cast<std::uint8_t>(type) << 4) | (flags & 0x0f)));
  encode_remaining_length(body.size(), out);
  out.append(body);
  return out;
}

std::uint16_t get_u16(std::string_view body, std::size_t at) {
  if (at + 2 > body.size()) throw ProtocolError("packet truncated");
  return static_cast<std::uint16_t>((static_cast<std::uint8_t>(body[at]) << 8) |
                                    static_cast<std::uint8_t>(body[at + 1]));
}

}  // namespace

void encode_remaining_length(std::size_t value, std::string& out) {
  if (value > kMaxRemainingLength) throw ProtocolError("remaining length too large");
  do {
    auto byte = static_cast<std::uint8_t>(value % 128);
    value /= 128;
    if (value > 0) byte |= 0x80;
    out.push_back(static_cast<char>(byte));
  } while (value > 0);
}

std::optional<DecodedLength> decode_remaining_length(std::string_view bytes) {
  std::size_t value = 0;
  std::size_t multiplier = 1;
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    if (i == 4) throw ProtocolError("remaining length longer than 4 bytes");
    const auto byte = static_cast<std::uint8_t>(bytes[i]);
    value += (byte & 0x7f) * multiplier;
    if ((byte & 0x80) == 0) return DecodedLength{value, i + 1};
    multiplier *= 128;
  }
  if (bytes.size() >= 4) throw ProtocolError("remaining length longer than 4 bytes");
  return std::nullopt;
}

std::string encode_connect(std::string_view client_id, std::uint16_t keepalive_seconds) {
  std::string body;
  put_string("MQTT", body);
  body.push_back(4);     // protocol level 3.1.1
  body.push_back(0x02);  // clean session
  put_u16(keepalive_seconds, body);
  put_string(client_id, body);
  return frame(PacketType::Connect, 0, body);
}

std::string encode_publish(std::string_view topic, std::string_view payload) {
  std::string body;
  put_string(topic, body);
  body.append(payload);
  return frame(PacketType::Publish, 0, body);
}

std::string encode_subscribe(std::uint16_t packet_id, std::string_view topic_filter) {
  std::string body;
  put_u16(packet_id, body);
  put_string(topic_filter, body);
  body.push_back(0);  // requested QoS
  return frame(PacketType::Subscribe, 0x02, body);
}

std::string encode_pingreq() { return frame(PacketType::Pingreq, 0, {}); }

std::string encode_disconnect() { return frame(PacketType::Disconnect, 0, {}); }

std::optional<Packet> FrameReader::next() {
  if (buffer_.empty()) return std::nullopt;
  const auto len = decode_remaining_length(std::string_view(buffer_).substr(1));
  if (!len) return std::nullopt;
  const std::size_t header = 1 + len->consumed;
  if (buffer_.size() < header + len->value) return std::nullopt;

  const auto first = static_cast<std::uint8_t>(buffer_[0]);
  Packet p;
  p.type = static_cast<PacketType>(first >> 4);
  p.flags = first & 0x0f;
  p.body = buffer_.substr(header, len->value);
  buffer_.erase(0, header + len->value);
  return p;
}

PublishMessage parse_publish(const Packet& packet) {
  if (packet.type != PacketType::Publish) throw ProtocolError("not a PUBLISH packet");
  const std::string_view body = packet.body;
  const auto topic_len = get_u16(body, 0);
  std::size_t at = 2 + topic_len;
  if (at > body.size()) throw ProtocolError("PUBLISH topic truncated");
  PublishMessage m;
  m.topic = std::string(body.substr(2, topic_len));
  const int qos = (packet.flags >> 1) & 0x03;
  if (qos == 3) throw ProtocolError("PUBLISH with QoS 3");
  if (qos > 0) {
    get_u16(body, at);
    at += 2;
  }
  m.payload = std::string(body.substr(at));
  return m;
}

std::uint8_t parse_connack(const Packet& packet) {
  if (packet.type != PacketType::Connack || packet.body.size() != 2) {
    throw ProtocolError("expected CONNACK");
  }
  return static_cast<std::uint8_t>(packet.body[1]);
}

struct Client::Impl {
  asio::io_context io;
  tcp::socket socket{io};
  FrameReader frames;
};

Client::Client(std::string host, std::uint16_t port, std::string client_id,
               std::uint16_t keepalive_seconds)
    : host_(std::move(host)),
      port_(port),
      client_id_(std::move(client_id)),
      keepalive_(keepalive_seconds),
      impl_(std::make_unique<Impl>()) {}

Client::~Client() { close(); }

void Client::connect() {
  tcp::resolver resolver(impl_->io);
  asio::connect(impl_->socket, resolver.resolve(host_, std::to_string(port_)));
  send(encode_connect(client_id_, keepalive_));

  std::array<char, 512> chunk{};
  for (;;) {
    if (auto p = impl_->frames.next()) {
      if (const auto rc = parse_connack(*p); rc != 0) {
        throw ProtocolError("broker refused connection, return code " + std::to_string(rc));
      }
      break;
    }
    const auto n = impl_->socket.read_some(asio::buffer(chunk));
    impl_->frames.append(std::string_view(chunk.data(), n));
  }

  connected_.store(true);
  reader_ = std::thread([this] { read_loop(); });
  if (keepalive_ > 0) pinger_ = std::thread([this] { ping_loop(); });
}

void Client::subscribe(const std::string& topic, Handler handler) {
  {
    std::lock_guard lock(handlers_mutex_);
    handlers_[topic] = std::move(handler);
  }
  std::uint16_t id = 0;
  {
    std::lock_guard lock(write_mutex_);
    id = next_packet_id_++;
    if (next_packet_id_ == 0) next_packet_id_ = 1;
  }
  send(encode_subscribe(id, topic));
}

void Client::publish(std::string_view topic, std::string_view payload) {
  send(encode_publish(topic, payload));
}

void Client::send(const std::string& bytes) {
  std::lock_guard lock(write_mutex_);
  asio::write(impl_->socket, asio::buffer(bytes));
}

void Client::read_loop() {
  std::array<char, 4096> chunk{};
  boost::system::error_code ec;
  while (connected_.load()) {
    const auto n = impl_->socket.read_some(asio::buffer(chunk), ec);
    if (ec) break;
    impl_->frames.append(std::string_view(chunk.data(), n));
    try {
      while (auto p = impl_->frames.next()) {
        if (p->type != PacketType::Publish) continue;  // SUBACK, PINGRESP
        auto m = parse_publish(*p);
        Handler h;
        {
          std::lock_guard lock(handlers_mutex_);
          if (auto it = handlers_.find(m.topic); it != handlers_.end()) h = it->second;
        }
        if (h) h(m.topic, m.payload);
      }
    } catch (const ProtocolError&) {
      break;
    }
  }
  connected_.store(false);
}

void Client::ping_loop() {
  const auto period = std::chrono::seconds(keepalive_) / 2;
  std::unique_lock lock(ping_mutex_);
  while (!ping_wake_.wait_for(lock, period, [this] { return closing_; })) {
    try {
      send(encode_pingreq());
    } catch (const boost::system::system_error&) {
      return;
    }
  }
}

void Client::close() {
  {
    std::lock_guard lock(ping_mutex_);
    if (closing_) return;
    closing_ = true;
  }
  ping_wake_.notify_all();
  if (pinger_.joinable()) pinger_.join();

  boost::system::error_code ec;
  if (connected_.load()) {
    std::lock_guard lock(write_mutex_);
    const auto bye = encode_disconnect();
    asio::write(impl_->socket, asio::buffer(bye), ec);
  }
  connected_.store(false);
  impl_->socket.shutdown(tcp::socket::shutdown_both, ec);
  if (reader_.joinable()) reader_.join();
  impl_->socket.close(ec);
}

}  // namespace privacycube::gateway::mqtt
