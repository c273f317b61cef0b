#include "privacycube/gateway/state_stream.hpp"

#include <atomic>
#include <deque>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "privacycube/cube/cube_state.hpp"
#include "privacycube/notify/notification.hpp"

namespace privacycube::gateway {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

std::string make_envelope(std::string_view topic, const std::string& payload, std::uint64_t seq) {
  return json{{"topic", topic}, {"payload", json::parse(payload)}, {"seq", seq}}.dump();
}

struct StateStreamServer::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  // Touched only on the io thread. Includes sessions still handshaking.
  std::set<std::shared_ptr<Session>> sessions;
  std::shared_ptr<const std::string> latest_state;
  std::uint64_t seq = 0;
  std::atomic<std::uint64_t> rejected{0};
};

class StateStreamServer::Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, StateStreamServer& server)
      : ws_(std::move(socket)), server_(server) {}

  void start() {
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      auto& impl = *self->server_.impl_;
      if (ec) {
        impl.sessions.erase(self);
        return;
      }
      self->open_ = true;
      if (impl.latest_state) self->send(impl.latest_state);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> message) {
    queue_.push_back(std::move(message));
    if (queue_.size() == 1) write();
  }

  bool is_open() const { return open_; }

  void close() {
    beast::error_code ec;
    ws_.next_layer().shutdown(tcp::socket::shutdown_both, ec);
    ws_.next_layer().close(ec);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->server_.impl_->sessions.erase(self);
        return;
      }
      const auto text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->server_.handle_inbound(text);
      self->read();
    });
  }

  void write() {
    ws_.text(true);
    ws_.async_write(asio::buffer(*queue_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      if (ec) {
                        self->server_.impl_->sessions.erase(self);
                        return;
                      }
                      self->queue_.pop_front();
                      if (!self->queue_.empty()) self->write();
                    });
  }

  websocket::stream<tcp::socket> ws_;
  StateStreamServer& server_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  bool open_ = false;
};

StateStreamServer::StateStreamServer(Broker& broker, ListenAddress listen, RoomHandler on_room)
    : broker_(broker),
      listen_(std::move(listen)),
      on_room_(std::move(on_room)),
      impl_(std::make_unique<Impl>()) {}

StateStreamServer::~StateStreamServer() { stop(); }

void StateStreamServer::start() {
  const tcp::endpoint endpoint(asio::ip::make_address(listen_.host), listen_.port);
  auto& acceptor = impl_->acceptor;
  acceptor.open(endpoint.protocol());
  acceptor.set_option(asio::socket_base::reuse_address(true));
  acceptor.bind(endpoint);
  acceptor.listen();
  bound_port_ = acceptor.local_endpoint().port();

  state_sub_ = broker_.subscribe(cube::kStateTopic, [this](std::string_view topic, const std::string& p) {
    forward(topic, p);
  });
  notify_sub_ = broker_.subscribe(notify::kNotificationsTopic,
                                  [this](std::string_view topic, const std::string& p) {
                                    forward(topic, p);
                                  });

  accept();
  worker_ = std::thread([this] { impl_->io.run(); });
}

void StateStreamServer::stop() {
  if (!worker_.joinable()) return;
  state_sub_.reset();
  notify_sub_.reset();
  asio::post(impl_->io, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    for (const auto& s : impl_->sessions) s->close();
  });
  // Pending handlers finish with errors once the sockets are closed.
  worker_.join();
  impl_->sessions.clear();
}

void StateStreamServer::accept() {
  impl_->acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    auto session = std::make_shared<Session>(std::move(socket), *this);
    impl_->sessions.insert(session);
    session->start();
    accept();
  });
}

std::uint64_t StateStreamServer::rejected_messages() const { return impl_->rejected.load(); }

void StateStreamServer::forward(std::string_view topic, const std::string& payload) {
  // Runs on the publishing thread; hand the message to the io thread.
  const bool is_state = topic == cube::kStateTopic;
  asio::post(impl_->io, [this, topic = std::string(topic), payload, is_state] {
    auto message = std::make_shared<const std::string>(make_envelope(topic, payload, ++impl_->seq));
    if (is_state) impl_->latest_state = message;
    for (const auto& s : impl_->sessions) {
      if (s->is_open()) s->send(message);
    }
  });
}

void StateStreamServer::handle_inbound(const std::string& text) {
  try {
    const auto msg = json::parse(text);
    if (!msg.is_object()) throw std::invalid_argument("expected object");
    if (auto it = msg.find("select_room"); it != msg.end()) {
      const auto room = enum_from_string<policy::RoomId>(it->get<std::string>());
      if (!room) throw std::invalid_argument("unknown room");
      if (on_room_) on_room_(*room);
      return;
    }
    if (msg.value("topic", "") != cube::kTapsTopic || !msg.contains("payload")) {
      throw std::invalid_argument("only tap envelopes are accepted");
    }
    broker_.publish(cube::kTapsTopic, msg.at("payload").dump());
  } catch (const std::exception&) {
    impl_->rejected.fetch_add(1);
  }
}

}  // namespace privacycube::gateway
