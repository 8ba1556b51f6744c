#include "pursuit/live_server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <string>
#include <unordered_set>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace pursuit {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxQueuedFrames = 64;

class Connection;

struct Mail {
  std::weak_ptr<Connection> from;
  std::string text;
};

struct Hub {
  std::unordered_set<std::shared_ptr<Connection>> clients;
  std::vector<Mail> mailbox;
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, Hub& hub) : ws_(std::move(socket)), hub_(hub) {}

  void start() {
    ws_.text(true);
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->hub_.clients.insert(self);
      self->read();
    });
  }

  void send(std::shared_ptr<const std::string> msg) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedFrames) return;  // slow reader: drop rather than buffer without bound
    queue_.push_back(std::move(msg));
    if (queue_.size() == 1) write();
  }

  void close() {
    closed_ = true;
    beast::error_code ignored;
    beast::get_lowest_layer(ws_).socket().close(ignored);
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->drop();
      self->hub_.mailbox.push_back({self, beast::buffers_to_string(self->buffer_.data())});
      self->buffer_.consume(self->buffer_.size());
      self->read();
    });
  }

  void write() {
    ws_.async_write(asio::buffer(*queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return self->drop();
      self->queue_.pop_front();
      if (!self->queue_.empty()) self->write();
    });
  }

  void drop() {
    closed_ = true;
    queue_.clear();
    hub_.clients.erase(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  Hub& hub_;
  bool closed_ = false;
};

}  // namespace

struct LiveServer::Impl {
  Impl(LiveSession& s, const LiveConfig& cfg)
      : session(s),
        acceptor(io, tcp::endpoint(asio::ip::make_address(cfg.bind_address), static_cast<unsigned short>(cfg.port))),
        timer(io),
        period(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
            std::chrono::duration<double>(1.0 / cfg.tick_hz))) {}

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), hub)->start();
      accept();
    });
  }

  void schedule() {
    deadline += period;
    timer.expires_at(deadline);
    timer.async_wait([this](beast::error_code ec) {
      if (ec) return;
      on_tick();
      schedule();
    });
  }

  void on_tick() {
    std::vector<Mail> mail;
    mail.swap(hub.mailbox);
    for (auto& m : mail) {
      const std::string reply = session.handle_message(m.text).dump();
      if (auto c = m.from.lock()) c->send(std::make_shared<const std::string>(reply));
    }
    if (auto frame = session.tick()) {
      auto msg = std::make_shared<const std::string>(frame_to_json(*frame).dump());
      for (const auto& c : hub.clients) c->send(msg);
    }
    ++tick_count;
  }

  LiveSession& session;
  asio::io_context io;
  tcp::acceptor acceptor;
  asio::steady_timer timer;
  std::chrono::steady_clock::duration period;
  std::chrono::steady_clock::time_point deadline;
  Hub hub;
  std::atomic<std::size_t> tick_count{0};
};

LiveServer::LiveServer(LiveSession& session, const LiveConfig& cfg) {
  if (!(cfg.tick_hz > 0.0)) throw ConfigError("tick_hz must be > 0");
  impl_ = std::make_unique<Impl>(session, cfg);
}

LiveServer::~LiveServer() = default;

unsigned short LiveServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void LiveServer::run() {
  impl_->accept();
  impl_->deadline = std::chrono::steady_clock::now();
  impl_->schedule();
  impl_->io.run();
  for (const auto& c : impl_->hub.clients) c->close();
  impl_->hub.clients.clear();
}

void LiveServer::stop() { impl_->io.stop(); }

std::size_t LiveServer::ticks() const { return impl_->tick_count.load(); }

}  // namespace pursuit
