#pragma once

#include <cstddef>
#include <memory>

#include "pursuit/live_session.hpp"

namespace pursuit {

/// Websocket front end for a LiveSession. One io thread owns the session:
/// client messages go into a mailbox that is drained before every tick, and
/// each tick's frame is serialized once and shared by all subscribers.
class LiveServer {
 public:
  /// Binds immediately; port 0 picks a free port.
  LiveServer(LiveSession& session, const LiveConfig& cfg);
  ~LiveServer();
  LiveServer(const LiveServer&) = delete;
  LiveServer& operator=(const LiveServer&) = delete;

  unsigned short port() const;

  /// Serves until stop() is called.
  void run();
  /// Safe to call from any thread.
  void stop();

  std::size_t ticks() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace pursuit
