#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "approxifer/net/frame.hpp"
#include "approxifer/net/socket.hpp"
#include "approxifer/predictor.hpp"

namespace approxifer::net {

// Demo fault injection: a fixed reply delay and Gaussian corruption of every
// prediction, keyed by (noise_seed, request_id) exactly like the simulator.
struct FaultInjection {
  int delay_ms = 0;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
};

// A worker hosting the deployed model behind the frame protocol. Each
// connection is served on its own thread; the predictor is shared read-only.
class WorkerServer {
 public:
  WorkerServer(const Endpoint& listen, std::shared_ptr<const Predictor> predictor, FaultInjection faults = {});
  ~WorkerServer();
  WorkerServer(const WorkerServer&) = delete;
  WorkerServer& operator=(const WorkerServer&) = delete;

  std::uint16_t port() const { return port_; }
  Endpoint endpoint() const { return {host_, port_}; }

  // Accept loop; returns after stop().
  void run();
  // run() on a background thread.
  void start();
  void stop();
  // Async-signal-safe: only asks run() to return.
  void request_stop() { stopping_.store(true); }

  // Response to one well-formed request frame (no delay applied).
  Frame handle(const Frame& request) const;

 private:
  void serve_connection(Socket conn);
  bool sleep_interruptible(int ms) const;

  std::shared_ptr<const Predictor> predictor_;
  FaultInjection faults_;
  std::string host_;
  Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread accept_thread_;
  std::mutex conn_mutex_;
  struct Connection {
    std::thread thread;
    std::shared_ptr<std::atomic<bool>> done;
  };
  std::vector<Connection> connections_;
};

}  // namespace approxifer::net
