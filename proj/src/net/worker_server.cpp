#include "approxifer/net/worker_server.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <cerrno>
#include <chrono>

#include "approxifer/cluster_sim.hpp"

namespace approxifer::net {

WorkerServer::WorkerServer(const Endpoint& listen, std::shared_ptr<const Predictor> predictor, FaultInjection faults)
    : predictor_(std::move(predictor)), faults_(faults), host_(listen.host), listener_(listen_tcp(listen)) {
  port_ = local_port(listener_);
  if (host_.empty() || host_ == "0.0.0.0" || host_ == "*") host_ = "127.0.0.1";
}

WorkerServer::~WorkerServer() { stop(); }

Frame WorkerServer::handle(const Frame& request) const {
  switch (request.type) {
    case MsgType::hello:
      return Frame{kProtocolVersion, MsgType::hello, request.request_id, {kProtocolVersion}};
    case MsgType::ping:
      return Frame{kProtocolVersion, MsgType::ping, request.request_id, request.payload};
    case MsgType::predict_req: {
      std::vector<double> query;
      try {
        query = decode_vector_payload(request.payload);
      } catch (const FrameError& ex) {
        return make_error(request.request_id, ex.code(), ex.what());
      }
      if (query.size() != predictor_->input_dim()) {
        return make_error(request.request_id, ErrorCode::dimension_mismatch,
                          "query has dimension " + std::to_string(query.size()) + ", model expects " +
                              std::to_string(predictor_->input_dim()));
      }
      try {
        PredictionVector y = predictor_->predict(query);
        if (faults_.noise_sigma > 0.0) {
          sim::apply_corruption(sim::Corruption::gaussian, y, faults_.noise_seed, request.request_id,
                                faults_.noise_sigma);
        }
        return make_predict_response(request.request_id, y);
      } catch (const std::exception& ex) {
        return make_error(request.request_id, ErrorCode::internal, ex.what());
      }
    }
    case MsgType::predict_resp:
    case MsgType::error:
      return make_error(request.request_id, ErrorCode::unsupported_type, "worker does not accept this message type");
  }
  return make_error(request.request_id, ErrorCode::unsupported_type, "unknown message type");
}

bool WorkerServer::sleep_interruptible(int ms) const {
  const auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
  while (std::chrono::steady_clock::now() < until) {
    if (stopping_.load()) return false;
    std::this_thread::sleep_for(std::min<std::chrono::steady_clock::duration>(std::chrono::milliseconds(10),
                                                                              until - std::chrono::steady_clock::now()));
  }
  return true;
}

void WorkerServer::serve_connection(Socket conn) {
  FrameReader reader;
  std::vector<std::uint8_t> buf(64 * 1024);
  try {
    while (!stopping_.load()) {
      if (!wait_readable(conn, std::chrono::milliseconds(50))) continue;
      const ssize_t n = ::recv(conn.fd(), buf.data(), buf.size(), 0);
      if (n == 0) return;
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        return;
      }
      reader.feed(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
      while (true) {
        std::optional<Frame> frame;
        try {
          frame = reader.next();
        } catch (const FrameError& ex) {
          send_all(conn, encode_frame(make_error(reader.last_request_id(), ex.code(), ex.what())));
          continue;
        }
        if (!frame) break;
        Frame reply = handle(*frame);
        if (frame->type == MsgType::predict_req && faults_.delay_ms > 0) {
          if (!sleep_interruptible(faults_.delay_ms)) return;
        }
        send_all(conn, encode_frame(reply));
      }
    }
  } catch (const SocketError&) {
    // peer went away
  }
}

void WorkerServer::run() {
  while (!stopping_.load()) {
    if (!wait_readable(listener_, std::chrono::milliseconds(50))) continue;
    const int fd = ::accept4(listener_.fd(), nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    Socket conn(fd);
    std::lock_guard lock(conn_mutex_);
    std::erase_if(connections_, [](Connection& c) {
      if (!c.done->load()) return false;
      c.thread.join();
      return true;
    });
    auto done = std::make_shared<std::atomic<bool>>(false);
    connections_.push_back(Connection{std::thread([this, done, c = std::move(conn)]() mutable {
                                        serve_connection(std::move(c));
                                        done->store(true);
                                      }),
                                      done});
  }
}

void WorkerServer::start() {
  accept_thread_ = std::thread([this] { run(); });
}

void WorkerServer::stop() {
  stopping_.store(true);
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<Connection> threads;
  {
    std::lock_guard lock(conn_mutex_);
    threads.swap(connections_);
  }
  for (auto& c : threads) {
    if (c.thread.joinable()) c.thread.join();
  }
}

}  // namespace approxifer::net
