#include "approxifer/net/dispatcher.hpp"

#include <poll.h>
#include <sys/socket.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include "approxifer/net/frame.hpp"
#include "approxifer/pipeline.hpp"

namespace approxifer::net {

DispatchPolicy default_policy(const CodingConfig& config, int deadline_ms) {
  return DispatchPolicy{config.quorum, deadline_ms, 0};
}

QuorumNotReached::QuorumNotReached(std::vector<std::size_t> responsive, std::size_t quorum)
    : std::runtime_error("quorum not reached: " + std::to_string(responsive.size()) + " of " +
                         std::to_string(quorum) + " responses before the deadline"),
      responsive_(std::move(responsive)) {}

namespace {

using Clock = std::chrono::steady_clock;

struct Outstanding {
  std::size_t worker = 0;
  std::uint64_t request_id = 0;
  Socket socket;
  std::vector<std::uint8_t> out;
  std::size_t written = 0;
  bool connected = false;
  bool finished = false;
  FrameReader reader;
};

void retire(Outstanding& o) {
  o.finished = true;
  o.socket.close();
}

}  // namespace

DispatchResult dispatch(const QueryBatch& batch, const CodingConfig& config, const std::vector<Endpoint>& endpoints,
                        const DispatchPolicy& policy, std::uint64_t round) {
  if (endpoints.size() != config.workers()) {
    throw std::invalid_argument("dispatch: expected " + std::to_string(config.workers()) + " endpoints, got " +
                                std::to_string(endpoints.size()));
  }
  if (policy.deadline_ms <= 0) throw std::invalid_argument("dispatch: deadline must be positive");
  const std::size_t quorum = policy.quorum == 0 ? config.quorum : policy.quorum;

  const BerrutCodec codec(config);
  const CodedQuerySet coded = codec.encode(batch);
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::milliseconds(policy.deadline_ms);

  std::vector<Outstanding> pending(endpoints.size());
  for (std::size_t i = 0; i < endpoints.size(); ++i) {
    Outstanding& o = pending[i];
    o.worker = i;
    o.request_id = sim::request_id(round, i);
    o.out = encode_frame(make_predict_request(o.request_id, coded.row(i)));
    try {
      o.socket = connect_nonblocking(endpoints[i]);
    } catch (const SocketError&) {
      retire(o);
    }
  }

  DispatchResult result;
  result.round.latencies_ms.assign(endpoints.size(), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::uint8_t> buf(64 * 1024);

  while (result.received.size() < quorum) {
    const auto now = Clock::now();
    if (now >= deadline) break;
    std::vector<pollfd> fds;
    std::vector<std::size_t> owner;
    for (auto& o : pending) {
      if (o.finished) continue;
      short events = POLLIN;
      if (!o.connected || o.written < o.out.size()) events |= POLLOUT;
      fds.push_back(pollfd{o.socket.fd(), events, 0});
      owner.push_back(o.worker);
    }
    if (fds.empty()) break;
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1;
    const int ready = ::poll(fds.data(), fds.size(), static_cast<int>(remaining));
    if (ready < 0 && errno != EINTR) break;

    for (std::size_t f = 0; f < fds.size() && result.received.size() < quorum; ++f) {
      Outstanding& o = pending[owner[f]];
      const short rev = fds[f].revents;
      if (rev == 0) continue;
      if (!o.connected && (rev & (POLLOUT | POLLERR | POLLHUP))) {
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(o.socket.fd(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
          retire(o);
          continue;
        }
        o.connected = true;
      }
      if (o.connected && o.written < o.out.size() && (rev & POLLOUT)) {
        const ssize_t n = ::send(o.socket.fd(), o.out.data() + o.written, o.out.size() - o.written, MSG_NOSIGNAL);
        if (n < 0 && errno != EAGAIN && errno != EINTR) {
          retire(o);
          continue;
        }
        if (n > 0) o.written += static_cast<std::size_t>(n);
      }
      if (rev & (POLLIN | POLLHUP | POLLERR)) {
        const ssize_t n = ::recv(o.socket.fd(), buf.data(), buf.size(), 0);
        if (n == 0 || (n < 0 && errno != EAGAIN && errno != EINTR)) {
          retire(o);
          continue;
        }
        if (n < 0) continue;
        o.reader.feed(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(n)));
        try {
          while (auto frame = o.reader.next()) {
            if (frame->request_id != o.request_id) continue;
            if (frame->type != MsgType::predict_resp) {
              retire(o);
              break;
            }
            PredictionVector y = decode_vector_payload(frame->payload);
            if (!result.received.empty() && y.size() != result.received.begin()->second.size()) {
              retire(o);
              break;
            }
            const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
            result.round.latencies_ms[o.worker] = ms;
            result.round.arrival_order.push_back(o.worker);
            result.received.emplace(o.worker, std::move(y));
            retire(o);  // done with this connection
            break;
          }
        } catch (const FrameError&) {
          retire(o);
        }
      }
    }
  }
  // Abandon whatever is still outstanding.
  for (auto& o : pending) o.socket.close();

  if (result.received.size() < quorum) {
    std::vector<std::size_t> responsive;
    for (const auto& entry : result.received) responsive.push_back(entry.first);
    throw QuorumNotReached(std::move(responsive), quorum);
  }

  result.round.returned = result.round.arrival_order;
  result.round.wall_clock_ms = result.round.latencies_ms[result.round.returned.back()];
  DecodeOutcome outcome = locate_and_decode(codec, result.received);
  result.round.decoded = outcome.decoded;
  result.round.excluded = std::move(outcome.excluded);
  result.round.locator = std::move(outcome.report);
  result.decoded = std::move(outcome.decoded);
  return result;
}

}  // namespace approxifer::net
