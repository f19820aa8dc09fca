#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/cluster_sim.hpp"
#include "approxifer/net/socket.hpp"

namespace approxifer::net {

// Stragglers are never retried: the coded redundancy replaces retries, and
// the deadline is only a backstop for a quorum that never forms.
struct DispatchPolicy {
  std::size_t quorum = 0;
  int deadline_ms = 1000;
  int retry_count = 0;
};

DispatchPolicy default_policy(const CodingConfig& config, int deadline_ms);

class QuorumNotReached : public std::runtime_error {
 public:
  QuorumNotReached(std::vector<std::size_t> responsive, std::size_t quorum);
  const std::vector<std::size_t>& responsive() const { return responsive_; }

 private:
  std::vector<std::size_t> responsive_;
};

struct DispatchResult {
  std::vector<PredictionVector> decoded;
  sim::RoundResult round;
  // Coded predictions the decoder saw, keyed by worker id.
  std::map<std::size_t, PredictionVector> received;
};

// Sends coded query i to endpoints[i] concurrently and decodes from the first
// `quorum` responses; everything still outstanding is abandoned. Transport
// errors and ERROR replies count the worker as a straggler. Request ids are
// sim::request_id(round, i).
DispatchResult dispatch(const QueryBatch& batch, const CodingConfig& config, const std::vector<Endpoint>& endpoints,
                        const DispatchPolicy& policy, std::uint64_t round = 0);

}  // namespace approxifer::net
