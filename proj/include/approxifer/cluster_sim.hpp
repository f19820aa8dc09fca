#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <vector>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/error_locator.hpp"
#include "approxifer/predictor.hpp"

namespace approxifer::sim {

struct LatencyModel {
  enum class Tail { fixed, exponential, lognormal };

  double base_ms = 10.0;
  Tail tail = Tail::fixed;
  double mean_ms = 0.0;   // exponential tail mean
  double mu = 0.0;        // lognormal tail parameters
  double sigma_ln = 0.0;

  double sample(std::mt19937_64& rng) const;
};

struct Behavior {
  bool byzantine = false;
  double noise_sigma = 0.0;
};

struct WorkerSpec {
  std::size_t id = 0;
  LatencyModel latency;
  Behavior behavior;
};

// `count` honest workers with ids 0..count-1 sharing one latency model.
std::vector<WorkerSpec> make_workers(std::size_t count, const LatencyModel& latency = {});

// How a Byzantine worker corrupts its coded prediction. Only `gaussian` is
// used by the experiments; the others are exploratory extensions.
enum class Corruption { gaussian, sign_flip, targeted_class };

struct AdversaryPlan {
  std::set<std::size_t> byzantine_ids;
  std::set<std::size_t> straggler_ids;  // forced to arrive last
  double noise_sigma = 1.0;
  Corruption corruption = Corruption::gaussian;
};

// Uniformly random, independently drawn Byzantine and straggler sets (they may
// overlap).
AdversaryPlan random_plan(std::size_t workers, std::size_t byzantine, std::size_t stragglers, double sigma,
                          std::uint64_t seed);

// Calls fn for every size-`choose` subset of {0..n-1}, in lexicographic order.
void for_each_subset(std::size_t n, std::size_t choose, const std::function<void(const std::set<std::size_t>&)>& fn);

// Request identifier for worker `worker` in round `round`; also keys the
// corruption noise so a networked worker reproduces the simulator exactly.
std::uint64_t request_id(std::uint64_t round, std::size_t worker);

// Additive N(0, sigma^2) noise, i.i.d. per coordinate, determined by
// (noise_seed, request_id).
std::vector<double> corruption_noise(std::uint64_t noise_seed, std::uint64_t request_id, std::size_t length,
                                     double sigma);

void apply_corruption(Corruption kind, PredictionVector& prediction, std::uint64_t noise_seed,
                      std::uint64_t request_id, double sigma);

struct RoundResult {
  std::vector<std::size_t> returned;      // workers used for decoding, in arrival order
  std::vector<std::size_t> arrival_order; // every worker, in arrival order
  std::vector<double> latencies_ms;       // indexed by worker id
  std::vector<std::size_t> planted;       // corrupted workers that made the quorum
  std::vector<std::size_t> excluded;      // located Byzantine workers
  std::vector<PredictionVector> decoded;
  std::vector<PredictionVector> base;     // uncoded f(X_j)
  std::vector<bool> agreement;            // argmax(decoded_j) == argmax(base_j)
  double wall_clock_ms = 0.0;
  locator::LocatorReport locator;

  bool locator_exact_hit() const;
  double agreement_rate() const;
};

struct RoundOptions {
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
};

// One coded round: encode, evaluate f on every coded query, corrupt the planned
// Byzantine outputs, order arrivals (planned stragglers last), take the quorum,
// locate and exclude when E > 0, decode. Reproducible from the seed.
RoundResult run_round(const QueryBatch& batch, const CodingConfig& config, const Predictor& predictor,
                      const std::vector<WorkerSpec>& workers, const AdversaryPlan& plan, const RoundOptions& options);

// Replays the decoder half on an explicit survivor set with coded predictions
// computed and corrupted exactly as run_round would.
RoundResult replay_round(const QueryBatch& batch, const CodingConfig& config, const Predictor& predictor,
                         const std::set<std::size_t>& survivors, const AdversaryPlan& plan,
                         const RoundOptions& options);

// Replication baseline: (2E+1) copies of every query, majority vote on argmax.
// Worker w serves query w / (2E+1).
RoundResult replication_round(const QueryBatch& batch, std::size_t e, const Predictor& predictor,
                              const std::vector<WorkerSpec>& workers, const AdversaryPlan& plan,
                              const RoundOptions& options);

std::size_t replication_workers(std::size_t k, std::size_t e);

}  // namespace approxifer::sim
