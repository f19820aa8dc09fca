#include "approxifer/cluster_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "approxifer/pipeline.hpp"

namespace approxifer::sim {

double LatencyModel::sample(std::mt19937_64& rng) const {
  switch (tail) {
    case Tail::fixed:
      return base_ms;
    case Tail::exponential:
      return base_ms + std::exponential_distribution<double>(1.0 / mean_ms)(rng);
    case Tail::lognormal:
      return base_ms + std::lognormal_distribution<double>(mu, sigma_ln)(rng);
  }
  return base_ms;
}

std::vector<WorkerSpec> make_workers(std::size_t count, const LatencyModel& latency) {
  std::vector<WorkerSpec> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].id = i;
    out[i].latency = latency;
  }
  return out;
}

namespace {

std::set<std::size_t> sample_subset(std::size_t n, std::size_t choose, std::mt19937_64& rng) {
  std::vector<std::size_t> ids(n);
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  // Partial Fisher-Yates with an explicit draw so the result does not depend
  // on the standard library's shuffle.
  for (std::size_t t = 0; t < choose && t < n; ++t) {
    const std::size_t pick = t + static_cast<std::size_t>(rng() % (n - t));
    std::swap(ids[t], ids[pick]);
  }
  return {ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(std::min(choose, n))};
}

}  // namespace

AdversaryPlan random_plan(std::size_t workers, std::size_t byzantine, std::size_t stragglers, double sigma,
                          std::uint64_t seed) {
  if (byzantine > workers || stragglers > workers) throw std::invalid_argument("random_plan: budget exceeds workers");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  AdversaryPlan plan;
  plan.byzantine_ids = sample_subset(workers, byzantine, rng);
  plan.straggler_ids = sample_subset(workers, stragglers, rng);
  plan.noise_sigma = sigma;
  return plan;
}

void for_each_subset(std::size_t n, std::size_t choose, const std::function<void(const std::set<std::size_t>&)>& fn) {
  if (choose > n) return;
  std::vector<std::size_t> idx(choose);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  while (true) {
    fn(std::set<std::size_t>(idx.begin(), idx.end()));
    std::size_t t = choose;
    while (t > 0 && idx[t - 1] == n - choose + (t - 1)) --t;
    if (t == 0) return;
    ++idx[t - 1];
    for (std::size_t u = t; u < choose; ++u) idx[u] = idx[u - 1] + 1;
  }
}

std::uint64_t request_id(std::uint64_t round, std::size_t worker) {
  return (round << 16) | static_cast<std::uint64_t>(worker & 0xffff);
}

std::vector<double> corruption_noise(std::uint64_t noise_seed, std::uint64_t request_id, std::size_t length,
                                     double sigma) {
  std::seed_seq seq{static_cast<std::uint32_t>(noise_seed), static_cast<std::uint32_t>(noise_seed >> 32),
                    static_cast<std::uint32_t>(request_id), static_cast<std::uint32_t>(request_id >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(length);
  for (double& v : out) v = sigma * normal(rng);
  return out;
}

void apply_corruption(Corruption kind, PredictionVector& prediction, std::uint64_t noise_seed,
                      std::uint64_t request_id, double sigma) {
  switch (kind) {
    case Corruption::gaussian: {
      const auto noise = corruption_noise(noise_seed, request_id, prediction.size(), sigma);
      for (std::size_t c = 0; c < prediction.size(); ++c) prediction[c] += noise[c];
      break;
    }
    case Corruption::sign_flip:
      for (double& v : prediction) v = -v;
      break;
    case Corruption::targeted_class:
      prediction.front() += sigma;
      break;
  }
}

bool RoundResult::locator_exact_hit() const {
  return std::includes(excluded.begin(), excluded.end(), planted.begin(), planted.end());
}

double RoundResult::agreement_rate() const {
  if (agreement.empty()) return 0.0;
  return static_cast<double>(std::count(agreement.begin(), agreement.end(), true)) /
         static_cast<double>(agreement.size());
}

namespace {

std::vector<PredictionVector> base_predictions(const QueryBatch& batch, const Predictor& predictor) {
  std::vector<PredictionVector> out;
  out.reserve(batch.rows());
  for (std::size_t j = 0; j < batch.rows(); ++j) out.push_back(predictor.predict(batch.row(j)));
  return out;
}

std::vector<PredictionVector> coded_predictions(const BerrutCodec& codec, const QueryBatch& batch,
                                                const Predictor& predictor, const AdversaryPlan& plan,
                                                const std::vector<WorkerSpec>* workers, const RoundOptions& options) {
  const CodedQuerySet coded = codec.encode(batch);
  std::vector<PredictionVector> out;
  out.reserve(coded.rows());
  for (std::size_t i = 0; i < coded.rows(); ++i) {
    PredictionVector y = predictor.predict(coded.row(i));
    const std::uint64_t rid = request_id(options.round, i);
    if (plan.byzantine_ids.contains(i)) apply_corruption(plan.corruption, y, options.seed, rid, plan.noise_sigma);
    if (workers != nullptr && (*workers)[i].behavior.byzantine) {
      apply_corruption(Corruption::gaussian, y, options.seed, rid, (*workers)[i].behavior.noise_sigma);
    }
    out.push_back(std::move(y));
  }
  return out;
}

bool is_corrupt(std::size_t worker, const AdversaryPlan& plan, const std::vector<WorkerSpec>* workers) {
  return plan.byzantine_ids.contains(worker) || (workers != nullptr && (*workers)[worker].behavior.byzantine);
}

void finish(RoundResult& result, const BerrutCodec& codec, const std::vector<PredictionVector>& coded,
            const QueryBatch& batch, const Predictor& predictor) {
  std::map<std::size_t, PredictionVector> returned;
  for (std::size_t w : result.returned) returned.emplace(w, coded[w]);
  DecodeOutcome outcome = locate_and_decode(codec, returned);
  result.decoded = std::move(outcome.decoded);
  result.excluded = std::move(outcome.excluded);
  result.locator = std::move(outcome.report);
  result.base = base_predictions(batch, predictor);
  result.agreement.resize(batch.rows());
  for (std::size_t j = 0; j < batch.rows(); ++j) {
    result.agreement[j] = argmax(result.decoded[j]) == argmax(result.base[j]);
  }
}

}  // namespace

RoundResult run_round(const QueryBatch& batch, const CodingConfig& config, const Predictor& predictor,
                      const std::vector<WorkerSpec>& workers, const AdversaryPlan& plan, const RoundOptions& options) {
  if (workers.size() != config.workers()) {
    throw std::invalid_argument("run_round: expected " + std::to_string(config.workers()) + " workers, got " +
                                std::to_string(workers.size()));
  }
  if (plan.straggler_ids.size() + config.quorum > config.workers()) {
    throw InsufficientResults(config.workers() - plan.straggler_ids.size(), config.quorum);
  }
  const BerrutCodec codec(config);
  const auto coded = coded_predictions(codec, batch, predictor, plan, &workers, options);

  RoundResult result;
  std::mt19937_64 rng(options.seed * 0x100000001b3ULL + options.round);
  result.latencies_ms.resize(workers.size());
  for (std::size_t i = 0; i < workers.size(); ++i) result.latencies_ms[i] = workers[i].latency.sample(rng);

  result.arrival_order.resize(workers.size());
  std::iota(result.arrival_order.begin(), result.arrival_order.end(), std::size_t{0});
  std::sort(result.arrival_order.begin(), result.arrival_order.end(), [&](std::size_t l, std::size_t r) {
    const bool ls = plan.straggler_ids.contains(l);
    const bool rs = plan.straggler_ids.contains(r);
    if (ls != rs) return rs;
    if (result.latencies_ms[l] != result.latencies_ms[r]) return result.latencies_ms[l] < result.latencies_ms[r];
    return l < r;
  });
  result.returned.assign(result.arrival_order.begin(),
                         result.arrival_order.begin() + static_cast<std::ptrdiff_t>(config.quorum));
  result.wall_clock_ms = result.latencies_ms[result.returned.back()];

  for (std::size_t w : result.returned) {
    if (is_corrupt(w, plan, &workers)) result.planted.push_back(w);
  }
  std::sort(result.planted.begin(), result.planted.end());
  finish(result, codec, coded, batch, predictor);
  return result;
}

RoundResult replay_round(const QueryBatch& batch, const CodingConfig& config, const Predictor& predictor,
                         const std::set<std::size_t>& survivors, const AdversaryPlan& plan,
                         const RoundOptions& options) {
  const BerrutCodec codec(config);
  const auto coded = coded_predictions(codec, batch, predictor, plan, nullptr, options);
  RoundResult result;
  result.returned.assign(survivors.begin(), survivors.end());
  result.arrival_order = result.returned;
  for (std::size_t w : result.returned) {
    if (plan.byzantine_ids.contains(w)) result.planted.push_back(w);
  }
  finish(result, codec, coded, batch, predictor);
  return result;
}

std::size_t replication_workers(std::size_t k, std::size_t e) { return (2 * e + 1) * k; }

RoundResult replication_round(const QueryBatch& batch, std::size_t e, const Predictor& predictor,
                              const std::vector<WorkerSpec>& workers, const AdversaryPlan& plan,
                              const RoundOptions& options) {
  const std::size_t k = batch.rows();
  const std::size_t copies = 2 * e + 1;
  if (workers.size() != replication_workers(k, e)) {
    throw std::invalid_argument("replication_round: expected " + std::to_string(replication_workers(k, e)) +
                                " workers, got " + std::to_string(workers.size()));
  }
  RoundResult result;
  result.base = base_predictions(batch, predictor);

  std::mt19937_64 rng(options.seed * 0x100000001b3ULL + options.round);
  result.latencies_ms.resize(workers.size());
  for (std::size_t i = 0; i < workers.size(); ++i) result.latencies_ms[i] = workers[i].latency.sample(rng);
  result.arrival_order.resize(workers.size());
  std::iota(result.arrival_order.begin(), result.arrival_order.end(), std::size_t{0});
  std::stable_sort(result.arrival_order.begin(), result.arrival_order.end(), [&](std::size_t l, std::size_t r) {
    return result.latencies_ms[l] < result.latencies_ms[r];
  });
  // A guaranteed majority needs every replica of every query.
  result.returned = result.arrival_order;
  result.wall_clock_ms = *std::max_element(result.latencies_ms.begin(), result.latencies_ms.end());

  for (std::size_t j = 0; j < k; ++j) {
    std::vector<PredictionVector> replicas;
    for (std::size_t r = 0; r < copies; ++r) {
      const std::size_t w = j * copies + r;
      PredictionVector y = result.base[j];
      if (is_corrupt(w, plan, &workers)) {
        apply_corruption(plan.corruption, y, options.seed, request_id(options.round, w), plan.noise_sigma);
        result.planted.push_back(w);
      }
      replicas.push_back(std::move(y));
    }
    std::map<std::size_t, std::size_t> votes;
    for (const auto& y : replicas) ++votes[argmax(y)];
    std::size_t winner = votes.begin()->first;
    for (const auto& [cls, count] : votes) {
      if (count > votes[winner]) winner = cls;
    }
    for (const auto& y : replicas) {
      if (argmax(y) == winner) {
        result.decoded.push_back(y);
        break;
      }
    }
    result.agreement.push_back(winner == argmax(result.base[j]));
  }
  return result;
}

}  // namespace approxifer::sim
