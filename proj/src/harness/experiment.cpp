#include "approxifer/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "approxifer/net/dispatcher.hpp"

namespace approxifer::harness {

using nlohmann::json;

void ExperimentConfig::validate() const {
  if (name.empty() || name.find(',') != std::string::npos) {
    throw std::invalid_argument("config: name must be non-empty and contain no commas");
  }
  if (k.empty() || s.empty() || e.empty() || sigma.empty()) throw std::invalid_argument("config: empty sweep list");
  if (seeds.empty()) throw std::invalid_argument("config: seed list must be non-empty");
  if (rounds == 0) throw std::invalid_argument("config: rounds must be positive");
  for (std::size_t kk : k)
    for (std::size_t ss : s)
      for (std::size_t ee : e) {
        try {
          make_config(kk, ss, ee);
        } catch (const std::exception& ex) {
          throw std::invalid_argument("config: invalid (K,S,E)=(" + std::to_string(kk) + "," + std::to_string(ss) +
                                      "," + std::to_string(ee) + "): " + ex.what());
        }
      }
  for (double sg : sigma) {
    if (!std::isfinite(sg) || sg < 0) throw std::invalid_argument("config: sigma must be finite and non-negative");
  }
  if (mode == Mode::dispatch) {
    if (deadline_ms <= 0) throw std::invalid_argument("config: deadline_ms must be positive");
    for (std::size_t kk : k)
      for (std::size_t ss : s)
        for (std::size_t ee : e) {
          if (make_config(kk, ss, ee).workers() != workers.size()) {
            throw std::invalid_argument("config: dispatch mode needs exactly N+1 = " +
                                        std::to_string(make_config(kk, ss, ee).workers()) + " workers for (K,S,E)=(" +
                                        std::to_string(kk) + "," + std::to_string(ss) + "," + std::to_string(ee) +
                                        "), got " + std::to_string(workers.size()));
          }
        }
  }
}

namespace {

template <typename T>
std::vector<T> list_of(const json& j, const char* key, std::vector<T> fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

sim::LatencyModel parse_latency(const json& j) {
  sim::LatencyModel m;
  m.base_ms = j.value("base_ms", 10.0);
  const std::string tail = j.value("tail", "exponential");
  if (tail == "fixed") {
    m.tail = sim::LatencyModel::Tail::fixed;
  } else if (tail == "exponential") {
    m.tail = sim::LatencyModel::Tail::exponential;
    m.mean_ms = j.value("mean_ms", 5.0);
    if (!(m.mean_ms > 0)) throw std::invalid_argument("config: latency mean_ms must be positive");
  } else if (tail == "lognormal") {
    m.tail = sim::LatencyModel::Tail::lognormal;
    m.mu = j.value("mu", 0.0);
    m.sigma_ln = j.value("sigma_ln", 1.0);
  } else {
    throw std::invalid_argument("config: unknown latency tail '" + tail + "'");
  }
  return m;
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(std::string("config: ") + ex.what());
  }
  ExperimentConfig c;
  try {
    c.name = j.value("name", c.name);
    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      if (d.is_string()) {
        c.dataset = d.get<std::string>();
      } else if (d.is_object() && d.contains("external_csv")) {
        c.dataset = "external_csv:" + d.at("external_csv").get<std::string>();
      } else {
        throw std::invalid_argument("config: dataset must be a name or {\"external_csv\": path}");
      }
    }
    c.weights = j.value("weights", std::string{});
    const json sweep = j.value("sweep", json::object());
    c.k = list_of<std::size_t>(sweep, "K", c.k);
    c.s = list_of<std::size_t>(sweep, "S", c.s);
    c.e = list_of<std::size_t>(sweep, "E", c.e);
    c.sigma = list_of<double>(sweep, "sigma", c.sigma);
    c.seeds = list_of<std::uint64_t>(sweep, "seeds", c.seeds);
    c.rounds = j.value("rounds", c.rounds);
    const std::string mode = j.value("mode", "simulate");
    if (mode == "simulate") {
      c.mode = Mode::simulate;
    } else if (mode == "dispatch") {
      c.mode = Mode::dispatch;
    } else {
      throw std::invalid_argument("config: mode must be simulate or dispatch");
    }
    c.output = j.value("output", std::string{});
    if (j.contains("latency")) c.latency = parse_latency(j.at("latency"));
    c.threads = j.value("threads", 0u);
    if (j.contains("workers")) {
      for (const auto& w : j.at("workers")) c.workers.push_back(net::parse_endpoint(w.get<std::string>()));
    }
    c.byzantine_workers = j.value("byzantine_workers", std::vector<std::size_t>{});
    c.deadline_ms = j.value("deadline_ms", c.deadline_ms);
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("config: ") + ex.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<Cell> out;
  for (std::size_t k : sorted(config.k))
    for (std::size_t s : sorted(config.s))
      for (std::size_t e : sorted(config.e))
        for (double sigma : sorted(config.sigma))
          for (std::uint64_t seed : sorted(config.seeds))
            for (std::uint64_t r = 0; r < config.rounds; ++r) out.push_back(Cell{k, s, e, sigma, seed, r});
  return out;
}

std::uint64_t round_seed(const Cell& cell) {
  std::uint64_t sigma_bits = 0;
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(&sigma_bits, &cell.sigma, sizeof sigma_bits);
  std::seed_seq seq{static_cast<std::uint32_t>(cell.seed), static_cast<std::uint32_t>(cell.seed >> 32),
                    static_cast<std::uint32_t>(cell.k),    static_cast<std::uint32_t>(cell.s),
                    static_cast<std::uint32_t>(cell.e),    static_cast<std::uint32_t>(sigma_bits),
                    static_cast<std::uint32_t>(sigma_bits >> 32), static_cast<std::uint32_t>(cell.round)};
  std::mt19937_64 rng(seq);
  return rng();
}

namespace {

MetricsRow base_row(const ExperimentConfig& config, const Cell& cell) {
  MetricsRow row;
  row.experiment = config.name;
  row.k = cell.k;
  row.s = cell.s;
  row.e = cell.e;
  row.sigma = cell.sigma;
  row.seed = cell.seed;
  row.round = cell.round;
  const CodingConfig coding = make_config(cell.k, cell.s, cell.e);
  row.workers_used = coding.workers();
  row.replication_workers_equivalent = replication_equivalent(cell.k, cell.s, cell.e);
  return row;
}

double accuracy(const std::vector<PredictionVector>& outputs, const std::vector<std::size_t>& labels) {
  std::size_t hits = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) hits += argmax(outputs[j]) == labels[j] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

void fill_outcome(MetricsRow& row, const std::vector<PredictionVector>& decoded, const std::vector<PredictionVector>& base,
                  const std::vector<std::size_t>& labels) {
  row.base_accuracy = accuracy(base, labels);
  row.coded_accuracy = accuracy(decoded, labels);
  std::size_t agree = 0;
  for (std::size_t j = 0; j < labels.size(); ++j) agree += argmax(decoded[j]) == argmax(base[j]) ? 1 : 0;
  row.agreement_with_base = static_cast<double>(agree) / static_cast<double>(labels.size());
}

}  // namespace

MetricsRow simulate_cell(const ExperimentConfig& config, const Cell& cell, const Predictor& predictor,
                         const Dataset& data) {
  MetricsRow row = base_row(config, cell);
  try {
    const CodingConfig coding = make_config(cell.k, cell.s, cell.e);
    const std::uint64_t seed = round_seed(cell);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> labels;
    const QueryBatch batch = sample_batch(data, cell.k, rng, labels);
    const auto plan = sim::random_plan(coding.workers(), cell.e, cell.s, cell.sigma, seed);
    const auto workers = sim::make_workers(coding.workers(), config.latency);
    const auto result = sim::run_round(batch, coding, predictor, workers, plan, sim::RoundOptions{seed, cell.round});
    fill_outcome(row, result.decoded, result.base, labels);
    row.locator_exact_hit = result.locator_exact_hit() ? 1 : 0;
    row.round_latency_ms = result.wall_clock_ms;
  } catch (const std::exception& ex) {
    row.failed = 1;
    row.error = ex.what();
  }
  return row;
}

MetricsRow dispatch_cell(const ExperimentConfig& config, const Cell& cell, const Predictor& predictor,
                         const Dataset& data) {
  MetricsRow row = base_row(config, cell);
  try {
    const CodingConfig coding = make_config(cell.k, cell.s, cell.e);
    const std::uint64_t seed = round_seed(cell);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> labels;
    const QueryBatch batch = sample_batch(data, cell.k, rng, labels);
    const auto result = net::dispatch(batch, coding, config.workers, net::default_policy(coding, config.deadline_ms),
                                      cell.round);
    std::vector<PredictionVector> base;
    for (std::size_t j = 0; j < batch.rows(); ++j) base.push_back(predictor.predict(batch.row(j)));
    fill_outcome(row, result.decoded, base, labels);
    std::set<std::size_t> excluded(result.round.excluded.begin(), result.round.excluded.end());
    bool hit = true;
    for (std::size_t b : config.byzantine_workers) {
      if (result.received.contains(b) && !excluded.contains(b)) hit = false;
    }
    row.locator_exact_hit = hit ? 1 : 0;
    row.round_latency_ms = result.round.wall_clock_ms;
  } catch (const std::exception& ex) {
    row.failed = 1;
    row.error = ex.what();
  }
  return row;
}

std::vector<MetricsRow> run_experiment(const ExperimentConfig& config, const Predictor& predictor,
                                       const Dataset& data) {
  config.validate();
  if (predictor.input_dim() != 0 && predictor.input_dim() != data.dim()) {
    throw std::invalid_argument("experiment: predictor expects dimension " + std::to_string(predictor.input_dim()) +
                                " but dataset has " + std::to_string(data.dim()));
  }
  const auto cells = expand_cells(config);
  std::vector<MetricsRow> rows(cells.size());
  if (config.mode == Mode::dispatch) {
    // One round at a time: the workers are a shared physical resource.
    for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = dispatch_cell(config, cells[i], predictor, data);
    return rows;
  }
  unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cells.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) rows[i] = simulate_cell(config, cells[i], predictor, data);
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  return rows;
}

namespace {

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ExperimentFiles write_experiment_outputs(const ExperimentConfig& config, const std::vector<MetricsRow>& rows) {
  ExperimentFiles files;
  files.metrics = config.output.empty() ? config.name + ".csv" : config.output;
  std::filesystem::path base(files.metrics);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  const std::string stem = (base.parent_path() / base.stem()).string();
  files.summary = stem + "_summary.csv";
  files.plot = stem + ".gp";

  std::ofstream metrics(files.metrics);
  if (!metrics) throw std::runtime_error("cannot write " + files.metrics);
  write_metrics_csv(metrics, rows, "generated " + timestamp() + " format_version " +
                                       std::to_string(kMetricsFormatVersion));
  std::ofstream summary(files.summary);
  if (!summary) throw std::runtime_error("cannot write " + files.summary);
  write_summary_csv(summary, summarize(rows));
  std::ofstream plot(files.plot);
  if (!plot) throw std::runtime_error("cannot write " + files.plot);
  plot << gnuplot_script(std::filesystem::path(files.summary).filename().string(), config.name);
  return files;
}

}  // namespace approxifer::harness
