#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "approxifer/cluster_sim.hpp"
#include "approxifer/harness/dataset.hpp"
#include "approxifer/harness/metrics.hpp"
#include "approxifer/net/socket.hpp"
#include "approxifer/predictor.hpp"

namespace approxifer::harness {

enum class Mode { simulate, dispatch };

struct ExperimentConfig {
  std::string name = "experiment";
  std::string dataset = "fixture_blobs";  // or "external_csv:<path>"
  std::string weights;                    // empty: the dataset's bundled weights
  std::vector<std::size_t> k{8};
  std::vector<std::size_t> s{1};
  std::vector<std::size_t> e{0};
  std::vector<double> sigma{1.0};
  std::vector<std::uint64_t> seeds{1};
  std::size_t rounds = 1;  // rounds per (cell, seed)
  Mode mode = Mode::simulate;
  std::string output;  // metrics CSV; summary and plot script go next to it
  sim::LatencyModel latency{10.0, sim::LatencyModel::Tail::exponential, 5.0, 0.0, 0.0};
  unsigned threads = 0;  // 0: hardware concurrency

  // dispatch mode
  std::vector<net::Endpoint> workers;
  std::vector<std::size_t> byzantine_workers;  // which endpoints inject noise
  int deadline_ms = 1000;

  // Throws std::invalid_argument naming the first problem.
  void validate() const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct Cell {
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t e = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
};

// Cross product of the sweep in canonical order (K, S, E, sigma, seed, round).
std::vector<Cell> expand_cells(const ExperimentConfig& config);

// Seed for all randomness of one (cell, seed, round): query sampling,
// adversary plan, latencies and corruption noise.
std::uint64_t round_seed(const Cell& cell);

// One simulated round. Failures become rows with failed = 1.
MetricsRow simulate_cell(const ExperimentConfig& config, const Cell& cell, const Predictor& predictor,
                         const Dataset& data);

// One networked round against config.workers.
MetricsRow dispatch_cell(const ExperimentConfig& config, const Cell& cell, const Predictor& predictor,
                         const Dataset& data);

// Runs every cell (concurrently in simulate mode) and returns rows in
// canonical order.
std::vector<MetricsRow> run_experiment(const ExperimentConfig& config, const Predictor& predictor,
                                       const Dataset& data);

struct ExperimentFiles {
  std::string metrics;
  std::string summary;
  std::string plot;
};

// Writes metrics CSV, summary CSV and gnuplot script; the metrics file starts
// with a timestamp comment line.
ExperimentFiles write_experiment_outputs(const ExperimentConfig& config, const std::vector<MetricsRow>& rows);

}  // namespace approxifer::harness
