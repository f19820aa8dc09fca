#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace approxifer::harness {

inline constexpr int kMetricsFormatVersion = 1;

struct MetricsRow {
  std::string experiment;
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t e = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t round = 0;
  double base_accuracy = 0.0;
  double coded_accuracy = 0.0;
  double agreement_with_base = 0.0;
  int locator_exact_hit = 0;
  double round_latency_ms = 0.0;
  std::size_t workers_used = 0;
  std::size_t replication_workers_equivalent = 0;
  int failed = 0;
  std::string error;  // not written to CSV
};

// (2E+1)K when E > 0, else K(S+1).
std::size_t replication_equivalent(std::size_t k, std::size_t s, std::size_t e);

// Column names in output order for kMetricsFormatVersion.
const std::vector<std::string>& metrics_columns();
std::string metrics_header();
std::string format_metrics_row(const MetricsRow& row);

// Writes "# <comment>" (if non-empty), the header and one line per row.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, const std::string& comment = {});

// Per-(K,S,E,sigma) aggregate over seeds and rounds.
struct CellSummary {
  std::size_t k = 0;
  std::size_t s = 0;
  std::size_t e = 0;
  double sigma = 0.0;
  std::size_t rounds = 0;
  std::size_t failures = 0;
  double mean_base_accuracy = 0.0;
  double mean_coded_accuracy = 0.0;
  double min_coded_accuracy = 0.0;
  double mean_agreement = 0.0;
  double locator_hit_rate = 0.0;
  double mean_latency_ms = 0.0;
  std::size_t workers_used = 0;
  std::size_t replication_workers_equivalent = 0;
};

// Rows must already be in canonical order; cells appear in first-seen order.
std::vector<CellSummary> summarize(const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells);

// Gnuplot script plotting mean coded accuracy and agreement against the
// cell index from the summary CSV.
std::string gnuplot_script(const std::string& summary_csv, const std::string& title);

}  // namespace approxifer::harness
