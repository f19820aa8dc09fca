#include "approxifer/harness/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

namespace approxifer::harness {

std::size_t replication_equivalent(std::size_t k, std::size_t s, std::size_t e) {
  return e > 0 ? (2 * e + 1) * k : k * (s + 1);
}

const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> columns = {
      "experiment",       "K",           "S",
      "E",                "sigma",       "seed",
      "round",            "base_accuracy", "coded_accuracy",
      "agreement_with_base", "locator_exact_hit", "round_latency_ms",
      "workers_used",     "replication_workers_equivalent", "failed"};
  return columns;
}

std::string metrics_header() {
  std::string out;
  for (const auto& c : metrics_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

namespace {

// Shortest representation that round-trips.
std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  for (int prec = 1; prec <= 17; ++prec) {
    char tmp[64];
    std::snprintf(tmp, sizeof(tmp), "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

}  // namespace

std::string format_metrics_row(const MetricsRow& r) {
  std::ostringstream os;
  os << r.experiment << ',' << r.k << ',' << r.s << ',' << r.e << ',' << fmt(r.sigma) << ',' << r.seed << ','
     << r.round << ',' << fmt(r.base_accuracy) << ',' << fmt(r.coded_accuracy) << ',' << fmt(r.agreement_with_base)
     << ',' << r.locator_exact_hit << ',' << fmt(r.round_latency_ms) << ',' << r.workers_used << ','
     << r.replication_workers_equivalent << ',' << r.failed;
  return os.str();
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << metrics_header() << '\n';
  for (const auto& r : rows) out << format_metrics_row(r) << '\n';
}

std::vector<CellSummary> summarize(const std::vector<MetricsRow>& rows) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<const MetricsRow*>> cells;
  for (const auto& r : rows) {
    Key key{r.k, r.s, r.e, r.sigma};
    auto [it, inserted] = cells.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& members = cells[key];
    CellSummary c;
    std::tie(c.k, c.s, c.e, c.sigma) = key;
    c.rounds = members.size();
    c.workers_used = members.front()->workers_used;
    c.replication_workers_equivalent = members.front()->replication_workers_equivalent;
    c.min_coded_accuracy = std::numeric_limits<double>::infinity();
    std::size_t ok = 0;
    for (const MetricsRow* r : members) {
      if (r->failed) {
        ++c.failures;
        continue;
      }
      ++ok;
      c.mean_base_accuracy += r->base_accuracy;
      c.mean_coded_accuracy += r->coded_accuracy;
      c.min_coded_accuracy = std::min(c.min_coded_accuracy, r->coded_accuracy);
      c.mean_agreement += r->agreement_with_base;
      c.locator_hit_rate += r->locator_exact_hit;
      c.mean_latency_ms += r->round_latency_ms;
    }
    if (ok > 0) {
      const double n = static_cast<double>(ok);
      c.mean_base_accuracy /= n;
      c.mean_coded_accuracy /= n;
      c.mean_agreement /= n;
      c.locator_hit_rate /= n;
      c.mean_latency_ms /= n;
    } else {
      c.min_coded_accuracy = 0.0;
    }
    out.push_back(c);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& cells) {
  out << "cell,K,S,E,sigma,rounds,failures,mean_base_accuracy,mean_coded_accuracy,min_coded_accuracy,"
         "mean_agreement,locator_hit_rate,mean_latency_ms,workers_used,replication_workers_equivalent\n";
  std::size_t index = 0;
  for (const auto& c : cells) {
    out << index++ << ',' << c.k << ',' << c.s << ',' << c.e << ',' << fmt(c.sigma) << ',' << c.rounds << ','
        << c.failures << ',' << fmt(c.mean_base_accuracy) << ',' << fmt(c.mean_coded_accuracy) << ','
        << fmt(c.min_coded_accuracy) << ',' << fmt(c.mean_agreement) << ',' << fmt(c.locator_hit_rate) << ','
        << fmt(c.mean_latency_ms) << ',' << c.workers_used << ',' << c.replication_workers_equivalent << '\n';
  }
}

std::string gnuplot_script(const std::string& summary_csv, const std::string& title) {
  std::ostringstream os;
  os << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'cell'\n"
     << "set ylabel 'rate'\n"
     << "set yrange [0:1.05]\n"
     << "set terminal pngcairo size 900,500\n"
     << "set output '" << summary_csv << ".png'\n"
     << "plot '" << summary_csv << "' using 1:8 with linespoints title 'base accuracy', \\\n"
     << "     '' using 1:9 with linespoints title 'coded accuracy', \\\n"
     << "     '' using 1:11 with linespoints title 'agreement', \\\n"
     << "     '' using 1:12 with linespoints title 'locator hit rate'\n";
  return os.str();
}

}  // namespace approxifer::harness
