#include "approxifer/harness/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#ifndef APPROXIFER_DEFAULT_DATA_DIR
#define APPROXIFER_DEFAULT_DATA_DIR "data"
#endif

namespace approxifer::harness {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("APPROXIFER_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return APPROXIFER_DEFAULT_DATA_DIR;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

bool parse_double(const std::string& text, double& value) {
  char* end = nullptr;
  value = std::strtod(text.c_str(), &end);
  return end != text.c_str() && *end == '\0';
}

}  // namespace

Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("dataset: cannot open " + path.string());
  Dataset data;
  data.name = path.stem().string();
  std::vector<double> values;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_csv(line);
    double label = 0.0;
    if (!parse_double(fields.front(), label)) {
      if (data.labels.empty() && values.empty()) continue;  // header
      throw std::runtime_error("dataset: bad label on line " + std::to_string(line_no));
    }
    if (label < 0 || label != static_cast<double>(static_cast<std::size_t>(label))) {
      throw std::runtime_error("dataset: label must be a non-negative integer on line " + std::to_string(line_no));
    }
    if (dim == 0) dim = fields.size() - 1;
    if (fields.size() - 1 != dim || dim == 0) {
      throw std::runtime_error("dataset: inconsistent row width on line " + std::to_string(line_no));
    }
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) throw std::runtime_error("dataset: bad value on line " + std::to_string(line_no));
      values.push_back(v);
    }
    data.labels.push_back(static_cast<std::size_t>(label));
  }
  if (data.labels.empty()) throw std::runtime_error("dataset: no rows in " + path.string());
  data.features = RowBlock(data.labels.size(), dim, std::move(values));
  data.classes = *std::max_element(data.labels.begin(), data.labels.end()) + 1;
  return data;
}

Dataset load_named_dataset(std::string_view name) {
  if (name == "fixture_blobs") {
    Dataset d = load_csv_dataset(data_dir() / "blobs_test.csv");
    d.name = "fixture_blobs";
    return d;
  }
  if (name == "fixture_digits") {
    Dataset d = load_csv_dataset(data_dir() / "digits_test.csv");
    d.name = "fixture_digits";
    return d;
  }
  constexpr std::string_view prefix = "external_csv:";
  if (name.starts_with(prefix)) return load_csv_dataset(std::filesystem::path(std::string(name.substr(prefix.size()))));
  throw std::invalid_argument("unknown dataset '" + std::string(name) + "'");
}

std::filesystem::path fixture_weights(std::string_view dataset_name) {
  if (dataset_name == "fixture_blobs") return data_dir() / "blobs_mlp.json";
  if (dataset_name == "fixture_digits") return data_dir() / "digits_logreg.json";
  throw std::invalid_argument("no bundled weights for dataset '" + std::string(dataset_name) + "'");
}

RowBlock sample_batch(const Dataset& data, std::size_t k, std::mt19937_64& rng, std::vector<std::size_t>& labels) {
  if (k > data.size()) throw std::invalid_argument("sample_batch: K exceeds dataset size");
  std::vector<std::size_t> ids(data.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t pick = t + static_cast<std::size_t>(rng() % (ids.size() - t));
    std::swap(ids[t], ids[pick]);
  }
  RowBlock batch(k, data.dim());
  labels.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    auto src = data.features.row(ids[t]);
    std::copy(src.begin(), src.end(), batch.row(t).begin());
    labels[t] = data.labels[ids[t]];
  }
  return batch;
}

}  // namespace approxifer::harness
