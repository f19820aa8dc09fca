#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "approxifer/row_block.hpp"

namespace approxifer::harness {

struct Dataset {
  std::string name;
  RowBlock features;
  std::vector<std::size_t> labels;
  std::size_t classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }
};

// Directory holding the bundled fixtures: $APPROXIFER_DATA_DIR if set,
// otherwise the source tree's data/ directory.
std::filesystem::path data_dir();

// Rows of "label,x0,...,x{d-1}". A first line starting with a non-numeric
// field is treated as a header.
Dataset load_csv_dataset(const std::filesystem::path& path);

// "fixture_blobs", "fixture_digits" or "external_csv:<path>".
Dataset load_named_dataset(std::string_view name);

// Bundled weights matching a fixture dataset.
std::filesystem::path fixture_weights(std::string_view dataset_name);

// K distinct rows drawn uniformly; their labels go to `labels`.
RowBlock sample_batch(const Dataset& data, std::size_t k, std::mt19937_64& rng, std::vector<std::size_t>& labels);

}  // namespace approxifer::harness
