#pragma once

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "approxifer/harness/dataset.hpp"
#include "approxifer/predictor.hpp"
#include "approxifer/row_block.hpp"

namespace approxifer::support {

struct FixtureTriple {
  std::vector<double> input;
  std::vector<double> expected;
  double tolerance = 1e-6;
};

std::vector<FixtureTriple> load_fixture_triples(const std::string& file_name);

// Bundled blobs MLP and its test split.
std::shared_ptr<const Predictor> blobs_predictor();
const harness::Dataset& blobs_dataset();

RowBlock random_batch(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale = 1.0);

}  // namespace approxifer::support
