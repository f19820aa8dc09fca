#include "fixtures.hpp"

#include "approxifer/harness/commands.hpp"
#include "approxifer/weights_file.hpp"

namespace approxifer::support {

std::vector<FixtureTriple> load_fixture_triples(const std::string& file_name) {
  const auto doc = harness::read_json_file((harness::data_dir() / file_name).string());
  std::vector<FixtureTriple> out;
  for (const auto& t : doc.at("triples")) {
    out.push_back(FixtureTriple{t.at("input").get<std::vector<double>>(), t.at("expected").get<std::vector<double>>(),
                                t.value("tolerance", 1e-6)});
  }
  return out;
}

std::shared_ptr<const Predictor> blobs_predictor() {
  static const std::shared_ptr<const Predictor> model =
      mlp_predictor(load_weights(harness::fixture_weights("fixture_blobs")));
  return model;
}

const harness::Dataset& blobs_dataset() {
  static const harness::Dataset data = harness::load_named_dataset("fixture_blobs");
  return data;
}

RowBlock random_batch(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  RowBlock out(rows, cols);
  for (double& v : out.data()) v = normal(rng);
  return out;
}

}  // namespace approxifer::support
