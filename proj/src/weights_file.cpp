#include "approxifer/weights_file.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace approxifer {

using nlohmann::json;

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity:
      return "identity";
    case Activation::relu:
      return "relu";
    case Activation::softmax:
      return "softmax";
  }
  return "identity";
}

Activation parse_activation(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "softmax") return Activation::softmax;
  throw std::invalid_argument("unknown activation: " + std::string(name));
}

void WeightsFile::validate() const {
  if (format_version != kWeightsFormatVersion) {
    throw std::invalid_argument("weights: unsupported format_version " + std::to_string(format_version));
  }
  if (input_dim == 0) throw std::invalid_argument("weights: input_dim must be positive");
  if (layers.empty()) throw std::invalid_argument("weights: no layers");
  std::size_t width = input_dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const std::string where = "weights: layer " + std::to_string(l);
    if (layer.cols != width) throw std::invalid_argument(where + " expects input width " + std::to_string(layer.cols) +
                                                         " but receives " + std::to_string(width));
    if (layer.rows == 0) throw std::invalid_argument(where + " has zero rows");
    if (layer.weights.size() != layer.rows * layer.cols) throw std::invalid_argument(where + " weight count mismatch");
    if (layer.bias.size() != layer.rows) throw std::invalid_argument(where + " bias length mismatch");
    for (double v : layer.weights) {
      if (!std::isfinite(v)) throw std::invalid_argument(where + " has a non-finite weight");
    }
    for (double v : layer.bias) {
      if (!std::isfinite(v)) throw std::invalid_argument(where + " has a non-finite bias");
    }
    width = layer.rows;
  }
}

WeightsFile parse_weights(std::string_view text) {
  WeightsFile file;
  try {
    const json doc = json::parse(text);
    file.format_version = doc.at("format_version").get<int>();
    file.input_dim = doc.at("input_dim").get<std::size_t>();
    for (const auto& layer : doc.at("layers")) {
      LayerSpec spec;
      spec.rows = layer.at("rows").get<std::size_t>();
      spec.cols = layer.at("cols").get<std::size_t>();
      spec.weights = layer.at("weights").get<std::vector<double>>();
      spec.bias = layer.at("bias").get<std::vector<double>>();
      spec.activation = parse_activation(layer.at("activation").get<std::string>());
      file.layers.push_back(std::move(spec));
    }
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("weights: malformed document: ") + ex.what());
  }
  file.validate();
  return file;
}

std::string serialize_weights(const WeightsFile& file) {
  json doc;
  doc["format_version"] = file.format_version;
  doc["input_dim"] = file.input_dim;
  json layers = json::array();
  for (const auto& layer : file.layers) {
    layers.push_back({{"rows", layer.rows},
                      {"cols", layer.cols},
                      {"weights", layer.weights},
                      {"bias", layer.bias},
                      {"activation", std::string(activation_name(layer.activation))}});
  }
  doc["layers"] = std::move(layers);
  // nlohmann prints the shortest decimal that round-trips each double.
  return doc.dump() + "\n";
}

WeightsFile load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("weights: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_weights(buf.str());
}

void save_weights(const WeightsFile& file, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("weights: cannot write " + path.string());
  out << serialize_weights(file);
}

}  // namespace approxifer
