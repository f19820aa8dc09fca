#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace approxifer {

inline constexpr int kWeightsFormatVersion = 1;

enum class Activation { identity, relu, softmax };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

struct LayerSpec {
  std::size_t rows = 0;  // output width
  std::size_t cols = 0;  // input width
  std::vector<double> weights;  // row-major rows x cols
  std::vector<double> bias;     // rows
  Activation activation = Activation::identity;

  bool operator==(const LayerSpec&) const = default;
};

// Portable feed-forward model description:
//   {"format_version": 1, "input_dim": d,
//    "layers": [{"rows", "cols", "weights": [...], "bias": [...], "activation"}]}
struct WeightsFile {
  int format_version = kWeightsFormatVersion;
  std::size_t input_dim = 0;
  std::vector<LayerSpec> layers;

  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().rows; }
  // Throws std::invalid_argument if dimensions fail to chain or entries are
  // not finite.
  void validate() const;

  bool operator==(const WeightsFile&) const = default;
};

WeightsFile parse_weights(std::string_view text);
std::string serialize_weights(const WeightsFile& file);

WeightsFile load_weights(const std::filesystem::path& path);
void save_weights(const WeightsFile& file, const std::filesystem::path& path);

}  // namespace approxifer
