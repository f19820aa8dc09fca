#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/row_block.hpp"
#include "approxifer/weights_file.hpp"

namespace approxifer {

// The deployed model f: R^d -> R^C. Implementations are immutable, deterministic
// and total on finite inputs; predict() may be called concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictionVector predict(std::span<const double> query) const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t num_classes() const = 0;
};

// Ignores its input.
class ConstantPredictor final : public Predictor {
 public:
  explicit ConstantPredictor(PredictionVector value, std::size_t input_dim = 0);
  PredictionVector predict(std::span<const double>) const override { return value_; }
  std::size_t input_dim() const override { return input_dim_; }
  std::size_t num_classes() const override { return value_.size(); }

 private:
  PredictionVector value_;
  std::size_t input_dim_;
};

// Dense layer y = W x + b followed by an activation. Weights are kept
// column-major so the forward pass is a sequence of axpy kernels and rounds
// identically under every SIMD variant.
class DenseLayer {
 public:
  explicit DenseLayer(const LayerSpec& spec);
  std::vector<double> forward(std::span<const double> x) const;
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> columns_;  // cols x rows
  std::vector<double> bias_;
  Activation activation_;
};

class AffinePredictor final : public Predictor {
 public:
  // weights: C x d, bias: C.
  AffinePredictor(const RowBlock& weights, std::vector<double> bias);
  PredictionVector predict(std::span<const double> query) const override;
  std::size_t input_dim() const override { return layer_.cols(); }
  std::size_t num_classes() const override { return layer_.rows(); }

 private:
  DenseLayer layer_;
};

class MlpPredictor final : public Predictor {
 public:
  explicit MlpPredictor(const WeightsFile& weights);
  PredictionVector predict(std::span<const double> query) const override;
  std::size_t input_dim() const override { return input_dim_; }
  std::size_t num_classes() const override { return layers_.back().rows(); }

 private:
  std::size_t input_dim_;
  std::vector<DenseLayer> layers_;
};

std::unique_ptr<Predictor> constant_predictor(PredictionVector value);
std::unique_ptr<Predictor> affine_predictor(const RowBlock& weights, std::vector<double> bias);
std::unique_ptr<Predictor> mlp_predictor(const WeightsFile& weights);

// Index of the largest entry; the first one wins ties.
std::size_t argmax(std::span<const double> v);

}  // namespace approxifer
