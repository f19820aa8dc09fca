#include "approxifer/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "approxifer/simd/kernels.hpp"

namespace approxifer {

ConstantPredictor::ConstantPredictor(PredictionVector value, std::size_t input_dim)
    : value_(std::move(value)), input_dim_(input_dim) {
  if (value_.empty()) throw std::invalid_argument("constant_predictor: empty prediction");
  for (double v : value_) {
    if (!std::isfinite(v)) throw std::invalid_argument("constant_predictor: non-finite entry");
  }
}

DenseLayer::DenseLayer(const LayerSpec& spec)
    : rows_(spec.rows), cols_(spec.cols), columns_(spec.rows * spec.cols), bias_(spec.bias), activation_(spec.activation) {
  if (spec.weights.size() != rows_ * cols_ || bias_.size() != rows_) {
    throw std::invalid_argument("dense layer: shape mismatch");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) columns_[c * rows_ + r] = spec.weights[r * cols_ + c];
  }
}

namespace {

void softmax_inplace(std::span<double> v) {
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double& x : v) {
    x = std::exp(x - top);
    total += x;
  }
  for (double& x : v) x /= total;
}

}  // namespace

std::vector<double> DenseLayer::forward(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw std::invalid_argument("predict: input has dimension " + std::to_string(x.size()) + ", model expects " +
                                std::to_string(cols_));
  }
  std::vector<double> y = bias_;
  const auto& k = simd::kernels();
  for (std::size_t c = 0; c < cols_; ++c) k.axpy(x[c], columns_.data() + c * rows_, y.data(), rows_);
  switch (activation_) {
    case Activation::identity:
      break;
    case Activation::relu:
      k.relu(y.data(), y.size());
      break;
    case Activation::softmax:
      softmax_inplace(y);
      break;
  }
  return y;
}

AffinePredictor::AffinePredictor(const RowBlock& weights, std::vector<double> bias)
    : layer_(LayerSpec{weights.rows(), weights.cols(), std::vector<double>(weights.data().begin(), weights.data().end()),
                       std::move(bias), Activation::identity}) {}

PredictionVector AffinePredictor::predict(std::span<const double> query) const { return layer_.forward(query); }

MlpPredictor::MlpPredictor(const WeightsFile& weights) : input_dim_(weights.input_dim) {
  weights.validate();
  for (const auto& spec : weights.layers) layers_.emplace_back(spec);
}

PredictionVector MlpPredictor::predict(std::span<const double> query) const {
  std::vector<double> h = layers_.front().forward(query);
  for (std::size_t l = 1; l < layers_.size(); ++l) h = layers_[l].forward(h);
  return h;
}

std::unique_ptr<Predictor> constant_predictor(PredictionVector value) {
  return std::make_unique<ConstantPredictor>(std::move(value));
}

std::unique_ptr<Predictor> affine_predictor(const RowBlock& weights, std::vector<double> bias) {
  return std::make_unique<AffinePredictor>(weights, std::move(bias));
}

std::unique_ptr<Predictor> mlp_predictor(const WeightsFile& weights) { return std::make_unique<MlpPredictor>(weights); }

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace approxifer
