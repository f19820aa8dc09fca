#include "approxifer/berrut_codec.hpp"

#include <cmath>

#include "approxifer/simd/kernels.hpp"

namespace approxifer {

CodingConfig make_config(std::size_t k, std::size_t s, std::size_t e) {
  if (k == 0) throw std::invalid_argument("make_config: K must be at least 1");
  CodingConfig c;
  c.k = k;
  c.s = s;
  c.e = e;
  if (e == 0) {
    if (k + s < 2) throw std::invalid_argument("make_config: (K, S, E) leaves N < 1");
    c.n = k + s - 1;
    c.quorum = k;
  } else {
    c.n = 2 * (k + e) + s - 1;
    c.quorum = 2 * (k + e);
  }
  return c;
}

BerrutCodec::BerrutCodec(CodingConfig config)
    : config_(config), nodes_(chebyshev::make_node_set(config.k, config.n)), encode_weights_(config.n + 1, config.k) {
  for (std::size_t i = 0; i <= config_.n; ++i) {
    std::vector<double> w;
    if (config_.k == 1) {
      w = {1.0};  // constant interpolant
    } else {
      w = chebyshev::basis_weights(nodes_.alpha, nodes_.beta[i]);
    }
    std::copy(w.begin(), w.end(), encode_weights_.row(i).begin());
  }
}

CodedQuerySet BerrutCodec::encode(const QueryBatch& batch) const {
  if (batch.rows() != config_.k) {
    throw std::invalid_argument("encode: batch has " + std::to_string(batch.rows()) + " queries, expected " +
                                std::to_string(config_.k));
  }
  for (double v : batch.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("encode: non-finite query entry");
  }
  const std::size_t d = batch.cols();
  CodedQuerySet coded(config_.n + 1, d);
  for (std::size_t i = 0; i <= config_.n; ++i) {
    simd::weighted_row_sum(encode_weights_.row(i), batch.data(), d, coded.row(i));
  }
  return coded;
}

BerrutCodec::Survivors BerrutCodec::gather(const std::map<std::size_t, PredictionVector>& returned,
                                           const std::set<std::size_t>& excluded) const {
  Survivors s;
  std::size_t width = 0;
  for (const auto& [worker, prediction] : returned) {
    if (worker > config_.n) throw std::invalid_argument("decode: worker index out of range");
    if (excluded.contains(worker)) continue;
    if (s.index.empty()) {
      width = prediction.size();
      if (width == 0) throw std::invalid_argument("decode: empty prediction vector");
    } else if (prediction.size() != width) {
      throw std::invalid_argument("decode: prediction vectors differ in length");
    }
    s.index.push_back(worker);
    s.point.push_back(nodes_.beta[worker]);
  }
  const std::size_t need = config_.min_decode_set();
  if (s.index.size() < need) throw InsufficientResults(s.index.size(), need);
  s.values = RowBlock(s.index.size(), width);
  for (std::size_t r = 0; r < s.index.size(); ++r) {
    const auto& p = returned.at(s.index[r]);
    std::copy(p.begin(), p.end(), s.values.row(r).begin());
  }
  return s;
}

PredictionVector BerrutCodec::evaluate(const Survivors& s, double z) const {
  const auto w = chebyshev::basis_weights(s.point, s.index, z);
  PredictionVector out(s.values.cols());
  simd::weighted_row_sum(w, s.values.data(), s.values.cols(), out);
  return out;
}

std::vector<PredictionVector> BerrutCodec::decode(const std::map<std::size_t, PredictionVector>& returned,
                                                  const std::set<std::size_t>& excluded) const {
  const Survivors s = gather(returned, excluded);
  std::vector<PredictionVector> out;
  out.reserve(config_.k);
  for (double a : nodes_.alpha) out.push_back(evaluate(s, a));
  return out;
}

PredictionVector BerrutCodec::interpolate_at(const std::map<std::size_t, PredictionVector>& returned,
                                             const std::set<std::size_t>& excluded, double z) const {
  return evaluate(gather(returned, excluded), z);
}

CodedQuerySet encode(const QueryBatch& batch, const CodingConfig& config) { return BerrutCodec(config).encode(batch); }

std::vector<PredictionVector> decode(const std::map<std::size_t, PredictionVector>& returned,
                                     const CodingConfig& config, const std::set<std::size_t>& excluded) {
  return BerrutCodec(config).decode(returned, excluded);
}

}  // namespace approxifer
