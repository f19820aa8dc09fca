#include "approxifer/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace approxifer::chebyshev {

std::vector<double> first_kind_nodes(std::size_t k) {
  if (k == 0) throw std::invalid_argument("first_kind_nodes: K must be at least 1");
  std::vector<double> nodes(k);
  const double denom = 2.0 * static_cast<double>(k);
  // Upper half from the cosine, lower half mirrored, so the family is exactly
  // antisymmetric (cos(pi/2) would otherwise leave 6e-17 at the centre).
  for (std::size_t j = 0; j < k / 2; ++j) {
    nodes[j] = std::cos(static_cast<double>(2 * j + 1) * std::numbers::pi / denom);
    nodes[k - 1 - j] = -nodes[j];
  }
  if (k % 2 == 1) nodes[k / 2] = 0.0;
  return nodes;
}

std::vector<double> second_kind_nodes(std::size_t n) {
  if (n == 0) throw std::invalid_argument("second_kind_nodes: N must be at least 1");
  std::vector<double> nodes(n + 1);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    nodes[i] = std::cos(static_cast<double>(i) * std::numbers::pi / static_cast<double>(n));
    nodes[n - i] = -nodes[i];
  }
  if (n % 2 == 0) nodes[n / 2] = 0.0;
  return nodes;
}

NodeSet make_node_set(std::size_t k, std::size_t n) {
  return NodeSet{k, n, first_kind_nodes(k), second_kind_nodes(n)};
}

namespace {

template <typename SignOf>
std::vector<double> berrut(std::span<const double> nodes, double z, SignOf sign_of, double* conditioning = nullptr) {
  const std::size_t count = nodes.size();
  std::vector<double> w(count, 0.0);
  if (count == 0) return w;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(z - nodes[i]) <= kNodeHitTolerance) {
      w[i] = 1.0;
      return w;
    }
  }
  double total = 0.0, magnitude = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    w[i] = sign_of(i) / (z - nodes[i]);
    total += w[i];
    magnitude += std::abs(w[i]);
  }
  if (conditioning != nullptr) {
    *conditioning = std::abs(total) / magnitude;
    if (*conditioning <= kPoleTolerance) return w;
  }
  for (double& v : w) v /= total;
  return w;
}

}  // namespace

std::vector<double> basis_weights(std::span<const double> nodes, double z) {
  return berrut(nodes, z, [](std::size_t i) { return (i % 2 == 0) ? 1.0 : -1.0; });
}

std::vector<double> basis_weights(std::span<const double> nodes, std::span<const std::size_t> sign_index, double z) {
  if (sign_index.size() != nodes.size()) throw std::invalid_argument("basis_weights: sign index size mismatch");
  double conditioning = 1.0;
  auto w = berrut(nodes, z, [&](std::size_t i) { return (sign_index[i] % 2 == 0) ? 1.0 : -1.0; }, &conditioning);
  if (conditioning > kPoleTolerance) return w;
  // The inherited signs put a pole at z; alternate them along the surviving
  // nodes instead, which is Berrut's interpolant on the subset.
  std::vector<std::size_t> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] > nodes[b]; });
  std::vector<double> sign(nodes.size());
  for (std::size_t r = 0; r < order.size(); ++r) sign[order[r]] = (r % 2 == 0) ? 1.0 : -1.0;
  return berrut(nodes, z, [&](std::size_t i) { return sign[i]; });
}

double max_node_gap(std::span<const double> nodes) {
  double h = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) h = std::max(h, std::abs(nodes[i] - nodes[i - 1]));
  return h;
}

}  // namespace approxifer::chebyshev
