#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace approxifer::chebyshev {

// Distance below which an evaluation point is treated as sitting on a node; the
// barycentric ratio is replaced by its limit (an indicator vector) there.
inline constexpr double kNodeHitTolerance = 1e-12;

inline constexpr double kPoleTolerance = 1e-8;

// cos((2j+1)pi / 2K), j = 0..K-1. Strictly decreasing, inside (-1, 1).
std::vector<double> first_kind_nodes(std::size_t k);

// cos(i pi / N), i = 0..N. Endpoints are exactly 1 and -1.
std::vector<double> second_kind_nodes(std::size_t n);

// Encoder nodes (alpha, one per query) and worker nodes (beta, one per worker).
struct NodeSet {
  std::size_t k = 0;
  std::size_t n = 0;
  std::vector<double> alpha;
  std::vector<double> beta;
};

NodeSet make_node_set(std::size_t k, std::size_t n);

// Berrut basis l_i(z) over `nodes` with weights (-1)^i.
std::vector<double> basis_weights(std::span<const double> nodes, double z);

// Same basis restricted to a subset of a larger node family: node r sits at
// nodes[r] and carries the sign (-1)^sign_index[r] of its position in the full
// family. Those signs need not alternate along the subset, so the denominator
// can vanish; when |sum w| <= kPoleTolerance * sum |w| the signs are instead
// alternated along the subset in node order.
std::vector<double> basis_weights(std::span<const double> nodes, std::span<const std::size_t> sign_index, double z);

// Largest gap between consecutive nodes (h in the O(h) convergence bound).
// Diagnostic only.
double max_node_gap(std::span<const double> nodes);

}  // namespace approxifer::chebyshev
