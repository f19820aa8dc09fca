#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "approxifer/berrut_codec.hpp"
#include "approxifer/polynomial.hpp"
#include "approxifer/row_block.hpp"

namespace approxifer::locator {

// A q0-fixed fit whose relative residual on the rows kept after exclusion
// exceeds this is reported as inconsistent (more than E corruptions).
inline constexpr double kInconsistencyThreshold = 1e-3;

// homogeneous: unknowns P_0..P_{K+E-1}, Q_0..Q_{K+E-1}, zero right-hand side.
// q0_fixed:    Q_0 pinned to 1; unknowns P_0..P_{K+E-1}, Q_1..Q_{K+E-1}, rhs y.
enum class Normalization { homogeneous, q0_fixed };

// Linear system P(x_i) = y_i Q(x_i), one row per available sample in the order
// given.
struct BwSystem {
  std::size_t k = 0;
  std::size_t e = 0;
  Normalization normalization = Normalization::q0_fixed;
  RowBlock matrix;
  std::vector<double> rhs;

  std::size_t terms() const { return k + e; }
  std::size_t unknowns() const { return matrix.cols(); }
};

BwSystem build_system(std::span<const double> points, std::span<const double> values, std::size_t k, std::size_t e,
                      Normalization normalization);

struct BwSolution {
  DensePolynomial p;
  DensePolynomial q;
  // ||A v - b|| / ||b|| over all rows (absolute when b = 0).
  double relative_residual = 0.0;
  std::size_t rank = 0;
  bool rank_deficient = false;
};

// q0_fixed: minimum-norm least-squares solution. homogeneous: unit vector
// minimising ||A v|| (right singular vector of the smallest singular value),
// signed so its largest-magnitude entry is positive.
BwSolution solve_system(const BwSystem& system);

// Per-coordinate location result.
struct ScalarLocation {
  std::vector<std::size_t> workers;  // E worker ids, ascending |Q(x_i)|
  std::vector<double> q_abs;         // |Q(x_i)| for every sample, input order
  double residual_after_exclusion = 0.0;
  bool inconsistent = false;
};

// Fits the q0-fixed system over (points, values) and returns the E workers
// whose |Q(x_i)| is smallest; ties go to the lower worker id. `workers` names
// the worker behind each sample.
ScalarLocation locate_scalar(std::span<const std::size_t> workers, std::span<const double> points,
                             std::span<const double> values, std::size_t k, std::size_t e);

std::vector<std::size_t> locate_errors_scalar(std::span<const std::size_t> workers, std::span<const double> points,
                                              std::span<const double> values, std::size_t k, std::size_t e);

struct LocatorReport {
  // C rows of E worker ids: the scalar locator's answer for each class.
  std::vector<std::vector<std::size_t>> candidate_matrix;
  // The E most frequent ids of candidate_matrix, ascending.
  std::vector<std::size_t> located;
  std::map<std::size_t, std::size_t> vote_counts;
  std::size_t inconsistent_classes = 0;
  double max_residual = 0.0;

  bool inconsistent() const { return inconsistent_classes > 0; }
};

// Runs the scalar locator once per class coordinate of the returned coded
// predictions and majority-votes the E error locations. `beta` is the full
// worker node family, indexed by worker id.
LocatorReport locate_errors_majority(const std::map<std::size_t, PredictionVector>& predictions,
                                     std::span<const double> beta, std::size_t k, std::size_t e, std::size_t classes);

// E most frequent entries of `rows`; equal counts go to the lower id.
std::vector<std::size_t> majority_vote(const std::vector<std::vector<std::size_t>>& rows, std::size_t e,
                                       std::map<std::size_t, std::size_t>* counts = nullptr);

class RecoveryFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// r(x) = P(x) / Q(x).
struct RationalFunction {
  DensePolynomial numerator;
  DensePolynomial denominator;
  double operator()(double x) const { return numerator(x) / denominator(x); }
};

// Rational interpolation in the presence of up to E erroneous values: solves
// the homogeneous system and returns P/Q. Throws std::invalid_argument with
// fewer than 2(K+E) samples and RecoveryFailure when the solved Q vanishes.
RationalFunction bw_recover_rational(std::span<const double> points, std::span<const double> values, std::size_t k,
                                     std::size_t e);

}  // namespace approxifer::locator
