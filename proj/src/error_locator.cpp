#include "approxifer/error_locator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace approxifer::locator {

BwSystem build_system(std::span<const double> points, std::span<const double> values, std::size_t k, std::size_t e,
                      Normalization normalization) {
  if (k == 0) throw std::invalid_argument("build_system: K must be at least 1");
  if (points.size() != values.size()) throw std::invalid_argument("build_system: points and values differ in length");
  const std::size_t terms = k + e;
  const std::size_t unknowns = normalization == Normalization::homogeneous ? 2 * terms : 2 * terms - 1;
  if (points.size() < 2 * terms) {
    throw std::invalid_argument("build_system: " + std::to_string(points.size()) + " samples cannot determine " +
                                std::to_string(2 * terms) + " coefficients");
  }

  BwSystem sys;
  sys.k = k;
  sys.e = e;
  sys.normalization = normalization;
  sys.matrix = RowBlock(points.size(), unknowns);
  sys.rhs.assign(points.size(), 0.0);
  const std::size_t q_first = normalization == Normalization::homogeneous ? 0 : 1;
  for (std::size_t r = 0; r < points.size(); ++r) {
    const double x = points[r];
    const double y = values[r];
    auto row = sys.matrix.row(r);
    double power = 1.0;
    for (std::size_t j = 0; j < terms; ++j) {
      row[j] = power;
      if (j >= q_first) row[terms + j - q_first] = -y * power;
      power *= x;
    }
    if (normalization == Normalization::q0_fixed) sys.rhs[r] = y;
  }
  return sys;
}

namespace {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const Matrix> as_eigen(const RowBlock& m) {
  return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

BwSolution split(const BwSystem& sys, const Eigen::VectorXd& v) {
  const std::size_t terms = sys.terms();
  std::vector<double> p(terms), q(terms);
  for (std::size_t j = 0; j < terms; ++j) p[j] = v[static_cast<Eigen::Index>(j)];
  if (sys.normalization == Normalization::homogeneous) {
    for (std::size_t j = 0; j < terms; ++j) q[j] = v[static_cast<Eigen::Index>(terms + j)];
  } else {
    q[0] = 1.0;
    for (std::size_t j = 1; j < terms; ++j) q[j] = v[static_cast<Eigen::Index>(terms + j - 1)];
  }
  BwSolution out;
  out.p = DensePolynomial(std::move(p));
  out.q = DensePolynomial(std::move(q));
  return out;
}

}  // namespace

BwSolution solve_system(const BwSystem& sys) {
  const auto a = as_eigen(sys.matrix);
  const Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), static_cast<Eigen::Index>(sys.rhs.size()));
  const auto unknowns = static_cast<std::size_t>(a.cols());

  Eigen::VectorXd v;
  std::size_t rank = 0;
  if (sys.normalization == Normalization::q0_fixed) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    v = cod.solve(b);
    rank = static_cast<std::size_t>(cod.rank());
  } else {
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    v = svd.matrixV().col(a.cols() - 1);
    Eigen::Index largest = 0;
    v.cwiseAbs().maxCoeff(&largest);
    if (v[largest] < 0) v = -v;
    rank = static_cast<std::size_t>(svd.rank());
  }

  BwSolution out = split(sys, v);
  const double bnorm = b.norm();
  const double rnorm = (a * v - b).norm();
  out.relative_residual = bnorm > 0 ? rnorm / bnorm : rnorm;
  out.rank = rank;
  out.rank_deficient = rank < unknowns;
  return out;
}

ScalarLocation locate_scalar(std::span<const std::size_t> workers, std::span<const double> points,
                             std::span<const double> values, std::size_t k, std::size_t e) {
  if (workers.size() != points.size()) throw std::invalid_argument("locate: workers and points differ in length");
  if (e == 0) throw std::invalid_argument("locate: E must be at least 1");
  const BwSystem sys = build_system(points, values, k, e, Normalization::q0_fixed);
  const BwSolution sol = solve_system(sys);

  ScalarLocation out;
  out.q_abs.resize(points.size());
  for (std::size_t r = 0; r < points.size(); ++r) out.q_abs[r] = std::abs(sol.q(points[r]));

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    if (out.q_abs[l] != out.q_abs[r]) return out.q_abs[l] < out.q_abs[r];
    return workers[l] < workers[r];
  });
  for (std::size_t t = 0; t < e; ++t) out.workers.push_back(workers[order[t]]);

  double rnorm = 0.0;
  double bnorm = 0.0;
  for (std::size_t t = e; t < order.size(); ++t) {
    const std::size_t r = order[t];
    const double x = points[r];
    const double resid = sol.p(x) - values[r] * sol.q(x);
    rnorm += resid * resid;
    bnorm += values[r] * values[r];
  }
  out.residual_after_exclusion = bnorm > 0 ? std::sqrt(rnorm / bnorm) : std::sqrt(rnorm);
  out.inconsistent = out.residual_after_exclusion > kInconsistencyThreshold;
  return out;
}

std::vector<std::size_t> locate_errors_scalar(std::span<const std::size_t> workers, std::span<const double> points,
                                              std::span<const double> values, std::size_t k, std::size_t e) {
  return locate_scalar(workers, points, values, k, e).workers;
}

std::vector<std::size_t> majority_vote(const std::vector<std::vector<std::size_t>>& rows, std::size_t e,
                                       std::map<std::size_t, std::size_t>* counts) {
  std::map<std::size_t, std::size_t> tally;
  for (const auto& row : rows) {
    for (std::size_t w : row) ++tally[w];
  }
  std::vector<std::pair<std::size_t, std::size_t>> ranked(tally.begin(), tally.end());
  // std::map iteration is ascending by id, so a stable sort on count keeps the
  // lower id first among equals.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) { return l.second > r.second; });
  std::vector<std::size_t> out;
  for (std::size_t t = 0; t < e && t < ranked.size(); ++t) out.push_back(ranked[t].first);
  std::sort(out.begin(), out.end());
  if (counts != nullptr) *counts = std::move(tally);
  return out;
}

LocatorReport locate_errors_majority(const std::map<std::size_t, PredictionVector>& predictions,
                                     std::span<const double> beta, std::size_t k, std::size_t e, std::size_t classes) {
  if (classes == 0) throw std::invalid_argument("locate_errors_majority: C must be at least 1");
  LocatorReport report;
  if (e == 0) return report;

  std::vector<std::size_t> workers;
  std::vector<double> points;
  for (const auto& [worker, prediction] : predictions) {
    if (worker >= beta.size()) throw std::invalid_argument("locate_errors_majority: worker index out of range");
    if (prediction.size() != classes) {
      throw std::invalid_argument("locate_errors_majority: prediction length differs from C");
    }
    workers.push_back(worker);
    points.push_back(beta[worker]);
  }

  report.candidate_matrix.resize(classes);
  std::vector<double> values(workers.size());
  for (std::size_t c = 0; c < classes; ++c) {
    std::size_t r = 0;
    for (const auto& entry : predictions) values[r++] = entry.second[c];
    ScalarLocation loc = locate_scalar(workers, points, values, k, e);
    report.candidate_matrix[c] = std::move(loc.workers);
    report.max_residual = std::max(report.max_residual, loc.residual_after_exclusion);
    if (loc.inconsistent) ++report.inconsistent_classes;
  }
  report.located = majority_vote(report.candidate_matrix, e, &report.vote_counts);
  return report;
}

RationalFunction bw_recover_rational(std::span<const double> points, std::span<const double> values, std::size_t k,
                                     std::size_t e) {
  const BwSystem sys = build_system(points, values, k, e, Normalization::homogeneous);
  BwSolution sol = solve_system(sys);
  // The solution vector has unit norm; a denominator this small carries no
  // information and the quotient is meaningless.
  if (sol.q.max_abs_coeff() < 1e-10) throw RecoveryFailure("bw_recover_rational: solved Q is identically zero");
  return RationalFunction{std::move(sol.p), std::move(sol.q)};
}

}  // namespace approxifer::locator
