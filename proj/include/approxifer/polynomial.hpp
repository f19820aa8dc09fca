#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace approxifer {

// Real polynomial, coefficients in ascending degree. Trailing zeros are kept;
// degree() reports the last stored slot, not the last nonzero one.
class DensePolynomial {
 public:
  DensePolynomial() = default;
  explicit DensePolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  std::span<const double> coeffs() const { return coeffs_; }
  std::size_t size() const { return coeffs_.size(); }
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) m = c < 0 ? (-c > m ? -c : m) : (c > m ? c : m);
    return m;
  }

 private:
  std::vector<double> coeffs_;
};

}  // namespace approxifer
