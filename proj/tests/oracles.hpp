// SPDX-License-Identifier: Apache-2.0
// Independent reference computations. None of these call into the library
// beyond reading its data structures.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "oscibound/polynomial.hpp"

namespace oracle {

/// Term-by-term evaluation with std::pow.
inline double eval(const oscibound::HomogeneousPolynomial& p, const std::vector<double>& v) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double t = c.get_d();
    for (std::size_t i = 0; i < e.size(); ++i) t *= std::pow(v[i], static_cast<double>(e[i]));
    s += t;
  }
  return s;
}

inline double central_difference(const oscibound::HomogeneousPolynomial& p, std::vector<double> v,
                                 std::size_t axis, double step = 1e-5) {
  v[axis] += step;
  const double fp = eval(p, v);
  v[axis] -= 2 * step;
  const double fm = eval(p, v);
  return (fp - fm) / (2 * step);
}

inline std::vector<double> random_sphere_point(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double r = 0.0;
  for (auto& c : v) {
    c = g(rng);
    r += c * c;
  }
  r = std::sqrt(r);
  for (auto& c : v) c /= r;
  return v;
}

/// Minimum over `samples` uniform sphere points.
inline double sampled_sphere_min(const oscibound::HomogeneousPolynomial& p, std::size_t samples,
                                 std::uint64_t seed = 7) {
  std::mt19937_64 rng(seed);
  double best = INFINITY;
  for (std::size_t i = 0; i < samples; ++i) {
    best = std::min(best, eval(p, random_sphere_point(p.num_vars(), rng)));
  }
  return best;
}

/// Largest singular value by one-sided Jacobi SVD.
inline double svd_norm(const Eigen::MatrixXcd& A) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
  return svd.singularValues()(0);
}

inline Eigen::MatrixXcd random_complex(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(rows, cols);
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) A(r, c) = {g(rng), g(rng)};
  return A;
}

inline double max_col_abs_sum(const Eigen::MatrixXcd& A) {
  double best = 0.0;
  for (Eigen::Index c = 0; c < A.cols(); ++c) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < A.rows(); ++r) s += std::abs(A(r, c));
    best = std::max(best, s);
  }
  return best;
}

inline double max_row_abs_sum(const Eigen::MatrixXcd& A) {
  return max_col_abs_sum(A.transpose());
}

}  // namespace oracle
