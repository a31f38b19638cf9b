// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "oscibound/discretize.hpp"

namespace oscibound {

enum class NormKind { Exact1, ExactInf, PowerIter2, BoydLowerP, SchurUpper, TestFnLower, InterpolatedUpper };

std::string to_string(NormKind k);

/// Estimate of ||T||_{L^p(y) -> L^p(x)}; p = +inf is allowed.
struct NormEstimate {
  double p = 2.0;
  double value = 0.0;
  NormKind kind = NormKind::PowerIter2;
  std::size_t iterations = 0;
  double residual = 0.0;
};

nlohmann::json to_json(const NormEstimate& e);

enum class SpectralMethod {
  /// Krylov (Lanczos) acceleration of the power iteration on A*A.
  Lanczos,
  /// Plain power iteration on A*A.
  Power,
};

struct NormOptions {
  /// Relative residual |A*A v - theta v| / theta required at p = 2.
  double tolerance = 1e-8;
  /// Cap on applications of A*A at p = 2.
  std::size_t max_iterations = 10000;
  SpectralMethod method = SpectralMethod::Lanczos;
  /// Krylov basis size before an explicit restart.
  std::size_t krylov_dim = 400;
  /// Seed of the mt19937_64 stream behind the pseudo-random start vectors.
  std::uint64_t seed = 20240531;
  /// Boyd iteration: seeds (ones vector first) and per-seed iteration cap.
  int boyd_seeds = 5;
  std::size_t boyd_max_iterations = 500;
  double boyd_tolerance = 1e-12;
};

/// h_x^{nx/p} h_y^{ny/p'}: converts a matrix norm of the raw entries into the
/// continuum operator norm of the midpoint-rule discretization.
double continuum_scale(const KernelMatrix& K, double p);

/// Exact for p in {1, inf}; Lanczos or power iteration at p = 2; the Boyd
/// p-norm power method (a lower bound) otherwise. Throws InputError for p < 1
/// and ConvergenceError when the p = 2 iteration exceeds its cap.
NormEstimate op_norm(const KernelMatrix& K, double p, const NormOptions& opts = {});

/// Largest singular value of a raw matrix, same iteration as op_norm at p = 2.
NormEstimate spectral_norm(const Eigen::MatrixXcd& A, const NormOptions& opts = {});

/// (sup row L1)^{1/p'} (sup col L1)^{1/p} of |K| with continuum scaling.
NormEstimate schur_bound(const KernelMatrix& K, double p);

/// Riesz-Thorin upper bound from the exact p = 1, inf norms and the p = 2
/// estimate: ||T||_2^{2/p'} ||T||_1^{1 - 2/p'} for p < 2, and the dual form
/// with ||T||_inf for p > 2.
NormEstimate interpolated_upper(const KernelMatrix& K, double p,
                                const NormOptions& opts = {});

/// ||T f||_p / ||f||_p for the indicator of |y| <= eps0 lambda^{-1/d}, with
/// both norms taken as midpoint Riemann sums.
NormEstimate lower_bound_via_testfn(const KernelMatrix& K, unsigned degree,
                                    double p, double eps0);

}  // namespace oscibound
