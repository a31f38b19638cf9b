// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "oscibound/phase.hpp"
#include "oscibound/polynomial.hpp"

namespace oscibound {

enum class CertStatus { CertifiedPositive, WitnessFound, Inconclusive };

std::string to_string(CertStatus s);

struct CertifyOptions {
  double witness_tol = 1e-10;
  int max_depth = 40;
  std::size_t box_budget = 10'000'000;
  /// A box stops being refined once its bound is within this relative gap of
  /// the best sphere value seen so far.
  double relative_gap = 0.05;
};

struct CertificateResult {
  CertStatus status = CertStatus::Inconclusive;
  /// Rigorous lower bound of the target on the unit sphere (CertifiedPositive).
  double lower_bound = 0.0;
  /// Smallest target value observed at a sphere point during the search.
  double best_sample = 0.0;
  std::vector<double> witness;  // unit vector (WitnessFound)
  double witness_value = 0.0;
  std::size_t boxes_explored = 0;
  bool max_depth_hit = false;
  bool budget_hit = false;
};

nlohmann::json to_json(const CertificateResult& r);

/// Branch and bound over the faces of [-1, 1]^n. Each box is bounded by its
/// center value minus a Lipschitz bound times the box radius, and the bound is
/// moved to the unit sphere with homogeneity. Callers pass nonnegative
/// targets (sums of squares).
CertificateResult certify_positive_on_sphere(const HomogeneousPolynomial& p,
                                             const CertifyOptions& opts = {});

/// Positivity of sum_{i,j} (d/dx_i d/dy_j S)^2 on the sphere.
CertificateResult check_rank_one(const PhaseDescriptor& phase,
                                 const CertifyOptions& opts = {});

struct RadialCertificates {
  CertificateResult x_side;  // sum_i P_i(x)^2 on the x-sphere
  CertificateResult y_side;  // sum_j Q_j(y)^2 on the y-sphere
};

RadialCertificates check_radial_nondegeneracy(const PhaseDescriptor& phase,
                                              const CertifyOptions& opts = {});

}  // namespace oscibound
