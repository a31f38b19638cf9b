// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>
#include <string>
#include <vector>

#include "oscibound/polynomial.hpp"

namespace oscibound {

/// Phase S(x, y) on R^nx x R^ny. Variables are ordered x_1..x_nx, y_1..y_ny.
struct PhaseDescriptor {
  std::size_t nx = 0;
  std::size_t ny = 0;
  HomogeneousPolynomial S;

  PhaseDescriptor() = default;
  PhaseDescriptor(std::size_t nx, std::size_t ny, HomogeneousPolynomial S);

  unsigned degree() const noexcept { return S.degree(); }
  std::size_t num_vars() const noexcept { return nx + ny; }
  /// Degree hypothesis d > nx + ny of the decay theorems.
  bool theorem_applicable() const noexcept { return degree() > nx + ny; }

  std::size_t x_index(std::size_t i) const noexcept { return i; }
  std::size_t y_index(std::size_t j) const noexcept { return nx + j; }

  friend bool operator==(const PhaseDescriptor&, const PhaseDescriptor&) = default;
};

struct MixedHessian {
  std::size_t rows = 0;  // nx
  std::size_t cols = 0;  // ny
  std::vector<HomogeneousPolynomial> entries;  // row-major
  /// Set when d < 2: the matrix is identically zero for degree reasons.
  bool degree_too_low = false;

  const HomogeneousPolynomial& operator()(std::size_t i, std::size_t j) const {
    return entries[i * cols + j];
  }
};

/// Entry (i, j) is d/dx_i d/dy_j S, homogeneous of degree d - 2.
MixedHessian mixed_hessian(const PhaseDescriptor& phase);

/// Sum over (i, j) of the squared mixed Hessian entries, degree 2(d - 2).
HomogeneousPolynomial hessian_frobenius_squared(const PhaseDescriptor& phase);

struct BoundaryGradients {
  std::vector<HomogeneousPolynomial> P;  // ny polynomials in x alone
  std::vector<HomogeneousPolynomial> Q;  // nx polynomials in y alone
};

/// P_i(x) = d/dy_i S(x, 0) and Q_j(y) = d/dx_j S(0, y).
BoundaryGradients boundary_gradients(const PhaseDescriptor& phase);

/// Example phases satisfying the rank-one and radial conditions.
/// Family 1 needs nx == ny; family 2 needs nx > ny and d odd; both need d >= 3.
PhaseDescriptor gpt_example_phase(std::size_t nx, std::size_t ny, unsigned d,
                                  int family);

/// Built-in phases by name: "family1-NX-NY-D", "family2-NX-NY-D", "x2y2",
/// "x3y", "xy". Throws InputError for unknown names.
PhaseDescriptor named_phase(const std::string& name);
std::vector<std::string> builtin_phase_names();

nlohmann::json to_json(const HomogeneousPolynomial& p);
HomogeneousPolynomial polynomial_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PhaseDescriptor& phase);
PhaseDescriptor phase_from_json(const nlohmann::json& j);

/// Accepts a path to a phase JSON file or a built-in name.
PhaseDescriptor load_phase(const std::string& file_or_name);

}  // namespace oscibound
