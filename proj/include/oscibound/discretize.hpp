// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oscibound/phase.hpp"

namespace oscibound {

/// exp(1 - 1/(1 - t^2)) on |t| < 1, zero elsewhere. Equals 1 at t = 0.
double smooth_bump(double t);

enum class CutoffProfile { SmoothBump, Box, Unit };

std::string to_string(CutoffProfile p);
CutoffProfile cutoff_profile_from_string(const std::string& s);

/// Radial cut-off phi(v) = profile(|v| / support_radius).
struct CutoffSpec {
  double support_radius = 1.0;
  CutoffProfile profile = CutoffProfile::SmoothBump;

  double operator()(double radius) const;
  nlohmann::json to_json() const;
};

/// Annular partition of unity: Phi(v) = b(|v|) / sum_j b(|v| / 2^j), with b a
/// bump on (1/2, 2) in the logarithmic variable. At most two shells overlap.
double shell_partition(double radius);

struct ShellSpec {
  int k = 0;
  /// Phi(v / 2^k).
  double operator()(double radius) const;
};

enum class DampingKind { Polynomial, XNorm, YNorm, HessianNorm };

/// |D(x, y)|^z with D a homogeneous polynomial, |x|^dD, |y|^dD, or the
/// Hilbert-Schmidt norm of the mixed Hessian (dD = d - 2).
///
/// Internally the base is the Euclidean norm of `components`, raised to
/// `base_power`: |D| is one component with power 1, |x|^dD is the x
/// coordinates with power dD.
struct DampingSpec {
  DampingKind kind = DampingKind::Polynomial;
  std::vector<HomogeneousPolynomial> components;
  double base_power = 1.0;
  std::complex<double> z{0.0, 0.0};
  int dD = 1;

  static DampingSpec polynomial(HomogeneousPolynomial D, std::complex<double> z);
  static DampingSpec x_norm(std::size_t nx, std::size_t ny, int dD,
                            std::complex<double> z);
  static DampingSpec y_norm(std::size_t nx, std::size_t ny, int dD,
                            std::complex<double> z);
  static DampingSpec hessian_norm(const PhaseDescriptor& phase,
                                  std::complex<double> z);
  /// |x|^2 + |y|^2 as a polynomial in nx + ny variables (dD = 2).
  static DampingSpec radial_square(std::size_t nx, std::size_t ny,
                                   std::complex<double> z);

  /// |D(v)| before the complex power.
  double base(std::span<const double> v) const;
  /// |D(v)|^z. Sets *excluded (and returns 0) where D(v) = 0 and Re z <= 0
  /// with z != 0, since the power is undefined there.
  std::complex<double> factor(std::span<const double> v, bool* excluded) const;

  std::string describe() const;
};

/// Uniform tensor grid of cell midpoints on [lo, hi]^dim.
struct GridSpec {
  std::size_t dim = 1;
  std::size_t m = 32;
  double lo = -1.0;
  double hi = 1.0;

  static GridSpec centered(std::size_t dim, std::size_t m, double radius);

  double h() const noexcept { return (hi - lo) / static_cast<double>(m); }
  double cell_volume() const;
  std::size_t num_nodes() const;
  double coordinate(std::size_t i) const noexcept {
    return lo + h() * (static_cast<double>(i) + 0.5);
  }
  /// Coordinates of flat node index `node` (first axis varies slowest).
  void node(std::size_t node, std::span<double> out) const;

  nlohmann::json to_json() const;
};

struct ResolutionRule {
  /// Largest admitted phase increment lambda * h * G across one cell.
  double phase_step = 1.5707963267948966;
  /// Weight |grad S| by the normalized kernel amplitude when taking the max.
  bool amplitude_weighted = true;
  std::size_t min_m = 32;
  std::size_t max_nodes_per_side = 4096;
  std::size_t samples = 10000;
};

struct KernelRequest {
  double lambda = 0.0;
  CutoffSpec cutoff;
  GridSpec x_grid;
  GridSpec y_grid;
  std::optional<DampingSpec> damping;
  std::optional<ShellSpec> shell;
  /// Optional (1+1) support mask, e.g. a curved trapezoid.
  std::function<bool(double, double)> region;
  std::string phase_id;

  /// Real amplitude W at v = (x, y) without the damping phase; 0 off support.
  double amplitude(const PhaseDescriptor& phase, std::span<const double> v) const;
};

struct GridChoice {
  std::size_t m = 0;
  double gradient_bound = 0.0;  // G
  bool cap_hit = false;         // rule asked for more than the budget
  std::size_t requested_m = 0;  // what the rule asked for
};

/// Max of |grad S| over a deterministic Halton sample of the kernel support
/// (the grid boxes, narrowed to the shell when one is set). With amplitude
/// weighting each sample counts with W(v) / max W.
double sampled_gradient_bound(const PhaseDescriptor& phase,
                              const KernelRequest& req,
                              const ResolutionRule& rule = {});

/// Smallest m = 2^j >= min_m with h * lambda * G <= phase_step, using the
/// grid extents of `req` (their m is ignored). When the node budget caps m,
/// the result has cap_hit set and m at the budget.
GridChoice choose_grid(const PhaseDescriptor& phase, const KernelRequest& req,
                       const ResolutionRule& rule = {});

/// Strict variant on centered grids of the cut-off radius: throws
/// BudgetExceeded naming lambda when the cap is hit.
std::size_t grid_resolution_for(const PhaseDescriptor& phase, double lambda,
                                const CutoffSpec& cutoff,
                                const ResolutionRule& rule = {});

/// Same request with both grids set to m points per axis.
KernelRequest with_resolution(KernelRequest req, std::size_t m);

/// Dense kernel of a discretized operator: rows are x-nodes, columns y-nodes.
/// Quadrature weights are applied by the norm estimators, not stored here.
struct KernelMatrix {
  Eigen::MatrixXcd entries;
  GridSpec x_grid;
  GridSpec y_grid;
  double lambda = 0.0;
  std::string phase_id;
  std::string damping;
  std::optional<int> shell;
  std::size_t excluded_nodes = 0;

  /// Conjugate transpose with the grids swapped (the operator's adjoint).
  KernelMatrix adjoint() const;
};

/// entry(r, c) = exp(i lambda S(x_r, y_c)) * W(x_r, y_c). Rows are assembled by
/// OSCIBOUND_THREADS workers (default 1); the result does not depend on it.
KernelMatrix build_kernel(const PhaseDescriptor& phase, const KernelRequest& req);

/// Indicator of the ball |y| <= eps0 * lambda^(-1/d) on the y-grid nodes.
/// Throws InputError when the ball is narrower than two cells or eps0 <= 0.
std::vector<double> sharpness_test_function(double lambda, double eps0,
                                            unsigned degree,
                                            const GridSpec& y_grid);

/// Little-endian dump: uint64 rows, uint64 cols, float64 lambda, then
/// row-major interleaved (re, im) float64 entries.
void write_kernel_binary(const KernelMatrix& k, const std::string& path);
Eigen::MatrixXcd read_kernel_binary(const std::string& path, double* lambda);

}  // namespace oscibound
