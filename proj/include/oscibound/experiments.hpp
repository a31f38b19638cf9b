// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "oscibound/discretize.hpp"
#include "oscibound/exponents.hpp"
#include "oscibound/norm.hpp"

namespace oscibound {

enum class BudgetMode {
  /// Stop the sweep at the first lambda whose grid exceeds the budget.
  Truncate,
  /// Keep going at the budget grid and flag the point as under-resolved.
  Cap,
};

struct DecayOptions {
  ResolutionRule rule;
  NormOptions norm;
  BudgetMode budget_mode = BudgetMode::Truncate;
  /// Refit on a second grid per lambda (2m, or m/2 when 2m is over budget).
  bool stability_gate = true;
  double stability_tolerance = 0.02;
  /// Radius factor of the indicator test function.
  double eps0 = 0.5;
  bool certify_rank_one = true;
  /// Bypass the resolution rule (tests and oracle comparisons).
  std::optional<std::size_t> fixed_m;
};

struct DecayPoint {
  double lambda = 0.0;
  std::size_t m = 0;
  std::size_t requested_m = 0;
  bool cap_hit = false;
  NormEstimate norm;  // PowerIter2 at p = 2, best lower bound otherwise
  std::optional<NormEstimate> upper;   // Riesz-Thorin bound (p != 2)
  std::optional<NormEstimate> testfn;  // absent when the ball is unresolved
  NormEstimate schur;
  /// TestFnLower <= norm <= SchurUpper within 1e-6 relative.
  bool sandwich_ok = true;
  std::size_t excluded_nodes = 0;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = intercept + slope * x; needs two distinct abscissae.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct StabilityCheck {
  bool performed = false;
  std::vector<std::size_t> alternate_m;
  double alternate_slope = 0.0;
  double delta = 0.0;
  bool passed = false;
};

struct DecayFit {
  double p = 2.0;
  std::vector<DecayPoint> points;
  LineFit fit;
  /// -gamma for undamped runs, -(damping exponent) for damped runs.
  std::optional<double> predicted;
  std::optional<LineFit> upper_fit;
  bool truncated = false;
  std::optional<double> truncated_at;
  std::vector<double> dropped_lambdas;
  StabilityCheck stability;
  std::string rank_one_status = "unchecked";
  std::vector<std::string> warnings;

  std::vector<double> lambdas() const;
  std::vector<double> norms() const;
};

nlohmann::json to_json(const DecayFit& f);

/// Throws InputError unless every value is 2^k for an integer k and the list
/// is strictly increasing.
void require_dyadic(const std::vector<double>& lambdas);

/// lambda = 2^lo, ..., 2^hi in steps of 2^step.
std::vector<double> dyadic_range(int lo, int hi, int step = 1);

/// Sweeps lambda over `lambdas` with the cut-off, damping and grid extents
/// of `base` (its lambda and m are ignored) and fits log2 norm on log2 lambda.
DecayFit decay_fit(const PhaseDescriptor& phase, double p,
                   const std::vector<double>& lambdas, const KernelRequest& base,
                   const DecayOptions& opts = {});

/// Default request: SmoothBump cut-off of radius 1 on centred grids.
KernelRequest default_request(const PhaseDescriptor& phase,
                              const CutoffSpec& cutoff = {});

struct DampingRow {
  double sigma = 0.0;
  std::optional<DampingPrediction> prediction;
  std::optional<DecayFit> fit;
  std::string skipped;  // reason when no fit was run
  double tolerance = 0.07;
  bool agrees = false;
};

/// Fits ||W^sigma||_2 for each sigma with damping `damping` (its z is
/// replaced by sigma) and compares with the predicted exponent.
std::vector<DampingRow> damping_scan(const PhaseDescriptor& phase,
                                     const DampingSpec& damping,
                                     const std::vector<double>& sigmas,
                                     const std::vector<double>& lambdas,
                                     const KernelRequest& base,
                                     const DecayOptions& opts = {},
                                     double tolerance = 0.07);

nlohmann::json to_json(const DampingRow& r);

enum class ShellRegime { Size, Transition, Oscillation };

std::string to_string(ShellRegime r);

struct ShellRecord {
  int k = 0;
  double mu = 0.0;  // lambda * 2^(k d)
  ShellRegime regime = ShellRegime::Transition;
  std::size_t m = 0;
  double norm = 0.0;
  double size_bound = 0.0;         // 2^(k (nx + ny) / 2)
  double oscillation_bound = 0.0;  // min(1, mu^(-1/2)) 2^(k (nx + ny) / 2)
  double ratio_to_size = 0.0;
  double ratio_to_oscillation = 0.0;
};

struct ShellOptions {
  ResolutionRule rule;
  NormOptions norm;
  /// Each shell grid covers [-2^(k+1), 2^(k+1)] with at least this many
  /// points per axis.
  std::size_t min_m = 64;
  double size_mu_max = 0.25;         // mu <= this: size regime
  double oscillation_mu_min = 16.0;  // mu >= this: oscillation regime
  /// Points per axis of the common grid used for the sum-versus-sup check.
  std::optional<std::size_t> common_m;
};

struct ShellProfile {
  double lambda = 0.0;
  std::vector<ShellRecord> shells;
  std::vector<int> dropped;  // shells the grid budget could not resolve
  std::optional<LineFit> size_fit;         // log2 norm against k
  std::optional<LineFit> oscillation_fit;  // log2 norm against k
  double size_target = 0.0;
  double oscillation_target = 0.0;
  // Sum-versus-sup on a common grid.
  std::size_t common_m = 0;
  std::vector<int> common_window;
  double sum_norm = 0.0;
  double sup_norm = 0.0;
  std::size_t measured_n0 = 0;
  bool sum_sup_holds = false;
  /// sum_norm / sup_norm, compared by callers with the value 2.
  double sum_sup_ratio = 0.0;
};

nlohmann::json to_json(const ShellProfile& s);

ShellProfile shell_profile(const PhaseDescriptor& phase, double lambda,
                           const std::vector<int>& ks, const CutoffSpec& cutoff = {},
                           const ShellOptions& opts = {});

/// Smallest N0 such that shells i, j with |i - j| >= N0 have disjoint row
/// supports and disjoint column supports.
std::size_t measured_overlap(const std::vector<KernelMatrix>& shells);

struct VdcConfig {
  PhaseDescriptor phase;  // (1+1)
  double x_lo = 0.0, x_hi = 1.0;
  /// Lower and upper graphs; the region is g(x) <= y <= h(x).
  std::function<double(double)> g = [](double) { return 0.0; };
  std::function<double(double)> h = [](double) { return 1.0; };
  double y_lo = 0.0, y_hi = 1.0;  // bounding interval of the graphs
  double mu = 1.0;
  double A = 1.0;
  std::size_t hessian_samples_per_axis = 200;
};

struct VdcResult {
  DecayFit fit;
  double hessian_min = 0.0;
  double hessian_max = 0.0;
};

nlohmann::json to_json(const VdcResult& r);

/// Checks mu <= |S_xy| <= A mu on a dense sample of the region (InputError
/// otherwise) and fits ||T_lambda||_2 restricted to the region.
VdcResult vdc_check(const VdcConfig& cfg, const std::vector<double>& lambdas,
                    const DecayOptions& opts = {});

enum class GrowthClass { Bounded, Logarithmic, SuperLogarithmic };

std::string to_string(GrowthClass c);

struct LogFactorRule {
  /// Bounded when the per-decade log slope is below this fraction of the mean.
  double bounded_fraction = 0.10;
  /// Upper-half slope must stay within this relative band of the full slope.
  double stability_band = 0.30;
  /// Log model residual must be below this fraction of the constant residual.
  double residual_ratio = 0.5;
};

struct LogGrowthVerdict {
  GrowthClass classification = GrowthClass::Bounded;
  std::vector<double> u;  // norm * lambda^(1/2)
  double mean = 0.0;
  double residual_constant = 0.0;
  LineFit log_fit;  // u against log2 lambda
  LineFit upper_half_fit;
  double slope_per_decade = 0.0;
};

nlohmann::json to_json(const LogGrowthVerdict& v);

LogGrowthVerdict log_factor_detect(const std::vector<double>& lambdas,
                                   const std::vector<double>& norms,
                                   const LogFactorRule& rule = {});

}  // namespace oscibound
