// SPDX-License-Identifier: Apache-2.0
// Acceptance suite. One PASS/FAIL line per criterion; every tolerance below
// is fixed here and nowhere else. Exit status is nonzero when a gating
// criterion fails. Optional argument: path of a JSON report.
#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "exponent_table.hpp"
#include "oscibound/certify.hpp"
#include "oscibound/errors.hpp"
#include "oscibound/experiments.hpp"
#include "oscibound/report.hpp"

using namespace oscibound;
using nlohmann::json;

namespace {

// Criterion 1
constexpr double kWitnessTol = 1e-10;
constexpr double kCheckSeconds = 5.0;
// Criterion 3
constexpr double kSlopeTol11 = 0.05;
constexpr double kDecay11Seconds = 300.0;
// Criterion 4
constexpr double kSlopeTol22 = 0.07;
constexpr double kDecay22Seconds = 1200.0;
// Criterion 5
constexpr double kDampingTol = 0.07;
constexpr double kDampingSeconds = 600.0;
// Criterion 6
constexpr double kVdcSlopeTol = 0.05;
constexpr double kVdcShift = -1.0;
constexpr double kVdcShiftTol = 0.1;
constexpr double kVdcSlopeChangeTol = 0.05;
// Criterion 7
constexpr double kShellSlopeTol = 0.15;
// The 4096-node budget resolves two oscillation shells (mu = 16, 256) at most.
constexpr std::size_t kMinShellsPerRegime = 2;
// Criterion 8
constexpr double kBandFactor = 3.0;
constexpr double kEps0 = 0.5;
// Criterion 9
constexpr double kSvdRelTol = 1e-8;
constexpr int kRandomKernels = 50;
constexpr int kMaxRandomSize = 64;
// Criterion 10
constexpr double kDualityRelTol = 1e-8;
constexpr double kSandwichRelTol = 1e-6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Outcome {
  bool pass = false;
  std::string summary;
  json details = json::object();
};

struct Criterion {
  int id;
  const char* title;
  bool gating;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const PhaseDescriptor& quartic() {
  static const PhaseDescriptor p = named_phase("family1-1-1-4");
  return p;
}

double target_gamma(const PhaseDescriptor& ph, double p) {
  return decay_exponent(static_cast<int>(ph.nx), static_cast<int>(ph.ny), static_cast<int>(ph.degree()),
                        LpExponent::parse(p == 2.0 ? "2" : "3/2"))
      .get_d();
}

// Kernels touched by the experiments; criterion 10 re-checks all of them.
std::vector<std::pair<std::string, KernelMatrix>>& experiment_kernels() {
  static std::vector<std::pair<std::string, KernelMatrix>> k;
  return k;
}

// Sandwich flags reported by the fits themselves.
std::vector<std::string>& sandwich_failures() {
  static std::vector<std::string> f;
  return f;
}

void record_fit(const std::string& tag, const DecayFit& fit) {
  for (const auto& pt : fit.points) {
    if (!pt.sandwich_ok) sandwich_failures().push_back(tag + fmt(" lambda=%g", pt.lambda));
  }
}

// ---------------------------------------------------------------------------

Outcome certification() {
  Outcome o;
  o.pass = true;
  auto timed_check = [&](const char* name, auto&& verdict) {
    const auto phase = named_phase(name);
    const auto t0 = Clock::now();
    const auto r1 = check_rank_one(phase);
    const auto rad = check_radial_nondegeneracy(phase);
    const double dt = seconds_since(t0);
    const bool ok = verdict(phase, r1, rad) && dt < kCheckSeconds;
    o.details[name] = {{"rank_one", to_json(r1)},
                       {"radial_x", to_json(rad.x_side)},
                       {"radial_y", to_json(rad.y_side)},
                       {"seconds", dt},
                       {"ok", ok}};
    o.pass = o.pass && ok;
    return ok;
  };
  auto positive = [](const PhaseDescriptor&, const CertificateResult& r1, const RadialCertificates& rad) {
    return r1.status == CertStatus::CertifiedPositive &&
           rad.x_side.status == CertStatus::CertifiedPositive &&
           rad.y_side.status == CertStatus::CertifiedPositive;
  };
  // Rank-one must fail with a witness; every witness reported on any side
  // must re-evaluate below the tolerance on its own target.
  auto witness = [](const PhaseDescriptor& ph, const CertificateResult& r1, const RadialCertificates& rad) {
    auto valid = [](const HomogeneousPolynomial& target, const CertificateResult& r) {
      if (r.status != CertStatus::WitnessFound) return true;
      return std::abs(target.evaluate(r.witness)) <= kWitnessTol;
    };
    const auto b = boundary_gradients(ph);
    return r1.status == CertStatus::WitnessFound && valid(hessian_frobenius_squared(ph), r1) &&
           valid(sum_of_squares(b.P), rad.x_side) && valid(sum_of_squares(b.Q), rad.y_side);
  };
  std::vector<std::string> parts;
  for (const char* n : {"family1-1-1-4", "family1-2-2-5"}) {
    const bool ok = timed_check(n, positive);
    parts.push_back(std::string(n) + (ok ? " positive" : " NOT positive") +
                    fmt(" %.2fs", o.details[n]["seconds"].get<double>()));
  }
  for (const char* n : {"x2y2", "x3y"}) {
    const bool ok = timed_check(n, witness);
    parts.push_back(std::string(n) + (ok ? " witness" : " NO valid witness") +
                    fmt(" %.2fs", o.details[n]["seconds"].get<double>()));
  }
  for (std::size_t i = 0; i < parts.size(); ++i) o.summary += (i ? "; " : "") + parts[i];
  return o;
}

Outcome exponent_table() {
  Outcome o;
  int good = 0, total = 0;
  for (const auto& row : oracle::kExponentTable) {
    ++total;
    const Rational g = decay_exponent(row.nx, row.ny, row.d, LpExponent::from_p(2));
    const auto r = admissible_p_range(row.nx, row.ny, row.d, false);
    const bool ok = g == Rational(row.gamma2) && r.lower == Rational(row.lower) &&
                    r.upper == Rational(row.upper) &&
                    decay_exponent(row.nx, row.ny, row.d, LpExponent::parse("3/2")) ==
                        Rational(row.gamma32);
    good += ok;
    o.details["rows"].push_back({{"case", {row.nx, row.ny, row.d}},
                                 {"gamma2", rational_json(g)},
                                 {"lower", rational_json(r.lower)},
                                 {"upper", rational_json(r.upper)},
                                 {"ok", ok}});
  }
  o.pass = good == total && total == 20;
  o.summary = std::to_string(good) + "/" + std::to_string(total) + " cases exact";
  return o;
}

Outcome decay_11() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto fit = decay_fit(quartic(), 2.0, dyadic_range(6, 14), default_request(quartic()));
  const double dt = seconds_since(t0);
  record_fit("decay(1+1)", fit);
  const double target = -target_gamma(quartic(), 2.0);
  o.pass = std::abs(fit.fit.slope - target) <= kSlopeTol11 && fit.stability.performed &&
           fit.stability.passed && !fit.truncated && dt < kDecay11Seconds;
  o.summary = fmt("slope %.4f (target %.4f", fit.fit.slope, target) + fmt(" +- %.2f)", kSlopeTol11) +
              fmt(", stability delta %.2e", fit.stability.delta) +
              (fit.stability.passed ? " passed" : " FAILED") + fmt(", %.1fs", dt);
  o.details = to_json(fit);
  o.details["seconds"] = dt;
  return o;
}

Outcome decay_22() {
  Outcome o;
  const auto phase = named_phase("family1-2-2-5");
  const auto t0 = Clock::now();
  const auto fit = decay_fit(phase, 2.0, dyadic_range(4, 10), default_request(phase));
  const double dt = seconds_since(t0);
  record_fit("decay(2+2)", fit);
  const double target = -target_gamma(phase, 2.0);
  o.pass = std::abs(fit.fit.slope - target) <= kSlopeTol22 && !fit.truncated && dt < kDecay22Seconds;
  o.summary = fmt("slope %.4f (target %.4f", fit.fit.slope, target) + fmt(" +- %.2f)", kSlopeTol22) +
              fmt(", %.1fs", dt);
  // Diagnostics: local slopes between neighbours and the grid per lambda.
  json local = json::array();
  for (std::size_t i = 1; i < fit.points.size(); ++i) {
    const auto& a = fit.points[i - 1];
    const auto& b = fit.points[i];
    local.push_back({{"from", a.lambda},
                     {"to", b.lambda},
                     {"slope", std::log2(b.norm.value / a.norm.value) / std::log2(b.lambda / a.lambda)}});
  }
  if (!local.empty()) {
    o.summary += fmt(", last local slope %.4f", local.back()["slope"].get<double>());
  }
  o.details = to_json(fit);
  o.details["local_slopes"] = local;
  o.details["seconds"] = dt;
  if (!fit.points.empty()) {
    experiment_kernels().emplace_back(
        "family1-2-2-5 lambda=16",
        build_kernel(phase, with_resolution([&] {
                       auto r = default_request(phase);
                       r.lambda = 16.0;
                       return r;
                     }(), fit.points.front().m)));
  }
  return o;
}

Outcome damping() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto rows = damping_scan(quartic(), DampingSpec::radial_square(1, 1, {0.0, 0.0}), {0.25, 0.75},
                                 dyadic_range(4, 12), default_request(quartic()), {}, kDampingTol);
  const double dt = seconds_since(t0);
  o.pass = dt < kDampingSeconds && rows.size() == 2;
  const double expect[] = {-0.375, -0.5};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const bool ok = r.fit && std::abs(r.fit->fit.slope - expect[i]) <= kDampingTol &&
                    (!r.fit->stability.performed || r.fit->stability.passed);
    o.pass = o.pass && ok;
    if (r.fit) {
      record_fit(fmt("damping sigma=%g", r.sigma), *r.fit);
      o.summary += fmt("sigma %.2f: ", r.sigma) + fmt("slope %.4f (target %.3f)", r.fit->fit.slope, expect[i]);
    } else {
      o.summary += fmt("sigma %.2f: skipped", r.sigma);
    }
    o.summary += i + 1 < rows.size() ? "; " : "";
    o.details["rows"].push_back(to_json(r));
  }
  o.summary += fmt(" +- %.2f", kDampingTol) + fmt(", %.1fs", dt);
  o.details["seconds"] = dt;
  {
    auto r = default_request(quartic());
    r.lambda = 64.0;
    r.damping = DampingSpec::radial_square(1, 1, {0.75, 0.0});
    const auto g = choose_grid(quartic(), r);
    experiment_kernels().emplace_back("damped sigma=0.75 lambda=64",
                                      build_kernel(quartic(), with_resolution(r, g.m)));
  }
  return o;
}

Outcome van_der_corput() {
  Outcome o;
  const auto lambdas = dyadic_range(4, 11);
  VdcConfig base;
  base.phase = named_phase("xy");
  const auto a = vdc_check(base, lambdas);
  VdcConfig scaled = base;
  scaled.phase.S *= Rational(4);
  scaled.mu = 4.0;
  const auto b = vdc_check(scaled, lambdas);
  record_fit("vdc", a.fit);
  record_fit("vdc mu=4", b.fit);
  const double shift = b.fit.fit.intercept - a.fit.fit.intercept;
  const double dslope = b.fit.fit.slope - a.fit.fit.slope;
  o.pass = std::abs(a.fit.fit.slope + 0.5) <= kVdcSlopeTol && std::abs(shift - kVdcShift) <= kVdcShiftTol &&
           std::abs(dslope) <= kVdcSlopeChangeTol && a.fit.stability.passed && b.fit.stability.passed;
  o.summary = fmt("slope %.4f (target -0.5 +- %.2f)", a.fit.fit.slope, kVdcSlopeTol) +
              fmt("; mu=4 intercept shift %.4f, slope change %.4f", shift, dslope);
  o.details = {{"unit", to_json(a)}, {"mu4", to_json(b)}, {"shift", shift}, {"slope_change", dslope}};
  return o;
}

Outcome shells() {
  Outcome o;
  o.pass = true;
  std::vector<int> ks;
  for (int k = -8; k <= -1; ++k) ks.push_back(k);
  for (double lambda : {std::ldexp(1.0, 12), std::ldexp(1.0, 16)}) {
    const auto prof = shell_profile(quartic(), lambda, ks);
    bool ok = prof.sum_sup_holds;
    std::string s = fmt("lambda 2^%g:", std::log2(lambda));
    auto check_fit = [&](const std::optional<LineFit>& fit, double target, const char* name,
                         ShellRegime regime) {
      std::size_t n = 0;
      for (const auto& r : prof.shells) n += r.regime == regime;
      const bool good = n >= kMinShellsPerRegime && fit && std::abs(fit->slope - target) <= kShellSlopeTol;
      ok = ok && good;
      s += std::string(" ") + name + fmt(" slope %.4f (target %.2f", fit ? fit->slope : NAN, target) +
           fmt(", %g shells)", static_cast<double>(n));
    };
    check_fit(prof.size_fit, prof.size_target, "size", ShellRegime::Size);
    check_fit(prof.oscillation_fit, prof.oscillation_target, "oscillation", ShellRegime::Oscillation);
    s += fmt(", sum/sup %.3f", prof.sum_sup_ratio) + fmt(" <= N0=%g", static_cast<double>(prof.measured_n0));
    s += prof.sum_sup_holds ? "" : " VIOLATED";
    o.pass = o.pass && ok;
    o.summary += (o.summary.empty() ? "" : "; ") + s;
    o.details["runs"].push_back(to_json(prof));
  }
  o.summary += fmt(" (slope tol +- %.2f)", kShellSlopeTol);
  {
    auto r = default_request(quartic());
    r.lambda = 1024.0;
    r.shell = ShellSpec{-2};
    r.x_grid = GridSpec::centered(1, 64, 0.5);
    r.y_grid = r.x_grid;
    const auto g = choose_grid(quartic(), r);
    experiment_kernels().emplace_back("shell k=-2 lambda=1024", build_kernel(quartic(), with_resolution(r, g.m)));
  }
  return o;
}

Outcome sharpness() {
  Outcome o;
  o.pass = true;
  for (double p : {2.0, 1.5}) {
    const double gamma = target_gamma(quartic(), p);
    double lo = INFINITY, hi = 0.0;
    json pts = json::array();
    for (double lambda : dyadic_range(4, 12)) {
      auto r = default_request(quartic());
      r.lambda = lambda;
      const auto g = choose_grid(quartic(), r);
      const auto K = build_kernel(quartic(), with_resolution(r, g.m));
      const auto t = lower_bound_via_testfn(K, quartic().degree(), p, kEps0);
      const double scaled = t.value * std::pow(lambda, gamma);
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
      pts.push_back({{"lambda", lambda}, {"m", g.m}, {"testfn", t.value}, {"scaled", scaled}});
      if (lambda == 256.0 && p == 2.0) experiment_kernels().emplace_back("family1-1-1-4 lambda=256", K);
    }
    const bool ok = hi / lo <= kBandFactor;
    o.pass = o.pass && ok;
    o.summary += (o.summary.empty() ? "" : "; ") + fmt("p=%g: max/min of testfn*lambda^gamma = %.3f", p, hi / lo);
    o.details[p == 2.0 ? "p2" : "p1.5"] = pts;
  }
  o.summary += fmt(" (band factor %.0f)", kBandFactor);
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240531);
  std::uniform_int_distribution<int> size(1, kMaxRandomSize);
  std::normal_distribution<double> gauss;
  double worst = 0.0;
  bool exact = true;
  for (int t = 0; t < kRandomKernels; ++t) {
    const int rows = size(rng), cols = size(rng);
    KernelMatrix K;
    K.entries.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) K.entries(r, c) = {gauss(rng), gauss(rng)};
    K.x_grid = GridSpec::centered(1, rows, 1.0);
    K.y_grid = GridSpec::centered(1, cols, 1.0);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(K.entries);
    const double ref = svd.singularValues()(0) * continuum_scale(K, 2.0);
    worst = std::max(worst, rel(op_norm(K, 2.0).value, ref));
    double col = 0.0, row = 0.0;
    for (int c = 0; c < cols; ++c) {
      double s = 0.0;
      for (int r = 0; r < rows; ++r) s += std::abs(K.entries(r, c));
      col = std::max(col, s);
    }
    for (int r = 0; r < rows; ++r) {
      double s = 0.0;
      for (int c = 0; c < cols; ++c) s += std::abs(K.entries(r, c));
      row = std::max(row, s);
    }
    const double inf = std::numeric_limits<double>::infinity();
    exact = exact && op_norm(K, 1.0).value == col * continuum_scale(K, 1.0) &&
            op_norm(K, inf).value == row * continuum_scale(K, inf);
  }
  o.pass = worst <= kSvdRelTol && exact;
  o.summary = fmt("%g kernels, worst p=2 relative error %.2e", kRandomKernels, worst) +
              (exact ? ", p in {1,inf} exact" : ", p in {1,inf} MISMATCH");
  o.details = {{"worst_relative_error", worst}, {"exact_1_inf", exact}};
  return o;
}

Outcome duality_sandwich() {
  Outcome o;
  const double inf = std::numeric_limits<double>::infinity();
  double worst_dual = 0.0;
  std::vector<std::string> bad = sandwich_failures();
  for (const auto& [name, K] : experiment_kernels()) {
    const auto A = K.adjoint();
    json entry{{"kernel", name}};
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double pc = p == 1.0 ? inf : p / (p - 1.0);
      const double d = rel(op_norm(K, p).value, op_norm(A, pc).value);
      entry["duality"].push_back({{"p", p}, {"relative_gap", d}});
      worst_dual = std::max(worst_dual, d);
    }
    for (double p : {1.5, 2.0}) {
      const double mid = op_norm(K, p).value;
      const double up = schur_bound(K, p).value;
      bool lower_ok = true;
      double low = 0.0;
      try {
        low = lower_bound_via_testfn(K, 4, p, kEps0).value;
        lower_ok = low <= mid * (1 + kSandwichRelTol);
      } catch (const InputError&) {
        // Test ball unresolved on this grid; only the upper half applies.
      }
      const bool ok = lower_ok && mid <= up * (1 + kSandwichRelTol);
      if (!ok) bad.push_back(name + fmt(" p=%g", p));
      entry["sandwich"].push_back({{"p", p}, {"testfn", low}, {"norm", mid}, {"schur", up}, {"ok", ok}});
    }
    o.details["kernels"].push_back(entry);
  }
  o.pass = worst_dual <= kDualityRelTol && bad.empty() && !experiment_kernels().empty();
  o.summary = fmt("%g kernels, worst duality gap %.2e", static_cast<double>(experiment_kernels().size()), worst_dual) +
              (bad.empty() ? ", sandwich holds everywhere" : ", sandwich violated: " + bad.front());
  o.details["sandwich_failures"] = bad;
  return o;
}

Outcome log_factor() {
  Outcome o;
  const auto rows = damping_scan(quartic(), DampingSpec::radial_square(1, 1, {0.0, 0.0}), {0.5},
                                 dyadic_range(4, 12), default_request(quartic()), {}, kDampingTol);
  if (rows.empty() || !rows.front().fit) {
    o.summary = "critical-sigma fit did not run";
    return o;
  }
  const auto& fit = *rows.front().fit;
  record_fit("damping sigma=0.5", fit);
  const auto v = log_factor_detect(fit.lambdas(), fit.norms());
  o.pass = v.classification != GrowthClass::SuperLogarithmic;
  o.summary = "open-problem diagnostic: verdict " + to_string(v.classification) +
              fmt(", slope %.4f, per-decade drift %.4f", fit.fit.slope, v.slope_per_decade);
  o.details = {{"label", "open-problem diagnostic"}, {"fit", to_json(fit)}, {"verdict", to_json(v)}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "certification", true, certification},
      {2, "exponent arithmetic", true, exponent_table},
      {3, "sharp L2 decay (1+1)", true, decay_11},
      {4, "sharp L2 decay (2+2)", true, decay_22},
      {5, "damping phase diagram", true, damping},
      {6, "van der Corput", true, van_der_corput},
      {7, "shell bounds", true, shells},
      {8, "lower-bound sharpness", true, sharpness},
      {9, "oracle equivalence", true, oracle_equivalence},
      {10, "duality and sandwich", true, duality_sandwich},
      {11, "log factor at critical damping", false, log_factor},
  };
  json report = json::array();
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    const double dt = seconds_since(t0);
    std::printf("%s [%d] %s%s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                c.gating ? "" : " (non-gating)", o.summary.c_str(), dt);
    std::fflush(stdout);
    if (!o.pass && c.gating) ++failures;
    report.push_back({{"criterion", c.id},
                      {"title", c.title},
                      {"gating", c.gating},
                      {"pass", o.pass},
                      {"summary", o.summary},
                      {"seconds", dt},
                      {"details", o.details}});
  }
  std::printf("%d gating criteria failed\n", failures);
  if (argc > 1) write_text_file(argv[1], report.dump(2) + "\n");
  return failures == 0 ? 0 : 1;
}
