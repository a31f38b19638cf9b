// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "oscibound/errors.hpp"
#include "oscibound/experiments.hpp"

using namespace oscibound;

TEST_CASE("line fit") {
  const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(fit_line({1, 1}, {2, 3}), InputError);
}

TEST_CASE("dyadic lists") {
  const auto l = dyadic_range(4, 12, 2);
  CHECK(l == std::vector<double>{16, 64, 256, 1024, 4096});
  CHECK_NOTHROW(require_dyadic(l));
  CHECK_THROWS_AS(require_dyadic({16, 48}), InputError);
  CHECK_THROWS_AS(require_dyadic({64, 16}), InputError);
}

TEST_CASE("decay fit rejects short sweeps") {
  const auto phase = named_phase("family1-1-1-4");
  CHECK_THROWS_AS(decay_fit(phase, 2.0, {64}, default_request(phase)), InputError);
  CHECK_THROWS_AS(decay_fit(phase, 2.0, {16, 32, 64, 128}, default_request(phase)), InputError);
}

TEST_CASE("small decay fit: monotone decay, sandwich, predicted slope") {
  const auto phase = named_phase("family1-1-1-4");
  DecayOptions opts;
  opts.stability_gate = false;
  const auto fit = decay_fit(phase, 2.0, dyadic_range(2, 6), default_request(phase), opts);
  REQUIRE(fit.points.size() == 5);
  REQUIRE(fit.predicted);
  CHECK(*fit.predicted == -0.25);
  CHECK(fit.fit.slope < 0.0);
  CHECK(fit.rank_one_status == "CertifiedPositive");
  for (const auto& pt : fit.points) CHECK(pt.sandwich_ok);
  CHECK(to_json(fit)["points"].size() == 5);
}

TEST_CASE("p != 2 fit carries an interpolated upper bound") {
  const auto phase = named_phase("family1-1-1-4");
  DecayOptions opts;
  opts.stability_gate = false;
  opts.certify_rank_one = false;
  const auto fit = decay_fit(phase, 1.5, dyadic_range(2, 6), default_request(phase), opts);
  REQUIRE(fit.upper_fit);
  for (const auto& pt : fit.points) {
    REQUIRE(pt.upper);
    CHECK(pt.norm.value <= pt.upper->value * (1 + 1e-6));
  }
}

TEST_CASE("budget truncation is recorded") {
  const auto phase = named_phase("family1-1-1-4");
  DecayOptions opts;
  opts.stability_gate = false;
  opts.rule.max_nodes_per_side = 64;
  const auto fit = decay_fit(phase, 2.0, dyadic_range(2, 10), default_request(phase), opts);
  CHECK(fit.truncated);
  CHECK_FALSE(fit.dropped_lambdas.empty());
  opts.budget_mode = BudgetMode::Cap;
  const auto capped = decay_fit(phase, 2.0, dyadic_range(2, 10), default_request(phase), opts);
  CHECK(capped.points.size() == 9);
  CHECK(capped.points.back().cap_hit);
}

TEST_CASE("damping scan skips sigma outside the strip") {
  const auto phase = named_phase("family1-1-1-4");
  DecayOptions opts;
  opts.stability_gate = false;
  opts.fixed_m = 32;
  const auto rows = damping_scan(phase, DampingSpec::radial_square(1, 1, {0, 0}), {-0.6, 0.75},
                                 dyadic_range(1, 5), default_request(phase), opts);
  REQUIRE(rows.size() == 2);
  CHECK_FALSE(rows[0].skipped.empty());
  CHECK_FALSE(rows[0].fit);
  CHECK(rows[1].fit);
  CHECK(rows[1].prediction->exponent == Rational(1, 2));
}

TEST_CASE("log-factor classifier on synthetic data") {
  const auto l = dyadic_range(4, 12);
  std::vector<double> bounded, logarithmic, power;
  for (double x : l) {
    bounded.push_back(1.0 / std::sqrt(x));
    logarithmic.push_back(std::log2(x) / std::sqrt(x));
    power.push_back(std::pow(x, 0.3) / std::sqrt(x));
  }
  CHECK(log_factor_detect(l, bounded).classification == GrowthClass::Bounded);
  CHECK(log_factor_detect(l, logarithmic).classification == GrowthClass::Logarithmic);
  CHECK(log_factor_detect(l, power).classification == GrowthClass::SuperLogarithmic);
  CHECK_THROWS_AS(log_factor_detect({16, 32, 64, 128, 256}, {1, 1, 1, 1, 1}), InputError);
  CHECK_THROWS_AS(log_factor_detect({16, 32, 64, 128, 256, 500}, {1, 1, 1, 1, 1, 1}), InputError);
}

TEST_CASE("shell profile: sum versus sup holds as a matrix statement") {
  const auto phase = named_phase("family1-1-1-4");
  ShellOptions opts;
  opts.common_m = 256;
  const auto prof = shell_profile(phase, 256.0, {-5, -4, -3, -2, -1}, {}, opts);
  CHECK(prof.shells.size() + prof.dropped.size() == 5);
  CHECK(prof.sum_sup_holds);
  CHECK(prof.sum_norm <= prof.measured_n0 * prof.sup_norm * (1 + 1e-9));
  CHECK(prof.measured_n0 >= 2);
  for (const auto& s : prof.shells) {
    CHECK(s.norm > 0.0);
    CHECK(s.mu == doctest::Approx(256.0 * std::ldexp(1.0, 4 * s.k)));
  }
}

TEST_CASE("measured overlap of disjoint and nested shells") {
  const auto phase = named_phase("family1-1-1-4");
  std::vector<KernelMatrix> shells;
  for (int k = -3; k <= -1; ++k) {
    auto r = with_resolution(default_request(phase), 64);
    r.shell = ShellSpec{k};
    shells.push_back(build_kernel(phase, r));
  }
  const auto n0 = measured_overlap(shells);
  CHECK(n0 >= 1);
  CHECK(n0 <= shells.size());
}

TEST_CASE("van der Corput configuration checks") {
  VdcConfig cfg;
  cfg.phase = named_phase("xy");
  cfg.mu = 2.0;
  cfg.A = 2.0;
  DecayOptions opts;
  opts.stability_gate = false;
  CHECK_THROWS_AS(vdc_check(cfg, dyadic_range(2, 6), opts), InputError);
  cfg.mu = 1.0;
  cfg.A = 1.0;
  const auto r = vdc_check(cfg, dyadic_range(2, 6), opts);
  CHECK(r.hessian_min == 1.0);
  CHECK(r.hessian_max == 1.0);
  CHECK(r.fit.fit.slope < 0.0);
}
