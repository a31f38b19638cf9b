// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "oscibound/errors.hpp"
#include "oscibound/experiments.hpp"

using namespace oscibound;

namespace {

const PhaseDescriptor& quartic() {
  static const PhaseDescriptor p = named_phase("family1-1-1-4");
  return p;
}

KernelRequest request(double lambda, std::size_t m, const PhaseDescriptor& phase = quartic()) {
  auto r = default_request(phase);
  r.lambda = lambda;
  return with_resolution(r, m);
}

std::string golden(const char* name) { return std::string(OSCIBOUND_TEST_DATA) + "/golden/" + name; }

}  // namespace

TEST_CASE("smooth bump and cut-off") {
  CHECK(smooth_bump(0.0) == 1.0);
  CHECK(smooth_bump(1.0) == 0.0);
  CHECK(smooth_bump(-1.5) == 0.0);
  CHECK(smooth_bump(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)).epsilon(1e-15));
  for (double t = -1.2; t <= 1.2; t += 0.01) {
    CHECK(smooth_bump(t) >= 0.0);
    CHECK(smooth_bump(t) <= 1.0);
  }
  CutoffSpec box{0.5, CutoffProfile::Box};
  CHECK(box(0.5) == 1.0);
  CHECK(box(0.51) == 0.0);
  CHECK(cutoff_profile_from_string(to_string(CutoffProfile::Unit)) == CutoffProfile::Unit);
}

TEST_CASE("shell partition of unity on a finite window") {
  const int K = 10;
  double worst = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double r = std::exp2(-K + (K - 1) * i / 4000.0);  // 2^-K .. 1/2
    double s = 0.0;
    for (int k = -K; k <= 0; ++k) s += ShellSpec{k}(r);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst <= 1e-9);
  // Support of one shell sits in [1/2, 2].
  CHECK(shell_partition(0.49) == 0.0);
  CHECK(shell_partition(2.01) == 0.0);
  CHECK(shell_partition(1.0) > 0.0);
}

TEST_CASE("shell kernels add up to the full kernel on the annulus") {
  const int K = 6;
  const auto full = build_kernel(quartic(), request(32.0, 64));
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(full.entries.rows(), full.entries.cols());
  for (int k = -K; k <= 0; ++k) {
    auto r = request(32.0, 64);
    r.shell = ShellSpec{k};
    sum += build_kernel(quartic(), r).entries;
  }
  double worst = 0.0;
  std::vector<double> x(1), y(1);
  for (Eigen::Index r = 0; r < sum.rows(); ++r) {
    full.x_grid.node(r, x);
    for (Eigen::Index c = 0; c < sum.cols(); ++c) {
      full.y_grid.node(c, y);
      const double rad = std::hypot(x[0], y[0]);
      if (rad < std::exp2(-K) || rad > 0.5) continue;
      worst = std::max(worst, std::abs(sum(r, c) - full.entries(r, c)));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("grid nodes are cell midpoints, first axis slowest") {
  const auto g = GridSpec::centered(2, 4, 1.0);
  CHECK(g.h() == 0.5);
  CHECK(g.num_nodes() == 16);
  CHECK(g.cell_volume() == 0.25);
  std::vector<double> v(2);
  g.node(1, v);
  CHECK(v[0] == -0.75);
  CHECK(v[1] == -0.25);
  g.node(4, v);
  CHECK(v[0] == -0.25);
  CHECK(v[1] == -0.75);
}

TEST_CASE("resolution rule") {
  CHECK(grid_resolution_for(quartic(), 1.0, {}) == 32);
  CHECK_THROWS_AS(grid_resolution_for(quartic(), 0.5, {}), InputError);

  std::size_t prev = 0;
  for (int e = 0; e <= 12; ++e) {
    const std::size_t m = grid_resolution_for(quartic(), std::ldexp(1.0, e), {});
    CHECK(m >= prev);
    CHECK(std::has_single_bit(m));
    prev = m;
  }

  ResolutionRule tight;
  tight.max_nodes_per_side = 256;
  try {
    grid_resolution_for(quartic(), 65536.0, {}, tight);
    FAIL("expected BudgetExceeded");
  } catch (const BudgetExceeded& e) {
    CHECK(e.lambda() == 65536.0);
  }
  const auto choice = choose_grid(quartic(), request(65536.0, 32), tight);
  CHECK(choice.cap_hit);
  CHECK(choice.m == 256);
  CHECK(choice.requested_m > 256);
}

TEST_CASE("resolution rule golden at lambda = 2^10") {
  std::ifstream in(golden("grid_family1-1-1-4_lambda1024.json"));
  REQUIRE(in);
  const auto j = nlohmann::json::parse(in);
  const ResolutionRule rule;
  const auto req = request(1024.0, 32);
  const auto choice = choose_grid(quartic(), req, rule);
  CHECK(choice.m == j["m"].get<std::size_t>());
  CHECK(choice.gradient_bound == doctest::Approx(j["gradient_bound"].get<double>()).epsilon(1e-12));
  // The rule itself: m is the first power of two meeting the phase step.
  const double width = req.x_grid.hi - req.x_grid.lo;
  CHECK(width / choice.m * 1024.0 * choice.gradient_bound <= rule.phase_step);
  CHECK(width / (choice.m / 2) * 1024.0 * choice.gradient_bound > rule.phase_step);
}

TEST_CASE("sampled gradient bound against a dense grid") {
  // Amplitude-weighted max of |grad S| * phi over a 1001^2 grid.
  const auto& S = quartic().S;
  const auto dx = partial_derivative(S, 0), dy = partial_derivative(S, 1);
  double dense = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    for (int k = 0; k <= 1000; ++k) {
      const std::vector<double> v{-1.0 + 0.002 * i, -1.0 + 0.002 * k};
      const double w = smooth_bump(std::hypot(v[0], v[1]));
      dense = std::max(dense, w * std::hypot(oracle::eval(dx, v), oracle::eval(dy, v)));
    }
  }
  const double G = sampled_gradient_bound(quartic(), request(64.0, 32));
  CHECK(G <= dense * 1.001);
  CHECK(G >= dense * 0.97);
}

TEST_CASE("kernel at lambda = 0 is the cut-off") {
  const auto K = build_kernel(quartic(), request(0.0, 64));
  CHECK(K.entries.imag().cwiseAbs().maxCoeff() == 0.0);
  CHECK(K.entries.real().minCoeff() >= 0.0);
  CHECK(K.entries.real().maxCoeff() <= 1.0);
  CHECK(K.entries.real().maxCoeff() >= 0.99);
}

TEST_CASE("conjugate symmetry in lambda") {
  const auto a = build_kernel(quartic(), request(37.0, 48));
  const auto b = build_kernel(quartic(), request(-37.0, 48));
  CHECK((a.entries - b.entries.conjugate()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("kernel matches the independently computed golden file") {
  double lambda = 0.0;
  const auto ref = read_kernel_binary(golden("kernel_m16_lambda8.bin"), &lambda);
  CHECK(lambda == 8.0);
  const auto K = build_kernel(quartic(), request(8.0, 16));
  REQUIRE(ref.rows() == 16);
  REQUIRE(ref.cols() == 16);
  CHECK((K.entries - ref).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("binary dump round trip") {
  const auto K = build_kernel(named_phase("family1-2-2-5"), request(5.0, 8, named_phase("family1-2-2-5")));
  const auto path = std::filesystem::temp_directory_path() / "oscibound_roundtrip.bin";
  write_kernel_binary(K, path.string());
  double lambda = 0.0;
  const auto back = read_kernel_binary(path.string(), &lambda);
  std::filesystem::remove(path);
  CHECK(lambda == 5.0);
  CHECK(back == K.entries);
  CHECK_THROWS_AS(read_kernel_binary("/nonexistent/kernel.bin", &lambda), InputError);
}

TEST_CASE("assembly does not depend on the worker count") {
  const auto serial = build_kernel(quartic(), request(300.0, 128));
  ::setenv("OSCIBOUND_THREADS", "4", 1);
  const auto parallel = build_kernel(quartic(), request(300.0, 128));
  ::unsetenv("OSCIBOUND_THREADS");
  CHECK(serial.entries == parallel.entries);
}

TEST_CASE("midpoint Riemann sums converge at second order or better") {
  std::vector<double> integrals;
  for (std::size_t m : {8, 16, 32, 64}) {
    const auto K = build_kernel(quartic(), request(0.0, m));
    integrals.push_back(K.entries.real().sum() * K.x_grid.h() * K.y_grid.h());
  }
  for (std::size_t i = 2; i < integrals.size(); ++i) {
    const double prev = std::abs(integrals[i - 1] - integrals[i - 2]);
    const double cur = std::abs(integrals[i] - integrals[i - 1]);
    CHECK((cur * 3 <= prev || cur <= 1e-14));
  }
}

TEST_CASE("damping factor homogeneity and exclusions") {
  const auto D = DampingSpec::radial_square(1, 1, {0.75, 0.0});
  const std::vector<double> v{0.3, -0.2}, w{0.6, -0.4};
  bool ex = false;
  CHECK(std::abs(D.factor(w, &ex)) == doctest::Approx(std::pow(4.0, 0.75) * std::abs(D.factor(v, &ex))).epsilon(1e-14));

  // Unit cut-off, lambda = 0: kernel on [-2, 2] at the doubled nodes scales by 4^sigma.
  auto r1 = request(0.0, 16);
  r1.cutoff.profile = CutoffProfile::Unit;
  r1.damping = D;
  auto r2 = r1;
  r2.x_grid = GridSpec::centered(1, 16, 2.0);
  r2.y_grid = GridSpec::centered(1, 16, 2.0);
  const auto k1 = build_kernel(quartic(), r1), k2 = build_kernel(quartic(), r2);
  CHECK((k2.entries - std::pow(4.0, 0.75) * k1.entries).cwiseAbs().maxCoeff() <= 1e-12);

  // Negative power on |x|: the x = 0 row of an odd grid is excluded.
  auto r3 = request(0.0, 33);
  r3.damping = DampingSpec::x_norm(1, 1, 1, {-0.5, 0.0});
  const auto k3 = build_kernel(quartic(), r3);
  CHECK(k3.excluded_nodes == 33);
  CHECK(k3.entries.row(16).cwiseAbs().maxCoeff() == 0.0);

  const auto hs = DampingSpec::hessian_norm(quartic(), {1.0, 0.0});
  CHECK(hs.dD == 2);
  CHECK(hs.base(v) == doctest::Approx(0.09 + 0.04).epsilon(1e-14));
}

TEST_CASE("sharpness test function") {
  const auto g = GridSpec::centered(1, 64, 1.0);
  const auto f = sharpness_test_function(1.0, 0.1, 4, g);
  std::size_t count = 0, expected = 0;
  for (double v : f) count += v != 0.0;
  for (std::size_t i = 0; i < 64; ++i) expected += std::abs(-1.0 + (i + 0.5) / 32.0) <= 0.1;
  CHECK(count == expected);
  CHECK(count == 6);
  CHECK_THROWS_AS(sharpness_test_function(1e8, 0.1, 4, g), InputError);
  CHECK_THROWS_AS(sharpness_test_function(1.0, 0.0, 4, g), InputError);
}

TEST_CASE("adjoint swaps grids and conjugates") {
  const auto K = build_kernel(named_phase("family2-2-1-5"),
                              request(3.0, 8, named_phase("family2-2-1-5")));
  const auto A = K.adjoint();
  CHECK(A.x_grid.dim == 1);
  CHECK(A.y_grid.dim == 2);
  CHECK(A.entries == K.entries.adjoint());
}
