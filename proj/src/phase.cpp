// SPDX-License-Identifier: Apache-2.0
#include "oscibound/phase.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <regex>

#include "oscibound/errors.hpp"

namespace oscibound {

PhaseDescriptor::PhaseDescriptor(std::size_t nx_, std::size_t ny_,
                                 HomogeneousPolynomial S_)
    : nx(nx_), ny(ny_), S(std::move(S_)) {
  if (nx == 0 || ny == 0) throw InputError("nx and ny must be positive");
  if (S.num_vars() != nx + ny) {
    throw InputError("phase has " + std::to_string(S.num_vars()) +
                     " variables but nx + ny = " + std::to_string(nx + ny));
  }
}

MixedHessian mixed_hessian(const PhaseDescriptor& phase) {
  MixedHessian h;
  h.rows = phase.nx;
  h.cols = phase.ny;
  h.degree_too_low = phase.degree() < 2;
  h.entries.reserve(phase.nx * phase.ny);
  for (std::size_t i = 0; i < phase.nx; ++i) {
    const auto dx = partial_derivative(phase.S, phase.x_index(i));
    for (std::size_t j = 0; j < phase.ny; ++j) {
      if (h.degree_too_low) {
        h.entries.emplace_back(phase.num_vars(), 0);
      } else {
        h.entries.push_back(partial_derivative(dx, phase.y_index(j)));
      }
    }
  }
  return h;
}

HomogeneousPolynomial hessian_frobenius_squared(const PhaseDescriptor& phase) {
  if (phase.degree() < 2) {
    throw InputError("mixed Hessian needs a phase of degree at least 2");
  }
  return sum_of_squares(mixed_hessian(phase).entries);
}

BoundaryGradients boundary_gradients(const PhaseDescriptor& phase) {
  if (phase.degree() < 2) {
    throw InputError("boundary gradients need a phase of degree at least 2");
  }
  std::vector<std::size_t> xs(phase.nx), ys(phase.ny);
  std::iota(xs.begin(), xs.end(), 0);
  std::iota(ys.begin(), ys.end(), phase.nx);

  BoundaryGradients g;
  for (std::size_t i = 0; i < phase.ny; ++i) {
    g.P.push_back(restrict_to_variables(
        partial_derivative(phase.S, phase.y_index(i)), xs));
  }
  for (std::size_t j = 0; j < phase.nx; ++j) {
    g.Q.push_back(restrict_to_variables(
        partial_derivative(phase.S, phase.x_index(j)), ys));
  }
  return g;
}

PhaseDescriptor gpt_example_phase(std::size_t nx, std::size_t ny, unsigned d,
                                  int family) {
  if (d < 3) throw InputError("example phases require degree d >= 3");
  if (nx == 0 || ny == 0) throw InputError("nx and ny must be positive");
  if (family == 1 && nx != ny) {
    throw InputError("family 1 requires nx == ny");
  }
  if (family == 2 && !(nx > ny && d % 2 == 1)) {
    throw InputError("family 2 requires nx > ny and odd degree d");
  }
  if (family != 1 && family != 2) throw InputError("family must be 1 or 2");

  const std::size_t n = nx + ny;
  const std::size_t pairs = ny;  // cyclic block uses the first ny x-variables
  HomogeneousPolynomial S(n, d);
  auto add = [&](std::size_t xi, unsigned xe, std::size_t yj, unsigned ye) {
    MultiIndex e(n, 0);
    e[xi] = xe;
    e[nx + yj] = ye;
    S.add_term(e, 1);
  };
  for (std::size_t i = 0; i < pairs; ++i) add(i, d - 1, i, 1);
  for (std::size_t i = 1; i < pairs; ++i) add(i - 1, 1, i, d - 1);
  add(pairs - 1, 1, 0, d - 1);
  if (family == 2) {
    for (std::size_t i = ny; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) add(i, d - 1, j, 1);
    }
  }
  S *= Rational(1, d - 1);
  return PhaseDescriptor(nx, ny, std::move(S));
}

PhaseDescriptor named_phase(const std::string& name) {
  static const std::regex family_re(R"(family([12])-(\d+)-(\d+)-(\d+))");
  std::smatch m;
  if (std::regex_match(name, m, family_re)) {
    return gpt_example_phase(std::stoul(m[2]), std::stoul(m[3]),
                             static_cast<unsigned>(std::stoul(m[4])),
                             std::stoi(m[1]));
  }
  if (name == "x2y2") {
    return PhaseDescriptor(1, 1, HomogeneousPolynomial::monomial({2, 2}, 1));
  }
  if (name == "x3y") {
    return PhaseDescriptor(1, 1, HomogeneousPolynomial::monomial({3, 1}, 1));
  }
  if (name == "xy") {
    return PhaseDescriptor(1, 1, HomogeneousPolynomial::monomial({1, 1}, 1));
  }
  throw InputError("unknown phase name '" + name + "'");
}

std::vector<std::string> builtin_phase_names() {
  return {"family1-NX-NY-D", "family2-NX-NY-D", "x2y2", "x3y", "xy"};
}

namespace {

nlohmann::json integer_to_json(const mpz_class& z) {
  if (z.fits_slong_p()) return static_cast<std::int64_t>(z.get_si());
  return z.get_str();
}

mpz_class integer_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return mpz_class(j.get<long>());
  if (j.is_string()) {
    mpz_class z;
    if (z.set_str(j.get<std::string>(), 10) != 0) {
      throw InputError("malformed integer string in polynomial JSON");
    }
    return z;
  }
  throw InputError("coefficient numerator/denominator must be an integer");
}

}  // namespace

nlohmann::json to_json(const HomogeneousPolynomial& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [exps, c] : p.terms()) {
    terms.push_back({{"exp", exps},
                     {"num", integer_to_json(c.get_num())},
                     {"den", integer_to_json(c.get_den())}});
  }
  return {{"nvars", p.num_vars()}, {"degree", p.degree()}, {"terms", terms}};
}

HomogeneousPolynomial polynomial_from_json(const nlohmann::json& j) {
  try {
    HomogeneousPolynomial p(j.at("nvars").get<std::size_t>(),
                            j.at("degree").get<unsigned>());
    for (const auto& t : j.at("terms")) {
      mpz_class num = integer_from_json(t.at("num"));
      mpz_class den = integer_from_json(t.at("den"));
      if (den == 0) throw InputError("zero denominator in polynomial JSON");
      Rational c(num, den);
      c.canonicalize();
      p.add_term(t.at("exp").get<MultiIndex>(), c);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed polynomial JSON: ") + e.what());
  }
}

nlohmann::json to_json(const PhaseDescriptor& phase) {
  auto j = to_json(phase.S);
  j["nx"] = phase.nx;
  j["ny"] = phase.ny;
  return j;
}

PhaseDescriptor phase_from_json(const nlohmann::json& j) {
  try {
    return PhaseDescriptor(j.at("nx").get<std::size_t>(),
                           j.at("ny").get<std::size_t>(),
                           polynomial_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed phase JSON: ") + e.what());
  }
}

PhaseDescriptor load_phase(const std::string& file_or_name) {
  if (std::filesystem::exists(file_or_name)) {
    std::ifstream in(file_or_name);
    if (!in) throw InputError("cannot open phase file " + file_or_name);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InputError("phase file " + file_or_name + " is not JSON: " +
                       e.what());
    }
    return phase_from_json(j);
  }
  return named_phase(file_or_name);
}

}  // namespace oscibound
