#include <doctest.h>

#include <cmath>
#include <random>

#include "ecodyn/derivation.hpp"
#include "ecodyn/errors.hpp"
#include "ecodyn/integrators.hpp"
#include "ecodyn/verification.hpp"
#include "support/oracles.hpp"

using namespace ecodyn;

namespace {

Trajectory rk4(const Model& m, const Vector& x0, double t1, double h = 1e-3) {
  IntegratorConfig cfg;
  cfg.h = h;
  cfg.t1 = t1;
  cfg.record_every = 10;
  return integrate([&](const Vector& x) { return model_rhs(m, x); }, x0, cfg);
}

}  // namespace

TEST_CASE("sato_solve_c: hand-solved examples") {
  const CoeffSolution c = sato_solve_c(Eigen::Vector3d(1, 3, 2));
  CHECK(c.crs_normalized);
  CHECK(c.c == Eigen::Vector3d(1, 1, -2));
  CHECK(c.alpha() == 0.5);
  CHECK(c.beta() == 0.5);

  // A c = (0,1,1) has c = (0, 1, -1) at t = -b3: -c2 - c3 = 0, c1 - c3 = 1, c1 + c2 = 1.
  const CoeffSolution d = sato_solve_c(Eigen::Vector3d(0, 1, 1));
  CHECK(d.c == Eigen::Vector3d(0, 1, -1));
  CHECK(d.alpha() == 0.0);
  CHECK(d.beta() == 1.0);

  const CoeffSolution free = sato_solve_c(Eigen::Vector3d(1, 3, 2), 5.0);
  CHECK_FALSE(free.crs_normalized);
  CHECK(free.c == Eigen::Vector3d(8, -6, 5));
}

TEST_CASE("sato_solve_c: solutions satisfy A c = b and c.b = 0") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    const double b1 = u(rng), b3 = u(rng);
    const Eigen::Vector3d b(b1, b1 + b3, b3);
    const double t = (k % 2) ? u(rng) : -b3;
    const CoeffSolution c = sato_solve_c(b, k % 2 ? std::optional<double>(t) : std::nullopt);
    const Vector Ac = sato_skew_matrix() * Vector(c.c);
    CHECK((Ac - Vector(b)).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()));
    CHECK(std::abs(c.c.dot(b)) < 1e-12 * std::max(1.0, b.squaredNorm()));
    if (c.crs_normalized) CHECK(c.alpha() + c.beta() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sato_solve_c: errors") {
  try {
    sato_solve_c(Eigen::Vector3d(1, 1, 1));
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.defect() == 1.0);
  }
  CHECK_THROWS_AS(sato_solve_c(Eigen::Vector3d(1, 3, 2), 0.0), ValidationError);
  CHECK_THROWS_AS(sato_solve_c(Eigen::Vector3d(1, 1, 0)), ValidationError);  // CRS needs b3 != 0
}

TEST_CASE("bihamiltonian_ab: b = (1,3,2)") {
  const BiHamiltonianParams p = bihamiltonian_ab(Eigen::Vector3d(1, 3, 2));
  CHECK(p.a == -5.0);
  CHECK(p.b == 7.0);
  CHECK(p.alpha == 0.5);
  CHECK(p.beta == 0.5);
}

TEST_CASE("bihamiltonian_ab: exponents come from solving H3 for x3") {
  // b = (1, 4, 3) is compatible: D = 4 - 9 = -5, a = (12 - 1)/-5, b = (3 - 16)/-5.
  const BiHamiltonianParams p = bihamiltonian_ab(Eigen::Vector3d(1, 4, 3));
  CHECK(p.a == doctest::Approx(-11.0 / 5.0));
  CHECK(p.b == doctest::Approx(13.0 / 5.0));
  // H3 = (b-1) ln L + (1-a) ln K + (a-b) ln f: L exponent (1-b)/(a-b) = 1/3.
  CHECK(p.alpha == doctest::Approx(1.0 / 3.0));
  CHECK(p.beta == doctest::Approx(2.0 / 3.0));
  CHECK(sato_solve_c(Eigen::Vector3d(1, 4, 3)).alpha() == doctest::Approx(p.alpha));
}

TEST_CASE("bihamiltonian_ab: singular cases") {
  CHECK_THROWS_AS(bihamiltonian_ab(Eigen::Vector3d(1, 4, 2)), SingularityError);
  // b1 + b2 + b3 = 0 makes a = b.
  CHECK_THROWS_AS(bihamiltonian_ab(Eigen::Vector3d(1, -3, 2)), SingularityError);
}

TEST_CASE("bihamiltonian_ab: property sweep over b2 > b3 > b1") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-5, 5);
  int tested = 0;
  while (tested < 1000) {
    double v[3] = {u(rng), u(rng), u(rng)};
    std::sort(v, v + 3);
    const Eigen::Vector3d b(v[0], v[2], v[1]);
    if (std::abs(b[0] * b[1] - b[2] * b[2]) < 1e-6 || std::abs(b.sum()) < 1e-6) continue;
    const BiHamiltonianParams p = bihamiltonian_ab(b);
    CHECK(p.alpha + p.beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.alpha > 0.0);
    CHECK(p.alpha < 1.0);
    CHECK(p.beta > 0.0);
    CHECK(p.beta < 1.0);
    // Conditions b*b1 + b2 + a*b3 = 0 and b1 + a*b2 + b*b3 = 0.
    const double scale = std::max({1.0, std::abs(p.a), std::abs(p.b)}) * b.cwiseAbs().maxCoeff();
    CHECK(std::abs(p.b * b[0] + b[1] + p.a * b[2]) < 1e-12 * scale);
    CHECK(std::abs(b[0] + p.a * b[1] + p.b * b[2]) < 1e-12 * scale);
    ++tested;
  }
}

TEST_CASE("build_sato_H values and gradient") {
  const HamiltonianFn H = build_sato_H(sato_solve_c(Eigen::Vector3d(1, 3, 2)));
  CHECK(H(Vector::Ones(3)) == 0.0);
  CHECK(std::abs(H(Vector::Constant(3, std::exp(1.0)))) < 1e-15);
  const Vector g = H.grad(Vector{{1.0, 2.0, 4.0}});
  CHECK(g == Vector{{1.0, 0.5, -0.5}});
}

TEST_CASE("build_bihamiltonian_pair") {
  const BiHamiltonianPair Hs = build_bihamiltonian_pair(bihamiltonian_ab(Eigen::Vector3d(1, 3, 2)));
  // H3 coefficients (b-1, 1-a, a-b) = (6, 6, -12) are its gradient at (1,1,1).
  CHECK(Hs.H3.grad(Vector::Ones(3)) == Vector{{6.0, 6.0, -12.0}});
  CHECK(Hs.H1(Vector::Ones(3)) == 0.0);
  CHECK(Hs.H2(Vector::Ones(3)) == 0.0);
  CHECK(Hs.H3(Vector::Ones(3)) == 0.0);

  const Trajectory tr = rk4(SatoModel{1, 3, 2}, Vector::Ones(3), 5.0);
  CHECK(conservation_residual(Hs.H1, tr).max_abs < 1e-8);
  CHECK(conservation_residual(Hs.H2, tr).max_abs < 1e-8);
  CHECK(conservation_residual(Hs.H3, tr).max_abs < 1e-8);
}

TEST_CASE("bi-Hamiltonian bivectors reproduce the Sato field") {
  // The pair exists for any b with b1 b2 != b3^2, compatible or not.
  for (const Eigen::Vector3d b : {Eigen::Vector3d(1, 3, 2), Eigen::Vector3d(0.3, 2.5, -1.1)}) {
    const BiHamiltonianParams p = bihamiltonian_ab(b);
    const auto [pi1, pi2] = bihamiltonian_bivectors(b, p);
    const auto Hs = build_bihamiltonian_pair(p);
    const SatoModel m{b[0], b[1], b[2]};
    const VectorField rhs = [&](const Vector& x) { return model_rhs(m, x); };
    const auto pts = state_sampler(m).points();
    CHECK(field_residual(pi1, Hs.H1, rhs, pts).max_abs < 1e-12);
    CHECK(field_residual(pi2, Hs.H2, rhs, pts).max_abs < 1e-12);
    CHECK(jacobi_residual(pencil(pi1, pi2, 0.7), pts).max_abs < 1e-10);
  }
}

TEST_CASE("logistic Hamiltonian") {
  const LogisticModel m{{1, 3, 2}, {10, 10, 10}};
  const CoeffSolution c = sato_solve_c(Eigen::Vector3d(1, 3, 2));
  const HamiltonianFn H = build_logistic_H(m, c);
  CHECK(H(Vector::Constant(3, 5.0)) == 0.0);
  CHECK(build_logistic_H(LogisticModel{{1, 3, 2}, {2, 2, 2}}, c)(Vector::Ones(3)) == 0.0);

  const Trajectory tr = rk4(m, Vector::Ones(3), 5.0);
  CHECK(conservation_residual(H, tr).max_abs < 1e-6);

  // x-form and v-form agree under v = ln(x/N).
  const HamiltonianFn Hv = build_logistic_H_log(m, c);
  for (const auto& x : state_sampler(m, 20, 1).points()) {
    CHECK(Hv(to_log_coords(m, x)) == doctest::Approx(H(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(conservation_residual(H, [] {
                    Trajectory t;
                    t.times = {0.0};
                    t.states = {Vector{{1.0, 10.0, 1.0}}};
                    return t;
                  }()),
                  DomainError);
}

TEST_CASE("debt Hamiltonian") {
  const DebtModel m{0.5, -0.5, 1, 1, -1, 1, 10, 10};
  const HamiltonianFn H = build_debt_H(m);
  const double v3 = -0.7, v4 = -1.3;
  const double logs = (v3 - std::log(1 - std::exp(v3))) / m.b3 - (v4 - std::log(1 - std::exp(v4))) / m.b4;
  CHECK(H(Vector{{0.0, 0.0, v3, v4}}) == doctest::Approx(m.b2 - m.b1 + logs).epsilon(1e-14));

  const Trajectory tr = rk4(m, Vector::Ones(4), 5.0);
  CHECK(conservation_residual(build_debt_H_original(m), tr).max_abs < 1e-6);

  // Parameters where a12 b2 != a21 b1.
  const DebtModel skewed{0.5, -0.8, 1.2, 0.7, -2.0, 0.5, 10, 8};
  const Trajectory tr2 = rk4(skewed, Vector{{1.0, 0.3, 2.0, 1.0}}, 5.0);
  CHECK(conservation_residual(build_debt_H_original(skewed), tr2).max_abs < 1e-6);

  CHECK_THROWS_AS(build_debt_H(DebtModel{0.5, -0.5, 0, 1, -1, 1, 10, 10}), ValidationError);
}

TEST_CASE("analytic gradients match finite differences") {
  const LogisticModel lm{{1, 3, 2}, {4, 6, 9}};
  const DebtModel dm{0.5, -0.8, 1.2, 0.7, -2.0, 0.5, 10, 8};
  const CoeffSolution c = sato_solve_c(Eigen::Vector3d(1, 3, 2));
  const std::vector<std::pair<HamiltonianFn, BoxSampler>> cases = {
      {build_sato_H(c), state_sampler(SatoModel{1, 3, 2}, 20, 1)},
      {build_logistic_H(lm, c), state_sampler(lm, 20, 2)},
      {build_logistic_H_log(lm, c), log_sampler(lm, 20, 3)},
      {build_debt_H(dm), log_sampler(dm, 20, 4)},
      {build_debt_H_original(dm), state_sampler(dm, 20, 5)},
  };
  for (const auto& [H, sampler] : cases) {
    for (const auto& x : sampler.points()) {
      const Vector fd = testing::fd_gradient(H.value, x);
      CHECK(testing::rel_err(H.grad(x), fd) < 1e-5);
    }
  }
}

TEST_CASE("Sato divergence and curl") {
  CHECK(sato_divergence(SatoModel{1, 3, 2}) == 6.0);
  CHECK(sato_divergence(SatoModel{0, 0, 0}) == 0.0);
  CHECK(sato_divergence(SatoModel{1, 3, 2}, Vector{{7.0, 0.1, 3.0}}) == 6.0);

  const auto pts = state_sampler(SatoModel{1, 3, 2}).points();
  const CurlReport rep = sato_curl_residual(SatoModel{1, 3, 2}, pts);
  CHECK(rep.curl.max_abs == 0.0);
  CHECK(rep.potential.max_abs < 1e-12);
  // Incompatible b: falls back to the model field, still a gradient.
  CHECK(sato_curl_residual(SatoModel{1, 1, 1}, pts).potential.max_abs == 0.0);
}

TEST_CASE("verify_structure passes for every model and fails with a defect") {
  const std::vector<Model> models = {SatoModel{1, 3, 2}, LogisticModel{{1, 3, 2}, {10, 10, 10}},
                                     DebtModel{0.5, -0.8, 1.2, 0.7, -2.0, 0.5, 10, 8}};
  for (const Model& m : models) {
    for (const auto& chk : verify_structure(m)) {
      INFO(model_name(m), " ", chk.name, " = ", chk.value);
      CHECK(chk.passed());
    }
    VerifyOptions bad;
    bad.bivector_defect = 1e-3;
    bool any_failed = false;
    for (const auto& chk : verify_structure(m, bad)) any_failed |= !chk.passed();
    CHECK(any_failed);
  }
  CHECK_THROWS_AS(verify_structure(SatoModel{1, 1, 1}), ValidationError);
}
