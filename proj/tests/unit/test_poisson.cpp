#include <doctest.h>

#include <cmath>

#include "ecodyn/derivation.hpp"
#include "ecodyn/errors.hpp"
#include "ecodyn/poisson.hpp"
#include "ecodyn/verification.hpp"
#include "support/oracles.hpp"

using namespace ecodyn;

namespace {

HamiltonianFn linear_H(const Vector& w) {
  HamiltonianFn H;
  H.dim = static_cast<int>(w.size());
  H.name = "linear";
  H.domain = Box::unbounded(H.dim);
  H.value = [w](const Vector& x) { return w.dot(x); };
  H.grad = [w](const Vector&) { return w; };
  return H;
}

Trajectory constant_trajectory(const Vector& x, int n) {
  Trajectory tr;
  for (int k = 0; k < n; ++k) {
    tr.times.push_back(k);
    tr.states.push_back(x);
  }
  return tr;
}

}  // namespace

TEST_CASE("hamiltonian_vector_field: zero bivector gives zero velocity") {
  const Bivector pi = constant_bivector(Matrix::Zero(3, 3));
  const Vector v = hamiltonian_vector_field(pi, linear_H(Vector{{1.0, -2.0, 3.0}}), Vector{{0.3, 4.0, -1.0}});
  CHECK(v.isZero(0.0));
}

TEST_CASE("hamiltonian_vector_field: canonical 2-D pair orientation") {
  Matrix P(2, 2);
  P << 0, 1, -1, 0;
  const Vector v = hamiltonian_vector_field(constant_bivector(P), linear_H(Vector{{1.0, 0.0}}),
                                            Vector{{0.5, 0.5}});
  // (dH/dx2, -dH/dx1) for H = x1.
  CHECK(v[0] == 0.0);
  CHECK(v[1] == -1.0);
}

TEST_CASE("hamiltonian_vector_field: Sato pair at (1,1,1) reproduces b_i x_i") {
  const CoeffSolution c = sato_solve_c(Eigen::Vector3d(1, 3, 2));
  REQUIRE(c.c.isApprox(Eigen::Vector3d(1, 1, -2)));
  const Vector v = hamiltonian_vector_field(sato_bivector(), build_sato_H(c), Vector::Ones(3));
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(v[2] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("hamiltonian_vector_field: errors") {
  const Bivector pi = sato_bivector();
  const HamiltonianFn H = build_sato_H(sato_solve_c(Eigen::Vector3d(1, 3, 2)));
  CHECK_THROWS_AS(hamiltonian_vector_field(pi, H, Vector::Ones(4)), DimensionError);
  CHECK_THROWS_AS(hamiltonian_vector_field(pi, linear_H(Vector::Ones(2)), Vector::Ones(3)), DimensionError);
  try {
    hamiltonian_vector_field(pi, H, Vector{{1.0, -1.0, 1.0}});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.coordinate() == 1);
  }
}

TEST_CASE("skew_residual") {
  Matrix S(3, 3);
  S << 0, 2, -1, -2, 0, 5, 1, -5, 0;
  const auto pts = BoxSampler{Vector::Zero(3), Vector::Constant(3, 10.0), 100, 1}.points();
  CHECK(skew_residual(constant_bivector(S), pts).max_abs == 0.0);
  CHECK(skew_residual(sato_bivector(), pts).max_abs == 0.0);

  const Residual bad = skew_residual(with_symmetric_defect(sato_bivector(), 0.25), pts);
  CHECK(bad.max_abs == doctest::Approx(0.5));
  CHECK(bad.samples == 100);

  CHECK_THROWS_AS(skew_residual(sato_bivector(), {}), ValidationError);
}

TEST_CASE("jacobi_residual") {
  const auto pts3 = BoxSampler{Vector::Zero(3), Vector::Constant(3, 10.0), 100, 2}.points();
  Matrix S(3, 3);
  S << 0, 1, 2, -1, 0, 3, -2, -3, 0;
  CHECK(jacobi_residual(constant_bivector(S), pts3).max_abs == 0.0);
  CHECK(jacobi_residual(sato_bivector(), pts3).max_abs < 1e-10);

  SUBCASE("logistic pi3 over v in (-3,-0.1)^3") {
    const LogisticModel m{{1, 3, 2}, {10, 10, 10}};
    const auto pts = BoxSampler{Vector::Constant(3, -3.0), Vector::Constant(3, -0.1), 100, 3}.points();
    CHECK(jacobi_residual(logistic_bivector(m), pts).max_abs < 1e-10);
  }
  SUBCASE("debt pi4") {
    const DebtModel m{0.5, -0.5, 1, 1, -1, 1, 10, 10};
    const auto pts = BoxSampler{Vector{{-2, -2, -3, -3}}, Vector{{2, 2, -0.1, -0.1}}, 100, 4}.points();
    CHECK(jacobi_residual(debt_bivector(m), pts).max_abs < 1e-10);
  }
  SUBCASE("2-D is vacuous") {
    const auto pts = BoxSampler{Vector::Zero(2), Vector::Ones(2), 5, 1}.points();
    Matrix P(2, 2);
    P << 0, 1, -1, 0;
    const Residual r = jacobi_residual(quadratic_bivector(P), pts);
    CHECK(r.vacuous);
    CHECK(r.max_abs == 0.0);
  }
  SUBCASE("negative control: a non-Poisson bivector is detected") {
    // P^{ij} = eps_ijk w_k with w = (x2, x3, x1); Jacobi needs w . curl w = 0,
    // but here w . curl w = -(x1 + x2 + x3).
    Bivector pi;
    pi.dim = 3;
    pi.name = "non-poisson";
    pi.coeff = [](const Vector& x) {
      Matrix P = Matrix::Zero(3, 3);
      P(1, 2) = x[1];
      P(2, 0) = x[2];
      P(0, 1) = x[0];
      return Matrix(P - P.transpose());
    };
    pi.coeff_partial = [](const Vector&, int l) {
      Matrix d = Matrix::Zero(3, 3);
      if (l == 1) d(1, 2) = 1;
      if (l == 2) d(2, 0) = 1;
      if (l == 0) d(0, 1) = 1;
      return Matrix(d - d.transpose());
    };
    CHECK(jacobi_residual(pi, pts3).max_abs > 1e-3);
  }
}

TEST_CASE("separable bivector partials match finite differences") {
  const LogisticModel lm{{1, 3, 2}, {4, 5, 6}};
  const DebtModel dm{0.5, -0.5, 1.5, 0.7, -1, 1, 10, 10};
  const std::vector<std::pair<Bivector, BoxSampler>> cases = {
      {sato_bivector(), BoxSampler{Vector::Constant(3, 0.1), Vector::Constant(3, 10.0), 20, 5}},
      {logistic_bivector(lm), BoxSampler{Vector::Constant(3, -3.0), Vector::Constant(3, -0.1), 20, 6}},
      {logistic_bivector_original(lm), BoxSampler{Vector::Constant(3, 0.1), Vector{{3.9, 4.9, 5.9}}, 20, 7}},
      {debt_bivector(dm), BoxSampler{Vector{{-2, -2, -3, -3}}, Vector{{2, 2, -0.1, -0.1}}, 20, 8}},
  };
  for (const auto& [pi, sampler] : cases) {
    for (const auto& x : sampler.points()) {
      for (int l = 0; l < pi.dim; ++l) {
        const Matrix fd = testing::fd_matrix_partial(pi.coeff, x, l);
        const Matrix an = pi.coeff_partial(x, l);
        CHECK(testing::rel_err(an, fd) < 1e-5);
      }
    }
  }
}

TEST_CASE("conservation_residual") {
  const HamiltonianFn H = build_sato_H(sato_solve_c(Eigen::Vector3d(1, 3, 2)));
  CHECK(conservation_residual(H, constant_trajectory(Vector{{1.0, 2.0, 3.0}}, 10)).max_abs == 0.0);

  Trajectory tr = constant_trajectory(Vector::Ones(3), 3);
  tr.states[2] = Vector{{1.0, 1.0, -0.5}};
  try {
    conservation_residual(H, tr);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.coordinate() == 2);
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }
}

TEST_CASE("sampler is deterministic and interior") {
  const BoxSampler s{Vector{{0.0, -1.0}}, Vector{{1.0, 1.0}}, 50, 99};
  const auto a = s.points();
  const auto b = s.points();
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(Box{s.lo, s.hi}.contains(a[i]));
  }
  BoxSampler other = s;
  other.seed = 100;
  CHECK(other.points()[0] != a[0]);
}
