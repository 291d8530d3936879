#include <doctest.h>

#include <cmath>
#include <random>

#include "ecodyn/errors.hpp"
#include "ecodyn/integrators.hpp"
#include "ecodyn/production.hpp"
#include "support/oracles.hpp"

using namespace ecodyn;

namespace {

Trajectory rk4(const Model& m, const Vector& x0, double t1) {
  IntegratorConfig cfg;
  cfg.h = 1e-3;
  cfg.t1 = t1;
  cfg.record_every = 10;
  return integrate([&](const Vector& x) { return model_rhs(m, x); }, x0, cfg, {}, flow_domain(m));
}

double ref_debt_Y(const DebtPF& pf, double L, double K, double D) {
  // Direct evaluation with the scales written out.
  const double s1 = -pf.a21 / pf.b2, s2 = -pf.a12 / pf.b1;
  const double G = pf.C - pf.b1 * (std::log(s2 * D) - s2 * D) + pf.b2 * (std::log(s1 * K) - s1 * K) +
                   std::log(L / (pf.N_L - L)) / pf.b4;
  return pf.N_f / (1.0 + std::exp(-pf.b3 * G));
}

const DebtModel kDebt{0.5, -0.8, 1.2, 0.7, -2.0, 0.5, 10, 8};

}  // namespace

TEST_CASE("Cobb-Douglas evaluation") {
  const CobbDouglasPF cd{1.01, 0.75, 0.25, true};
  CHECK(eval_cobb_douglas(cd, 1, 1) == 1.01);
  for (double x : {0.5, 2.0, 37.0}) CHECK(eval_cobb_douglas(cd, x, x) == doctest::Approx(1.01 * x).epsilon(1e-14));

  const CobbDouglasPF gen{2.0, 0.3, 0.9, false};
  for (double lam : {0.1, 3.0, 1e3}) {
    const double lhs = eval_cobb_douglas(gen, lam * 2.0, lam * 5.0);
    const double rhs = std::pow(lam, 1.2) * eval_cobb_douglas(gen, 2.0, 5.0);
    CHECK(std::abs(lhs - rhs) / rhs < 1e-12);
  }
  CHECK_THROWS_AS(eval_cobb_douglas(cd, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(CobbDouglasPF({0.0, 0.5, 0.5, false}).validate(), ValidationError);
  CHECK_THROWS_AS(CobbDouglasPF({1.0, 0.5, 0.6, true}).validate(), ValidationError);
}

TEST_CASE("S-shaped evaluation") {
  CHECK(eval_sshaped(SShapedPF{1, 1, 0.5}, 1, 1) == 0.5);
  const SShapedPF s{3.0, 0.0, 0.3};
  const CobbDouglasPF cd{3.0, 0.3, 0.7, true};
  for (double L : {0.1, 1.0, 7.0}) {
    for (double K : {0.2, 4.0}) CHECK(std::abs(eval_sshaped(s, L, K) - eval_cobb_douglas(cd, L, K)) <= 1e-12 * eval_cobb_douglas(cd, L, K));
  }
  CHECK(eval_sshaped(SShapedPF{2, 4, 0.5}, 1e30, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(eval_sshaped(SShapedPF{1, 1, 0.5}, -1, 1), DomainError);
  CHECK_THROWS_AS(SShapedPF({1, 1, 1.5}).validate(), ValidationError);
}

TEST_CASE("logistic PF evaluation") {
  const LogisticPF pf{5.0, 2.0, 3.0, 0.4, 0.7, 1.3};
  double prev = 0.0;
  for (double gap : {1e-2, 1e-6, 1e-10, 1e-14}) {
    const double Y = eval_logistic_pf(pf, 2.0 - gap, 1.5);
    CHECK(Y > prev);
    prev = Y;
  }
  CHECK(5.0 - prev < 1e-4);

  // Balanced denominator.
  const LogisticPF bal{5.0, 2.0, 2.0, 0.4, 0.7, 1.0};
  CHECK(eval_logistic_pf(bal, 1.0, 1.0) == 2.5);

  CHECK_THROWS_AS(eval_logistic_pf(pf, 2.0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_logistic_pf(pf, 2.5, 1.0), DomainError);
  LogisticPF abs = pf;
  abs.branch = CapacityBranch::AbsoluteValue;
  const double above = eval_logistic_pf(abs, 2.5, 1.0);
  CHECK(above > 0.0);
  CHECK(above < 5.0);
}

TEST_CASE("logistic PF approaches the S-shaped function for small inputs") {
  const double alpha = 0.6, beta = 0.4, Nf = 3.0;
  const LogisticPF pf{Nf, 1.0, 1.0, alpha, beta, 1.0};
  const SShapedPF s{Nf, 1.0, alpha};
  double prev = INFINITY;
  for (double x : {1e-2, 1e-3, 1e-4}) {
    const double a = eval_logistic_pf(pf, x, x), b = eval_sshaped(s, x, x);
    const double gap = std::abs(a - b) / b;
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("production function values stay inside (0, N_f)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LogisticPF pf{4.0, 2.0, 3.0, 0.8, 0.5, 0.7};
  DebtPF dpf = solve_debt_pf(kDebt, Vector{{1.0, 0.3, 2.0, 1.0}});
  for (int k = 0; k < 10000; ++k) {
    const double L = 2.0 * (1e-3 + 0.998 * u(rng)), K = 3.0 * (1e-3 + 0.998 * u(rng));
    const double Y = eval_logistic_pf(pf, L, K);
    CHECK((Y > 0.0 && Y < pf.N_f));
    const double Ld = dpf.N_L * (1e-3 + 0.998 * u(rng));
    const double Kd = std::exp(4 * u(rng) - 2) / dpf.capital_scale();
    const double Dd = std::exp(4 * u(rng) - 2) / dpf.debt_scale();
    const double Yd = eval_debt_pf(dpf, Ld, Kd, Dd);
    CHECK((Yd > 0.0 && Yd < dpf.N_f));
  }
}

TEST_CASE("debt PF evaluation") {
  DebtPF pf;
  pf.N_f = 8;
  pf.b1 = 0.5;
  pf.b2 = -0.8;
  pf.b3 = 1.2;
  pf.b4 = 0.7;
  pf.a12 = -2.0;
  pf.a21 = 0.5;
  pf.N_L = 10;
  pf.C = 0.3;
  CHECK(eval_debt_pf(pf, 4.0, 1.7, 0.2) == doctest::Approx(ref_debt_Y(pf, 4.0, 1.7, 0.2)).epsilon(1e-13));

  // G = 0 gives half capacity: pick C to cancel the other terms.
  pf.C -= debt_G(pf, 4.0, 1.7, 0.2);
  CHECK(eval_debt_pf(pf, 4.0, 1.7, 0.2) == doctest::Approx(4.0).epsilon(1e-14));

  // Saturation without overflow.
  pf.C = 1e6;
  CHECK(eval_debt_pf(pf, 4.0, 1.7, 0.2) == 8.0);
  pf.C = -1e6;
  const double tiny = eval_debt_pf(pf, 4.0, 1.7, 0.2);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 1e-300);

  CHECK_THROWS_AS(eval_debt_pf(pf, 10.0, 1.7, 0.2), DomainError);
  CHECK_THROWS_AS(eval_debt_pf(pf, 4.0, -1.0, 0.2), DomainError);
}

TEST_CASE("debt PF reduces to logistic growth in L once capital and debt terms are absorbed") {
  DebtPF pf;
  pf.N_f = 2;
  pf.b1 = 0.5;
  pf.b2 = -0.8;
  pf.b3 = 1.0;
  pf.b4 = 1.0;
  pf.a12 = -2.0;
  pf.a21 = 0.5;
  pf.N_L = 4.0;
  pf.C = 0.0;
  const double K = 1.7, D = 0.2;
  // G - C - ln(L/(N_L - L))/b4 carries every b1 and b2 contribution.
  pf.C = -(debt_G(pf, 1.0, K, D) - std::log(1.0 / 3.0));
  for (double L : {0.4, 2.0, 3.6}) {
    // sigma(ln(L/(N_L - L))) = L / N_L.
    CHECK(eval_debt_pf(pf, L, K, D) == doctest::Approx(2.0 * L / 4.0).epsilon(1e-14));
  }
}

TEST_CASE("constants from a state") {
  const CobbDouglasPF cd = solve_sato_pf(sato_solve_c(Eigen::Vector3d(1, 3, 2)), Vector::Ones(3));
  CHECK(cd.A == 1.0);
  CHECK(cd.alpha == 0.5);
  CHECK(cd.beta == 0.5);
  CHECK(cd.crs);
  CHECK(eval_cobb_douglas(cd, 1, 1) == 1.0);

  const Vector x0{{2.0, 0.7, 5.0}};
  const CobbDouglasPF cd2 = solve_sato_pf(sato_solve_c(Eigen::Vector3d(1, 3, 2)), x0);
  CHECK(std::abs(eval_cobb_douglas(cd2, x0[0], x0[1]) - x0[2]) < 1e-12 * x0[2]);
  const CobbDouglasPF bh = solve_bihamiltonian_pf(bihamiltonian_ab(Eigen::Vector3d(1, 3, 2)), x0);
  CHECK(std::abs(eval_cobb_douglas(bh, x0[0], x0[1]) - x0[2]) < 1e-12 * x0[2]);
  CHECK(bh.A == doctest::Approx(cd2.A).epsilon(1e-12));

  const LogisticModel lm{{1, 3, 2}, {4, 6, 10}};
  const CoeffSolution c = sato_solve_c(Eigen::Vector3d(1, 3, 2));
  const LogisticPF half = solve_logistic_pf(lm, c, Vector{{2.0, 3.0, 5.0}});
  CHECK(half.C == 1.0);
  CHECK(eval_logistic_pf(half, 2.0, 3.0) == 5.0);
  const Vector y0{{1.0, 5.0, 2.0}};
  const LogisticPF lp = solve_logistic_pf(lm, c, y0);
  CHECK(std::abs(eval_logistic_pf(lp, y0[0], y0[1]) - y0[2]) < 1e-12 * y0[2]);

  const Vector z0{{1.0, 0.3, 2.0, 1.0}};
  const DebtPF dp = solve_debt_pf(kDebt, z0);
  // Y = x3 and b3 G = logit(x3 / N_f).
  CHECK(std::abs(eval_debt_pf(dp, z0[3], z0[0], z0[1]) - z0[2]) < 1e-12 * z0[2]);
  CHECK(kDebt.b3 * debt_G(dp, z0[3], z0[0], z0[1]) == doctest::Approx(std::log(2.0 / 8.0)).epsilon(1e-12));

  CHECK_THROWS_AS(solve_sato_pf(sato_solve_c(Eigen::Vector3d(1, 3, 2)), Vector{{1.0, -1.0, 1.0}}), DomainError);
}

TEST_CASE("trajectories stay on the derived production surface") {
  SUBCASE("Sato, t in [0,3]") {
    const Vector x0{{1.0, 1.0, 1.0}};
    const Trajectory tr = rk4(SatoModel{1, 3, 2}, x0, 3.0);
    CHECK(surface_residual(solve_sato_pf(sato_solve_c(Eigen::Vector3d(1, 3, 2)), x0), tr).max_abs < 1e-8);
    CHECK(surface_residual(solve_bihamiltonian_pf(bihamiltonian_ab(Eigen::Vector3d(1, 3, 2)), x0), tr).max_abs < 1e-8);
  }
  SUBCASE("logistic") {
    const LogisticModel lm{{1, 3, 2}, {10, 10, 10}};
    const Vector x0 = Vector::Ones(3);
    const Trajectory tr = rk4(lm, x0, 5.0);
    CHECK(surface_residual(solve_logistic_pf(lm, sato_solve_c(Eigen::Vector3d(1, 3, 2)), x0), tr).max_abs < 1e-5);
  }
  SUBCASE("debt") {
    const Vector x0{{1.0, 0.3, 2.0, 1.0}};
    const Trajectory tr = rk4(kDebt, x0, 5.0);
    CHECK(surface_residual(solve_debt_pf(kDebt, x0), tr).max_abs < 1e-5);
  }
  SUBCASE("fixed point") {
    Trajectory tr;
    for (int k = 0; k < 5; ++k) {
      tr.times.push_back(k);
      tr.states.push_back(Vector{{10.0 / 3.0, 10.0 / 3.0, 1.0}});
    }
    const CobbDouglasPF cd{1.0, 0.0, 0.0, false};
    CHECK(surface_residual(cd, tr).max_abs == 0.0);
  }
}

TEST_CASE("elasticity check") {
  const auto [a, b] = elasticity_check(CobbDouglasPF{1.01, 0.75, 0.25, true});
  CHECK(std::abs(a - 0.75) < 1e-8);
  CHECK(std::abs(b - 0.25) < 1e-8);
  CHECK(std::abs(a + b - 1.0) < 1e-8);

  const CobbDouglasPF lin{2.0, 1.0, 0.0, true};
  CHECK(eval_cobb_douglas(lin, 6.0, 9.0) == doctest::Approx(3.0 * eval_cobb_douglas(lin, 2.0, 9.0)).epsilon(1e-15));
  const auto [a1, b1] = elasticity_check(lin);
  CHECK(std::abs(a1 - 1.0) < 1e-8);
  CHECK(std::abs(b1) < 1e-8);
}
