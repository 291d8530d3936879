#pragma once

// Production functions obtained as level sets of conserved quantities.

#include <utility>

#include "ecodyn/derivation.hpp"
#include "ecodyn/models.hpp"
#include "ecodyn/poisson.hpp"
#include "ecodyn/trajectory.hpp"

namespace ecodyn {

/// Y = A L^alpha K^beta.
struct CobbDouglasPF {
  double A = 1.0;
  double alpha = 0.5;
  double beta = 0.5;
  bool crs = false;

  void validate() const;
};

/// Y = a L^p K^(1-p) / (1 + b L^p K^(1-p)).
struct SShapedPF {
  double a = 1.0;
  double b = 0.0;
  double p = 0.5;

  void validate() const;
};

/// Which form of |N - x| the logistic function uses. BelowCapacity requires
/// inputs strictly below capacity; AbsoluteValue accepts either side.
enum class CapacityBranch { BelowCapacity, AbsoluteValue };

/// Y = N_f L^alpha K^beta / (C |N_L - L|^alpha |N_K - K|^beta + L^alpha K^beta).
struct LogisticPF {
  double N_f = 1.0;
  double N_L = 1.0;
  double N_K = 1.0;
  double alpha = 0.5;
  double beta = 0.5;
  double C = 1.0;
  CapacityBranch branch = CapacityBranch::BelowCapacity;

  void validate() const;
};

/// Y = N_f sigma(b3 G) with
///   G = C - b1 [ln(s2 D) - s2 D] + b2 [ln(s1 K) - s1 K] + ln(L / (N_L - L)) / b4,
///   s1 = -a21/b2 (scale of K),  s2 = -a12/b1 (scale of D).
/// The scales follow the debt-model log coordinates; see models.hpp.
struct DebtPF {
  double N_f = 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 1.0;
  double b4 = 1.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double N_L = 1.0;
  double C = 0.0;

  void validate() const;
  double capital_scale() const { return -a21 / b2; }
  double debt_scale() const { return -a12 / b1; }
};

double eval_cobb_douglas(const CobbDouglasPF& pf, double L, double K);
double eval_sshaped(const SShapedPF& pf, double L, double K);
double eval_logistic_pf(const LogisticPF& pf, double L, double K);
double eval_debt_pf(const DebtPF& pf, double L, double K, double D);

/// G(L, K, D) of the debt production function.
double debt_G(const DebtPF& pf, double L, double K, double D);

// ---- constants from a state --------------------------------------------------
//
// Each solve returns the member of the family whose graph passes through the
// state x0: pf(inputs(x0)) = output(x0).

/// From H = sum c_k ln x_k: A = exp(H(x0)/c3), alpha = -c1/c3, beta = -c2/c3.
CobbDouglasPF solve_sato_pf(const CoeffSolution& c, const Vector& x0);

/// From H3 = H1 - H2 of the bi-Hamiltonian pair.
CobbDouglasPF solve_bihamiltonian_pf(const BiHamiltonianParams& p, const Vector& x0);

/// From H = sum c_k ln(x_k/(N_k - x_k)): C = exp(-H(x0)/c3).
LogisticPF solve_logistic_pf(const LogisticModel& m, const CoeffSolution& c, const Vector& x0);

/// From H4: C = H4(v(x0)), so that b3 G(x0) = logit(x3(0)/N_f).
DebtPF solve_debt_pf(const DebtModel& m, const Vector& x0);

// ---- level-set verification ------------------------------------------------------

/// max_t |pf(inputs(t)) - output(t)| / max(1, |output(t)|). States are
/// (L, K, f) for the three-factor families and (K, D, f, L) for DebtPF.
Residual surface_residual(const CobbDouglasPF& pf, const Trajectory& traj);
Residual surface_residual(const LogisticPF& pf, const Trajectory& traj);
Residual surface_residual(const DebtPF& pf, const Trajectory& traj);

/// Central-difference log-derivatives d ln Y / d ln L and d ln Y / d ln K at (L, K).
std::pair<double, double> elasticity_check(const CobbDouglasPF& pf, double L = 2.0, double K = 3.0);

}  // namespace ecodyn
