#pragma once

// The general Lotka-Volterra system  x_i' = x_i (b_i + sum_j a_ij x_j)
// and the three growth models built on it.
//
// Variable roles:
//   Sato      x = (L, K, f)        exponential growth
//   Logistic  x = (L, K, f)        logistic growth with capacities N_i
//   Debt      x = (K, D, f, L)     capital/debt predator-prey, logistic f and L

#include <array>
#include <string>
#include <variant>

#include "ecodyn/poisson.hpp"

namespace ecodyn {

struct LVSystem {
  Vector b;
  Matrix A;

  int dim() const { return static_cast<int>(b.size()); }
  /// Throws on size mismatch or non-finite entries.
  void validate() const;
};

/// Exponential growth x_i' = b_i x_i. Growth rates of labor, capital and
/// production. In Sato's notation (b1, b2, b3) = (b, a, 1).
struct SatoModel {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;

  Vector growth() const { return Vector{{b1, b2, b3}}; }
  void validate() const;
};

/// x_i' = b_i x_i (1 - x_i / N_i).
struct LogisticModel {
  std::array<double, 3> b{};
  std::array<double, 3> N{1.0, 1.0, 1.0};

  Vector growth() const { return Vector{{b[0], b[1], b[2]}}; }
  Vector capacity() const { return Vector{{N[0], N[1], N[2]}}; }
  void validate() const;
};

/// Capital x1 and debt x2 interact as predator and prey; production x3 and
/// labor x4 grow logistically with capacities N3 = N_f and N4 = N_L.
/// Requires a12 * b1 < 0 and a21 * b2 < 0.
struct DebtModel {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double a12 = 0.0;
  double a21 = 0.0;
  double N3 = 1.0;
  double N4 = 1.0;

  Vector growth() const { return Vector{{b1, b2, b3, b4}}; }
  void validate() const;
};

using Model = std::variant<SatoModel, LogisticModel, DebtModel>;

std::string model_name(const Model& m);
int model_dim(const Model& m);

// ---- general system --------------------------------------------------------

Vector lv_rhs(const LVSystem& sys, const Vector& x);

/// d(lv_rhs)_i / dx_l.
Matrix lv_jacobian(const LVSystem& sys, const Vector& x);

LVSystem as_lv(const SatoModel& m);
LVSystem as_lv(const LogisticModel& m);
LVSystem as_lv(const DebtModel& m);
LVSystem as_lv(const Model& m);

/// The model's own right-hand side written out term by term, independent
/// of as_lv.
Vector model_rhs(const Model& m, const Vector& x);

// ---- admissible regions ----------------------------------------------------

/// Region in original coordinates on which the log coordinates (and the
/// model's Hamiltonian) are defined:
///   Sato      x_i > 0
///   Logistic  0 < x_i < N_i
///   Debt      x1, x2 > 0, 0 < x3 < N3, 0 < x4 < N4
Box state_domain(const Model& m);

/// Image of state_domain under to_log_coords.
Box log_domain(const Model& m);

/// Region where the dynamics themselves make sense (positive orthant).
/// Logistic states may sit at or above capacity here.
Box flow_domain(const Model& m);

// ---- coordinate changes ------------------------------------------------------
//
//   Sato      v_i = ln x_i
//   Logistic  v_i = ln(x_i / N_i)
//   Debt      v1 = ln(-(a21/b2) x1), v2 = ln(-(a12/b1) x2),
//             v3 = ln(x3/N3), v4 = ln(x4/N4)
//
// The debt pairing puts a21/b2 on x1 and a12/b1 on x2; with that pairing
// v1' = b1 (1 - e^{v2}) and v2' = b2 (1 - e^{v1}) hold for all parameters.

Vector to_log_coords(const Model& m, const Vector& x);
Vector from_log_coords(const Model& m, const Vector& v);

/// Diagonal of dv/dx. Every substitution is a scaled logarithm, so this is 1/x_i.
Vector log_coords_jacobian(const Model& m, const Vector& x);

/// Dynamics in log coordinates.
///   Sato      v_i' = b_i
///   Logistic  v_i' = b_i (1 - e^{v_i})
///   Debt      (b1(1-e^{v2}), b2(1-e^{v1}), b3(1-e^{v3}), b4(1-e^{v4}))
Vector rhs_log(const Model& m, const Vector& v);

}  // namespace ecodyn
