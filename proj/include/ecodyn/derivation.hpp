#pragma once

// Hamiltonians, Poisson structures and coefficient solves for the three
// growth models, plus the bi-Hamiltonian route to Cobb-Douglas elasticities.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecodyn/models.hpp"
#include "ecodyn/poisson.hpp"

namespace ecodyn {

/// The fixed skew matrix of the Sato coefficient system A c = b:
///   (( 0, -1, -1),
///    ( 1,  0, -1),
///    ( 1,  1,  0))
const Matrix& sato_skew_matrix();

/// One member c = (b2 + t, b3 - b2 - t, t) of the rank-2 solution family.
struct CoeffSolution {
  Eigen::Vector3d c;
  double t = 0.0;
  bool crs_normalized = false;

  /// -c1/c3 and -c2/c3: exponents of L and K in the level-set solve.
  double alpha() const { return -c[0] / c[2]; }
  double beta() const { return -c[1] / c[2]; }
};

/// Relative tolerance for b1 + b3 = b2.
inline constexpr double kCompatibilityTol = 1e-10;

/// Solves A c = b. With `t` empty the free parameter is t = -b3, the unique
/// choice giving alpha + beta = 1. Throws ValidationError (defect
/// b1 + b3 - b2) when b is incompatible, and for t = 0.
CoeffSolution sato_solve_c(const Eigen::Vector3d& b, std::optional<double> t = std::nullopt);

/// Exponents (a, b) of the bi-Hamiltonian pair
///   H1 = b ln x1 + ln x2 + a ln x3,   H2 = ln x1 + a ln x2 + b ln x3,
/// chosen so both are conserved by x_i' = b_i x_i, and the Cobb-Douglas
/// exponents obtained by solving H3 = H1 - H2 = const for x3:
///   alpha (on L) = (1 - b)/(a - b),  beta (on K) = (a - 1)/(a - b).
struct BiHamiltonianParams {
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Throws SingularityError when b1 b2 = b3^2 or a = b.
BiHamiltonianParams bihamiltonian_ab(const Eigen::Vector3d& b);

// ---- Hamiltonians -------------------------------------------------------------

/// H = sum c_k ln x_k on x > 0.
HamiltonianFn build_sato_H(const CoeffSolution& c);

/// H = sum c_k ln x_k for arbitrary coefficients.
HamiltonianFn log_sum_hamiltonian(const Eigen::Vector3d& c, std::string name);

struct BiHamiltonianPair {
  HamiltonianFn H1;
  HamiltonianFn H2;
  HamiltonianFn H3;
};

BiHamiltonianPair build_bihamiltonian_pair(const BiHamiltonianParams& p);

/// H = sum c_k ln(x_k / (N_k - x_k)) on 0 < x_k < N_k.
HamiltonianFn build_logistic_H(const LogisticModel& m, const CoeffSolution& c);

/// The same Hamiltonian in v = ln(x/N):  sum c_k (v_k - ln(1 - e^{v_k})), v < 0.
HamiltonianFn build_logistic_H_log(const LogisticModel& m, const CoeffSolution& c);

/// H4(v) = b1 (v2 - e^{v2}) - b2 (v1 - e^{v1})
///       + (v3 - ln(1 - e^{v3})) / b3 - (v4 - ln(1 - e^{v4})) / b4
HamiltonianFn build_debt_H(const DebtModel& m);

/// H4 composed with to_log_coords, on the debt state domain.
HamiltonianFn build_debt_H_original(const DebtModel& m);

/// A conserved quantity of a model, built on demand because construction
/// fails for some parameters (incompatible or singular growth rates).
struct ConservedQuantity {
  std::string name;
  std::function<HamiltonianFn()> build;
};

/// Every conserved quantity the model carries, in original coordinates:
///   Sato      H, H1, H2, H3
///   Logistic  H
///   Debt      H (H4 composed with the log coordinates)
/// `t` is the free coefficient parameter; the CRS choice when empty.
std::vector<ConservedQuantity> conserved_quantities(const Model& m, std::optional<double> t = std::nullopt);

// ---- Poisson structures ---------------------------------------------------------
//
// Each structure is fixed so that P * grad H reproduces the model dynamics
// in the coordinates named.

/// P^{ij} = S_ij x_i x_j with S = sato_skew_matrix(). Pairs with build_sato_H.
Bivector sato_bivector();

/// Constant skew S with S c = b, for c . b = 0: S v = w x v, w = (c x b)/|c|^2.
Matrix skew_solution(const Eigen::Vector3d& c, const Eigen::Vector3d& b);

struct BiHamiltonianStructures {
  Bivector pi1;  // pairs with H1
  Bivector pi2;  // pairs with H2
};

BiHamiltonianStructures bihamiltonian_bivectors(const Eigen::Vector3d& b,
                                                const BiHamiltonianParams& p);

/// v-coordinates: P^{ij} = S_ij (1 - e^{v_i})(1 - e^{v_j}). Pairs with
/// build_logistic_H_log.
Bivector logistic_bivector(const LogisticModel& m);

/// x-coordinates: P^{ij} = S_ij g_i g_j with g_i = x_i (N_i - x_i)/N_i. Pairs
/// with build_logistic_H.
Bivector logistic_bivector_original(const LogisticModel& m);

/// v-coordinates: P^{12} = -P^{21} = 1,
///   P^{34} = -P^{43} = -b3 b4 (1 - e^{v3})(1 - e^{v4}).
Bivector debt_bivector(const DebtModel& m);

// ---- divergence and curl of the Sato field ------------------------------------

/// Trace of the analytic Jacobian of the Sato vector field at `at`. The field
/// is linear, so the value does not depend on the point.
double sato_divergence(const SatoModel& m, const Vector& at = Vector::Ones(3));

struct CurlReport {
  Residual curl;       // max |curl X|
  Residual potential;  // max |X - grad f|_inf / max(1, |grad f|_inf), f = 1/2 sum b_i x_i^2
};

CurlReport sato_curl_residual(const SatoModel& m, const std::vector<Vector>& points);

}  // namespace ecodyn
