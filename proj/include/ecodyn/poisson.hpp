#pragma once

// Poisson bivectors, Hamiltonian functions and numerical structure checks.
//
// A bivector is represented by its antisymmetric coefficient matrix P(x); the
// Hamiltonian vector field of H is X(x) = P(x) * grad H(x). Every check here is
// pointwise: values are sampled on a seeded set of admissible points.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ecodyn/trajectory.hpp"

namespace ecodyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorField = std::function<Vector(const Vector&)>;

/// Open axis-aligned box lo < x < hi. Infinite bounds are allowed.
struct Box {
  Vector lo;
  Vector hi;

  static Box positive_orthant(int dim);
  static Box unbounded(int dim);

  int dim() const { return static_cast<int>(lo.size()); }
  std::optional<std::size_t> first_violation(const Vector& x) const;
  bool contains(const Vector& x) const { return !first_violation(x); }
  /// Throws DomainError naming the first coordinate outside the box.
  void require(const Vector& x, const std::string& context) const;
};

struct Bivector {
  using Coeff = std::function<Matrix(const Vector&)>;
  using Partial = std::function<Matrix(const Vector&, int)>;

  int dim = 0;
  Coeff coeff;
  /// d P / d x_l evaluated at x, analytic.
  Partial coeff_partial;
  std::string name;

  Matrix operator()(const Vector& x) const { return coeff(x); }
};

struct HamiltonianFn {
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> grad;
  Box domain;
  std::string name;

  bool admissible(const Vector& x) const { return domain.contains(x); }
  double operator()(const Vector& x) const { return value(x); }
};

struct Residual {
  double max_abs = 0.0;
  Vector argmax_point;
  std::size_t samples = 0;
  /// Set when the check is vacuous (Jacobi identity in dimension < 3).
  bool vacuous = false;
};

/// Seeded uniform sampler over a finite box.
struct BoxSampler {
  Vector lo;
  Vector hi;
  std::size_t count = 100;
  std::uint64_t seed = 20190611;

  std::vector<Vector> points() const;
};

inline constexpr std::uint64_t kDefaultSeed = 20190611;

// ---- constructors ---------------------------------------------------------

/// Constant coefficient matrix. Must be square.
Bivector constant_bivector(const Matrix& P, std::string name = "constant");

/// P^{ij}(x) = S_ij g_i(x_i) g_j(x_j) for a constant skew S and scalar
/// profiles g_i. Covers the quadratic bivectors x_i x_j S_ij and their
/// logistic analogues; such bivectors are Poisson for every skew S.
Bivector separable_bivector(const Matrix& S,
                            std::function<double(int, double)> g,
                            std::function<double(int, double)> dg,
                            std::string name);

/// P^{ij}(x) = S_ij x_i x_j.
Bivector quadratic_bivector(const Matrix& S, std::string name = "quadratic");

/// first + lambda * second.
Bivector pencil(const Bivector& first, const Bivector& second, double lambda);

/// Adds eps * (x-independent symmetric all-ones matrix) to P. Used as a
/// negative control: the result fails the skew check.
Bivector with_symmetric_defect(const Bivector& pi, double eps);

// ---- operations -------------------------------------------------------------

/// X^i = P^{il}(x) dH/dx_l.
Vector hamiltonian_vector_field(const Bivector& pi, const HamiltonianFn& H,
                                const Vector& x);

Residual skew_residual(const Bivector& pi, const std::vector<Vector>& points);

/// Max over points and i<j<k of
///   sum_l P^{il} d_l P^{jk} + P^{jl} d_l P^{ki} + P^{kl} d_l P^{ij}.
Residual jacobi_residual(const Bivector& pi, const std::vector<Vector>& points);

/// max_t |H(x(t)) - H(x(0))| / max(1, |H(x(0))|).
Residual conservation_residual(const HamiltonianFn& H, const Trajectory& traj);

}  // namespace ecodyn
