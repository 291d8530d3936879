#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ecodyn/poisson.hpp"
#include "ecodyn/trajectory.hpp"

namespace ecodyn {

enum class Method {
  Euler,  // first order, used to validate the order estimator
  RK4,
  RKF45,  // Runge-Kutta-Fehlberg 4(5), adaptive
};

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct IntegratorConfig {
  Method method = Method::RK4;
  /// Fixed step for Euler/RK4, initial step for RKF45.
  double h = 1e-3;
  double t0 = 0.0;
  double t1 = 1.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double h_min = 1e-12;
  double h_max = 0.1;
  /// Keep every n-th accepted step. The final state is always kept.
  int record_every = 1;

  void validate() const;
};

/// Integrates x' = rhs(x) over cfg's span. Each monitor is evaluated at every
/// recorded state. After each step the state must lie in `domain` (and in
/// every monitor's domain); otherwise DomainError reports time and coordinate.
Trajectory integrate(const VectorField& rhs, const Vector& x0, const IntegratorConfig& cfg,
                     std::span<const HamiltonianFn> monitors = {},
                     const std::optional<Box>& domain = std::nullopt);

/// Single explicit step of a fixed-step method.
Vector step(const VectorField& rhs, const Vector& x, double h, Method method);

struct OrderEstimate {
  std::vector<double> steps;
  std::vector<double> errors;     // max-norm relative error at t1, per step size
  std::vector<double> orders;     // log2(e_k / e_{k+1})
  double order = 0.0;             // last pairwise estimate
  bool reliable = true;           // false when errors hit the rounding floor
};

/// Richardson-style order estimate: integrate to t1 with h0, h0/2, ...,
/// h0/2^(levels-1) and compare to the exact solution at t1.
OrderEstimate convergence_order(const VectorField& rhs, const Vector& x0,
                                const std::function<Vector(double)>& exact, Method method,
                                double t1, double h0, int levels = 4);

}  // namespace ecodyn
