#include "ecodyn/production.hpp"

#include <cmath>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

void require_positive_input(double v, const char* name, std::size_t coord) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    std::ostringstream os;
    os << name << " must be positive and finite (got " << v << ")";
    throw DomainError(os.str(), coord);
  }
}

void require_below(double v, double cap, const char* name, std::size_t coord) {
  if (!(v < cap)) {
    std::ostringstream os;
    os << name << " = " << v << " must lie below its capacity " << cap;
    throw DomainError(os.str(), coord);
  }
}

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <class Eval>
Residual level_set_residual(const Trajectory& traj, Eval&& eval_at) {
  if (traj.empty()) throw ValidationError("surface_residual: empty trajectory");
  Residual r;
  r.samples = traj.size();
  r.argmax_point = traj.states.front();
  for (const auto& x : traj.states) {
    const auto [predicted, actual] = eval_at(x);
    const double gap = std::abs(predicted - actual) / std::max(1.0, std::abs(actual));
    if (gap > r.max_abs) {
      r.max_abs = gap;
      r.argmax_point = x;
    }
  }
  return r;
}

}  // namespace

void CobbDouglasPF::validate() const {
  if (!(A > 0.0) || !std::isfinite(A)) throw ValidationError("Cobb-Douglas: A must be positive", A);
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ValidationError("Cobb-Douglas: elasticities must be finite");
  }
  if (crs && std::abs(alpha + beta - 1.0) > 1e-12) {
    throw ValidationError("Cobb-Douglas: constant returns requires alpha + beta = 1",
                          alpha + beta - 1.0);
  }
}

void SShapedPF::validate() const {
  if (!(a > 0.0)) throw ValidationError("S-shaped: a must be positive", a);
  if (!(b >= 0.0)) throw ValidationError("S-shaped: b must be nonnegative", b);
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("S-shaped: p must lie in [0, 1]", p);
}

void LogisticPF::validate() const {
  if (!(N_f > 0.0) || !(N_L > 0.0) || !(N_K > 0.0)) {
    throw ValidationError("logistic production function: capacities must be positive");
  }
  if (!(C > 0.0) || !std::isfinite(C)) throw ValidationError("logistic production function: C must be positive", C);
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw ValidationError("logistic production function: elasticities must be finite");
  }
}

void DebtPF::validate() const {
  if (!(N_f > 0.0) || !(N_L > 0.0)) throw ValidationError("debt production function: capacities must be positive");
  if (b3 == 0.0) throw ValidationError("debt production function: b3 must be nonzero");
  if (b4 == 0.0) throw ValidationError("debt production function: b4 must be nonzero");
  if (!(a12 * b1 < 0.0)) throw ValidationError("debt production function: a12 * b1 must be negative");
  if (!(a21 * b2 < 0.0)) throw ValidationError("debt production function: a21 * b2 must be negative");
  if (!std::isfinite(C)) throw ValidationError("debt production function: C must be finite");
}

double eval_cobb_douglas(const CobbDouglasPF& pf, double L, double K) {
  require_positive_input(L, "L", 0);
  require_positive_input(K, "K", 1);
  return pf.A * std::pow(L, pf.alpha) * std::pow(K, pf.beta);
}

double eval_sshaped(const SShapedPF& pf, double L, double K) {
  require_positive_input(L, "L", 0);
  require_positive_input(K, "K", 1);
  const double core = std::pow(L, pf.p) * std::pow(K, 1.0 - pf.p);
  return pf.a * core / (1.0 + pf.b * core);
}

double eval_logistic_pf(const LogisticPF& pf, double L, double K) {
  require_positive_input(L, "L", 0);
  require_positive_input(K, "K", 1);
  if (pf.branch == CapacityBranch::BelowCapacity) {
    require_below(L, pf.N_L, "L", 0);
    require_below(K, pf.N_K, "K", 1);
  }
  // Divide numerator and denominator by L^alpha K^beta.
  const double gap = pf.C * std::pow(std::abs(pf.N_L - L) / L, pf.alpha) *
                     std::pow(std::abs(pf.N_K - K) / K, pf.beta);
  return pf.N_f / (1.0 + gap);
}

double debt_G(const DebtPF& pf, double L, double K, double D) {
  require_positive_input(K, "K", 0);
  require_positive_input(D, "D", 1);
  require_positive_input(L, "L", 3);
  require_below(L, pf.N_L, "L", 3);
  const double sK = pf.capital_scale() * K;
  const double sD = pf.debt_scale() * D;
  if (!(sK > 0.0)) throw DomainError("debt production function: -(a21/b2) K must be positive", 0);
  if (!(sD > 0.0)) throw DomainError("debt production function: -(a12/b1) D must be positive", 1);
  return pf.C - pf.b1 * (std::log(sD) - sD) + pf.b2 * (std::log(sK) - sK) +
         std::log(L / (pf.N_L - L)) / pf.b4;
}

double eval_debt_pf(const DebtPF& pf, double L, double K, double D) {
  return pf.N_f * stable_sigmoid(pf.b3 * debt_G(pf, L, K, D));
}

CobbDouglasPF solve_sato_pf(const CoeffSolution& c, const Vector& x0) {
  if (c.c[2] == 0.0) throw SingularityError("solve_sato_pf: c3 = 0, cannot solve for x3");
  const HamiltonianFn H = build_sato_H(c);
  H.domain.require(x0, "solve_sato_pf");
  CobbDouglasPF pf;
  pf.A = std::exp(H.value(x0) / c.c[2]);
  pf.alpha = c.alpha();
  pf.beta = c.beta();
  pf.crs = c.crs_normalized;
  return pf;
}

CobbDouglasPF solve_bihamiltonian_pf(const BiHamiltonianParams& p, const Vector& x0) {
  const HamiltonianFn H3 = build_bihamiltonian_pair(p).H3;
  H3.domain.require(x0, "solve_bihamiltonian_pf");
  CobbDouglasPF pf;
  pf.A = std::exp(H3.value(x0) / (p.a - p.b));
  pf.alpha = p.alpha;
  pf.beta = p.beta;
  pf.crs = true;
  return pf;
}

LogisticPF solve_logistic_pf(const LogisticModel& m, const CoeffSolution& c, const Vector& x0) {
  if (c.c[2] == 0.0) throw SingularityError("solve_logistic_pf: c3 = 0, cannot solve for x3");
  const HamiltonianFn H = build_logistic_H(m, c);
  H.domain.require(x0, "solve_logistic_pf");
  LogisticPF pf;
  pf.N_L = m.N[0];
  pf.N_K = m.N[1];
  pf.N_f = m.N[2];
  pf.alpha = c.alpha();
  pf.beta = c.beta();
  pf.C = std::exp(-H.value(x0) / c.c[2]);
  return pf;
}

DebtPF solve_debt_pf(const DebtModel& m, const Vector& x0) {
  const HamiltonianFn H = build_debt_H_original(m);
  H.domain.require(x0, "solve_debt_pf");
  DebtPF pf;
  pf.N_f = m.N3;
  pf.N_L = m.N4;
  pf.b1 = m.b1;
  pf.b2 = m.b2;
  pf.b3 = m.b3;
  pf.b4 = m.b4;
  pf.a12 = m.a12;
  pf.a21 = m.a21;
  pf.C = H.value(x0);
  return pf;
}

Residual surface_residual(const CobbDouglasPF& pf, const Trajectory& traj) {
  return level_set_residual(traj, [&](const Vector& x) {
    return std::pair{eval_cobb_douglas(pf, x[0], x[1]), x[2]};
  });
}

Residual surface_residual(const LogisticPF& pf, const Trajectory& traj) {
  return level_set_residual(traj, [&](const Vector& x) {
    return std::pair{eval_logistic_pf(pf, x[0], x[1]), x[2]};
  });
}

Residual surface_residual(const DebtPF& pf, const Trajectory& traj) {
  return level_set_residual(traj, [&](const Vector& x) {
    return std::pair{eval_debt_pf(pf, x[3], x[0], x[1]), x[2]};
  });
}

std::pair<double, double> elasticity_check(const CobbDouglasPF& pf, double L, double K) {
  constexpr double h = 1e-5;
  const double lnL = std::log(L), lnK = std::log(K);
  auto lnY = [&](double a, double b) { return std::log(eval_cobb_douglas(pf, std::exp(a), std::exp(b))); };
  const double dL = (lnY(lnL + h, lnK) - lnY(lnL - h, lnK)) / (2.0 * h);
  const double dK = (lnY(lnL, lnK + h) - lnY(lnL, lnK - h)) / (2.0 * h);
  return {dL, dK};
}

}  // namespace ecodyn
