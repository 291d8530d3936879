#include "ecodyn/derivation.hpp"

#include <cmath>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

/// v - ln(1 - e^v), defined for v < 0.
double logit_of_exp(double v) { return v - std::log(-std::expm1(v)); }

/// d/dv of logit_of_exp: 1 / (1 - e^v).
double logit_of_exp_prime(double v) { return -1.0 / std::expm1(v); }

Eigen::Vector3d as3(const Vector& v) { return Eigen::Vector3d(v[0], v[1], v[2]); }

}  // namespace

const Matrix& sato_skew_matrix() {
  static const Matrix S = [] {
    Matrix m(3, 3);
    m << 0, -1, -1,
         1, 0, -1,
         1, 1, 0;
    return m;
  }();
  return S;
}

CoeffSolution sato_solve_c(const Eigen::Vector3d& b, std::optional<double> t) {
  if (!b.allFinite()) throw ValidationError("sato_solve_c: growth rates must be finite");
  const double defect = b[0] + b[2] - b[1];
  if (std::abs(defect) > kCompatibilityTol * std::max(1.0, std::abs(b[1]))) {
    std::ostringstream os;
    os << "compatibility condition b1 + b3 = b2 violated (b1 + b3 - b2 = " << defect << ")";
    throw ValidationError(os.str(), defect);
  }
  CoeffSolution sol;
  sol.crs_normalized = !t.has_value();
  sol.t = t.value_or(-b[2]);
  if (sol.t == 0.0) {
    throw ValidationError(sol.crs_normalized
                              ? "sato_solve_c: b3 = 0 leaves no constant-returns solution (c3 = 0)"
                              : "sato_solve_c: free parameter t = c3 must be nonzero");
  }
  sol.c = {b[1] + sol.t, b[2] - b[1] - sol.t, sol.t};
  return sol;
}

BiHamiltonianParams bihamiltonian_ab(const Eigen::Vector3d& bv) {
  const double b1 = bv[0], b2 = bv[1], b3 = bv[2];
  const double det = b1 * b2 - b3 * b3;
  if (det == 0.0 || !std::isfinite(det)) {
    throw SingularityError("bihamiltonian_ab: b1*b2 - b3^2 = 0, exponents a, b undefined");
  }
  BiHamiltonianParams p;
  p.a = (b2 * b3 - b1 * b1) / det;
  p.b = (b1 * b3 - b2 * b2) / det;
  const double spread = p.a - p.b;
  if (spread == 0.0 || !std::isfinite(spread)) {
    throw SingularityError("bihamiltonian_ab: a = b, H3 does not involve x3");
  }
  // Solving (b-1) ln x1 + (1-a) ln x2 + (a-b) ln x3 = h for x3.
  p.alpha = (1.0 - p.b) / spread;
  p.beta = (p.a - 1.0) / spread;
  return p;
}

HamiltonianFn log_sum_hamiltonian(const Eigen::Vector3d& c, std::string name) {
  HamiltonianFn H;
  H.dim = 3;
  H.name = std::move(name);
  H.domain = Box::positive_orthant(3);
  H.value = [c](const Vector& x) {
    return c[0] * std::log(x[0]) + c[1] * std::log(x[1]) + c[2] * std::log(x[2]);
  };
  H.grad = [c](const Vector& x) { return Vector{{c[0] / x[0], c[1] / x[1], c[2] / x[2]}}; };
  return H;
}

HamiltonianFn build_sato_H(const CoeffSolution& c) { return log_sum_hamiltonian(c.c, "H"); }

BiHamiltonianPair build_bihamiltonian_pair(const BiHamiltonianParams& p) {
  const Eigen::Vector3d c1(p.b, 1.0, p.a);
  const Eigen::Vector3d c2(1.0, p.a, p.b);
  return {log_sum_hamiltonian(c1, "H1"), log_sum_hamiltonian(c2, "H2"),
          log_sum_hamiltonian(c1 - c2, "H3")};
}

HamiltonianFn build_logistic_H(const LogisticModel& m, const CoeffSolution& c) {
  m.validate();
  const Vector N = m.capacity();
  const Eigen::Vector3d k = c.c;
  HamiltonianFn H;
  H.dim = 3;
  H.name = "H";
  H.domain = Box{Vector::Zero(3), N};
  H.value = [k, N](const Vector& x) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += k[i] * std::log(x[i] / (N[i] - x[i]));
    return s;
  };
  H.grad = [k, N](const Vector& x) {
    Vector g(3);
    for (int i = 0; i < 3; ++i) g[i] = k[i] * (1.0 / x[i] + 1.0 / (N[i] - x[i]));
    return g;
  };
  return H;
}

HamiltonianFn build_logistic_H_log(const LogisticModel& m, const CoeffSolution& c) {
  m.validate();
  const Eigen::Vector3d k = c.c;
  HamiltonianFn H;
  H.dim = 3;
  H.name = "H~";
  H.domain = log_domain(m);
  H.value = [k](const Vector& v) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += k[i] * logit_of_exp(v[i]);
    return s;
  };
  H.grad = [k](const Vector& v) {
    Vector g(3);
    for (int i = 0; i < 3; ++i) g[i] = k[i] * logit_of_exp_prime(v[i]);
    return g;
  };
  return H;
}

HamiltonianFn build_debt_H(const DebtModel& m) {
  m.validate();
  HamiltonianFn H;
  H.dim = 4;
  H.name = "H4";
  H.domain = log_domain(m);
  H.value = [m](const Vector& v) {
    return m.b1 * (v[1] - std::exp(v[1])) - m.b2 * (v[0] - std::exp(v[0])) +
           logit_of_exp(v[2]) / m.b3 - logit_of_exp(v[3]) / m.b4;
  };
  H.grad = [m](const Vector& v) {
    return Vector{{m.b2 * std::expm1(v[0]), -m.b1 * std::expm1(v[1]),
                   logit_of_exp_prime(v[2]) / m.b3, -logit_of_exp_prime(v[3]) / m.b4}};
  };
  return H;
}

HamiltonianFn build_debt_H_original(const DebtModel& m) {
  const HamiltonianFn Hv = build_debt_H(m);
  const Model model = m;
  HamiltonianFn H;
  H.dim = 4;
  H.name = "H";
  H.domain = state_domain(model);
  H.value = [Hv, model](const Vector& x) { return Hv.value(to_log_coords(model, x)); };
  H.grad = [Hv, model](const Vector& x) {
    return Vector(Hv.grad(to_log_coords(model, x)).cwiseQuotient(x));
  };
  return H;
}

Bivector sato_bivector() { return quadratic_bivector(sato_skew_matrix(), "pi_sato"); }

Matrix skew_solution(const Eigen::Vector3d& c, const Eigen::Vector3d& b) {
  const double norm2 = c.squaredNorm();
  if (norm2 == 0.0) throw SingularityError("skew_solution: coefficient vector is zero");
  const Eigen::Vector3d w = c.cross(b) / norm2;
  Matrix S(3, 3);
  S << 0, -w[2], w[1],
       w[2], 0, -w[0],
       -w[1], w[0], 0;
  return S;
}

BiHamiltonianStructures bihamiltonian_bivectors(const Eigen::Vector3d& b,
                                                const BiHamiltonianParams& p) {
  const Eigen::Vector3d c1(p.b, 1.0, p.a);
  const Eigen::Vector3d c2(1.0, p.a, p.b);
  return {quadratic_bivector(skew_solution(c1, b), "pi1"),
          quadratic_bivector(skew_solution(c2, b), "pi2")};
}

Bivector logistic_bivector(const LogisticModel& m) {
  m.validate();
  return separable_bivector(
      sato_skew_matrix(), [](int, double v) { return -std::expm1(v); },
      [](int, double v) { return -std::exp(v); }, "pi3");
}

Bivector logistic_bivector_original(const LogisticModel& m) {
  m.validate();
  const Vector N = m.capacity();
  return separable_bivector(
      sato_skew_matrix(), [N](int i, double x) { return x * (N[i] - x) / N[i]; },
      [N](int i, double x) { return (N[i] - 2.0 * x) / N[i]; }, "pi3_x");
}

Bivector debt_bivector(const DebtModel& m) {
  m.validate();
  Matrix S = Matrix::Zero(4, 4);
  S(0, 1) = 1.0;
  S(1, 0) = -1.0;
  S(2, 3) = -m.b3 * m.b4;
  S(3, 2) = m.b3 * m.b4;
  return separable_bivector(
      S, [](int i, double v) { return i < 2 ? 1.0 : -std::expm1(v); },
      [](int i, double v) { return i < 2 ? 0.0 : -std::exp(v); }, "pi4");
}

double sato_divergence(const SatoModel& m, const Vector& at) {
  return lv_jacobian(as_lv(m), at).trace();
}

CurlReport sato_curl_residual(const SatoModel& m, const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("sato_curl_residual: empty sample set");
  const LVSystem sys = as_lv(m);
  const Vector b = m.growth();

  // Use the Hamiltonian form of the field whenever the coefficient system
  // is solvable; otherwise the model right-hand side.
  std::optional<std::pair<Bivector, HamiltonianFn>> hamiltonian;
  try {
    hamiltonian.emplace(sato_bivector(), build_sato_H(sato_solve_c(as3(b))));
  } catch (const ValidationError&) {
  }

  CurlReport rep;
  rep.curl.samples = rep.potential.samples = points.size();
  rep.curl.argmax_point = rep.potential.argmax_point = points.front();
  for (const auto& x : points) {
    const Matrix J = lv_jacobian(sys, x);
    const Eigen::Vector3d curl(J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1));
    if (curl.norm() > rep.curl.max_abs) {
      rep.curl.max_abs = curl.norm();
      rep.curl.argmax_point = x;
    }
    const Vector X = hamiltonian ? hamiltonian_vector_field(hamiltonian->first, hamiltonian->second, x)
                                 : lv_rhs(sys, x);
    const Vector grad_potential = b.cwiseProduct(x);
    const double gap = (X - grad_potential).cwiseAbs().maxCoeff() /
                       std::max(1.0, grad_potential.cwiseAbs().maxCoeff());
    if (gap > rep.potential.max_abs) {
      rep.potential.max_abs = gap;
      rep.potential.argmax_point = x;
    }
  }
  return rep;
}

std::vector<ConservedQuantity> conserved_quantities(const Model& model, std::optional<double> t) {
  std::vector<ConservedQuantity> out;
  if (const auto* m = std::get_if<SatoModel>(&model)) {
    const Eigen::Vector3d b(m->b1, m->b2, m->b3);
    out.push_back({"H", [b, t] { return build_sato_H(sato_solve_c(b, t)); }});
    auto pair = [b] { return build_bihamiltonian_pair(bihamiltonian_ab(b)); };
    out.push_back({"H1", [pair] { return pair().H1; }});
    out.push_back({"H2", [pair] { return pair().H2; }});
    out.push_back({"H3", [pair] { return pair().H3; }});
  } else if (const auto* m = std::get_if<LogisticModel>(&model)) {
    const LogisticModel lm = *m;
    out.push_back({"H", [lm, t] {
                     return build_logistic_H(lm, sato_solve_c(Eigen::Vector3d(lm.b[0], lm.b[1], lm.b[2]), t));
                   }});
  } else if (const auto* m = std::get_if<DebtModel>(&model)) {
    const DebtModel dm = *m;
    out.push_back({"H", [dm] { return build_debt_H_original(dm); }});
  }
  return out;
}

}  // namespace ecodyn
