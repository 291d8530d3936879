#include "ecodyn/poisson.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

void require_dim(int expected, Eigen::Index got, const char* what) {
  if (got != expected) {
    std::ostringstream os;
    os << what << ": expected dimension " << expected << ", got " << got;
    throw DimensionError(os.str());
  }
}

void track_max(Residual& r, double value, const Vector& x) {
  if (value > r.max_abs || r.argmax_point.size() == 0) {
    r.max_abs = std::max(r.max_abs, value);
    r.argmax_point = x;
  }
}

}  // namespace

Box Box::positive_orthant(int dim) {
  return {Vector::Zero(dim), Vector::Constant(dim, std::numeric_limits<double>::infinity())};
}

Box Box::unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return {Vector::Constant(dim, -inf), Vector::Constant(dim, inf)};
}

std::optional<std::size_t> Box::first_violation(const Vector& x) const {
  require_dim(dim(), x.size(), "Box");
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !(x[i] > lo[i]) || !(x[i] < hi[i])) {
      return static_cast<std::size_t>(i);
    }
  }
  return std::nullopt;
}

void Box::require(const Vector& x, const std::string& context) const {
  if (auto bad = first_violation(x)) {
    std::ostringstream os;
    os << context << ": coordinate x" << (*bad + 1) << " = " << x[static_cast<Eigen::Index>(*bad)]
       << " outside admissible interval (" << lo[static_cast<Eigen::Index>(*bad)] << ", "
       << hi[static_cast<Eigen::Index>(*bad)] << ")";
    throw DomainError(os.str(), *bad);
  }
}

std::vector<Vector> BoxSampler::points() const {
  if (lo.size() != hi.size()) throw DimensionError("BoxSampler: bound sizes differ");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw ValidationError("BoxSampler: bounds must be finite with lo < hi");
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    Vector x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
      // Strictly interior: the open box excludes its faces.
      double u = unit(rng);
      if (u == 0.0) u = 0.5;
      x[i] = lo[i] + u * (hi[i] - lo[i]);
    }
    out.push_back(std::move(x));
  }
  return out;
}

Bivector constant_bivector(const Matrix& P, std::string name) {
  if (P.rows() != P.cols()) throw DimensionError("constant_bivector: matrix must be square");
  const int n = static_cast<int>(P.rows());
  Bivector pi;
  pi.dim = n;
  pi.name = std::move(name);
  pi.coeff = [P](const Vector&) { return P; };
  pi.coeff_partial = [n](const Vector&, int) -> Matrix { return Matrix::Zero(n, n); };
  return pi;
}

Bivector separable_bivector(const Matrix& S, std::function<double(int, double)> g,
                            std::function<double(int, double)> dg, std::string name) {
  if (S.rows() != S.cols()) throw DimensionError("separable_bivector: matrix must be square");
  const int n = static_cast<int>(S.rows());
  Bivector pi;
  pi.dim = n;
  pi.name = std::move(name);
  pi.coeff = [S, g, n](const Vector& x) {
    require_dim(n, x.size(), "bivector");
    Vector gx(n);
    for (int i = 0; i < n; ++i) gx[i] = g(i, x[i]);
    return Matrix(gx.asDiagonal() * S * gx.asDiagonal());
  };
  // Only row l and column l depend on x_l.
  pi.coeff_partial = [S, g, dg, n](const Vector& x, int l) {
    require_dim(n, x.size(), "bivector");
    Matrix d = Matrix::Zero(n, n);
    const double dgl = dg(l, x[l]);
    for (int j = 0; j < n; ++j) {
      const double gj = g(j, x[j]);
      if (j == l) continue;
      d(l, j) = S(l, j) * dgl * gj;
      d(j, l) = S(j, l) * gj * dgl;
    }
    d(l, l) = 2.0 * S(l, l) * g(l, x[l]) * dgl;
    return d;
  };
  return pi;
}

Bivector quadratic_bivector(const Matrix& S, std::string name) {
  return separable_bivector(
      S, [](int, double xi) { return xi; }, [](int, double) { return 1.0; }, std::move(name));
}

Bivector pencil(const Bivector& first, const Bivector& second, double lambda) {
  if (first.dim != second.dim) throw DimensionError("pencil: bivector dimensions differ");
  Bivector pi;
  pi.dim = first.dim;
  std::ostringstream os;
  os << first.name << " + " << lambda << "*" << second.name;
  pi.name = os.str();
  pi.coeff = [first, second, lambda](const Vector& x) {
    return Matrix(first.coeff(x) + lambda * second.coeff(x));
  };
  pi.coeff_partial = [first, second, lambda](const Vector& x, int l) {
    return Matrix(first.coeff_partial(x, l) + lambda * second.coeff_partial(x, l));
  };
  return pi;
}

Bivector with_symmetric_defect(const Bivector& pi, double eps) {
  Bivector out = pi;
  out.name = pi.name + " (symmetric defect)";
  const int n = pi.dim;
  out.coeff = [pi, eps, n](const Vector& x) {
    return Matrix(pi.coeff(x) + eps * Matrix::Ones(n, n));
  };
  return out;
}

Vector hamiltonian_vector_field(const Bivector& pi, const HamiltonianFn& H, const Vector& x) {
  if (pi.dim != H.dim) throw DimensionError("hamiltonian_vector_field: bivector and Hamiltonian dimensions differ");
  require_dim(pi.dim, x.size(), "hamiltonian_vector_field");
  H.domain.require(x, "hamiltonian_vector_field(" + H.name + ")");
  return pi.coeff(x) * H.grad(x);
}

Residual skew_residual(const Bivector& pi, const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("skew_residual: empty sample set");
  Residual r;
  for (const auto& x : points) {
    require_dim(pi.dim, x.size(), "skew_residual");
    const Matrix P = pi.coeff(x);
    track_max(r, (P + P.transpose()).cwiseAbs().maxCoeff(), x);
  }
  r.samples = points.size();
  return r;
}

Residual jacobi_residual(const Bivector& pi, const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("jacobi_residual: empty sample set");
  Residual r;
  r.samples = points.size();
  const int n = pi.dim;
  if (n < 3) {
    r.vacuous = true;
    r.argmax_point = points.front();
    return r;
  }
  std::vector<Matrix> dP(static_cast<std::size_t>(n));
  for (const auto& x : points) {
    require_dim(n, x.size(), "jacobi_residual");
    const Matrix P = pi.coeff(x);
    for (int l = 0; l < n; ++l) dP[static_cast<std::size_t>(l)] = pi.coeff_partial(x, l);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        for (int k = j + 1; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            const Matrix& d = dP[static_cast<std::size_t>(l)];
            s += P(i, l) * d(j, k) + P(j, l) * d(k, i) + P(k, l) * d(i, j);
          }
          worst = std::max(worst, std::abs(s));
        }
      }
    }
    track_max(r, worst, x);
  }
  return r;
}

Residual conservation_residual(const HamiltonianFn& H, const Trajectory& traj) {
  if (traj.empty()) throw ValidationError("conservation_residual: empty trajectory");
  for (std::size_t s = 0; s < traj.size(); ++s) {
    if (auto bad = H.domain.first_violation(traj.states[s])) {
      std::ostringstream os;
      os << "conservation_residual(" << H.name << "): sample " << s << " (t = " << traj.times[s]
         << ") leaves the admissible region at coordinate x" << (*bad + 1);
      throw DomainError(os.str(), *bad);
    }
  }
  const double h0 = H.value(traj.states.front());
  const double scale = std::max(1.0, std::abs(h0));
  Residual r;
  r.argmax_point = traj.states.front();
  for (const auto& x : traj.states) track_max(r, std::abs(H.value(x) - h0) / scale, x);
  r.samples = traj.size();
  return r;
}

}  // namespace ecodyn
