#include "ecodyn/models.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string(name) + " must be finite");
}

void require_size(const Model& m, const Vector& x, const char* what) {
  const int n = model_dim(m);
  if (x.size() != n) {
    std::ostringstream os;
    os << what << "(" << model_name(m) << "): expected " << n << " components, got " << x.size();
    throw DimensionError(os.str());
  }
}

}  // namespace

void LVSystem::validate() const {
  if (b.size() < 1) throw ValidationError("LVSystem: dimension must be at least 1");
  if (A.rows() != b.size() || A.cols() != b.size()) {
    throw DimensionError("LVSystem: interaction matrix must be n x n with n = len(b)");
  }
  if (!b.allFinite() || !A.allFinite()) throw ValidationError("LVSystem: entries must be finite");
}

void SatoModel::validate() const {
  require_finite(b1, "b1");
  require_finite(b2, "b2");
  require_finite(b3, "b3");
}

void LogisticModel::validate() const {
  static const char* bn[] = {"b1", "b2", "b3"};
  static const char* nn[] = {"N1", "N2", "N3"};
  for (int i = 0; i < 3; ++i) {
    require_finite(b[i], bn[i]);
    require_finite(N[i], nn[i]);
    if (!(N[i] > 0.0)) throw ValidationError(std::string(nn[i]) + " must be positive", N[i]);
  }
}

void DebtModel::validate() const {
  require_finite(b1, "b1");
  require_finite(b2, "b2");
  require_finite(b3, "b3");
  require_finite(b4, "b4");
  require_finite(a12, "a12");
  require_finite(a21, "a21");
  require_finite(N3, "N3");
  require_finite(N4, "N4");
  if (b3 == 0.0) throw ValidationError("b3 must be nonzero");
  if (b4 == 0.0) throw ValidationError("b4 must be nonzero");
  if (!(N3 > 0.0)) throw ValidationError("N3 must be positive", N3);
  if (!(N4 > 0.0)) throw ValidationError("N4 must be positive", N4);
  if (!(a12 * b1 < 0.0)) throw ValidationError("a12 * b1 must be negative", a12 * b1);
  if (!(a21 * b2 < 0.0)) throw ValidationError("a21 * b2 must be negative", a21 * b2);
}

std::string model_name(const Model& m) {
  return std::visit(overloaded{[](const SatoModel&) { return std::string("sato"); },
                               [](const LogisticModel&) { return std::string("logistic"); },
                               [](const DebtModel&) { return std::string("debt"); }},
                    m);
}

int model_dim(const Model& m) { return std::holds_alternative<DebtModel>(m) ? 4 : 3; }

Vector lv_rhs(const LVSystem& sys, const Vector& x) {
  if (x.size() != sys.dim()) throw DimensionError("lv_rhs: state size does not match system");
  return x.cwiseProduct(sys.b + sys.A * x);
}

Matrix lv_jacobian(const LVSystem& sys, const Vector& x) {
  if (x.size() != sys.dim()) throw DimensionError("lv_jacobian: state size does not match system");
  Matrix J = x.asDiagonal() * sys.A;
  J.diagonal() += sys.b + sys.A * x;
  return J;
}

LVSystem as_lv(const SatoModel& m) {
  m.validate();
  return {m.growth(), Matrix::Zero(3, 3)};
}

LVSystem as_lv(const LogisticModel& m) {
  m.validate();
  LVSystem sys{m.growth(), Matrix::Zero(3, 3)};
  for (int i = 0; i < 3; ++i) sys.A(i, i) = -m.b[i] / m.N[i];
  return sys;
}

LVSystem as_lv(const DebtModel& m) {
  m.validate();
  LVSystem sys{m.growth(), Matrix::Zero(4, 4)};
  sys.A(0, 1) = m.a12;
  sys.A(1, 0) = m.a21;
  sys.A(2, 2) = -m.b3 / m.N3;
  sys.A(3, 3) = -m.b4 / m.N4;
  return sys;
}

LVSystem as_lv(const Model& m) {
  return std::visit([](const auto& model) { return as_lv(model); }, m);
}

Vector model_rhs(const Model& m, const Vector& x) {
  require_size(m, x, "model_rhs");
  return std::visit(
      overloaded{
          [&](const SatoModel& s) { return Vector{{s.b1 * x[0], s.b2 * x[1], s.b3 * x[2]}}; },
          [&](const LogisticModel& s) {
            Vector out(3);
            for (int i = 0; i < 3; ++i) out[i] = s.b[i] * x[i] * (1.0 - x[i] / s.N[i]);
            return out;
          },
          [&](const DebtModel& s) {
            return Vector{{x[0] * (s.b1 + s.a12 * x[1]), x[1] * (s.b2 + s.a21 * x[0]),
                           x[2] * s.b3 * (1.0 - x[2] / s.N3), x[3] * s.b4 * (1.0 - x[3] / s.N4)}};
          }},
      m);
}

Box state_domain(const Model& m) {
  return std::visit(overloaded{[](const SatoModel&) { return Box::positive_orthant(3); },
                               [](const LogisticModel& s) {
                                 return Box{Vector::Zero(3), s.capacity()};
                               },
                               [](const DebtModel& s) {
                                 return Box{Vector::Zero(4), Vector{{kInf, kInf, s.N3, s.N4}}};
                               }},
                    m);
}

Box log_domain(const Model& m) {
  return std::visit(overloaded{[](const SatoModel&) { return Box::unbounded(3); },
                               [](const LogisticModel&) {
                                 return Box{Vector::Constant(3, -kInf), Vector::Zero(3)};
                               },
                               [](const DebtModel&) {
                                 return Box{Vector::Constant(4, -kInf),
                                            Vector{{kInf, kInf, 0.0, 0.0}}};
                               }},
                    m);
}

Box flow_domain(const Model& m) { return Box::positive_orthant(model_dim(m)); }

namespace {

/// Per-coordinate scale s_i with v_i = ln(s_i x_i).
Vector log_scale(const Model& m) {
  return std::visit(overloaded{[](const SatoModel&) { return Vector(Vector::Ones(3)); },
                               [](const LogisticModel& s) {
                                 return Vector(s.capacity().cwiseInverse());
                               },
                               [](const DebtModel& s) {
                                 return Vector{{-s.a21 / s.b2, -s.a12 / s.b1, 1.0 / s.N3,
                                                1.0 / s.N4}};
                               }},
                    m);
}

void validate_model(const Model& m) {
  std::visit([](const auto& model) { model.validate(); }, m);
}

}  // namespace

Vector to_log_coords(const Model& m, const Vector& x) {
  validate_model(m);
  require_size(m, x, "to_log_coords");
  state_domain(m).require(x, "to_log_coords(" + model_name(m) + ")");
  return (log_scale(m).cwiseProduct(x)).array().log().matrix();
}

Vector from_log_coords(const Model& m, const Vector& v) {
  validate_model(m);
  require_size(m, v, "from_log_coords");
  log_domain(m).require(v, "from_log_coords(" + model_name(m) + ")");
  return v.array().exp().matrix().cwiseQuotient(log_scale(m));
}

Vector log_coords_jacobian(const Model& m, const Vector& x) {
  require_size(m, x, "log_coords_jacobian");
  state_domain(m).require(x, "log_coords_jacobian(" + model_name(m) + ")");
  return x.cwiseInverse();
}

Vector rhs_log(const Model& m, const Vector& v) {
  validate_model(m);
  require_size(m, v, "rhs_log");
  log_domain(m).require(v, "rhs_log(" + model_name(m) + ")");
  return std::visit(
      overloaded{[&](const SatoModel& s) { return s.growth(); },
                 [&](const LogisticModel& s) {
                   Vector out(3);
                   for (int i = 0; i < 3; ++i) out[i] = s.b[i] * -std::expm1(v[i]);
                   return out;
                 },
                 [&](const DebtModel& s) {
                   return Vector{{s.b1 * -std::expm1(v[1]), s.b2 * -std::expm1(v[0]),
                                  s.b3 * -std::expm1(v[2]), s.b4 * -std::expm1(v[3])}};
                 }},
      m);
}

}  // namespace ecodyn
