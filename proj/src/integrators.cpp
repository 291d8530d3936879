#include "ecodyn/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

// Fehlberg 4(5) tableau. Fields are autonomous, so the nodes c_i are not needed.
constexpr double a21 = 1.0 / 4;
constexpr double a31 = 3.0 / 32, a32 = 9.0 / 32;
constexpr double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197, a43 = 7296.0 / 2197;
constexpr double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513, a54 = -845.0 / 4104;
constexpr double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565, a64 = 1859.0 / 4104,
                 a65 = -11.0 / 40;
constexpr double b1_5 = 16.0 / 135, b3_5 = 6656.0 / 12825, b4_5 = 28561.0 / 56430,
                 b5_5 = -9.0 / 50, b6_5 = 2.0 / 55;
constexpr double b1_4 = 25.0 / 216, b3_4 = 1408.0 / 2565, b4_4 = 2197.0 / 4104, b5_4 = -1.0 / 5;

struct EmbeddedStep {
  Vector high;
  Vector error;
};

EmbeddedStep fehlberg(const VectorField& f, const Vector& x, double h) {
  const Vector k1 = f(x);
  const Vector k2 = f(x + h * a21 * k1);
  const Vector k3 = f(x + h * (a31 * k1 + a32 * k2));
  const Vector k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const Vector high = x + h * (b1_5 * k1 + b3_5 * k3 + b4_5 * k4 + b5_5 * k5 + b6_5 * k6);
  const Vector low = x + h * (b1_4 * k1 + b3_4 * k3 + b4_4 * k4 + b5_4 * k5);
  return {high, high - low};
}

class Recorder {
 public:
  Recorder(Trajectory& traj, std::span<const HamiltonianFn> monitors,
           const std::optional<Box>& domain)
      : traj_(traj), monitors_(monitors), domain_(domain) {
    for (const auto& H : monitors_) traj_.monitor_names.push_back(H.name);
    traj_.monitor_values.resize(monitors_.size());
  }

  void check(double t, const Vector& x) const {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (!std::isfinite(x[i])) {
        std::ostringstream os;
        os << "integrate: non-finite state at t = " << t << " in coordinate x" << (i + 1);
        throw IntegrationError(os.str());
      }
    }
    auto report = [&](const Box& box, const std::string& what) {
      if (auto bad = box.first_violation(x)) {
        std::ostringstream os;
        os << "integrate: state left the admissible region of " << what << " at t = " << t
           << ", coordinate x" << (*bad + 1) << " = " << x[static_cast<Eigen::Index>(*bad)];
        throw DomainError(os.str(), *bad);
      }
    };
    if (domain_) report(*domain_, "the model");
    for (const auto& H : monitors_) report(H.domain, H.name);
  }

  void record(double t, const Vector& x) {
    traj_.times.push_back(t);
    traj_.states.push_back(x);
    for (std::size_t m = 0; m < monitors_.size(); ++m) {
      traj_.monitor_values[m].push_back(monitors_[m].value(x));
    }
  }

 private:
  Trajectory& traj_;
  std::span<const HamiltonianFn> monitors_;
  const std::optional<Box>& domain_;
};

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::Euler: return "euler";
    case Method::RK4: return "rk4";
    case Method::RKF45: return "rkf45";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "euler") return Method::Euler;
  if (name == "rk4") return Method::RK4;
  if (name == "rkf45") return Method::RKF45;
  throw ValidationError("unknown integration method '" + name + "' (expected rk4, rkf45 or euler)");
}

void IntegratorConfig::validate() const {
  if (!(std::isfinite(t0) && std::isfinite(t1) && t0 < t1)) {
    throw ValidationError("integrator: need finite t0 < t1");
  }
  if (!(h > 0.0) || !std::isfinite(h)) throw ValidationError("integrator: step h must be positive");
  if (record_every < 1) throw ValidationError("integrator: record_every must be >= 1");
  if (method == Method::RKF45) {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      throw ValidationError("integrator: tolerances must be positive");
    }
    if (!(h_min > 0.0) || !(h_min <= h_max)) {
      throw ValidationError("integrator: need 0 < h_min <= h_max");
    }
  }
}

Vector step(const VectorField& f, const Vector& x, double h, Method method) {
  switch (method) {
    case Method::Euler:
      return x + h * f(x);
    case Method::RK4: {
      const Vector k1 = f(x);
      const Vector k2 = f(x + 0.5 * h * k1);
      const Vector k3 = f(x + 0.5 * h * k2);
      const Vector k4 = f(x + h * k3);
      return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    case Method::RKF45:
      return fehlberg(f, x, h).high;
  }
  return x;
}

Trajectory integrate(const VectorField& rhs, const Vector& x0, const IntegratorConfig& cfg,
                     std::span<const HamiltonianFn> monitors, const std::optional<Box>& domain) {
  cfg.validate();
  for (const auto& H : monitors) {
    if (H.dim != x0.size()) throw DimensionError("integrate: monitor dimension differs from state");
  }
  Trajectory traj;
  Recorder rec(traj, monitors, domain);
  rec.check(cfg.t0, x0);
  rec.record(cfg.t0, x0);

  Vector x = x0;
  const double span = cfg.t1 - cfg.t0;

  if (cfg.method != Method::RKF45) {
    // Fixed grid t_k = t0 + k h; the last step is shortened to land on t1.
    const auto n = static_cast<long long>(std::ceil(span / cfg.h - 1e-9));
    for (long long k = 1; k <= n; ++k) {
      const double t_prev = cfg.t0 + static_cast<double>(k - 1) * cfg.h;
      const double t = (k == n) ? cfg.t1 : cfg.t0 + static_cast<double>(k) * cfg.h;
      x = step(rhs, x, t - t_prev, cfg.method);
      rec.check(t, x);
      if (k % cfg.record_every == 0 || k == n) rec.record(t, x);
    }
    return traj;
  }

  double t = cfg.t0;
  double h = std::min(cfg.h, cfg.h_max);
  long long accepted = 0;
  while (t < cfg.t1) {
    const bool last = t + h >= cfg.t1;
    const double h_try = last ? cfg.t1 - t : h;
    const EmbeddedStep s = fehlberg(rhs, x, h_try);
    double err = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(s.high[i]));
      err = std::max(err, std::abs(s.error[i]) / scale);
    }
    if (!std::isfinite(err)) {
      throw IntegrationError("integrate: non-finite error estimate at t = " + std::to_string(t));
    }
    if (err <= 1.0) {
      // Local extrapolation: advance with the fifth-order solution.
      x = s.high;
      t = last ? cfg.t1 : t + h_try;
      rec.check(t, x);
      ++accepted;
      if (accepted % cfg.record_every == 0 || t >= cfg.t1) rec.record(t, x);
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(h_try * factor, cfg.h_max);
    if (h < cfg.h_min && t < cfg.t1) {
      std::ostringstream os;
      os << "integrate: step size underflow (h = " << h << " < h_min = " << cfg.h_min
         << ") at t = " << t;
      throw IntegrationError(os.str());
    }
  }
  return traj;
}

OrderEstimate convergence_order(const VectorField& rhs, const Vector& x0,
                                const std::function<Vector(double)>& exact, Method method,
                                double t1, double h0, int levels) {
  if (levels < 2) throw ValidationError("convergence_order: need at least two levels");
  if (method == Method::RKF45) throw ValidationError("convergence_order: fixed-step methods only");
  const Vector reference = exact(t1);
  if (reference.size() != x0.size()) {
    throw DimensionError("convergence_order: oracle dimension differs from state");
  }
  OrderEstimate est;
  double h = h0;
  for (int k = 0; k < levels; ++k, h *= 0.5) {
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.h = h;
    cfg.t0 = 0.0;
    cfg.t1 = t1;
    cfg.record_every = 1 << 30;
    const Trajectory tr = integrate(rhs, x0, cfg);
    const Vector& x = tr.back();
    double e = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      e = std::max(e, std::abs(x[i] - reference[i]) / std::max(1.0, std::abs(reference[i])));
    }
    est.steps.push_back(h);
    est.errors.push_back(e);
  }
  // Below ~1e-13 the error is rounding noise and ratios mean nothing.
  constexpr double kFloor = 1e-13;
  for (std::size_t k = 0; k + 1 < est.errors.size(); ++k) {
    if (est.errors[k] < kFloor || est.errors[k + 1] < kFloor) {
      est.reliable = false;
      est.orders.push_back(0.0);
    } else {
      est.orders.push_back(std::log2(est.errors[k] / est.errors[k + 1]));
    }
  }
  est.order = est.orders.back();
  return est;
}

}  // namespace ecodyn
