#include "ecodyn/verification.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_lambda(double lambda) {
  std::ostringstream os;
  os << lambda;
  return os.str();
}

Eigen::Vector3d as3(const Vector& v) { return Eigen::Vector3d(v[0], v[1], v[2]); }

class Audit {
 public:
  Audit(const VerifyOptions& opts, std::vector<Vector> points)
      : opts_(opts), points_(std::move(points)) {}

  void bivector(const Bivector& raw) {
    const Bivector pi = opts_.bivector_defect != 0.0 ? with_symmetric_defect(raw, opts_.bivector_defect) : raw;
    checks_.push_back({"skew[" + raw.name + "]", skew_residual(pi, points_).max_abs, kSkewThreshold});
    checks_.push_back({"jacobi[" + raw.name + "]", jacobi_residual(pi, points_).max_abs, kJacobiThreshold});
  }

  void field(const std::string& name, const Bivector& raw, const HamiltonianFn& H,
             const VectorField& reference) {
    const Bivector pi = opts_.bivector_defect != 0.0 ? with_symmetric_defect(raw, opts_.bivector_defect) : raw;
    checks_.push_back({"field[" + name + "]", field_residual(pi, H, reference, points_).max_abs,
                       kFieldThreshold});
  }

  void add(StructureCheck c) { checks_.push_back(std::move(c)); }
  const std::vector<Vector>& points() const { return points_; }
  std::vector<StructureCheck> take() { return std::move(checks_); }

 private:
  const VerifyOptions& opts_;
  std::vector<Vector> points_;
  std::vector<StructureCheck> checks_;
};

}  // namespace

double relative_gap(const Vector& got, const Vector& want) {
  if (got.size() != want.size()) throw DimensionError("relative_gap: sizes differ");
  const double diff = (got - want).cwiseAbs().maxCoeff();
  const double scale = want.cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

Residual field_residual(const Bivector& pi, const HamiltonianFn& H, const VectorField& reference,
                        const std::vector<Vector>& points) {
  if (points.empty()) throw ValidationError("field_residual: empty sample set");
  Residual r;
  r.samples = points.size();
  r.argmax_point = points.front();
  for (const auto& x : points) {
    const double gap = relative_gap(hamiltonian_vector_field(pi, H, x), reference(x));
    if (gap > r.max_abs) {
      r.max_abs = gap;
      r.argmax_point = x;
    }
  }
  return r;
}

BoxSampler state_sampler(const Model& m, std::size_t count, std::uint64_t seed) {
  BoxSampler s;
  s.count = count;
  s.seed = seed;
  std::visit(overloaded{[&](const SatoModel&) {
                          s.lo = Vector::Zero(3);
                          s.hi = Vector::Constant(3, 10.0);
                        },
                        [&](const LogisticModel& lm) {
                          s.lo = lm.capacity() * std::exp(-3.0);
                          s.hi = lm.capacity() * std::exp(-0.1);
                        },
                        [&](const DebtModel& dm) {
                          const double sK = -dm.a21 / dm.b2, sD = -dm.a12 / dm.b1;
                          s.lo = Vector{{std::exp(-2.0) / sK, std::exp(-2.0) / sD,
                                         dm.N3 * std::exp(-3.0), dm.N4 * std::exp(-3.0)}};
                          s.hi = Vector{{std::exp(2.0) / sK, std::exp(2.0) / sD,
                                         dm.N3 * std::exp(-0.1), dm.N4 * std::exp(-0.1)}};
                        }},
             m);
  return s;
}

BoxSampler log_sampler(const Model& m, std::size_t count, std::uint64_t seed) {
  BoxSampler s;
  s.count = count;
  s.seed = seed;
  std::visit(overloaded{[&](const SatoModel&) {
                          s.lo = Vector::Constant(3, -3.0);
                          s.hi = Vector::Constant(3, std::log(10.0));
                        },
                        [&](const LogisticModel&) {
                          s.lo = Vector::Constant(3, -3.0);
                          s.hi = Vector::Constant(3, -0.1);
                        },
                        [&](const DebtModel&) {
                          s.lo = Vector{{-2.0, -2.0, -3.0, -3.0}};
                          s.hi = Vector{{2.0, 2.0, -0.1, -0.1}};
                        }},
             m);
  return s;
}

std::vector<StructureCheck> verify_structure(const Model& m, const VerifyOptions& opts) {
  std::vector<StructureCheck> out;
  const auto append = [&out](std::vector<StructureCheck> more) {
    for (auto& c : more) out.push_back(std::move(c));
  };

  std::visit(
      overloaded{
          [&](const SatoModel& sm) {
            sm.validate();
            const Eigen::Vector3d b = as3(sm.growth());
            const CoeffSolution c = sato_solve_c(b, opts.coefficient_t);
            const VectorField rhs = [&](const Vector& x) { return model_rhs(m, x); };
            const LVSystem sys = as_lv(sm);
            const VectorField lv = [&](const Vector& x) { return lv_rhs(sys, x); };

            Audit audit(opts, state_sampler(m, opts.samples, opts.seed).points());
            const Bivector pi = sato_bivector();
            const HamiltonianFn H = build_sato_H(c);
            audit.bivector(pi);
            audit.field("pi_sato, H vs model", pi, H, rhs);
            audit.field("pi_sato, H vs lv", pi, H, lv);
            audit.add({"conservation[c.b]", std::abs(c.c.dot(b)), 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff())});

            try {
              const BiHamiltonianParams p = bihamiltonian_ab(b);
              const auto [pi1, pi2] = bihamiltonian_bivectors(b, p);
              const BiHamiltonianPair Hs = build_bihamiltonian_pair(p);
              audit.bivector(pi1);
              audit.bivector(pi2);
              for (double lambda : {-1.0, 0.0, 1.0, 2.0}) {
                Bivector pen = pencil(pi1, pi2, lambda);
                pen.name = "pi1+(" + fmt_lambda(lambda) + ")pi2";
                audit.bivector(pen);
              }
              audit.field("pi1, H1 vs model", pi1, Hs.H1, rhs);
              audit.field("pi2, H2 vs model", pi2, Hs.H2, rhs);
              audit.add({"elasticity routes |alpha_c - alpha_bh|", std::abs(c.alpha() - p.alpha),
                         c.crs_normalized ? 1e-10 : std::numeric_limits<double>::infinity()});
            } catch (const SingularityError&) {
            }

            const double div = sato_divergence(sm);
            audit.add({"divergence - (b1+b2+b3)", std::abs(div - b.sum()), 1e-12 * std::max(1.0, b.cwiseAbs().sum())});
            const CurlReport curl = sato_curl_residual(sm, audit.points());
            audit.add({"curl", curl.curl.max_abs, kCurlThreshold});
            audit.add({"potential", curl.potential.max_abs, kCurlThreshold});
            append(audit.take());
          },
          [&](const LogisticModel& lm) {
            lm.validate();
            const CoeffSolution c = sato_solve_c(as3(lm.growth()), opts.coefficient_t);
            {
              Audit audit(opts, log_sampler(m, opts.samples, opts.seed).points());
              const Bivector pi = logistic_bivector(lm);
              const HamiltonianFn H = build_logistic_H_log(lm, c);
              audit.bivector(pi);
              audit.field("pi3, H~ vs log dynamics", pi, H, [&](const Vector& v) { return rhs_log(m, v); });
              append(audit.take());
            }
            Audit audit(opts, state_sampler(m, opts.samples, opts.seed).points());
            const Bivector pi = logistic_bivector_original(lm);
            const HamiltonianFn H = build_logistic_H(lm, c);
            audit.bivector(pi);
            audit.field("pi3_x, H vs model", pi, H, [&](const Vector& x) { return model_rhs(m, x); });
            // Log-coordinate field pushed back to x: x' = x * v'.
            const Bivector pi_v = opts.bivector_defect != 0.0
                                      ? with_symmetric_defect(logistic_bivector(lm), opts.bivector_defect)
                                      : logistic_bivector(lm);
            const HamiltonianFn H_v = build_logistic_H_log(lm, c);
            double worst = 0.0;
            for (const auto& x : audit.points()) {
              const Vector v = to_log_coords(m, x);
              const Vector xdot = x.cwiseProduct(hamiltonian_vector_field(pi_v, H_v, v));
              worst = std::max(worst, relative_gap(xdot, model_rhs(m, x)));
            }
            audit.add({"field[pi3, H~ pushed to x vs model]", worst, kFieldThreshold});
            append(audit.take());
          },
          [&](const DebtModel& dm) {
            dm.validate();
            Audit audit(opts, log_sampler(m, opts.samples, opts.seed).points());
            const Bivector pi = debt_bivector(dm);
            const HamiltonianFn H = build_debt_H(dm);
            audit.bivector(pi);
            audit.field("pi4, H4 vs log dynamics", pi, H, [&](const Vector& v) { return rhs_log(m, v); });
            const Bivector pi_used = opts.bivector_defect != 0.0 ? with_symmetric_defect(pi, opts.bivector_defect) : pi;
            double worst = 0.0;
            for (const auto& v : audit.points()) {
              const Vector x = from_log_coords(m, v);
              const Vector xdot = x.cwiseProduct(hamiltonian_vector_field(pi_used, H, v));
              worst = std::max(worst, relative_gap(xdot, model_rhs(m, x)));
            }
            audit.add({"field[pi4, H4 pushed to x vs model]", worst, kFieldThreshold});
            append(audit.take());
          }},
      m);
  return out;
}

}  // namespace ecodyn
