#include "ecodyn/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "ecodyn/errors.hpp"

namespace ecodyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_column(const std::vector<double>& col, std::size_t n, const char* name) {
  if (col.size() != n) {
    std::ostringstream os;
    os << "dataset column " << name << " has " << col.size() << " rows, expected " << n;
    throw ValidationError(os.str());
  }
  for (std::size_t r = 0; r < n; ++r) {
    if (!(col[r] > 0.0) || !std::isfinite(col[r])) {
      std::ostringstream os;
      os << "dataset column " << name << ", row " << (r + 1) << ": value " << col[r]
         << " must be positive and finite";
      throw ValidationError(os.str(), col[r]);
    }
  }
}

double total_sum_of_squares(const Vector& y) {
  return (y.array() - y.mean()).square().sum();
}

double r_squared(double rss, double tss) { return tss > 0.0 ? 1.0 - rss / tss : 1.0; }

}  // namespace

void Dataset::validate() const {
  const std::size_t n = Y.size();
  if (n == 0) throw ValidationError("dataset is empty");
  check_column(L, n, "L");
  check_column(K, n, "K");
  check_column(Y, n, "Y");
  if (D) check_column(*D, n, "D");
  if (t && t->size() != n) throw ValidationError("dataset column t has the wrong number of rows");
}

FitResult fit_cobb_douglas(const Dataset& data, bool crs) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.rows());
  const Eigen::Index p = crs ? 2 : 3;
  if (n < 3) throw ValidationError("Cobb-Douglas fit needs at least 3 rows");

  Matrix X(n, p);
  Vector y(n);
  Vector lnY(n), lnL(n), lnK(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    lnL[r] = std::log(data.L[i]);
    lnK[r] = std::log(data.K[i]);
    lnY[r] = std::log(data.Y[i]);
    X(r, 0) = 1.0;
    if (crs) {
      X(r, 1) = lnL[r] - lnK[r];
      y[r] = lnY[r] - lnK[r];
    } else {
      X(r, 1) = lnL[r];
      X(r, 2) = lnK[r];
      y[r] = lnY[r];
    }
  }

  Eigen::ColPivHouseholderQR<Matrix> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::ostringstream os;
    os << "Cobb-Douglas fit: design matrix is rank deficient (rank " << qr.rank() << " < " << p
       << "); ln L and ln K are collinear or constant";
    throw SingularityError(os.str());
  }
  const Vector coef = qr.solve(y);

  CobbDouglasPF pf;
  pf.A = std::exp(coef[0]);
  pf.alpha = coef[1];
  pf.beta = crs ? 1.0 - coef[1] : coef[2];
  pf.crs = crs;

  const Vector fitted = Vector::Constant(n, coef[0]) + pf.alpha * lnL + pf.beta * lnK;
  FitResult res;
  res.pf = pf;
  res.crs = crs;
  res.rss = (lnY - fitted).squaredNorm();
  res.r_squared = r_squared(res.rss, total_sum_of_squares(lnY));
  res.scale = "log";
  return res;
}

double logistic_rss(const LogisticPF& pf, const Dataset& data) {
  double rss = 0.0;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    double yhat;
    try {
      yhat = eval_logistic_pf(pf, data.L[r], data.K[r]);
    } catch (const Error&) {
      return kInf;
    }
    const double e = yhat - data.Y[r];
    rss += e * e;
  }
  return std::isfinite(rss) ? rss : kInf;
}

FitResult fit_logistic_pf(const Dataset& data, const LogisticFitOptions& opts) {
  data.validate();
  const std::size_t n = data.rows();
  const double maxL = *std::max_element(data.L.begin(), data.L.end());
  const double maxK = *std::max_element(data.K.begin(), data.K.end());
  const double maxY = *std::max_element(data.Y.begin(), data.Y.end());
  auto check_capacity = [](double cap, double max_obs, const char* name) {
    if (!(cap > max_obs)) {
      std::ostringstream os;
      os << "capacity " << name << " = " << cap << " must exceed the largest observation " << max_obs;
      throw ValidationError(os.str(), cap - max_obs);
    }
  };
  check_capacity(opts.N_L, maxL, "N_L");
  check_capacity(opts.N_K, maxK, "N_K");
  check_capacity(opts.N_f, maxY, "N_f");

  // Starting point: Cobb-Douglas on the half of the rows furthest below
  // capacity, where the logistic function is closest to Cobb-Douglas.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.Y[a] / opts.N_f < data.Y[b] / opts.N_f;
  });
  double alpha0 = 0.5, beta0 = 0.5, A0 = 1.0;
  for (std::size_t take : {std::max<std::size_t>(3, n / 2), n}) {
    if (take > n) continue;
    Dataset small;
    for (std::size_t k = 0; k < take; ++k) {
      small.L.push_back(data.L[order[k]]);
      small.K.push_back(data.K[order[k]]);
      small.Y.push_back(data.Y[order[k]]);
    }
    try {
      const auto cd = std::get<CobbDouglasPF>(fit_cobb_douglas(small).pf);
      alpha0 = cd.alpha;
      beta0 = cd.beta;
      A0 = cd.A;
      break;
    } catch (const Error&) {
    }
  }

  // Parameters: alpha, beta, ln C [, ln(N_L - maxL), ln(N_K - maxK), ln(N_f - maxY)].
  const int dim = opts.free_capacities ? 6 : 3;
  auto unpack = [&](const Vector& p) {
    LogisticPF pf;
    pf.alpha = p[0];
    pf.beta = p[1];
    pf.C = std::exp(p[2]);
    if (opts.free_capacities) {
      pf.N_L = maxL + std::exp(p[3]);
      pf.N_K = maxK + std::exp(p[4]);
      pf.N_f = maxY + std::exp(p[5]);
    } else {
      pf.N_L = opts.N_L;
      pf.N_K = opts.N_K;
      pf.N_f = opts.N_f;
    }
    return pf;
  };
  auto objective = [&](const Vector& p) {
    if (!p.allFinite()) return kInf;
    return logistic_rss(unpack(p), data);
  };

  Vector x(dim);
  x[0] = alpha0;
  x[1] = beta0;
  // Small-input limit: Y ~ N_f L^a K^b / (C N_L^a N_K^b).
  x[2] = std::log(opts.N_f / A0) - alpha0 * std::log(opts.N_L) - beta0 * std::log(opts.N_K);
  if (!std::isfinite(x[2])) x[2] = 0.0;
  if (opts.free_capacities) {
    x[3] = std::log(opts.N_L - maxL);
    x[4] = std::log(opts.N_K - maxK);
    x[5] = std::log(opts.N_f - maxY);
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(0.9, 1.1);
  NelderMeadOptions nm_opts;
  nm_opts.max_iterations = opts.max_iterations;

  NelderMeadResult best{x, objective(x), 0, false};
  int total_iterations = 0;
  for (int round = 0; round <= opts.restarts; ++round) {
    Vector steps(dim);
    const double scale = round == 0 ? 0.1 : 0.01;
    for (int i = 0; i < dim; ++i) steps[i] = scale * jitter(rng);
    const NelderMeadResult r = nelder_mead(objective, best.x, steps, nm_opts);
    total_iterations += r.iterations;
    // Restart from the best vertex until a round stops improving.
    const bool improved = r.fx < best.fx;
    if (improved) best = r;
    if (!improved && round > 0) break;
  }

  FitResult res;
  const LogisticPF pf = unpack(best.x);
  res.pf = pf;
  res.rss = best.fx;
  Vector y(static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) y[static_cast<Eigen::Index>(r)] = data.Y[r];
  res.r_squared = r_squared(res.rss, total_sum_of_squares(y));
  res.converged = best.converged;
  res.iterations = total_iterations;
  res.scale = "level";
  return res;
}

NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const Vector& steps, const NelderMeadOptions& opts) {
  const auto n = x0.size();
  if (steps.size() != n) throw DimensionError("nelder_mead: steps must match x0");
  std::vector<Vector> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> fv(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)][i] += steps[i];
  for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

  std::vector<std::size_t> idx(simplex.size());
  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];

    double spread = 0.0;
    for (const auto& v : simplex) spread = std::max(spread, (v - simplex[best]).cwiseAbs().maxCoeff());
    // A simplex collapsed to rounding level cannot make further progress,
    // whatever the value spread.
    const double floor = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(1.0, simplex[best].cwiseAbs().maxCoeff());
    const bool flat = std::abs(fv[worst] - fv[best]) <= opts.f_tol + 1e-15 * std::abs(fv[best]);
    if (spread <= opts.x_tol && (flat || spread <= floor)) {
      res.converged = true;
      break;
    }
    if (fv[best] == 0.0 && fv[worst] == 0.0) {
      res.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Vector xr = centroid + (centroid - simplex[worst]);
    const double fr = f(xr);
    if (fr < fv[best]) {
      const Vector xe = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fv[worst] = fe;
      } else {
        simplex[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      simplex[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    // Contraction, outside if the reflection improved on the worst vertex.
    const bool outside = fr < fv[worst];
    const Vector xc = outside ? Vector(centroid + 0.5 * (xr - centroid))
                              : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = f(xc);
    if (fc < (outside ? fr : fv[worst])) {
      simplex[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      fv[i] = f(simplex[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  res.x = simplex[static_cast<std::size_t>(it - fv.begin())];
  res.fx = *it;
  return res;
}

}  // namespace ecodyn
