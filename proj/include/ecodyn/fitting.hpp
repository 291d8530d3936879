#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecodyn/production.hpp"

namespace ecodyn {

/// Observations of labor, capital and output, with optional time and debt.
struct Dataset {
  std::vector<double> L;
  std::vector<double> K;
  std::vector<double> Y;
  std::optional<std::vector<double>> t;
  std::optional<std::vector<double>> D;

  std::size_t rows() const { return Y.size(); }
  /// Columns must have equal length, required columns positive and finite.
  void validate() const;
};

struct FitResult {
  std::variant<CobbDouglasPF, LogisticPF> pf;
  double rss = 0.0;
  double r_squared = 0.0;
  bool crs = false;
  bool converged = true;
  int iterations = 0;
  /// "log" when rss/r_squared refer to ln Y, "level" when they refer to Y.
  std::string scale;
};

/// Least squares of ln Y = ln A + alpha ln L + beta ln K by column-pivoted QR.
/// With crs, regresses ln(Y/K) on ln(L/K) and sets beta = 1 - alpha.
/// Throws SingularityError on a rank-deficient design and ValidationError
/// with fewer than three rows.
FitResult fit_cobb_douglas(const Dataset& data, bool crs = false);

struct LogisticFitOptions {
  double N_f = 1.0;
  double N_L = 1.0;
  double N_K = 1.0;
  /// Also estimate the capacities, starting from the values above.
  bool free_capacities = false;
  std::uint64_t seed = 7;
  int max_iterations = 20000;
  int restarts = 8;
};

/// Minimizes the level-scale RSS of LogisticPF over (alpha, beta, ln C), and
/// over the capacities when they are free. Starts from a Cobb-Douglas fit of
/// the rows furthest from capacity. If the iteration budget runs out the best
/// point found is returned with converged = false.
FitResult fit_logistic_pf(const Dataset& data, const LogisticFitOptions& opts);

/// Level-scale RSS of a logistic production function on the data;
/// +inf when a row falls outside the function's domain.
double logistic_rss(const LogisticPF& pf, const Dataset& data);

// ---- derivative-free minimization ------------------------------------------

struct NelderMeadOptions {
  int max_iterations = 20000;
  /// Stop when every vertex lies within x_tol (max-norm) of the best one
  /// and the value spread is below f_tol.
  double x_tol = 1e-12;
  double f_tol = 1e-30;
};

struct NelderMeadResult {
  Vector x;
  double fx = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex with standard coefficients (1, 2, 1/2, 1/2). The
/// initial simplex is x0 plus steps[i] along axis i.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const Vector& steps, const NelderMeadOptions& opts = {});

}  // namespace ecodyn
