#pragma once

// Per-model structure audit: skew symmetry, Jacobi identity, agreement of the
// Hamiltonian vector field with the model equations, and for the Sato model
// the divergence and curl of its field.

#include <string>
#include <vector>

#include "ecodyn/derivation.hpp"
#include "ecodyn/models.hpp"

namespace ecodyn {

inline constexpr double kSkewThreshold = 1e-12;
inline constexpr double kJacobiThreshold = 1e-10;
inline constexpr double kFieldThreshold = 1e-10;
inline constexpr double kCurlThreshold = 1e-12;

/// |a - b|_inf / |b|_inf, or |a|_inf when b = 0.
double relative_gap(const Vector& got, const Vector& want);

/// Max over points of relative_gap(P grad H, reference).
Residual field_residual(const Bivector& pi, const HamiltonianFn& H, const VectorField& reference,
                        const std::vector<Vector>& points);

/// Sampling boxes used by the audits. Original coordinates:
///   Sato      (0, 10)^3
///   Logistic  (N e^{-3}, N e^{-0.1}) per coordinate
///   Debt      x1, x2 in (e^{-2}, e^{2}) / scale, x3, x4 as logistic
/// Log coordinates are the images of these boxes.
BoxSampler state_sampler(const Model& m, std::size_t count = 100, std::uint64_t seed = kDefaultSeed);
BoxSampler log_sampler(const Model& m, std::size_t count = 100, std::uint64_t seed = kDefaultSeed);

struct StructureCheck {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed() const { return value <= threshold; }
};

struct VerifyOptions {
  std::size_t samples = 100;
  std::uint64_t seed = kDefaultSeed;
  /// Symmetric defect added to every bivector (negative control).
  double bivector_defect = 0.0;
  /// Free parameter t = c3 for the coefficient solve; CRS choice when empty.
  std::optional<double> coefficient_t;
};

/// Runs every applicable check for the model. Sato and logistic models need
/// b1 + b3 = b2 (ValidationError otherwise).
std::vector<StructureCheck> verify_structure(const Model& m, const VerifyOptions& opts = {});

}  // namespace ecodyn
