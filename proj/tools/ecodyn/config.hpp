#pragma once

// Run configuration read from a TOML file.
//
//   seed = 20190611
//
//   [model]
//   kind = "sato" | "logistic" | "debt" | "lv"
//   b    = [...]            growth rates (4 entries for debt)
//   N    = [...]            capacities: 3 for logistic, [N3, N4] for debt
//   a12, a21                debt interaction coefficients
//   A    = [[...], ...]     interaction matrix for kind = "lv"
//   x0   = [...]            initial state
//
//   [integrator]  method, h, t0, t1, rel_tol, abs_tol, h_min, h_max
//   [derive]      crs (bool), t (free coefficient parameter)
//   [verify]      samples, perturb
//   [output]      trajectory (path), record_every, monitors (names)
//
// Every table rejects keys it does not know. Errors name the offending key
// path, e.g. "integrator.h".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecodyn/integrators.hpp"
#include "ecodyn/models.hpp"
#include "ecodyn/verification.hpp"

namespace ecodyn::cli {

/// Either one of the three growth models or a bare Lotka-Volterra system.
using ConfiguredModel = std::variant<SatoModel, LogisticModel, DebtModel, LVSystem>;

struct DeriveConfig {
  bool crs = true;
  std::optional<double> t;
};

struct OutputConfig {
  std::optional<std::filesystem::path> trajectory;
  int record_every = 1;
  std::optional<std::vector<std::string>> monitors;
};

struct RunConfig {
  std::string kind;
  ConfiguredModel model;
  std::optional<Vector> x0;
  IntegratorConfig integrator;
  DeriveConfig derive;
  VerifyOptions verify;
  OutputConfig output;
  std::uint64_t seed = kDefaultSeed;

  /// The growth-model view; ValidationError for kind = "lv".
  Model growth_model(const std::string& command) const;
  /// x0, or ValidationError naming model.x0.
  const Vector& initial_state(const std::string& command) const;
};

/// Parses and validates the file. Throws IoError when it cannot be read and
/// ValidationError for syntax or schema problems. Relative output paths are
/// resolved against the file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// Same, from text; relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const std::string& source = "config");

}  // namespace ecodyn::cli
