#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include "config.hpp"
#include "csv.hpp"
#include "ecodyn/derivation.hpp"
#include "ecodyn/errors.hpp"
#include "ecodyn/fitting.hpp"
#include "ecodyn/integrators.hpp"
#include "ecodyn/production.hpp"
#include "ecodyn/verification.hpp"

namespace ecodyn::cli {
namespace {

using Logger = std::shared_ptr<spdlog::logger>;

std::optional<spdlog::level::level_enum> log_level_from_env() {
  const char* env = std::getenv("ECODYN_LOG");
  if (!env || !*env) return spdlog::level::warn;
  const std::string v(env);
  if (v == "error") return spdlog::level::err;
  if (v == "warn") return spdlog::level::warn;
  if (v == "info") return spdlog::level::info;
  if (v == "debug") return spdlog::level::debug;
  return std::nullopt;
}

/// Aligned "key value" report lines.
class Report {
 public:
  explicit Report(std::ostream& out) : out_(out) {}

  void line(const std::string& key, const std::string& value) {
    out_ << std::left << std::setw(24) << key << ' ' << value << '\n';
  }
  void num(const std::string& key, double v) { line(key, format_number(v)); }

 private:
  std::ostream& out_;
};

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_number(v[i]);
  return s;
}

// ---- monitors ---------------------------------------------------------------

std::vector<ConservedQuantity> available_monitors(const RunConfig& cfg) {
  if (std::holds_alternative<LVSystem>(cfg.model)) return {};
  return conserved_quantities(cfg.growth_model("simulate"), cfg.derive.t);
}

/// Configured monitors, or by default every monitor that exists for these
/// parameters and is defined at x0.
std::vector<HamiltonianFn> select_monitors(const RunConfig& cfg, const Vector& x0, const Logger& log) {
  const auto avail = available_monitors(cfg);
  std::vector<HamiltonianFn> out;
  if (cfg.output.monitors) {
    for (const auto& name : *cfg.output.monitors) {
      auto it = std::find_if(avail.begin(), avail.end(), [&](const ConservedQuantity& m) { return m.name == name; });
      if (it == avail.end()) {
        std::string known;
        for (const auto& m : avail) known += (known.empty() ? "" : ", ") + m.name;
        throw ValidationError("output.monitors: no monitor '" + name + "' for kind " + cfg.kind +
                              (known.empty() ? "" : " (available: " + known + ")"));
      }
      HamiltonianFn H = it->build();
      H.name = name;
      out.push_back(std::move(H));
    }
    return out;
  }
  for (const auto& m : avail) {
    try {
      HamiltonianFn H = m.build();
      H.name = m.name;
      if (!H.domain.contains(x0)) {
        log->info("monitor {} skipped: x0 lies outside its domain", m.name);
        continue;
      }
      out.push_back(std::move(H));
    } catch (const ValidationError& e) {
      log->info("monitor {} skipped: {}", m.name, e.what());
    } catch (const SingularityError& e) {
      log->info("monitor {} skipped: {}", m.name, e.what());
    }
  }
  return out;
}

VectorField rhs_of(const RunConfig& cfg) {
  if (const auto* sys = std::get_if<LVSystem>(&cfg.model)) {
    const LVSystem s = *sys;
    return [s](const Vector& x) { return lv_rhs(s, x); };
  }
  const Model m = cfg.growth_model("simulate");
  return [m](const Vector& x) { return model_rhs(m, x); };
}

Box flow_domain_of(const RunConfig& cfg) {
  if (const auto* sys = std::get_if<LVSystem>(&cfg.model)) return Box::positive_orthant(sys->dim());
  return flow_domain(cfg.growth_model("simulate"));
}

Trajectory integrate_config(const RunConfig& cfg, const Vector& x0, std::span<const HamiltonianFn> monitors,
                            const Logger& log) {
  log->info("integrating {} with {} on [{}, {}], h = {}", cfg.kind, method_name(cfg.integrator.method),
            cfg.integrator.t0, cfg.integrator.t1, cfg.integrator.h);
  const Box domain = flow_domain_of(cfg);
  domain.require(x0, "model.x0");
  return integrate(rhs_of(cfg), x0, cfg.integrator, monitors, domain);
}

// ---- simulate -----------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const Vector& x0 = cfg.initial_state("simulate");
  const auto monitors = select_monitors(cfg, x0, log);
  const Trajectory traj = integrate_config(cfg, x0, monitors, log);

  std::ostream* summary = &out;
  std::ostringstream discard;
  if (cfg.output.trajectory) {
    std::ofstream f(*cfg.output.trajectory, std::ios::binary);
    if (!f) throw IoError("cannot write trajectory file '" + cfg.output.trajectory->string() + "'");
    write_trajectory(f, traj);
    if (!f) throw IoError("write failed for '" + cfg.output.trajectory->string() + "'");
  } else {
    // The CSV owns stdout; the summary goes to the log.
    write_trajectory(out, traj);
    summary = &discard;
  }

  Report r(*summary);
  r.line("model", cfg.kind);
  r.line("method", method_name(cfg.integrator.method));
  r.line("t", format_number(traj.times.front()) + " .. " + format_number(traj.times.back()));
  r.num("samples", static_cast<double>(traj.size()));
  r.line("final state", join(traj.back()));
  for (const auto& H : monitors) {
    r.num("drift[" + H.name + "]", conservation_residual(H, traj).max_abs);
  }
  r.line("domain", "ok");
  if (cfg.output.trajectory) r.line("trajectory", cfg.output.trajectory->string());
  if (!cfg.output.trajectory) log->info("summary:\n{}", discard.str());
  return kOk;
}

// ---- verify ---------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err, const Logger& log) {
  const Model m = cfg.growth_model("verify");
  log->info("verifying {} on {} samples, seed {}", cfg.kind, cfg.verify.samples, cfg.verify.seed);
  if (cfg.verify.bivector_defect != 0.0) log->warn("bivectors perturbed by {}", cfg.verify.bivector_defect);
  const auto checks = verify_structure(m, cfg.verify);

  std::size_t width = 5;
  for (const auto& c : checks) width = std::max(width, c.name.size());
  int failed = 0;
  out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(24) << "value"
      << std::setw(24) << "threshold" << "status\n";
  for (const auto& c : checks) {
    out << std::left << std::setw(static_cast<int>(width)) << c.name << "  " << std::setw(24)
        << format_number(c.value) << std::setw(24) << format_number(c.threshold)
        << (c.passed() ? "ok" : "FAIL") << '\n';
    failed += !c.passed();
  }
  if (const auto* s = std::get_if<SatoModel>(&m)) {
    out << "divergence = " << format_number(sato_divergence(*s)) << " (b1 + b2 + b3 = "
        << format_number(s->b1 + s->b2 + s->b3) << ")\n";
  }
  if (failed) {
    err << "ERROR " << kRuntime << " verification: " << failed << " of " << checks.size()
        << " checks above threshold\n";
    return kRuntime;
  }
  out << "all " << checks.size() << " checks passed\n";
  return kOk;
}

// ---- derive -----------------------------------------------------------------------

Trajectory derive_trajectory(const RunConfig& cfg, const Vector& x0, const Logger& log) {
  return integrate_config(cfg, x0, {}, log);
}

int cmd_derive(const RunConfig& cfg, std::ostream& out, const Logger& log) {
  const Model m = cfg.growth_model("derive");
  const Vector& x0 = cfg.initial_state("derive");
  state_domain(m).require(x0, "model.x0");
  Report r(out);

  if (const auto* s = std::get_if<SatoModel>(&m)) {
    const Eigen::Vector3d b(s->b1, s->b2, s->b3);
    const CoeffSolution c = sato_solve_c(b, cfg.derive.t);
    const Trajectory traj = derive_trajectory(cfg, x0, log);
    const CobbDouglasPF pf = solve_sato_pf(c, x0);
    r.line("family", "cobb-douglas");
    r.line("route", "coefficient-solve");
    r.line("c", join(c.c));
    r.num("A", pf.A);
    r.num("alpha", pf.alpha);
    r.num("beta", pf.beta);
    r.num("alpha + beta", pf.alpha + pf.beta);
    r.line("crs", c.crs_normalized ? "true" : "false");
    r.num("surface residual", surface_residual(pf, traj).max_abs);
    try {
      const BiHamiltonianParams p = bihamiltonian_ab(b);
      const CobbDouglasPF bh = solve_bihamiltonian_pf(p, x0);
      r.line("route", "bi-hamiltonian");
      r.num("a", p.a);
      r.num("b", p.b);
      r.num("A", bh.A);
      r.num("alpha", bh.alpha);
      r.num("beta", bh.beta);
      r.num("surface residual", surface_residual(bh, traj).max_abs);
      if (c.crs_normalized) r.num("|alpha_c - alpha_bh|", std::abs(pf.alpha - bh.alpha));
    } catch (const SingularityError& e) {
      r.line("route", std::string("bi-hamiltonian unavailable: ") + e.what());
    }
    return kOk;
  }

  if (const auto* lm = std::get_if<LogisticModel>(&m)) {
    const CoeffSolution c = sato_solve_c(Eigen::Vector3d(lm->b[0], lm->b[1], lm->b[2]), cfg.derive.t);
    const LogisticPF pf = solve_logistic_pf(*lm, c, x0);
    const Trajectory traj = derive_trajectory(cfg, x0, log);
    r.line("family", "logistic");
    r.line("route", "level-set of H");
    r.line("c", join(c.c));
    r.num("N_f", pf.N_f);
    r.num("N_L", pf.N_L);
    r.num("N_K", pf.N_K);
    r.num("alpha", pf.alpha);
    r.num("beta", pf.beta);
    r.num("C", pf.C);
    r.num("surface residual", surface_residual(pf, traj).max_abs);
    return kOk;
  }

  const auto& dm = std::get<DebtModel>(m);
  const DebtPF pf = solve_debt_pf(dm, x0);
  const Trajectory traj = derive_trajectory(cfg, x0, log);
  r.line("family", "debt");
  r.line("route", "level-set of H4");
  r.line("G", "C - b1 [ln(s_D D) - s_D D] + b2 [ln(s_K K) - s_K K] + ln(L/(N_L - L)) / b4");
  r.num("N_f", pf.N_f);
  r.num("N_L", pf.N_L);
  r.num("C", pf.C);
  r.num("b1", pf.b1);
  r.num("b2", pf.b2);
  r.num("b3", pf.b3);
  r.num("1/b4", 1.0 / pf.b4);
  r.num("s_K = -a21/b2", pf.capital_scale());
  r.num("s_D = -a12/b1", pf.debt_scale());
  r.num("surface residual", surface_residual(pf, traj).max_abs);
  return kOk;
}

// ---- fit ----------------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string family = "cobb-douglas";
  bool crs = false;
  std::optional<double> N_f, N_L, N_K;
  bool free_capacities = false;
  std::uint64_t seed = 7;
  int max_iterations = 20000;
  std::string emit;
};

int cmd_fit(const FitArgs& a, std::ostream& out, const Logger& log) {
  const Dataset data = read_dataset(a.data);
  log->info("read {} rows from {}", data.rows(), a.data);
  Report r(out);
  FitResult res;
  std::vector<double> fitted(data.rows());

  if (a.family == "cobb-douglas") {
    res = fit_cobb_douglas(data, a.crs);
    const auto& pf = std::get<CobbDouglasPF>(res.pf);
    r.line("family", "cobb-douglas");
    r.num("A", pf.A);
    r.num("alpha", pf.alpha);
    r.num("beta", pf.beta);
    r.line("crs", res.crs ? "true" : "false");
    for (std::size_t i = 0; i < data.rows(); ++i) fitted[i] = eval_cobb_douglas(pf, data.L[i], data.K[i]);
  } else {
    if (a.crs) throw ValidationError("--crs applies to the cobb-douglas family only");
    LogisticFitOptions opts;
    opts.free_capacities = a.free_capacities;
    opts.seed = a.seed;
    opts.max_iterations = a.max_iterations;
    auto cap = [&](const std::optional<double>& v, const std::vector<double>& col, const char* flag) {
      if (v) return *v;
      if (!a.free_capacities) throw ValidationError(std::string(flag) + " is required unless --free-capacities is set");
      return 1.5 * *std::max_element(col.begin(), col.end());
    };
    data.validate();
    opts.N_f = cap(a.N_f, data.Y, "--N-f");
    opts.N_L = cap(a.N_L, data.L, "--N-L");
    opts.N_K = cap(a.N_K, data.K, "--N-K");
    res = fit_logistic_pf(data, opts);
    const auto& pf = std::get<LogisticPF>(res.pf);
    if (!res.converged) log->warn("logistic fit stopped at the iteration limit; reporting the best point found");
    r.line("family", "logistic");
    r.num("N_f", pf.N_f);
    r.num("N_L", pf.N_L);
    r.num("N_K", pf.N_K);
    r.num("alpha", pf.alpha);
    r.num("beta", pf.beta);
    r.num("C", pf.C);
    r.line("converged", res.converged ? "true" : "false");
    r.num("iterations", res.iterations);
    for (std::size_t i = 0; i < data.rows(); ++i) fitted[i] = eval_logistic_pf(pf, data.L[i], data.K[i]);
  }
  r.num("rss", res.rss);
  r.num("r_squared", res.r_squared);
  r.line("scale", res.scale);
  r.num("rows", static_cast<double>(data.rows()));

  if (!a.emit.empty()) {
    std::ofstream f(a.emit, std::ios::binary);
    if (!f) throw IoError("cannot write '" + a.emit + "'");
    write_fit(f, data, fitted);
    if (!f) throw IoError("write failed for '" + a.emit + "'");
  }
  return kOk;
}

int report_error(std::ostream& err, int code, const char* kind, const std::string& msg) {
  err << "ERROR " << code << ' ' << kind << ": " << msg << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto level = log_level_from_env();
  if (!level) return report_error(err, kValidation, "validation", "ECODYN_LOG must be one of error, warn, info, debug");
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("ecodyn", sink);
  log->set_pattern("[%l] %v");
  log->set_level(*level);

  CLI::App app{"Lotka-Volterra growth models, their Poisson structures and production functions", "ecodyn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ecodyn 0.1.0");

  std::string config_path, output_path;
  std::optional<std::uint64_t> seed;

  auto* sim = app.add_subcommand("simulate", "Integrate a model and write its trajectory as CSV");
  sim->add_option("config", config_path, "TOML run configuration")->required();
  sim->add_option("-o,--output", output_path, "Trajectory CSV path (overrides output.trajectory)");

  auto* ver = app.add_subcommand("verify", "Check skew symmetry, Jacobi identity and field consistency");
  ver->add_option("config", config_path, "TOML run configuration")->required();
  ver->add_option("--seed", seed, "Sampling seed (overrides the config)");

  auto* der = app.add_subcommand("derive", "Derive the production function from a conserved quantity");
  der->add_option("config", config_path, "TOML run configuration")->required();

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Fit a production function to L,K,Y data");
  fit->add_option("data", fa.data, "CSV with columns L,K,Y (optional t, D)")->required();
  fit->add_option("--family", fa.family, "cobb-douglas or logistic")
      ->check(CLI::IsMember({"cobb-douglas", "logistic"}));
  fit->add_flag("--crs", fa.crs, "Constrain alpha + beta = 1 (cobb-douglas)");
  fit->add_option("--N-f", fa.N_f, "Output capacity (logistic)");
  fit->add_option("--N-L", fa.N_L, "Labor capacity (logistic)");
  fit->add_option("--N-K", fa.N_K, "Capital capacity (logistic)");
  fit->add_flag("--free-capacities", fa.free_capacities, "Estimate the capacities as well");
  fit->add_option("--seed", fa.seed, "Restart seed (logistic)");
  fit->add_option("--max-iterations", fa.max_iterations, "Simplex iteration budget per restart")
      ->check(CLI::PositiveNumber);
  fit->add_option("--emit", fa.emit, "Write fitted-vs-actual CSV here");

  std::ostringstream help_out, help_err;
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, help_out, help_err);
    out << help_out.str();
    if (rc == 0) return kOk;
    std::string msg = help_err.str().empty() ? e.what() : help_err.str();
    while (!msg.empty() && std::isspace(static_cast<unsigned char>(msg.back()))) msg.pop_back();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return report_error(err, kValidation, "usage", msg);
  }

  try {
    if (fit->parsed()) return cmd_fit(fa, out, log);

    RunConfig cfg = load_config(config_path);
    log->info("loaded {}", config_path);
    if (!output_path.empty()) cfg.output.trajectory = std::filesystem::path(output_path);
    if (seed) cfg.verify.seed = *seed;

    if (sim->parsed()) return cmd_simulate(cfg, out, log);
    if (ver->parsed()) return cmd_verify(cfg, out, err, log);
    return cmd_derive(cfg, out, log);
  } catch (const IoError& e) {
    return report_error(err, kIo, "io", e.what());
  } catch (const ValidationError& e) {
    return report_error(err, kValidation, "validation", e.what());
  } catch (const DimensionError& e) {
    return report_error(err, kValidation, "dimension", e.what());
  } catch (const SingularityError& e) {
    return report_error(err, kValidation, "singularity", e.what());
  } catch (const DomainError& e) {
    return report_error(err, kRuntime, "domain", e.what());
  } catch (const IntegrationError& e) {
    return report_error(err, kRuntime, "integration", e.what());
  } catch (const std::exception& e) {
    return report_error(err, kRuntime, "runtime", e.what());
  }
}

}  // namespace ecodyn::cli
