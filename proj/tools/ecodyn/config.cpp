#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include <toml.hpp>

#include "ecodyn/errors.hpp"

namespace ecodyn::cli {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

void reject_unknown(const toml::table& tbl, const std::string& prefix,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, node] : tbl) {
    const std::string k(key.str());
    if (!allowed.count(k)) fail(prefix.empty() ? k : prefix + "." + k, "unknown key");
  }
}

std::optional<double> get_number(const toml::table& tbl, const std::string& prefix,
                                 const std::string& key) {
  const toml::node* n = tbl.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value<double>()) return *v;  // integers convert
  fail(prefix + "." + key, "expected a number");
}

double require_number(const toml::table& tbl, const std::string& prefix, const std::string& key) {
  if (auto v = get_number(tbl, prefix, key)) return *v;
  fail(prefix + "." + key, "required");
}

std::optional<std::int64_t> get_integer(const toml::table& tbl, const std::string& prefix,
                                        const std::string& key) {
  const toml::node* n = tbl.get(key);
  if (!n) return std::nullopt;
  if (const auto* i = n->as_integer()) return i->get();
  fail(prefix + "." + key, "expected an integer");
}

std::optional<std::string> get_string(const toml::table& tbl, const std::string& prefix,
                                      const std::string& key) {
  const toml::node* n = tbl.get(key);
  if (!n) return std::nullopt;
  if (const auto* s = n->as_string()) return s->get();
  fail(prefix + "." + key, "expected a string");
}

std::optional<bool> get_bool(const toml::table& tbl, const std::string& prefix, const std::string& key) {
  const toml::node* n = tbl.get(key);
  if (!n) return std::nullopt;
  if (const auto* b = n->as_boolean()) return b->get();
  fail(prefix + "." + key, "expected true or false");
}

Vector to_vector(const toml::node& n, const std::string& path) {
  const toml::array* arr = n.as_array();
  if (!arr) fail(path, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(arr->size()));
  for (std::size_t i = 0; i < arr->size(); ++i) {
    auto x = (*arr)[i].value<double>();
    if (!x) fail(path + "[" + std::to_string(i) + "]", "expected a number");
    v[static_cast<Eigen::Index>(i)] = *x;
  }
  return v;
}

std::optional<Vector> get_vector(const toml::table& tbl, const std::string& prefix,
                                 const std::string& key, std::optional<Eigen::Index> size) {
  const toml::node* n = tbl.get(key);
  if (!n) return std::nullopt;
  Vector v = to_vector(*n, prefix + "." + key);
  if (size && v.size() != *size) {
    fail(prefix + "." + key, "expected " + std::to_string(*size) + " entries, got " + std::to_string(v.size()));
  }
  return v;
}

Vector require_vector(const toml::table& tbl, const std::string& prefix, const std::string& key,
                      std::optional<Eigen::Index> size) {
  if (auto v = get_vector(tbl, prefix, key, size)) return *v;
  fail(prefix + "." + key, "required");
}

const toml::table* get_table(const toml::table& root, const std::string& key) {
  const toml::node* n = root.get(key);
  if (!n) return nullptr;
  if (const auto* t = n->as_table()) return t;
  fail(key, "expected a table");
}

// Model invariants are checked by the model types; their messages name the
// parameter, so only the table prefix is added here.
template <class M>
void validate_model(const M& m) {
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("model: ") + e.what(), e.defect());
  } catch (const DimensionError& e) {
    throw ValidationError(std::string("model: ") + e.what());
  }
}

void parse_model(const toml::table& tbl, RunConfig& cfg) {
  const std::string p = "model";
  const auto kind = get_string(tbl, p, "kind");
  if (!kind) fail("model.kind", "required (sato, logistic, debt or lv)");
  cfg.kind = *kind;

  if (cfg.kind == "sato") {
    reject_unknown(tbl, p, {"kind", "b", "x0"});
    const Vector b = require_vector(tbl, p, "b", 3);
    SatoModel m{b[0], b[1], b[2]};
    validate_model(m);
    cfg.model = m;
  } else if (cfg.kind == "logistic") {
    reject_unknown(tbl, p, {"kind", "b", "N", "x0"});
    const Vector b = require_vector(tbl, p, "b", 3);
    const Vector N = require_vector(tbl, p, "N", 3);
    LogisticModel m{{b[0], b[1], b[2]}, {N[0], N[1], N[2]}};
    validate_model(m);
    cfg.model = m;
  } else if (cfg.kind == "debt") {
    reject_unknown(tbl, p, {"kind", "b", "N", "a12", "a21", "x0"});
    const Vector b = require_vector(tbl, p, "b", 4);
    const Vector N = require_vector(tbl, p, "N", 2);
    DebtModel m{b[0], b[1], b[2], b[3], require_number(tbl, p, "a12"), require_number(tbl, p, "a21"),
                N[0], N[1]};
    validate_model(m);
    cfg.model = m;
  } else if (cfg.kind == "lv") {
    reject_unknown(tbl, p, {"kind", "b", "A", "x0"});
    LVSystem sys;
    sys.b = require_vector(tbl, p, "b", std::nullopt);
    const toml::node* a = tbl.get("A");
    if (!a) fail("model.A", "required");
    const toml::array* rows = a->as_array();
    if (!rows) fail("model.A", "expected an array of rows");
    const auto n = sys.b.size();
    if (static_cast<Eigen::Index>(rows->size()) != n) {
      fail("model.A", "expected " + std::to_string(n) + " rows to match model.b");
    }
    sys.A.resize(n, n);
    for (std::size_t i = 0; i < rows->size(); ++i) {
      const std::string rp = "model.A[" + std::to_string(i) + "]";
      const Vector row = to_vector((*rows)[i], rp);
      if (row.size() != n) fail(rp, "expected " + std::to_string(n) + " entries");
      sys.A.row(static_cast<Eigen::Index>(i)) = row.transpose();
    }
    validate_model(sys);
    cfg.model = sys;
  } else {
    fail("model.kind", "unknown kind '" + cfg.kind + "' (expected sato, logistic, debt or lv)");
  }

  const Eigen::Index dim = std::visit([](const auto& m) -> Eigen::Index {
    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LVSystem>) {
      return m.b.size();
    } else {
      return model_dim(Model(m));
    }
  }, cfg.model);
  cfg.x0 = get_vector(tbl, p, "x0", dim);
  if (cfg.x0 && !cfg.x0->allFinite()) fail("model.x0", "entries must be finite");
}

void parse_integrator(const toml::table& tbl, IntegratorConfig& ic) {
  const std::string p = "integrator";
  reject_unknown(tbl, p, {"method", "h", "t0", "t1", "rel_tol", "abs_tol", "h_min", "h_max"});
  if (auto m = get_string(tbl, p, "method")) {
    try {
      ic.method = parse_method(*m);
    } catch (const ValidationError& e) {
      fail("integrator.method", e.what());
    }
  }
  if (auto v = get_number(tbl, p, "h")) ic.h = *v;
  if (auto v = get_number(tbl, p, "t0")) ic.t0 = *v;
  if (auto v = get_number(tbl, p, "t1")) ic.t1 = *v;
  if (auto v = get_number(tbl, p, "rel_tol")) ic.rel_tol = *v;
  if (auto v = get_number(tbl, p, "abs_tol")) ic.abs_tol = *v;
  if (auto v = get_number(tbl, p, "h_min")) ic.h_min = *v;
  if (auto v = get_number(tbl, p, "h_max")) ic.h_max = *v;
}

void parse_derive(const toml::table& tbl, DeriveConfig& dc) {
  const std::string p = "derive";
  reject_unknown(tbl, p, {"crs", "t"});
  const auto crs = get_bool(tbl, p, "crs");
  dc.t = get_number(tbl, p, "t");
  dc.crs = crs.value_or(!dc.t.has_value());
  if (dc.t && dc.crs) {
    fail("derive.t", "conflicts with derive.crs = true (the constant-returns choice fixes t = -b3)");
  }
  if (!dc.t && !dc.crs) fail("derive.t", "required when derive.crs = false");
}

void parse_verify(const toml::table& tbl, VerifyOptions& vo) {
  const std::string p = "verify";
  reject_unknown(tbl, p, {"samples", "perturb"});
  if (auto v = get_integer(tbl, p, "samples")) {
    if (*v < 1) fail("verify.samples", "must be at least 1");
    vo.samples = static_cast<std::size_t>(*v);
  }
  if (auto v = get_number(tbl, p, "perturb")) vo.bivector_defect = *v;
}

void parse_output(const toml::table& tbl, const std::filesystem::path& base, OutputConfig& oc) {
  const std::string p = "output";
  reject_unknown(tbl, p, {"trajectory", "record_every", "monitors"});
  if (auto s = get_string(tbl, p, "trajectory")) {
    std::filesystem::path path(*s);
    oc.trajectory = path.is_absolute() ? path : base / path;
  }
  if (auto v = get_integer(tbl, p, "record_every")) {
    if (*v < 1) fail("output.record_every", "must be at least 1");
    oc.record_every = static_cast<int>(*v);
  }
  if (const toml::node* n = tbl.get("monitors")) {
    const toml::array* arr = n->as_array();
    if (!arr) fail("output.monitors", "expected an array of names");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < arr->size(); ++i) {
      auto s = (*arr)[i].value<std::string>();
      if (!s) fail("output.monitors[" + std::to_string(i) + "]", "expected a string");
      names.push_back(*s);
    }
    oc.monitors = names;
  }
}

}  // namespace

Model RunConfig::growth_model(const std::string& command) const {
  return std::visit([&](const auto& m) -> Model {
    if constexpr (std::is_same_v<std::decay_t<decltype(m)>, LVSystem>) {
      throw ValidationError("model.kind: '" + command + "' needs sato, logistic or debt; lv has no known structure");
    } else {
      return m;
    }
  }, model);
}

const Vector& RunConfig::initial_state(const std::string& command) const {
  if (!x0) throw ValidationError("model.x0: required for " + command);
  return *x0;
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                       const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw ValidationError(os.str());
  }
  reject_unknown(root, "", {"seed", "model", "integrator", "derive", "verify", "output"});

  RunConfig cfg;
  if (auto s = get_integer(root, "", "seed")) {
    if (*s < 0) fail("seed", "must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*s);
  }
  const toml::table* model = get_table(root, "model");
  if (!model) fail("model", "required table");
  parse_model(*model, cfg);
  if (const auto* t = get_table(root, "integrator")) parse_integrator(*t, cfg.integrator);
  if (const auto* t = get_table(root, "derive")) parse_derive(*t, cfg.derive);
  if (const auto* t = get_table(root, "verify")) parse_verify(*t, cfg.verify);
  if (const auto* t = get_table(root, "output")) parse_output(*t, base_dir, cfg.output);

  cfg.integrator.record_every = cfg.output.record_every;
  cfg.integrator.validate();
  cfg.verify.seed = cfg.seed;
  cfg.verify.coefficient_t = cfg.derive.t;
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return parse_config(ss.str(), base, path.string());
}

}  // namespace ecodyn::cli
