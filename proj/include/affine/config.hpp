#pragma once

// Run configuration: a JSON tree merged over built-in defaults, then parsed into
// typed specs.  Every parse error names the offending JSON pointer.

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "affine/affine_energy.hpp"
#include "affine/cheeger.hpp"
#include "affine/convex_body.hpp"
#include "affine/digest.hpp"
#include "affine/eigensolver.hpp"
#include "affine/error.hpp"
#include "affine/grid_function.hpp"
#include "affine/inequalities.hpp"
#include "affine/sphere_quad.hpp"

namespace affine {

using json = nlohmann::json;

/// Typed, path-aware access to a JSON object.
class ConfigNode {
 public:
  ConfigNode(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) bad("expected an object");
  }

  [[nodiscard]] const std::string& path() const noexcept { return path_; }
  [[nodiscard]] bool has(const std::string& key) const { return j_->contains(key) && !(*j_)[key].is_null(); }

  [[nodiscard]] ConfigNode child(const std::string& key) const {
    if (!has(key)) fail(ErrorKind::usage, "config " + sub(key) + ": missing object");
    return ConfigNode((*j_)[key], sub(key));
  }

  [[nodiscard]] const json& raw(const std::string& key) const {
    if (!has(key)) fail(ErrorKind::usage, "config " + sub(key) + ": missing value");
    return (*j_)[key];
  }

  [[nodiscard]] double number(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_number()) fail(ErrorKind::usage, "config " + sub(key) + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(ErrorKind::usage, "config " + sub(key) + ": expected a finite number");
    return x;
  }
  [[nodiscard]] double number(const std::string& key, double def) const { return has(key) ? number(key) : def; }

  [[nodiscard]] long long integer(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_number_integer()) fail(ErrorKind::usage, "config " + sub(key) + ": expected an integer");
    return v.get<long long>();
  }
  [[nodiscard]] long long integer(const std::string& key, long long def) const { return has(key) ? integer(key) : def; }

  [[nodiscard]] bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto& v = raw(key);
    if (!v.is_boolean()) fail(ErrorKind::usage, "config " + sub(key) + ": expected a boolean");
    return v.get<bool>();
  }

  [[nodiscard]] std::string str(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_string()) fail(ErrorKind::usage, "config " + sub(key) + ": expected a string");
    return v.get<std::string>();
  }
  [[nodiscard]] std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

  [[nodiscard]] std::vector<double> numbers(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_array()) fail(ErrorKind::usage, "config " + sub(key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(ErrorKind::usage, "config " + sub(key) + "/" + std::to_string(i) + ": expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  [[nodiscard]] std::vector<std::vector<double>> rows(const std::string& key) const {
    const auto& v = raw(key);
    if (!v.is_array() || v.empty()) fail(ErrorKind::usage, "config " + sub(key) + ": expected a non-empty array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = sub(key) + "/" + std::to_string(i);
      if (!v[i].is_array()) fail(ErrorKind::usage, "config " + p + ": expected an array of numbers");
      std::vector<double> row;
      for (std::size_t k = 0; k < v[i].size(); ++k) {
        if (!v[i][k].is_number()) fail(ErrorKind::usage, "config " + p + "/" + std::to_string(k) + ": expected a number");
        row.push_back(v[i][k].get<double>());
      }
      if (!out.empty() && row.size() != out.front().size())
        fail(ErrorKind::usage, "config " + p + ": rows must have equal length");
      out.push_back(std::move(row));
    }
    return out;
  }

  [[nodiscard]] Eigen::MatrixXd matrix(const std::string& key) const {
    const auto r = rows(key);
    Eigen::MatrixXd M(static_cast<long>(r.size()), static_cast<long>(r.front().size()));
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t k = 0; k < r[i].size(); ++k) M(static_cast<long>(i), static_cast<long>(k)) = r[i][k];
    return M;
  }

  /// Rejects keys outside the allowed set.
  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool ok = false;
      for (const char* k : keys) ok = ok || it.key() == k;
      if (!ok) fail(ErrorKind::usage, "config " + sub(it.key()) + ": unknown key");
    }
  }

  [[noreturn]] void bad(const std::string& what) const { fail(ErrorKind::usage, "config " + path_ + ": " + what); }
  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    fail(ErrorKind::usage, "config " + sub(key) + ": " + what);
  }

 private:
  [[nodiscard]] std::string sub(const std::string& key) const { return path_ + "/" + key; }

  const json* j_;
  std::string path_;
};

// Defaults ----------------------------------------------------------------------

inline json default_config() {
  const SolverOptions so;
  const Tolerances tol;
  const TalentiOptions ta;
  const FamilySpec fs;
  return json{
      {"seed", 1},
      {"threads", 0},
      {"out", "out"},
      {"affine", true},
      {"context", {{"n", 2}, {"p", 2.0}, {"Q", {{"type", "segment"}, {"alpha", 0.5}, {"beta", 0.5}}}}},
      {"domain", {{"type", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}, {"h", 1.0 / 64}}},
      {"function", {{"type", "bump"}, {"center", {0.0, 0.0}}, {"radius", 1.0}}},
      {"solver",
       {{"tol_stop", so.tol_stop},
        {"patience", so.patience},
        {"max_iter", so.max_iter},
        {"armijo_factor", so.armijo_factor},
        {"armijo_slope", so.armijo_slope},
        {"perturbation", so.perturbation},
        {"gradient_check_every", so.gradient_check_every},
        {"gradient_check_directions", so.gradient_check_directions},
        {"smoothing", so.smoothing},
        {"inverse_iteration", so.inverse_iteration}}},
      {"tolerances",
       {{"discrete", tol.discrete},
        {"equality", tol.equality},
        {"talenti_factor", tol.talenti_factor},
        {"polya_szego", tol.polya_szego},
        {"polya_szego_equality", tol.polya_szego_equality},
        {"sobolev", tol.sobolev},
        {"sobolev_equality", tol.sobolev_equality},
        {"relations", tol.relations},
        {"kernel_slack", tol.kernel_slack}}},
      {"talenti",
       {{"levels", ta.levels}, {"lo", ta.lo}, {"hi", ta.hi}, {"noise_cells", ta.noise_cells}, {"subsamples", ta.subsamples}}},
      {"cheeger",
       {{"omega", {{"type", "polygon"}, {"vertices", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}}}},
        {"family", to_string(fs.family)},
        {"samples", fs.samples},
        {"arc_segments", fs.arc_segments},
        {"position_samples", fs.position_samples},
        {"euclidean", false}}},
      {"verify", {{"suite", "core"}, {"checks", json::array()}}},
  };
}

/// Recursive object merge; arrays and scalars in patch replace base values, and so do
/// objects carrying a "type" key (a body or domain of another kind shares no fields).
inline void merge_into(json& base, const json& patch) {
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    if (it->is_object() && !it->contains("type") && base.contains(it.key()) && base[it.key()].is_object())
      merge_into(base[it.key()], *it);
    else
      base[it.key()] = *it;
  }
}

inline json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::usage, "config " + path + " is not valid JSON: " + e.what());
  }
}

/// Digest of the canonical dump; the output directory and thread cap do not change results.
inline std::string config_digest(const json& cfg) {
  json c = cfg;
  if (c.is_object()) {
    c.erase("out");
    c.erase("threads");
  }
  Digest d;
  d.add(c.dump());
  return d.hex();
}

// Typed specs -------------------------------------------------------------------

inline ConvexBody parse_body(const ConfigNode& q) {
  const auto type = q.str("type");
  try {
    if (type == "segment") {
      q.allow({"type", "alpha", "beta"});
      return ConvexBody::segment(q.number("alpha"), q.number("beta"));
    }
    if (type == "lq_ball") {
      q.allow({"type", "m", "q"});
      const double e = q.has("q") && q.raw("q").is_string() && q.str("q") == "inf" ? INFINITY : q.number("q");
      return ConvexBody::lq_ball(static_cast<int>(q.integer("m")), e);
    }
    if (type == "euclidean_ball") {
      q.allow({"type", "m"});
      return ConvexBody::euclidean_ball(static_cast<int>(q.integer("m")));
    }
    if (type == "polytope") {
      q.allow({"type", "vertices"});
      return ConvexBody::polytope(q.rows("vertices"));
    }
    if (type == "mollified_polytope") {
      q.allow({"type", "vertices", "width"});
      return ConvexBody::mollified_polytope(q.rows("vertices"), q.number("width"));
    }
    if (type == "ellipsoid") {
      q.allow({"type", "matrix"});
      return ConvexBody::ellipsoid(q.matrix("matrix"));
    }
    if (type == "scaled") {
      q.allow({"type", "base", "factor"});
      return ConvexBody::scaled(parse_body(q.child("base")), q.number("factor"));
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::usage) throw;
    fail(ErrorKind::usage, "config " + q.path() + ": " + e.what());
  }
  q.bad("type", "unknown body type '" + type + "'");
}

inline RuleSpec parse_rule(const ConfigNode& r, int dim) {
  r.allow({"scheme", "level", "seed", "count", "antipodal"});
  RuleSpec s;
  s.dim = dim;
  try {
    s.scheme = parse_scheme(r.str("scheme"));
  } catch (const Error& e) {
    r.bad("scheme", e.what());
  }
  s.level = static_cast<int>(r.integer("level", s.scheme == QuadScheme::monte_carlo ? 0 : 7));
  s.seed = static_cast<std::uint64_t>(r.integer("seed", 1));
  s.count = static_cast<std::size_t>(r.integer("count", 0));
  s.antipodal = r.boolean("antipodal", true);
  return s;
}

struct ContextSpec {
  int n = 2;
  std::optional<ConvexBody> Q;
  double p = 2.0;
  std::optional<double> q;
  std::optional<RuleSpec> rule_nm;
  std::optional<RuleSpec> rule_n;

  [[nodiscard]] EnergyContext build(std::optional<double> p_override = std::nullopt) const {
    const double pp = p_override.value_or(p);
    const int nm = n * Q->dim();
    QuadratureRule rnm = rule_nm ? build_rule(*rule_nm) : default_rule(nm);
    QuadratureRule rn = rule_n ? build_rule(*rule_n) : default_rule(n);
    return EnergyContext(n, *Q, pp, std::move(rnm), std::move(rn));
  }
};

inline ContextSpec parse_context(const ConfigNode& c) {
  c.allow({"n", "m", "p", "q", "Q", "rule_nm", "rule_n"});
  ContextSpec s;
  s.n = static_cast<int>(c.integer("n"));
  if (s.n < 2 || s.n > 3) c.bad("n", "n must be 2 or 3");
  s.p = c.number("p");
  if (!(s.p >= 1)) c.bad("p", "p must be >= 1");
  if (c.has("q")) s.q = c.number("q");
  s.Q = parse_body(c.child("Q"));
  if (c.has("m") && c.integer("m") != s.Q->dim()) c.bad("m", "m disagrees with the dimension of Q");
  if (c.has("rule_nm")) s.rule_nm = parse_rule(c.child("rule_nm"), s.n * s.Q->dim());
  if (c.has("rule_n")) s.rule_n = parse_rule(c.child("rule_n"), s.n);
  return s;
}

struct DomainSpec {
  std::optional<DomainDescriptor> descriptor;
  std::string file;  // grid CSV whose inside column defines the mask
  double h = 1.0 / 64;

  [[nodiscard]] MaskPtr build() const {
    if (descriptor) return make_mask(*descriptor, h);
    std::ifstream in(file);
    if (!in) fail(ErrorKind::usage, "cannot open domain file " + file);
    return read_grid_csv(in, file).mask_ptr();
  }
};

inline std::vector<double> sized(const ConfigNode& d, const std::string& key, int n) {
  auto v = d.numbers(key);
  if (static_cast<int>(v.size()) != n) d.bad(key, "expected " + std::to_string(n) + " components");
  return v;
}

/// Named presets: disk, square (area pi), unit_square, lshape, ellipse (diag(2,1/2) image of the disk).
inline json domain_preset(const std::string& name, double h) {
  if (name == "disk") return {{"type", "ball"}, {"center", {0.0, 0.0}}, {"radius", 1.0}, {"h", h}};
  if (name == "square") {
    const double s = std::sqrt(std::numbers::pi) / 2;
    return {{"type", "box"}, {"lo", {-s, -s}}, {"hi", {s, s}}, {"h", h}};
  }
  if (name == "unit_square") return {{"type", "box"}, {"lo", {0.0, 0.0}}, {"hi", {1.0, 1.0}}, {"h", h}};
  if (name == "lshape")
    return {{"type", "polygon"}, {"vertices", {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}}, {"h", h}};
  if (name == "ellipse")
    return {{"type", "ellipsoid"}, {"center", {0.0, 0.0}}, {"matrix", {{4.0, 0.0}, {0.0, 0.25}}}, {"h", h}};
  if (name == "ball3") return {{"type", "ball"}, {"center", {0.0, 0.0, 0.0}}, {"radius", 1.0}, {"h", h}};
  fail(ErrorKind::usage, "unknown domain preset '" + name + "' (disk, square, unit_square, lshape, ellipse, ball3)");
}

inline DomainSpec parse_domain(const ConfigNode& d, int n) {
  DomainSpec s;
  const auto type = d.str("type");
  s.h = d.number("h");
  if (!(s.h > 0)) d.bad("h", "grid spacing must be positive");
  if (type == "ball") {
    d.allow({"type", "h", "center", "radius"});
    s.descriptor = domain::Ball{sized(d, "center", n), d.number("radius")};
  } else if (type == "box") {
    d.allow({"type", "h", "lo", "hi"});
    s.descriptor = domain::Box{sized(d, "lo", n), sized(d, "hi", n)};
  } else if (type == "ellipsoid") {
    d.allow({"type", "h", "center", "matrix"});
    const auto M = d.matrix("matrix");
    if (M.rows() != n || M.cols() != n) d.bad("matrix", "expected an n x n matrix");
    s.descriptor = domain::Ellipsoid{sized(d, "center", n), M};
  } else if (type == "polygon") {
    d.allow({"type", "h", "vertices"});
    if (n != 2) d.bad("type", "polygon domains are planar");
    domain::Polygon p;
    for (const auto& r : d.rows("vertices")) {
      if (r.size() != 2) d.bad("vertices", "polygon vertices are 2D");
      p.vertices.push_back({r[0], r[1]});
    }
    s.descriptor = p;
  } else if (type == "file") {
    d.allow({"type", "h", "path"});
    s.file = d.str("path");
  } else {
    d.bad("type", "unknown domain type '" + type + "'");
  }
  return s;
}

struct FunctionSpec {
  std::string type = "bump";  // cone, bump, characteristic_mollified, file
  std::vector<double> center;
  double radius = 1.0;
  double width = 0.1;
  std::optional<Eigen::MatrixXd> transform;  // profile evaluated at |T (x - c)| / radius
  std::string path;

  [[nodiscard]] GridFunction build(const MaskPtr& mask) const {
    if (type == "file") {
      std::ifstream in(path);
      if (!in) fail(ErrorKind::usage, "cannot open function file " + path);
      auto g = read_grid_csv(in, path);
      return g;
    }
    const int n = mask->dim();
    return discretize(mask, [&](std::span<const double> x) {
      Eigen::VectorXd y(n);
      for (int k = 0; k < n; ++k) y[k] = x[k] - (center.empty() ? 0.0 : center[k]);
      if (transform) y = (*transform) * y;
      const double s = y.norm() / radius;
      if (type == "cone") return std::max(0.0, 1.0 - s);
      if (type == "bump") return s < 1 ? (1 - s * s) * (1 - s * s) : 0.0;
      // characteristic_mollified: linear ramp of the given width inside the unit level.
      return std::clamp((1.0 - s) / width, 0.0, 1.0);
    });
  }
};

inline FunctionSpec parse_function(const ConfigNode& f, int n) {
  FunctionSpec s;
  f.allow({"type", "center", "radius", "width", "transform", "path"});
  s.type = f.str("type");
  if (s.type == "file") {
    s.path = f.str("path");
    return s;
  }
  if (s.type != "cone" && s.type != "bump" && s.type != "characteristic_mollified")
    f.bad("type", "unknown function type '" + s.type + "' (cone, bump, characteristic_mollified, file)");
  s.center = f.has("center") ? sized(f, "center", n) : std::vector<double>(static_cast<std::size_t>(n), 0.0);
  s.radius = f.number("radius", 1.0);
  if (!(s.radius > 0)) f.bad("radius", "must be positive");
  s.width = f.number("width", 0.1);
  if (!(s.width > 0)) f.bad("width", "must be positive");
  if (f.has("transform")) {
    s.transform = f.matrix("transform");
    if (s.transform->rows() != n || s.transform->cols() != n) f.bad("transform", "expected an n x n matrix");
  }
  return s;
}

inline SolverOptions parse_solver(const ConfigNode& s, std::uint64_t seed) {
  s.allow({"tol_stop", "patience", "max_iter", "armijo_factor", "armijo_slope", "perturbation", "gradient_check_every",
           "gradient_check_directions", "smoothing", "inverse_iteration"});
  SolverOptions o;
  o.tol_stop = s.number("tol_stop", o.tol_stop);
  o.patience = static_cast<int>(s.integer("patience", o.patience));
  o.max_iter = static_cast<int>(s.integer("max_iter", o.max_iter));
  o.armijo_factor = s.number("armijo_factor", o.armijo_factor);
  o.armijo_slope = s.number("armijo_slope", o.armijo_slope);
  o.perturbation = s.number("perturbation", o.perturbation);
  o.gradient_check_every = static_cast<int>(s.integer("gradient_check_every", o.gradient_check_every));
  o.gradient_check_directions = static_cast<int>(s.integer("gradient_check_directions", o.gradient_check_directions));
  o.smoothing = s.number("smoothing", o.smoothing);
  o.inverse_iteration = s.boolean("inverse_iteration", o.inverse_iteration);
  o.seed = seed;
  if (o.max_iter < 1 || o.patience < 1) s.bad("max_iter and patience must be positive");
  if (!(o.armijo_factor > 0 && o.armijo_factor < 1)) s.bad("armijo_factor", "must lie in (0,1)");
  return o;
}

inline Tolerances parse_tolerances(const ConfigNode& t) {
  t.allow({"discrete", "equality", "talenti_factor", "polya_szego", "polya_szego_equality", "sobolev",
           "sobolev_equality", "relations", "kernel_slack"});
  Tolerances o;
  o.discrete = t.number("discrete", o.discrete);
  o.equality = t.number("equality", o.equality);
  o.talenti_factor = t.number("talenti_factor", o.talenti_factor);
  o.polya_szego = t.number("polya_szego", o.polya_szego);
  o.polya_szego_equality = t.number("polya_szego_equality", o.polya_szego_equality);
  o.sobolev = t.number("sobolev", o.sobolev);
  o.sobolev_equality = t.number("sobolev_equality", o.sobolev_equality);
  o.relations = t.number("relations", o.relations);
  o.kernel_slack = t.number("kernel_slack", o.kernel_slack);
  return o;
}

inline TalentiOptions parse_talenti(const ConfigNode& t, double factor) {
  t.allow({"levels", "lo", "hi", "noise_cells", "subsamples"});
  TalentiOptions o;
  o.levels = static_cast<int>(t.integer("levels", o.levels));
  o.lo = t.number("lo", o.lo);
  o.hi = t.number("hi", o.hi);
  o.noise_cells = t.number("noise_cells", o.noise_cells);
  o.subsamples = static_cast<int>(t.integer("subsamples", o.subsamples));
  o.factor = factor;
  return o;
}

struct CheegerSpec {
  Polygon omega;
  FamilySpec family;
  bool euclidean = false;
};

inline CheegerSpec parse_cheeger(const ConfigNode& c, std::uint64_t seed) {
  c.allow({"omega", "family", "samples", "arc_segments", "position_samples", "euclidean"});
  CheegerSpec s;
  const auto om = c.child("omega");
  const auto type = om.str("type");
  try {
    if (type == "polygon") {
      om.allow({"type", "vertices"});
      std::vector<Point2> v;
      for (const auto& r : om.rows("vertices")) {
        if (r.size() != 2) om.bad("vertices", "polygon vertices are 2D");
        v.push_back({r[0], r[1]});
      }
      s.omega = Polygon(std::move(v));
    } else if (type == "file") {
      om.allow({"type", "path"});
      std::ifstream in(om.str("path"));
      if (!in) om.bad("path", "cannot open polygon file");
      s.omega = read_polygon_csv(in);
    } else if (type == "regular") {
      om.allow({"type", "N", "radius"});
      s.omega = regular_ngon(static_cast<int>(om.integer("N")), om.number("radius", 1.0));
    } else {
      om.bad("type", "unknown omega type '" + type + "' (polygon, file, regular)");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::usage) throw;
    fail(ErrorKind::usage, "config " + om.path() + ": " + e.what());
  }
  try {
    s.family.family = parse_family(c.str("family"));
  } catch (const Error& e) {
    c.bad("family", e.what());
  }
  s.family.samples = static_cast<int>(c.integer("samples", s.family.samples));
  s.family.arc_segments = static_cast<int>(c.integer("arc_segments", s.family.arc_segments));
  s.family.position_samples = static_cast<int>(c.integer("position_samples", s.family.position_samples));
  s.family.seed = seed;
  s.euclidean = c.boolean("euclidean", false);
  if (s.family.arc_segments < 8) c.bad("arc_segments", "must be at least 8");
  return s;
}

struct RunConfig {
  json tree;
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out = "out";
  bool affine = true;
  ContextSpec context;
  DomainSpec domain;
  FunctionSpec function;
  SolverOptions solver;
  Tolerances tolerances;
  TalentiOptions talenti;
  CheegerSpec cheeger;
  std::string suite = "core";
  std::vector<std::string> checks;

  [[nodiscard]] std::string digest() const { return config_digest(tree); }
};

/// Parses a merged configuration tree; usage errors name the JSON pointer.
inline RunConfig parse_config(const json& tree) {
  RunConfig rc;
  rc.tree = tree;
  const ConfigNode root(tree, "");
  root.allow({"seed", "threads", "out", "affine", "context", "domain", "function", "solver", "tolerances", "talenti",
              "cheeger", "verify"});
  const auto seed = root.integer("seed", 1);
  if (seed < 0) root.bad("seed", "must be nonnegative");
  rc.seed = static_cast<std::uint64_t>(seed);
  rc.threads = static_cast<int>(root.integer("threads", 0));
  if (rc.threads < 0) root.bad("threads", "must be nonnegative");
  rc.out = root.str("out", "out");
  rc.affine = root.boolean("affine", true);
  rc.context = parse_context(root.child("context"));
  rc.domain = parse_domain(root.child("domain"), rc.context.n);
  rc.function = parse_function(root.child("function"), rc.context.n);
  rc.solver = parse_solver(root.child("solver"), rc.seed);
  rc.tolerances = parse_tolerances(root.child("tolerances"));
  rc.talenti = parse_talenti(root.child("talenti"), rc.tolerances.talenti_factor);
  rc.cheeger = parse_cheeger(root.child("cheeger"), rc.seed);
  const auto v = root.child("verify");
  v.allow({"suite", "checks"});
  rc.suite = v.str("suite", "core");
  if (rc.suite != "core" && rc.suite != "full") v.bad("suite", "expected 'core' or 'full'");
  if (v.has("checks")) {
    const auto& arr = v.raw("checks");
    if (!arr.is_array()) v.bad("checks", "expected an array of check names");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) v.bad("checks/" + std::to_string(i), "expected a string");
      rc.checks.push_back(arr[i].get<std::string>());
    }
  }
  return rc;
}

}  // namespace affine
