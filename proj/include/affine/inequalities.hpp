#pragma once

// Executable verifiers: Faber-Krahn, Talenti, Polya-Szego, affine Sobolev, the
// lambda relations and the support-kernel bounds.  Each returns an InequalityReport
// whose aggregate pass is the conjunction of its records.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "affine/affine_energy.hpp"
#include "affine/cheeger.hpp"
#include "affine/digest.hpp"
#include "affine/eigensolver.hpp"
#include "affine/error.hpp"
#include "affine/grid_function.hpp"

namespace affine {

enum class Relation { le, ge, eq };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::ge: return ">=";
    case Relation::eq: return "==";
  }
  return "?";
}

/// One tested statement lhs (relation) rhs.  margin = (rhs - lhs) / |rhs| for <=,
/// (lhs - rhs) / |rhs| for >=, and -|lhs - rhs| / |rhs| for ==.
struct SampleRecord {
  std::string label;
  std::string inputs;  // digest of the sample's inputs
  double lhs = 0.0;
  double rhs = 0.0;
  Relation relation = Relation::le;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::int64_t count = 1;  // > 1 when the record keeps the worst of many samples
};

/// Relative tolerance semantics: <= passes if lhs <= rhs (1 + tol), >= if lhs >= rhs (1 - tol),
/// == if |lhs - rhs| <= tol |rhs|.  An absolute slack is added for near-zero sides.
inline SampleRecord make_record(std::string label, std::string inputs, double lhs, double rhs, Relation rel,
                                double tol, double abs_slack = 0.0) {
  SampleRecord r;
  r.label = std::move(label);
  r.inputs = std::move(inputs);
  r.lhs = lhs;
  r.rhs = rhs;
  r.relation = rel;
  r.tolerance = tol;
  const double scale = std::abs(rhs) > 0 ? std::abs(rhs) : 1.0;
  switch (rel) {
    case Relation::le:
      r.margin = (rhs - lhs) / scale;
      r.pass = lhs <= rhs + tol * std::abs(rhs) + abs_slack;
      break;
    case Relation::ge:
      r.margin = (lhs - rhs) / scale;
      r.pass = lhs >= rhs - tol * std::abs(rhs) - abs_slack;
      break;
    case Relation::eq:
      r.margin = -std::abs(lhs - rhs) / scale;
      r.pass = std::abs(lhs - rhs) <= tol * std::abs(rhs) + abs_slack;
      break;
  }
  if (!std::isfinite(lhs) || !std::isfinite(rhs)) r.pass = false;
  return r;
}

struct InequalityReport {
  std::string check;
  std::vector<SampleRecord> samples;
  bool pass = true;
  bool inconclusive = false;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add(SampleRecord r) {
    pass = pass && r.pass;
    samples.push_back(std::move(r));
  }

  template <class T>
  void meta(const std::string& key, const T& value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    metadata.emplace_back(key, os.str());
  }

  /// Worst margin over records (+inf when empty).
  [[nodiscard]] double worst_margin() const {
    double w = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) w = std::min(w, s.margin);
    return w;
  }

  [[nodiscard]] std::string digest() const {
    Digest d;
    d.add(check);
    for (const auto& s : samples) {
      d.add(s.label).add(s.inputs).add(s.lhs).add(s.rhs).add(static_cast<std::int64_t>(s.pass));
      d.add(s.count);
    }
    d.add(static_cast<std::int64_t>(pass)).add(static_cast<std::int64_t>(inconclusive));
    return d.hex();
  }
};

/// Default tolerances; every check records the ones it used.
struct Tolerances {
  double discrete = 1e-2;         // inequality slack absorbing grid error
  double equality = 3e-2;         // equality cases (ellipses, SL(2) images)
  double talenti_factor = 1.05;   // lhs <= factor * rhs
  double polya_szego = 1e-2;
  double polya_szego_equality = 1e-2;
  double sobolev = 1e-3;
  double sobolev_equality = 1e-2;
  double relations = 1e-4;        // shared quadrature error in d_{n,p}(Q)
  double kernel_slack = 1e-10;
};

inline std::string digest_of(const GridFunction& f) {
  Digest d;
  d.add(f.mask().h()).add(f.mask().describe()).add(std::span<const double>(f.values()));
  return d.hex();
}

inline std::string digest_of(const Polygon& C) {
  Digest d;
  for (const auto& v : C.vertices()) d.add(v[0]).add(v[1]);
  return d.hex();
}

inline std::string digest_of(const MaskPtr& m) {
  Digest d;
  d.add(m->h()).add(m->describe()).add(static_cast<std::int64_t>(m->inside_count()));
  return d.hex();
}

inline void record_context(InequalityReport& r, const EnergyContext& ctx) {
  r.meta("context", ctx.describe());
}

inline bool is_ellipsoidal(const DomainDescriptor& d) {
  return std::holds_alternative<domain::Ball>(d) || std::holds_alternative<domain::Ellipsoid>(d);
}

// Faber-Krahn -------------------------------------------------------------------

struct FaberKrahnOutcome {
  InequalityReport report;
  EigenResult omega;
  EigenResult disk;
};

/// lambda^A(Omega) against lambda^A of the centered ball of equal measure at the same h.
/// Ellipsoidal Omega additionally requires equality within tol.equality.
inline FaberKrahnOutcome check_faber_krahn(const EnergyContext& ctx, const MaskPtr& omega, const SolverOptions& opt = {},
                                           const Tolerances& tol = {}) {
  FaberKrahnOutcome out;
  auto& rep = out.report;
  rep.check = "faber_krahn";
  record_context(rep, ctx);
  const int n = omega->dim();
  double measure;
  try {
    measure = descriptor_measure(omega->descriptor());
  } catch (const Error&) {
    measure = omega->measure();
  }
  const double radius = std::pow(measure / ball_volume(n), 1.0 / n);
  const auto disk = make_mask(domain::Ball{std::vector<double>(static_cast<std::size_t>(n), 0.0), radius}, omega->h());
  out.omega = minimize_affine(ctx, omega, opt);
  out.disk = minimize_affine(ctx, disk, opt);
  rep.meta("h", omega->h());
  rep.meta("domain", omega->describe());
  rep.meta("measure", measure);
  rep.meta("lambda_omega", out.omega.lambda);
  rep.meta("lambda_ball", out.disk.lambda);
  rep.meta("seed", opt.seed);
  const std::string in = digest_of(omega);
  rep.add(make_record("lambda(omega) >= lambda(ball)", in, out.omega.lambda, out.disk.lambda, Relation::ge,
                      tol.discrete));
  if (is_ellipsoidal(omega->descriptor()))
    rep.add(make_record("ellipsoid equality", in, out.omega.lambda, out.disk.lambda, Relation::eq, tol.equality));
  return out;
}

/// p = 1 form on polygons: every family candidate C in Omega satisfies
/// ratio(C) >= a_{2,1} |Omega|^{-1/2}, the affine Cheeger ratio of the disk of equal area.
inline InequalityReport check_faber_krahn_polygon(const EnergyContext& ctx, const Polygon& omega,
                                                  const FamilySpec& spec, const Tolerances& tol = {}) {
  InequalityReport rep;
  rep.check = "faber_krahn_p1";
  record_context(rep, ctx);
  const auto res = search_cheeger(&ctx, omega, spec);
  const double disk_value = sobolev_constant(2, 1.0) / std::sqrt(omega.area());
  rep.meta("family", to_string(spec.family));
  rep.meta("best_ratio_upper_bound", res.best.ratio);
  rep.meta("disk_ratio", disk_value);
  SampleRecord worst;
  bool first = true;
  for (const auto& c : res.candidates) {
    auto r = make_record("candidate ratio >= disk ratio", digest_of(c.polygon), c.ratio, disk_value, Relation::ge,
                         tol.discrete);
    if (first || r.margin < worst.margin) worst = r;
    if (!r.pass) rep.add(r);
    first = false;
  }
  worst.count = static_cast<std::int64_t>(res.candidates.size());
  worst.label = "worst candidate ratio >= disk ratio";
  rep.add(worst);
  return rep;
}

/// Report for a candidate search: the best ratio (an upper bound for the infimum) and,
/// for affine searches, the maximal-volume-position consistency check.
inline InequalityReport cheeger_report(const CheegerSearchResult& res, const FamilySpec& spec) {
  InequalityReport rep;
  rep.check = "cheeger_search";
  rep.meta("family", to_string(spec.family));
  rep.meta("candidates", res.candidates.size());
  rep.meta("best_parameters", res.best.parameters);
  rep.meta("best_ratio_upper_bound", res.best.ratio);
  rep.meta("affine", res.affine);
  const auto in = digest_of(res.best.polygon);
  auto best = make_record("best ratio <= every candidate", in, res.best.ratio, res.best.ratio, Relation::le, 0.0);
  for (const auto& c : res.candidates) best.pass = best.pass && res.best.ratio <= c.ratio;
  best.count = static_cast<std::int64_t>(res.candidates.size());
  rep.add(best);
  if (res.position) {
    const auto& pc = *res.position;
    rep.meta("positions_tested", pc.tested);
    rep.meta("admissible_larger_positions", pc.admissible_larger);
    auto law = make_record("scaling law |det A|^{-1/n}", in, pc.max_scaling_error, 1e-9, Relation::le, 0.0);
    law.count = pc.admissible_larger;
    rep.add(law);
    auto cons = make_record("larger positions lower the ratio", in, pc.consistent ? 1.0 : 0.0, 1.0, Relation::eq, 0.0);
    cons.count = pc.admissible_larger;
    rep.add(cons);
  }
  return rep;
}

// Talenti -----------------------------------------------------------------------

struct TalentiOptions {
  int levels = 64;
  double lo = 0.02;  // t-grid as fractions of max |f|
  double hi = 0.98;
  double noise_cells = 2.0;  // resolvable if mu(t-d) - mu(t+d) exceeds this many cells
  double factor = 1.05;
  int subsamples = 4;  // mu is the measure of {|f~| > t}, f~ multilinear, s^n samples per cell
};

namespace detail {

/// |f~| at s^n interior points of every lattice cell, each carrying measure (h/s)^n.
inline std::vector<double> interpolant_samples(const GridFunction& f, int s) {
  const auto& m = f.mask();
  const int n = m.dim();
  std::array<int, 3> cells{1, 1, 1};
  for (int k = 0; k < n; ++k) cells[k] = m.shape()[k] - 1;
  const int per = static_cast<int>(std::lround(std::pow(s, n)));
  const int corners = 1 << n;
  // Multilinear weights of each sub-point, shared by all cells.
  std::vector<double> w(static_cast<std::size_t>(per * corners));
  for (int q = 0; q < per; ++q) {
    int r = q;
    std::array<double, 3> frac{0, 0, 0};
    for (int k = 0; k < n; ++k) frac[k] = ((r % s) + 0.5) / s, r /= s;
    for (int c = 0; c < corners; ++c) {
      double wt = 1.0;
      for (int k = 0; k < n; ++k) wt *= ((c >> k) & 1) ? frac[k] : 1.0 - frac[k];
      w[static_cast<std::size_t>(q * corners + c)] = wt;
    }
  }
  std::vector<std::size_t> off(corners, 0);
  for (int c = 0; c < corners; ++c)
    for (int k = 0; k < n; ++k)
      if ((c >> k) & 1) off[c] += m.strides()[k];
  std::vector<double> out;
  std::vector<double> cv(corners);
  for (int iz = 0; iz < cells[2]; ++iz)
    for (int iy = 0; iy < cells[1]; ++iy)
      for (int ix = 0; ix < cells[0]; ++ix) {
        const std::size_t base = ix * m.strides()[0] + (n > 1 ? iy * m.strides()[1] : 0) + (n > 2 ? iz * m.strides()[2] : 0);
        bool any = false;
        for (int c = 0; c < corners; ++c) cv[c] = f[base + off[c]], any = any || cv[c] != 0.0;
        if (!any) continue;
        for (int q = 0; q < per; ++q) {
          double v = 0.0;
          for (int c = 0; c < corners; ++c) v += w[static_cast<std::size_t>(q * corners + c)] * cv[c];
          if (v != 0.0) out.push_back(std::abs(v));
        }
      }
  return out;
}

}  // namespace detail

/// Distribution-function inequality for a first eigenfunction,
///   (n omega_n^{1/n} mu^{(n-1)/n})^{p/(p-1)} <= -mu'(t) (lambda (mu t^{p-1} + (p-1) int_t^inf mu tau^{p-2}))^{1/(p-1)}.
/// The bracket equals int_{f > t} f^{p-1}, computed exactly on the grid staircase.
inline InequalityReport check_talenti(const EigenResult& result, const TalentiOptions& o = {}) {
  InequalityReport rep;
  rep.check = "talenti";
  const auto& f = result.minimizer;
  const auto& mask = f.mask();
  const int n = mask.dim();
  const double p = result.p;
  require(p > 1 && p < n, ErrorKind::invalid_argument, "talenti needs 1 < p < n");
  require(o.levels >= 3 && o.lo > 0 && o.hi > o.lo, ErrorKind::invalid_argument, "bad talenti t-grid");
  rep.meta("h", mask.h());
  rep.meta("n", n);
  rep.meta("p", p);
  rep.meta("lambda", result.lambda);
  rep.meta("levels", o.levels);
  rep.meta("factor", o.factor);
  rep.meta("method", result.method);
  rep.meta("subsamples", o.subsamples);

  require(o.subsamples >= 1, ErrorKind::invalid_argument, "talenti subsamples must be positive");
  std::vector<double> vals;
  double cell = mask.cell_volume();
  if (o.subsamples == 1) {
    for (std::size_t i : mask.inside_nodes()) vals.push_back(std::abs(f[i]));
  } else {
    vals = detail::interpolant_samples(f, o.subsamples);
    cell /= std::pow(o.subsamples, n);
  }
  std::sort(vals.begin(), vals.end());
  // Suffix sums of v^{p-1}.
  std::vector<double> suffix(vals.size() + 1, 0.0);
  for (std::size_t k = vals.size(); k-- > 0;) suffix[k] = suffix[k + 1] + std::pow(vals[k], p - 1);
  auto first_above = [&](double t) {
    return static_cast<std::size_t>(std::upper_bound(vals.begin(), vals.end(), t) - vals.begin());
  };
  auto mu = [&](double t) { return cell * static_cast<double>(vals.size() - first_above(t)); };
  const double fmax = vals.empty() ? 0.0 : vals.back();
  require(fmax > 0, ErrorKind::degenerate_input, "talenti check needs a nonzero function");
  const double delta = fmax * (o.hi - o.lo) / (o.levels - 1);
  const double cn = n * std::pow(ball_volume(n), 1.0 / n);
  const std::string in = digest_of(f);
  int resolved = 0;
  for (int k = 0; k < o.levels; ++k) {
    const double t = fmax * o.lo + delta * k;
    const double jump = mu(t - delta) - mu(t + delta);
    if (!(jump > o.noise_cells * mask.cell_volume())) continue;
    ++resolved;
    const double m = mu(t);
    const double dmu = -jump / (2 * delta);
    const double bracket = cell * suffix[first_above(t)];
    const double lhs = std::pow(cn * std::pow(m, (n - 1.0) / n), p / (p - 1));
    const double rhs = -dmu * std::pow(result.lambda * bracket, 1.0 / (p - 1));
    std::ostringstream label;
    label.precision(10);
    label << "t=" << t << " mu=" << m;
    rep.add(make_record(label.str(), in, lhs, rhs, Relation::le, o.factor - 1.0));
  }
  rep.meta("resolved_levels", resolved);
  if (resolved == 0) rep.inconclusive = true;
  return rep;
}

// Polya-Szego and Sobolev ---------------------------------------------------------

/// E(f) >= ||grad f*||_p; with expect_equality also |E(f) - ||grad f*||_p| small.
inline InequalityReport check_polya_szego(const EnergyContext& ctx, const GridFunction& f, bool expect_equality = false,
                                          const Tolerances& tol = {}) {
  require(ctx.p() > 1, ErrorKind::invalid_argument, "polya-szego check needs p > 1");
  InequalityReport rep;
  rep.check = "polya_szego";
  record_context(rep, ctx);
  rep.meta("h", f.mask().h());
  const auto star = symmetric_rearrangement(f);
  const double E = energy(ctx, f);
  const double gs = gradient_norm(star, ctx.p());
  rep.meta("energy", E);
  rep.meta("rearranged_gradient_norm", gs);
  const auto in = digest_of(f);
  rep.add(make_record("E(f) >= ||grad f*||", in, E, gs, Relation::ge, tol.polya_szego));
  if (expect_equality) rep.add(make_record("equality class", in, E, gs, Relation::eq, tol.polya_szego_equality));
  return rep;
}

/// a_{n,p} ||f||_{np/(n-p)} <= E(f), 1 < p < n.
inline InequalityReport check_sobolev(const EnergyContext& ctx, const GridFunction& f, const Tolerances& tol = {}) {
  const int n = ctx.n();
  const double p = ctx.p();
  require(p > 1 && p < n, ErrorKind::invalid_argument, "grid sobolev check needs 1 < p < n (p = 1 via polygons)");
  InequalityReport rep;
  rep.check = "sobolev";
  record_context(rep, ctx);
  const double a = sobolev_constant(n, p);
  const double lhs = a * lp_norm(f, n * p / (n - p));
  const double E = energy(ctx, f);
  rep.meta("a_np", a);
  rep.add(make_record("a ||f||_{np/(n-p)} <= E(f)", digest_of(f), lhs, E, Relation::le, tol.sobolev));
  return rep;
}

/// a_{2,1} area(C)^{1/2} <= E_{Q,1} chi_C; with expect_equality (ellipse polygons) also equality.
inline InequalityReport check_sobolev_polygon(const EnergyContext& ctx, const Polygon& C, bool expect_equality = false,
                                              const Tolerances& tol = {}) {
  InequalityReport rep;
  rep.check = "sobolev_p1";
  record_context(rep, ctx);
  const double a = sobolev_constant(2, 1.0);
  const double lhs = a * std::sqrt(C.area());
  const double E = polygon_energy(ctx, C);
  rep.meta("a_21", a);
  rep.meta("vertices", C.size());
  const auto in = digest_of(C);
  rep.add(make_record("a area^{1/2} <= E(chi_C)", in, lhs, E, Relation::le, tol.sobolev));
  if (expect_equality) rep.add(make_record("ellipse equality", in, lhs, E, Relation::eq, tol.sobolev_equality));
  return rep;
}

// Relations ---------------------------------------------------------------------

struct RelationsOutcome {
  InequalityReport report;
  EigenResult euclidean;
  EigenResult affine;
};

/// lambda(Omega) >= lambda^A(Omega) at matched discretization, and lambda^A > 0.
inline RelationsOutcome check_relations(const EnergyContext& ctx, const MaskPtr& mask, const SolverOptions& opt = {},
                                        const Tolerances& tol = {}) {
  RelationsOutcome out;
  auto& rep = out.report;
  rep.check = "relations";
  record_context(rep, ctx);
  out.euclidean = minimize_euclidean(mask, ctx.p(), opt);
  // Warm start: the descent is monotone, so lambda^A cannot end above R^A(u_euclid).
  SolverOptions aopt = opt;
  if (!aopt.initial) aopt.initial = out.euclidean.minimizer;
  out.affine = minimize_affine(ctx, mask, aopt);
  rep.meta("h", mask->h());
  rep.meta("domain", mask->describe());
  rep.meta("lambda", out.euclidean.lambda);
  rep.meta("lambda_affine", out.affine.lambda);
  rep.meta("affine_start", opt.initial ? "given" : "euclidean minimizer");
  const auto in = digest_of(mask);
  rep.add(make_record("lambda >= lambda^A", in, out.euclidean.lambda, out.affine.lambda, Relation::ge, tol.relations));
  auto positive = make_record("lambda^A > 0", in, out.affine.lambda, 0.0, Relation::ge, 0.0);
  positive.pass = positive.pass && out.affine.lambda > 0;
  rep.add(positive);
  return out;
}

// Kernel bounds -----------------------------------------------------------------

/// Samples (y, xi, eta) with y in R^{nm} (columns y_j in R^n) and checks
///   (a) |h(y^t xi)^p - h(y^t eta)^p| <= p R max(h(y^t xi)^{p-1}, h(y^t eta)^{p-1}) |y| |xi - eta|
///   (b) |h(y^t xi)| <= R |y| |xi|
///   (d) |grad_xi h(y^t xi)^p| <= p R h(y^t xi)^{p-1} |y|
/// with R the circumradius of Q.  One worst-case record per bound.
inline InequalityReport check_kernel_bounds(const ConvexBody& Q, int n, double p, int samples, std::uint64_t seed,
                                            const Tolerances& tol = {}) {
  require(n >= 1 && samples >= 1 && p >= 1, ErrorKind::invalid_argument, "bad kernel bound parameters");
  InequalityReport rep;
  rep.check = "kernel_bounds";
  const int m = Q.dim();
  const SupportKernel k(Q);
  const double R = Q.enclosing_radius();
  rep.meta("Q", Q.describe());
  rep.meta("n", n);
  rep.meta("p", p);
  rep.meta("samples", samples);
  rep.meta("seed", seed);
  rep.meta("R_Q", R);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<double> y(static_cast<std::size_t>(n * m)), xi(n), eta(n), z(m), g(m);
  auto norm = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  auto h_of = [&](const std::vector<double>& v) {
    detail::apply_theta_t(y, v.data(), n, m, z.data());
    return k.value(z.data());
  };
  struct Worst {
    SampleRecord rec;
    bool set = false;
    std::int64_t violations = 0;
  } worst[3];
  const char* names[3] = {"(a) lipschitz in xi", "(b) growth", "(d) gradient"};
  auto consider = [&](int b, double lhs, double rhs, Digest d) {
    auto r = make_record(names[b], d.hex(), lhs, rhs, Relation::le, 0.0, tol.kernel_slack * std::max(1.0, rhs));
    if (!r.pass) ++worst[b].violations;
    const double excess = (lhs - rhs) / std::max(1.0, rhs);
    const double prev = worst[b].set ? (worst[b].rec.lhs - worst[b].rec.rhs) / std::max(1.0, worst[b].rec.rhs) : -1e300;
    if (!worst[b].set || excess > prev) worst[b].rec = r, worst[b].set = true;
  };
  for (int s = 0; s < samples; ++s) {
    const double scale = std::exp(nd(rng));
    for (auto& v : y) v = scale * nd(rng);
    for (auto& v : xi) v = nd(rng);
    // Every 16th sample tests coincident points or y = 0.
    if (s % 16 == 1) {
      eta = xi;
    } else {
      for (auto& v : eta) v = nd(rng);
    }
    if (s % 16 == 2) std::fill(y.begin(), y.end(), 0.0);
    Digest d;
    d.add(std::span<const double>(y)).add(std::span<const double>(xi)).add(std::span<const double>(eta));
    const double ny = norm(y);
    const double hx = h_of(xi), he = h_of(eta);
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) diff[i] = xi[i] - eta[i];
    consider(0, std::abs(std::pow(hx, p) - std::pow(he, p)),
             p * R * std::max(std::pow(hx, p - 1), std::pow(he, p - 1)) * ny * norm(diff), d);
    consider(1, std::abs(hx), R * ny * norm(xi), d);
    // grad_xi h(y^t xi)^p = p h^{p-1} sum_j g_j y_j
    detail::apply_theta_t(y, xi.data(), n, m, z.data());
    const double hv = k.value_grad(z.data(), g.data());
    std::vector<double> grad(n, 0.0);
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < n; ++i) grad[i] += g[j] * y[j * n + i];
    const double hp1 = std::pow(hv, p - 1);
    consider(2, p * hp1 * norm(grad), p * R * hp1 * ny, d);
  }
  for (int b = 0; b < 3; ++b) {
    auto r = worst[b].rec;
    r.count = samples;
    r.pass = worst[b].violations == 0;
    rep.meta(std::string("violations ") + names[b], worst[b].violations);
    rep.add(r);
  }
  return rep;
}

}  // namespace affine
