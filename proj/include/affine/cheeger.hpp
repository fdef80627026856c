#pragma once

// p = 1 functionals on planar polygons: anisotropic perimeter, the polar projection
// body Pi°_{Q,1} C of a set of finite perimeter, and the affine Cheeger ratio
//   d_{n,1}(Q) (nm)^{-1/nm} vol_{nm}(Pi°_{Q,1} C)^{-1/nm} / vol(C).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affine/affine_energy.hpp"
#include "affine/convex_body.hpp"
#include "affine/error.hpp"
#include "affine/grid_function.hpp"

namespace affine {

using Point2 = std::array<double, 2>;

class Polygon {
 public:
  Polygon() = default;

  /// Simple polygon; clockwise input is reoriented to counterclockwise.
  explicit Polygon(std::vector<Point2> vertices) : v_(std::move(vertices)) {
    require(v_.size() >= 3, ErrorKind::invalid_argument, "polygon needs at least 3 vertices");
    for (const auto& p : v_)
      require(std::isfinite(p[0]) && std::isfinite(p[1]), ErrorKind::invalid_argument, "non-finite polygon vertex");
    double a = signed_area();
    require(std::abs(a) > 0, ErrorKind::invalid_argument, "degenerate polygon (zero area)");
    if (a < 0) std::reverse(v_.begin(), v_.end());
    for (std::size_t i = 0; i < v_.size(); ++i)
      require(edge_length(i) > 0, ErrorKind::invalid_argument, "polygon has a repeated vertex");
    require(is_simple(), ErrorKind::invalid_argument, "polygon is self-intersecting");
  }

  [[nodiscard]] const std::vector<Point2>& vertices() const noexcept { return v_; }
  [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
  [[nodiscard]] const Point2& vertex(std::size_t i) const { return v_[i % v_.size()]; }

  [[nodiscard]] double area() const { return signed_area(); }

  [[nodiscard]] double perimeter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) s += edge_length(i);
    return s;
  }

  [[nodiscard]] double edge_length(std::size_t i) const {
    const auto& a = vertex(i);
    const auto& b = vertex(i + 1);
    return std::hypot(b[0] - a[0], b[1] - a[1]);
  }

  /// Outward unit normal of edge i (from vertex i to i+1).
  [[nodiscard]] Point2 normal(std::size_t i) const {
    const auto& a = vertex(i);
    const auto& b = vertex(i + 1);
    const double l = edge_length(i);
    return {(b[1] - a[1]) / l, -(b[0] - a[0]) / l};
  }

  [[nodiscard]] Point2 centroid() const {
    double cx = 0, cy = 0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const auto& p = vertex(i);
      const auto& q = vertex(i + 1);
      const double c = p[0] * q[1] - q[0] * p[1];
      cx += (p[0] + q[0]) * c;
      cy += (p[1] + q[1]) * c;
    }
    const double a6 = 6.0 * area();
    return {cx / a6, cy / a6};
  }

  [[nodiscard]] bool is_convex() const {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const auto& a = vertex(i);
      const auto& b = vertex(i + 1);
      const auto& c = vertex(i + 2);
      const double cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
      if (cr < -1e-12 * (edge_length(i) * edge_length(i + 1))) return false;
    }
    return true;
  }

  /// Interior or boundary (within tol) membership; convex polygons only.
  [[nodiscard]] bool contains_convex(const Point2& x, double tol = 1e-12) const {
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const auto n = normal(i);
      const auto& a = vertex(i);
      if ((x[0] - a[0]) * n[0] + (x[1] - a[1]) * n[1] > tol) return false;
    }
    return true;
  }

  /// A C + x0.
  [[nodiscard]] Polygon transformed(const Eigen::Matrix2d& A, const Point2& x0 = {0, 0}) const {
    require(std::abs(A.determinant()) > 0, ErrorKind::invalid_argument, "singular polygon transform");
    std::vector<Point2> out;
    out.reserve(v_.size());
    for (const auto& p : v_)
      out.push_back({A(0, 0) * p[0] + A(0, 1) * p[1] + x0[0], A(1, 0) * p[0] + A(1, 1) * p[1] + x0[1]});
    return Polygon(std::move(out));
  }

  [[nodiscard]] Polygon scaled(double s) const { return transformed(Eigen::Matrix2d::Identity() * s); }

  [[nodiscard]] domain::Polygon descriptor() const {
    domain::Polygon d;
    d.vertices = v_;
    return d;
  }

 private:
  double signed_area() const {
    double a = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      const auto& p = vertex(i);
      const auto& q = vertex(i + 1);
      a += p[0] * q[1] - q[0] * p[1];
    }
    return a / 2.0;
  }

  static double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
  }

  static bool segments_cross(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double d1 = orient(c, d, a), d2 = orient(c, d, b), d3 = orient(a, b, c), d4 = orient(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
  }

  bool is_simple() const {
    const std::size_t n = v_.size();
    if (n == 3) return true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j == n - 1) continue;
        if (segments_cross(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1))) return false;
      }
    return true;
  }

  std::vector<Point2> v_;
};

// Constructors ------------------------------------------------------------------

inline Polygon regular_ngon(int N, double radius = 1.0, Point2 center = {0, 0}, double rotation = 0.0) {
  require(N >= 3, ErrorKind::invalid_argument, "regular polygon needs N >= 3");
  std::vector<Point2> v;
  for (int k = 0; k < N; ++k) {
    const double a = rotation + 2.0 * std::numbers::pi * k / N;
    v.push_back({center[0] + radius * std::cos(a), center[1] + radius * std::sin(a)});
  }
  return Polygon(std::move(v));
}

inline Polygon ellipse_polygon(double a, double b, int N, double angle = 0.0, Point2 center = {0, 0}) {
  require(a > 0 && b > 0, ErrorKind::invalid_argument, "ellipse semi-axes must be positive");
  Eigen::Matrix2d R;
  R << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
  return regular_ngon(N).transformed(R * Eigen::Vector2d(a, b).asDiagonal(), center);
}

inline Polygon axis_box(double x0, double y0, double x1, double y1) {
  return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// Convex hull (monotone chain) of at least three non-collinear points.
inline Polygon convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  require(pts.size() >= 3, ErrorKind::degenerate_input, "convex hull needs three distinct points");
  auto cross = [](Point2 o, Point2 a, Point2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); };
  std::vector<Point2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return Polygon(std::move(h));
}

/// Union of all radius-rho disks inside a convex polygon: the inner parallel body at
/// distance rho, Minkowski-summed with rho B, corners drawn as inscribed arcs.
inline std::optional<Polygon> rounded_inset(const Polygon& omega, double rho, int arc_segments = 64) {
  require(omega.is_convex(), ErrorKind::unsupported, "rounded insets require a convex domain");
  require(rho >= 0, ErrorKind::invalid_argument, "inset radius must be nonnegative");
  if (rho == 0) return omega;
  // Clip by each inward-shifted edge half-plane.
  std::vector<Point2> poly = omega.vertices();
  for (std::size_t e = 0; e < omega.size() && !poly.empty(); ++e) {
    const auto n = omega.normal(e);
    const auto& a = omega.vertex(e);
    const double b = n[0] * a[0] + n[1] * a[1] - rho;
    std::vector<Point2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const auto& p = poly[i];
      const auto& q = poly[(i + 1) % poly.size()];
      const double fp = n[0] * p[0] + n[1] * p[1] - b, fq = n[0] * q[0] + n[1] * q[1] - b;
      if (fp <= 0) out.push_back(p);
      if ((fp < 0 && fq > 0) || (fp > 0 && fq < 0)) {
        const double t = fp / (fp - fq);
        out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
      }
    }
    poly = std::move(out);
  }
  // Drop near-duplicate vertices left by clipping.
  std::vector<Point2> inner;
  for (const auto& p : poly)
    if (inner.empty() || std::hypot(p[0] - inner.back()[0], p[1] - inner.back()[1]) > 1e-12) inner.push_back(p);
  while (inner.size() > 1 && std::hypot(inner.front()[0] - inner.back()[0], inner.front()[1] - inner.back()[1]) <= 1e-12)
    inner.pop_back();
  if (inner.size() < 3) return std::nullopt;
  std::vector<Point2> out;
  const std::size_t k = inner.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& prev = inner[(i + k - 1) % k];
    const auto& cur = inner[i];
    const auto& next = inner[(i + 1) % k];
    const double a0 = std::atan2(-(cur[0] - prev[0]), cur[1] - prev[1]);
    double a1 = std::atan2(-(next[0] - cur[0]), next[1] - cur[1]);
    while (a1 < a0) a1 += 2 * std::numbers::pi;
    const int segs = std::max(1, static_cast<int>(std::ceil(arc_segments * (a1 - a0) / (2 * std::numbers::pi))));
    for (int s = 0; s <= segs; ++s) {
      const double a = a0 + (a1 - a0) * s / segs;
      out.push_back({cur[0] + rho * std::cos(a), cur[1] + rho * std::sin(a)});
    }
  }
  return Polygon(std::move(out));
}

// CSV: x,y per vertex, counterclockwise.
inline void write_polygon_csv(std::ostream& os, const Polygon& C) {
  os.precision(17);
  os << "x,y\n";
  for (const auto& p : C.vertices()) os << p[0] << "," << p[1] << "\n";
}

inline Polygon read_polygon_csv(std::istream& is) {
  std::string line;
  std::vector<Point2> v;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find_first_of("xX") != std::string::npos) continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Point2 p{};
    ls >> p[0] >> p[1];
    require(!ls.fail(), ErrorKind::invalid_argument, "malformed polygon csv row: " + line);
    v.push_back(p);
  }
  return Polygon(std::move(v));
}

// Functionals -------------------------------------------------------------------

/// ||theta||_{Pi°_{Q,1} C} = sum_edges h_Q(theta^t n_e) len_e.
inline double polygon_projection_gauge(const SupportKernel& kernel, const Polygon& C, std::span<const double> theta) {
  const int m = kernel.dim();
  require(static_cast<int>(theta.size()) == 2 * m, ErrorKind::invalid_argument, "theta must lie in R^{2m}");
  std::vector<double> z(m);
  double s = 0.0;
  for (std::size_t e = 0; e < C.size(); ++e) {
    const auto n = C.normal(e);
    detail::apply_theta_t(theta, n.data(), 2, m, z.data());
    s += kernel.value(z.data()) * C.edge_length(e);
  }
  return s;
}

inline double polygon_projection_gauge(const EnergyContext& ctx, const Polygon& C, std::span<const double> theta) {
  require(ctx.n() == 2, ErrorKind::invalid_argument, "polygon functionals need n = 2");
  return polygon_projection_gauge(ctx.kernel(), C, theta);
}

/// Exact area of Pi°_{Q,1} C for m = 1.  With Q = [-alpha, beta] the gauge is linear,
/// <theta, w>, on each arc between directions orthogonal to edge normals, and
/// (1/2) int sec^2 / |w|^2 integrates in closed form.
inline double polygon_projection_area_exact(const ConvexBody& Q, const Polygon& C) {
  require(Q.dim() == 1, ErrorKind::unsupported, "exact polygon projection area needs m = 1");
  const double beta = Q.support({1.0}), alpha = Q.support({-1.0});
  const double two_pi = 2 * std::numbers::pi;
  std::vector<double> kinks;
  for (std::size_t e = 0; e < C.size(); ++e) {
    const auto n = C.normal(e);
    const double a = std::atan2(n[1], n[0]);
    for (double k : {a + std::numbers::pi / 2, a - std::numbers::pi / 2}) {
      double x = std::fmod(k, two_pi);
      if (x < 0) x += two_pi;
      kinks.push_back(x);
    }
  }
  std::sort(kinks.begin(), kinks.end());
  kinks.push_back(kinks.front() + two_pi);
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < kinks.size(); ++k) {
    const double a0 = kinks[k], a1 = kinks[k + 1];
    if (a1 - a0 <= 1e-15) continue;
    const double mid = 0.5 * (a0 + a1);
    const double tm[2] = {std::cos(mid), std::sin(mid)};
    double wx = 0.0, wy = 0.0;
    for (std::size_t e = 0; e < C.size(); ++e) {
      const auto n = C.normal(e);
      const double s = (n[0] * tm[0] + n[1] * tm[1]) > 0 ? beta : -alpha;
      wx += s * C.edge_length(e) * n[0];
      wy += s * C.edge_length(e) * n[1];
    }
    const double wn = std::hypot(wx, wy);
    const double psi = std::atan2(wy, wx);
    require(std::cos(mid - psi) > 0, ErrorKind::degenerate_input, "polar projection gauge is not positive");
    area += (std::tan(a1 - psi) - std::tan(a0 - psi)) / (2.0 * wn * wn);
  }
  return area;
}

/// vol_{nm}(Pi°_{Q,1} C): exact for nm = 2, rule_nm quadrature otherwise.
inline double polygon_projection_volume(const EnergyContext& ctx, const Polygon& C) {
  require(ctx.n() == 2, ErrorKind::invalid_argument, "polygon functionals need n = 2");
  if (ctx.m() == 1) return polygon_projection_area_exact(ctx.Q(), C);
  const auto& rule = ctx.rule_nm();
  std::vector<double> G(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) G[i] = polygon_projection_gauge(ctx.kernel(), C, rule.node(i));
  return polar_projection_volume(G, rule);
}

/// E_{Q,1} chi_C = d_{n,1}(Q) (nm)^{-1/nm} vol(Pi°_{Q,1} C)^{-1/nm}.
inline double polygon_energy(const EnergyContext& ctx, const Polygon& C) {
  require(ctx.p() == 1.0, ErrorKind::invalid_argument, "polygon energies use a p = 1 context");
  const double nm = ctx.nm();
  return ctx.d() * std::pow(nm, -1.0 / nm) * std::pow(polygon_projection_volume(ctx, C), -1.0 / nm);
}

inline double cheeger_ratio(const EnergyContext& ctx, const Polygon& C) { return polygon_energy(ctx, C) / C.area(); }

inline double euclidean_cheeger_ratio(const Polygon& C) { return C.perimeter() / C.area(); }

/// P_K(C) = sum_edges h_K(n_e) len_e.
inline double anisotropic_perimeter(const ConvexBody& K, const Polygon& C) {
  require(K.dim() == 2, ErrorKind::invalid_argument, "anisotropic perimeter needs a planar body");
  double s = 0.0;
  for (std::size_t e = 0; e < C.size(); ++e) {
    const auto n = C.normal(e);
    s += K.support({n[0], n[1]}) * C.edge_length(e);
  }
  return s;
}

/// Sharp Sobolev constant a_{n,p}; p = 1 is the limit n omega_n^{1/n}.
inline double sobolev_constant(int n, double p) {
  require(p >= 1 && p < n, ErrorKind::invalid_argument, "sobolev constant needs 1 <= p < n");
  const double nd = n;
  const double omega = ball_volume(n);
  if (p == 1.0) return nd * std::pow(omega, 1.0 / nd);
  const double lg = std::log(omega) - std::lgamma(nd) + std::lgamma(nd / p) + std::lgamma(nd + 1 - nd / p);
  return std::pow(nd, 1.0 / p) * std::pow((nd - p) / (p - 1), (p - 1) / p) * std::exp(lg / nd);
}

// Level sets --------------------------------------------------------------------

/// Star-shaped superlevel set {f > t} traced by rays from center with bisection on the
/// bilinear interpolant.
inline Polygon level_set_polygon(const GridFunction& f, double t, Point2 center = {0, 0}, int rays = 256,
                                 double rmax = 0.0) {
  require(f.mask().dim() == 2, ErrorKind::invalid_argument, "level sets are planar");
  if (rmax <= 0) {
    const auto& m = f.mask();
    for (int k = 0; k < 2; ++k) {
      const double lo = m.offset()[k] * m.h(), hi = (m.offset()[k] + m.shape()[k] - 1) * m.h();
      rmax = std::max({rmax, std::abs(lo - center[k]), std::abs(hi - center[k])});
    }
    rmax *= std::sqrt(2.0);
  }
  auto val = [&](double r, double a) {
    const double x[2] = {center[0] + r * std::cos(a), center[1] + r * std::sin(a)};
    return interpolate(f, std::span<const double>(x, 2));
  };
  require(val(0, 0) > t, ErrorKind::degenerate_input, "level set does not contain the ray center");
  std::vector<Point2> v;
  const double dr = f.mask().h() / 4;
  for (int k = 0; k < rays; ++k) {
    const double a = 2 * std::numbers::pi * k / rays;
    double r0 = 0, r1 = dr;
    while (r1 < rmax && val(r1, a) > t) r0 = r1, r1 += dr;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (r0 + r1);
      (val(mid, a) > t ? r0 : r1) = mid;
    }
    const double r = 0.5 * (r0 + r1);
    v.push_back({center[0] + r * std::cos(a), center[1] + r * std::sin(a)});
  }
  return Polygon(std::move(v));
}

// Candidate search --------------------------------------------------------------

enum class Family { rounded_insets, inscribed_disks, inscribed_ellipses };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::rounded_insets: return "rounded_insets";
    case Family::inscribed_disks: return "inscribed_disks";
    case Family::inscribed_ellipses: return "inscribed_ellipses";
  }
  return "unknown";
}

inline Family parse_family(const std::string& s) {
  if (s == "rounded_insets") return Family::rounded_insets;
  if (s == "inscribed_disks") return Family::inscribed_disks;
  if (s == "inscribed_ellipses") return Family::inscribed_ellipses;
  fail(ErrorKind::invalid_argument, "unknown candidate family '" + s + "'");
}

struct FamilySpec {
  Family family = Family::rounded_insets;
  int samples = 200;       // parameter grid size per axis
  int arc_segments = 256;  // polygon resolution of curved candidates
  std::uint64_t seed = 1;  // position sampling in the maximal-volume check
  int position_samples = 200;
};

struct CheegerCandidate {
  Polygon polygon;
  double ratio = 0.0;
  std::string parameters;
};

struct PositionCheck {
  int tested = 0;
  int admissible_larger = 0;       // A C0 + x0 inside Omega with larger area
  double max_scaling_error = 0.0;  // |ratio(A C0) |det A|^{1/n} - ratio(C0)| / ratio(C0)
  bool consistent = true;          // every admissible larger position has a lower ratio
};

struct CheegerSearchResult {
  CheegerCandidate best;
  std::vector<CheegerCandidate> candidates;
  std::optional<PositionCheck> position;
  bool affine = false;
};

namespace detail {

/// Largest s with c + s E inside convex omega, E the ellipse with semi-axes (a, b) at angle phi.
inline double ellipse_fit_scale(const Polygon& omega, Point2 c, double a, double b, double phi) {
  double s = std::numeric_limits<double>::infinity();
  const double cp = std::cos(phi), sp = std::sin(phi);
  for (std::size_t e = 0; e < omega.size(); ++e) {
    const auto n = omega.normal(e);
    const auto& v = omega.vertex(e);
    const double off = n[0] * (v[0] - c[0]) + n[1] * (v[1] - c[1]);
    // support of R diag(a,b) B in direction n
    const double u0 = cp * n[0] + sp * n[1], u1 = -sp * n[0] + cp * n[1];
    s = std::min(s, off / std::hypot(a * u0, b * u1));
  }
  return s;
}

}  // namespace detail

/// Scale exponent of the ratio under C -> A C: ratio(A C) = |det A|^{-1/n} ratio(C).
inline double cheeger_scaling_exponent(int n) { return -1.0 / n; }

inline CheegerSearchResult search_cheeger(const EnergyContext* ctx, const Polygon& omega, const FamilySpec& spec) {
  require(omega.is_convex(), ErrorKind::unsupported, "candidate families are generated for convex domains");
  require(spec.samples >= 1, ErrorKind::invalid_argument, "empty candidate family");
  auto ratio = [&](const Polygon& C) { return ctx ? cheeger_ratio(*ctx, C) : euclidean_cheeger_ratio(C); };
  CheegerSearchResult res;
  res.affine = ctx != nullptr;
  // Inradius and incenter estimate on a vertex-bbox grid.
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : omega.vertices())
    xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]), ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
  auto dist_in = [&](Point2 c) {
    double d = 1e300;
    for (std::size_t e = 0; e < omega.size(); ++e) {
      const auto n = omega.normal(e);
      const auto& v = omega.vertex(e);
      d = std::min(d, n[0] * (v[0] - c[0]) + n[1] * (v[1] - c[1]));
    }
    return d;
  };
  const int g = std::max(2, static_cast<int>(std::sqrt(static_cast<double>(spec.samples))));
  std::vector<Point2> centers;
  for (int i = 0; i <= g; ++i)
    for (int j = 0; j <= g; ++j) {
      const Point2 c{xmin + (xmax - xmin) * i / g, ymin + (ymax - ymin) * j / g};
      if (dist_in(c) > 0) centers.push_back(c);
    }
  centers.push_back(omega.centroid());
  double inradius = 0.0;
  for (const auto& c : centers) inradius = std::max(inradius, dist_in(c));

  switch (spec.family) {
    case Family::rounded_insets:
      for (int k = 0; k < spec.samples; ++k) {
        const double rho = inradius * k / spec.samples;
        auto C = rounded_inset(omega, rho, spec.arc_segments);
        if (!C) continue;
        std::ostringstream os;
        os.precision(12);
        os << "rho=" << rho;
        res.candidates.push_back({*C, ratio(*C), os.str()});
      }
      break;
    case Family::inscribed_disks:
      for (const auto& c : centers) {
        const double r = dist_in(c);
        const auto C = regular_ngon(spec.arc_segments, r, c);
        std::ostringstream os;
        os.precision(12);
        os << "center=(" << c[0] << "," << c[1] << ") r=" << r;
        res.candidates.push_back({C, ratio(C), os.str()});
      }
      break;
    case Family::inscribed_ellipses: {
      const int na = std::max(3, (g / 2) | 1);  // odd, so aspect 1 is on the grid
      for (const auto& c : centers)
        for (int ia = 0; ia < na; ++ia)
          for (int ip = 0; ip < na; ++ip) {
            const double aspect = std::exp(std::log(4.0) * ia / (na - 1) - std::log(2.0));  // b/a in [1/2, 2]
            const double phi = std::numbers::pi * ip / na;
            const double s = detail::ellipse_fit_scale(omega, c, 1.0, aspect, phi);
            if (!(s > 0)) continue;
            const auto C = ellipse_polygon(s, s * aspect, spec.arc_segments, phi, c);
            std::ostringstream os;
            os.precision(12);
            os << "center=(" << c[0] << "," << c[1] << ") a=" << s << " b=" << s * aspect << " angle=" << phi;
            res.candidates.push_back({C, ratio(C), os.str()});
          }
      break;
    }
  }
  require(!res.candidates.empty(), ErrorKind::invalid_argument, "candidate family is empty for this domain");
  res.best = *std::min_element(res.candidates.begin(), res.candidates.end(),
                               [](const auto& a, const auto& b) { return a.ratio < b.ratio; });

  if (ctx != nullptr) {
    // Necessary condition for maximal volume position, restricted to sampled positions.
    PositionCheck pc;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> nd;
    const auto& C0 = res.best.polygon;
    const double r0 = res.best.ratio;
    const auto c0 = C0.centroid();
    for (int k = 0; k < spec.position_samples; ++k) {
      Eigen::Matrix2d A = Eigen::Matrix2d::Identity();
      const double amp = 0.05 * std::pow(0.5, k % 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) A(i, j) += amp * nd(rng);
      if (A.determinant() <= 0) continue;
      const Point2 shift{amp * nd(rng), amp * nd(rng)};
      // Map about the centroid: x -> A (x - c0) + c0 + shift.
      const Eigen::Vector2d c(c0[0], c0[1]);
      const Eigen::Vector2d t = c - A * c + Eigen::Vector2d(shift[0], shift[1]);
      const auto C1 = C0.transformed(A, {t[0], t[1]});
      ++pc.tested;
      bool inside = true;
      for (const auto& v : C1.vertices()) inside = inside && omega.contains_convex(v, 1e-12);
      if (!inside || C1.area() <= C0.area()) continue;
      ++pc.admissible_larger;
      const double r1 = cheeger_ratio(*ctx, C1);
      const double predicted = std::pow(std::abs(A.determinant()), cheeger_scaling_exponent(2)) * r0;
      pc.max_scaling_error = std::max(pc.max_scaling_error, std::abs(r1 - predicted) / r0);
      if (!(r1 < r0)) pc.consistent = false;
    }
    res.position = pc;
  }
  return res;
}

}  // namespace affine
