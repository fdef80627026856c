#pragma once

// Convex bodies described by exactly evaluable support functions
// h_K(u) = sup_{y in K} <y, u>, and gauges ||x||_K = inf{r > 0 : x in rK}
// when the origin is interior.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "affine/error.hpp"
#include "affine/sphere_quad.hpp"

namespace affine {

class ConvexBody;

namespace body {

/// Q = [-alpha, beta] on R.
struct Segment {
  double alpha;
  double beta;
};

/// Unit ball of the l^q norm in R^dim, q in [1, inf].
struct LqBall {
  int dim;
  double q;
};

/// Convex hull of a vertex list (flat, dim values per vertex).
struct Polytope {
  int dim;
  std::vector<double> vertices;
  // Facets <a_k, y> <= b_k of the hull, populated for dim <= 2.
  std::vector<double> facet_normals;
  std::vector<double> facet_offsets;
};

/// {x : x^T M^{-1} x <= 1} = M^{1/2} B, M symmetric positive definite.
struct Ellipsoid {
  Eigen::MatrixXd matrix;
  Eigen::MatrixXd inverse;
};

struct Scaled {
  std::shared_ptr<const ConvexBody> base;
  double factor;
};

/// Sampled support values h(u_k) at unit directions u_k.
struct SupportTable {
  int dim;
  std::vector<double> directions;  // flat
  std::vector<double> values;
  std::vector<double> angles;      // dim 2: sorted polar angles
};

}  // namespace body

class ConvexBody {
 public:
  using Kind = std::variant<body::Segment, body::LqBall, body::Polytope, body::Ellipsoid, body::Scaled,
                            body::SupportTable>;

  static ConvexBody segment(double alpha, double beta) {
    require(alpha > 0 && beta > 0, ErrorKind::invalid_argument, "segment requires alpha, beta > 0");
    return ConvexBody(body::Segment{alpha, beta}, true);
  }

  static ConvexBody lq_ball(int dim, double q) {
    require(dim >= 1, ErrorKind::invalid_argument, "lq_ball dimension must be positive");
    require(q >= 1.0, ErrorKind::invalid_argument, "lq_ball exponent must be >= 1");
    const bool smooth = q > 1.0 && std::isfinite(q);
    return ConvexBody(body::LqBall{dim, q}, smooth || dim == 1);
  }

  static ConvexBody euclidean_ball(int dim) { return lq_ball(dim, 2.0); }

  /// Vertices given as rows.
  static ConvexBody polytope(const std::vector<std::vector<double>>& vertices) {
    require(!vertices.empty(), ErrorKind::invalid_argument, "polytope needs vertices");
    const int dim = static_cast<int>(vertices.front().size());
    require(dim >= 1, ErrorKind::invalid_argument, "polytope vertices must be non-empty vectors");
    body::Polytope p{dim, {}, {}, {}};
    for (const auto& v : vertices) {
      require(static_cast<int>(v.size()) == dim, ErrorKind::invalid_argument, "polytope vertex dimension mismatch");
      p.vertices.insert(p.vertices.end(), v.begin(), v.end());
    }
    if (dim == 2) build_facets_2d(p);
    if (dim == 1) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (double v : p.vertices) lo = std::min(lo, v), hi = std::max(hi, v);
      p.facet_normals = {1.0, -1.0};
      p.facet_offsets = {hi, -lo};
    }
    return ConvexBody(std::move(p), dim == 1);
  }

  static ConvexBody ellipsoid(const Eigen::MatrixXd& matrix) {
    require(matrix.rows() == matrix.cols() && matrix.rows() >= 1, ErrorKind::invalid_argument,
            "ellipsoid matrix must be square");
    require((matrix - matrix.transpose()).norm() <= 1e-12 * (1.0 + matrix.norm()), ErrorKind::invalid_argument,
            "ellipsoid matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(matrix);
    require(llt.info() == Eigen::Success, ErrorKind::invalid_argument, "ellipsoid matrix must be positive definite");
    return ConvexBody(body::Ellipsoid{matrix, matrix.inverse()}, true);
  }

  static ConvexBody scaled(const ConvexBody& base, double factor) {
    require(factor > 0, ErrorKind::invalid_argument, "scale factor must be positive");
    return ConvexBody(body::Scaled{std::make_shared<const ConvexBody>(base), factor}, base.smooth_);
  }

  /// Numerically defined body from sampled support values at unit directions.
  static ConvexBody support_table(int dim, std::vector<double> directions, std::vector<double> values) {
    require(dim >= 1, ErrorKind::invalid_argument, "support_table dimension must be positive");
    require(directions.size() == values.size() * static_cast<std::size_t>(dim) && !values.empty(),
            ErrorKind::invalid_argument, "support_table directions/values size mismatch");
    body::SupportTable t{dim, {}, {}, {}};
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      double norm2 = 0.0;
      for (int k = 0; k < dim; ++k) norm2 += directions[i * dim + k] * directions[i * dim + k];
      require(std::abs(norm2 - 1.0) < 1e-9, ErrorKind::invalid_argument, "support_table directions must be unit");
      order[i] = i;
    }
    if (dim == 2) {
      std::vector<double> ang(values.size());
      for (std::size_t i = 0; i < ang.size(); ++i) ang[i] = std::atan2(directions[2 * i + 1], directions[2 * i]);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ang[a] < ang[b]; });
      for (std::size_t i : order) t.angles.push_back(ang[i]);
    }
    for (std::size_t i : order) {
      t.values.push_back(values[i]);
      for (int k = 0; k < dim; ++k) t.directions.push_back(directions[i * dim + k]);
    }
    return ConvexBody(std::move(t), dim >= 2);
  }

  /// Polytope Minkowski-summed with a Euclidean ball of radius width (support h_P + width),
  /// sampled into a planar support table: a C^{1,1} smoothing of a raw polytope.
  static ConvexBody mollified_polytope(const std::vector<std::vector<double>>& vertices, double width,
                                       int samples = 1024) {
    require(width > 0, ErrorKind::invalid_argument, "mollification width must be positive");
    const ConvexBody p = polytope(vertices);
    require(p.dim() == 2, ErrorKind::unsupported_body, "mollified_polytope supports planar polytopes");
    std::vector<double> dirs, vals;
    for (int k = 0; k < samples; ++k) {
      const double a = 2.0 * std::numbers::pi * k / samples;
      const double u[2] = {std::cos(a), std::sin(a)};
      dirs.insert(dirs.end(), {u[0], u[1]});
      vals.push_back(p.support(u) + width);
    }
    return support_table(2, std::move(dirs), std::move(vals));
  }

  [[nodiscard]] int dim() const {
    return std::visit(
        [](const auto& b) -> int {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, body::Segment>) return 1;
          else if constexpr (std::is_same_v<T, body::Ellipsoid>) return static_cast<int>(b.matrix.rows());
          else if constexpr (std::is_same_v<T, body::Scaled>) return b.base->dim();
          else return b.dim;
        },
        kind_);
  }

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  /// Declared membership in the smooth class used by the p > 1 theory (not verified).
  [[nodiscard]] bool declared_smooth() const noexcept { return smooth_; }

  [[nodiscard]] bool is_segment() const noexcept { return std::holds_alternative<body::Segment>(kind_); }

  /// h_K(u); direction need not be unit.
  [[nodiscard]] double support(std::span<const double> u) const {
    check_dim(u.size());
    return support_unchecked(u);
  }
  [[nodiscard]] double support(std::initializer_list<double> u) const {
    return support(std::span<const double>(u.begin(), u.size()));
  }
  [[nodiscard]] double support(const Eigen::VectorXd& u) const {
    return support(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
  }

  /// Hot-path evaluation without the dimension check.
  [[nodiscard]] double support_unchecked(std::span<const double> u) const {
    return std::visit([&](const auto& b) { return support_impl(b, u); }, kind_);
  }

  /// A maximizing body point (lowest-index vertex on ties); <g, u> = h(u).
  [[nodiscard]] Eigen::VectorXd support_point(std::span<const double> u) const {
    check_dim(u.size());
    double norm2 = 0.0;
    for (double c : u) norm2 += c * c;
    require(norm2 > 0.0, ErrorKind::invalid_argument, "support_point requires a nonzero direction");
    Eigen::VectorXd out(dim());
    std::visit([&](const auto& b) { support_point_impl(b, u, out); }, kind_);
    return out;
  }
  [[nodiscard]] Eigen::VectorXd support_point(std::initializer_list<double> u) const {
    return support_point(std::span<const double>(u.begin(), u.size()));
  }
  [[nodiscard]] Eigen::VectorXd support_point(const Eigen::VectorXd& u) const {
    return support_point(std::span<const double>(u.data(), static_cast<std::size_t>(u.size())));
  }

  /// Hot-path gradient of h at u written into out (size dim); u must be nonzero.
  void support_point_unchecked(std::span<const double> u, std::span<double> out) const {
    Eigen::Map<Eigen::VectorXd> o(out.data(), static_cast<Eigen::Index>(out.size()));
    Eigen::VectorXd tmp(dim());
    std::visit([&](const auto& b) { support_point_impl(b, u, tmp); }, kind_);
    o = tmp;
  }

  [[nodiscard]] bool origin_interior() const {
    return std::visit(
        [](const auto& b) -> bool {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, body::Polytope>) {
            if (b.facet_offsets.empty()) return false;
            return std::all_of(b.facet_offsets.begin(), b.facet_offsets.end(), [](double o) { return o > 0; });
          } else if constexpr (std::is_same_v<T, body::Scaled>) {
            return b.base->origin_interior();
          } else if constexpr (std::is_same_v<T, body::SupportTable>) {
            return std::all_of(b.values.begin(), b.values.end(), [](double v) { return v > 0; });
          } else {
            return true;
          }
        },
        kind_);
  }

  /// ||x||_K; requires the origin in the interior.
  [[nodiscard]] double gauge(std::span<const double> x) const {
    check_dim(x.size());
    require(origin_interior(), ErrorKind::unsupported_body, "gauge requires the origin in the interior");
    return std::visit([&](const auto& b) { return gauge_impl(b, x); }, kind_);
  }
  [[nodiscard]] double gauge(std::initializer_list<double> x) const {
    return gauge(std::span<const double>(x.begin(), x.size()));
  }
  [[nodiscard]] double gauge(const Eigen::VectorXd& x) const {
    return gauge(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

  /// Radius R_Q of the smallest centered Euclidean ball containing the body.
  [[nodiscard]] double enclosing_radius() const {
    return std::visit(
        [this](const auto& b) -> double {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, body::Segment>) {
            return std::max(b.alpha, b.beta);
          } else if constexpr (std::is_same_v<T, body::LqBall>) {
            if (b.q <= 2.0) return 1.0;
            const double inv_q = std::isfinite(b.q) ? 1.0 / b.q : 0.0;
            return std::pow(static_cast<double>(b.dim), 0.5 - inv_q);
          } else if constexpr (std::is_same_v<T, body::Polytope>) {
            double r2 = 0.0;
            for (std::size_t i = 0; i < b.vertices.size(); i += b.dim) {
              double s = 0.0;
              for (int k = 0; k < b.dim; ++k) s += b.vertices[i + k] * b.vertices[i + k];
              r2 = std::max(r2, s);
            }
            return std::sqrt(r2);
          } else if constexpr (std::is_same_v<T, body::Ellipsoid>) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix);
            return std::sqrt(es.eigenvalues().maxCoeff());
          } else if constexpr (std::is_same_v<T, body::Scaled>) {
            return b.factor * b.base->enclosing_radius();
          } else {
            (void)this;
            return *std::max_element(b.values.begin(), b.values.end());
          }
        },
        kind_);
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& b) {
          using T = std::decay_t<decltype(b)>;
          if constexpr (std::is_same_v<T, body::Segment>) {
            os << "segment(" << b.alpha << "," << b.beta << ")";
          } else if constexpr (std::is_same_v<T, body::LqBall>) {
            os << "lq_ball(dim=" << b.dim << ",q=" << b.q << ")";
          } else if constexpr (std::is_same_v<T, body::Polytope>) {
            os << "polytope(dim=" << b.dim << ",[";
            for (std::size_t i = 0; i < b.vertices.size(); ++i) os << (i ? "," : "") << b.vertices[i];
            os << "])";
          } else if constexpr (std::is_same_v<T, body::Ellipsoid>) {
            os << "ellipsoid([";
            for (Eigen::Index i = 0; i < b.matrix.size(); ++i) os << (i ? "," : "") << b.matrix.data()[i];
            os << "])";
          } else if constexpr (std::is_same_v<T, body::Scaled>) {
            os << "scaled(" << b.base->describe() << "," << b.factor << ")";
          } else {
            os << "support_table(dim=" << b.dim << ",samples=" << b.values.size() << ")";
          }
        },
        kind_);
    return os.str();
  }

 private:
  ConvexBody(Kind kind, bool smooth) : kind_(std::move(kind)), smooth_(smooth) {}

  void check_dim(std::size_t n) const {
    require(static_cast<int>(n) == dim(), ErrorKind::invalid_argument,
            "dimension mismatch: body has dim " + std::to_string(dim()) + ", got " + std::to_string(n));
  }

  static void build_facets_2d(body::Polytope& p) {
    // Andrew's monotone chain; counterclockwise hull without collinear points.
    struct P2 {
      double x, y;
    };
    std::vector<P2> pts;
    for (std::size_t i = 0; i < p.vertices.size(); i += 2) pts.push_back({p.vertices[i], p.vertices[i + 1]});
    std::sort(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](P2 a, P2 b) { return a.x == b.x && a.y == b.y; }), pts.end());
    if (pts.size() < 3) return;
    auto cross = [](P2 o, P2 a, P2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
    std::vector<P2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& q : pts) {
      while (k >= 2 && cross(hull[k - 2], hull[k - 1], q) <= 0) --k;
      hull[k++] = q;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
      while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
      hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) return;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      const P2 a = hull[i], b = hull[(i + 1) % hull.size()];
      const double nx = b.y - a.y, ny = -(b.x - a.x);
      p.facet_normals.insert(p.facet_normals.end(), {nx, ny});
      p.facet_offsets.push_back(nx * a.x + ny * a.y);
    }
  }

  // support ------------------------------------------------------------------

  static double support_impl(const body::Segment& b, std::span<const double> u) {
    return u[0] >= 0 ? b.beta * u[0] : -b.alpha * u[0];
  }

  static double support_impl(const body::LqBall& b, std::span<const double> u) {
    if (b.q == 2.0) {
      double s = 0.0;
      for (double c : u) s += c * c;
      return std::sqrt(s);
    }
    if (b.q == 1.0) {
      double s = 0.0;
      for (double c : u) s = std::max(s, std::abs(c));
      return s;
    }
    if (!std::isfinite(b.q)) {
      double s = 0.0;
      for (double c : u) s += std::abs(c);
      return s;
    }
    const double qc = b.q / (b.q - 1.0);
    double mx = 0.0;
    for (double c : u) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double c : u) s += std::pow(std::abs(c) / mx, qc);
    return mx * std::pow(s, 1.0 / qc);
  }

  static double support_impl(const body::Polytope& b, std::span<const double> u) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.vertices.size(); i += b.dim) {
      double s = 0.0;
      for (int k = 0; k < b.dim; ++k) s += b.vertices[i + k] * u[k];
      best = std::max(best, s);
    }
    return best;
  }

  static double support_impl(const body::Ellipsoid& b, std::span<const double> u) {
    Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
    return std::sqrt(std::max(0.0, v.dot(b.matrix * v)));
  }

  static double support_impl(const body::Scaled& b, std::span<const double> u) {
    return b.factor * b.base->support_unchecked(u);
  }

  static double support_impl(const body::SupportTable& b, std::span<const double> u) {
    double norm2 = 0.0;
    for (double c : u) norm2 += c * c;
    if (norm2 == 0.0) return 0.0;
    const double r = std::sqrt(norm2);
    if (b.dim == 1) return u[0] >= 0 ? r * table_value_1d(b, 1.0) : r * table_value_1d(b, -1.0);
    if (b.dim == 2) {
      double h, dh;
      table_interp_2d(b, std::atan2(u[1], u[0]), h, dh);
      return r * h;
    }
    const Eigen::VectorXd y = table_local_fit(b, u, r);
    double s = 0.0;
    for (int k = 0; k < b.dim; ++k) s += y[k] * u[k];
    return s;
  }

  static double table_value_1d(const body::SupportTable& b, double sign) {
    for (std::size_t i = 0; i < b.values.size(); ++i)
      if (b.directions[i] * sign > 0) return b.values[i];
    fail(ErrorKind::invalid_argument, "1-d support_table lacks a direction");
  }

  static void table_interp_2d(const body::SupportTable& b, double angle, double& h, double& dh) {
    const std::size_t n = b.angles.size();
    if (n == 1) {
      h = b.values[0];
      dh = 0.0;
      return;
    }
    const double two_pi = 2.0 * std::numbers::pi;
    auto it = std::upper_bound(b.angles.begin(), b.angles.end(), angle);
    std::size_t hi = static_cast<std::size_t>(it - b.angles.begin()) % n;
    std::size_t lo = (hi + n - 1) % n;
    double a_lo = b.angles[lo], a_hi = b.angles[hi];
    if (a_hi <= a_lo) a_hi += two_pi;
    double a = angle;
    if (a < a_lo) a += two_pi;
    const double span = a_hi - a_lo;
    const double t = span > 0 ? (a - a_lo) / span : 0.0;
    h = (1.0 - t) * b.values[lo] + t * b.values[hi];
    dh = span > 0 ? (b.values[hi] - b.values[lo]) / span : 0.0;
  }

  static Eigen::VectorXd table_local_fit(const body::SupportTable& b, std::span<const double> u, double r) {
    const std::size_t count = b.values.size();
    const std::size_t k = std::min<std::size_t>(count, static_cast<std::size_t>(2 * b.dim + 1));
    std::vector<std::pair<double, std::size_t>> near;
    near.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      double dot = 0.0;
      for (int c = 0; c < b.dim; ++c) dot += b.directions[i * b.dim + c] * u[c];
      near.emplace_back(-dot / r, i);
    }
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(k), near.end());
    Eigen::MatrixXd A(static_cast<Eigen::Index>(k), b.dim);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t i = near[j].second;
      for (int c = 0; c < b.dim; ++c) A(static_cast<Eigen::Index>(j), c) = b.directions[i * b.dim + c];
      rhs[static_cast<Eigen::Index>(j)] = b.values[i];
    }
    return A.colPivHouseholderQr().solve(rhs);
  }

  // support points -----------------------------------------------------------

  static void support_point_impl(const body::Segment& b, std::span<const double> u, Eigen::VectorXd& out) {
    out[0] = u[0] > 0 ? b.beta : -b.alpha;
  }

  static void support_point_impl(const body::LqBall& b, std::span<const double> u, Eigen::VectorXd& out) {
    const auto n = static_cast<Eigen::Index>(u.size());
    if (b.q == 1.0) {
      Eigen::Index best = 0;
      for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(u[i]) > std::abs(u[best])) best = i;
      out.setZero();
      out[best] = u[best] >= 0 ? 1.0 : -1.0;
      return;
    }
    if (!std::isfinite(b.q)) {
      for (Eigen::Index i = 0; i < n; ++i) out[i] = u[i] > 0 ? 1.0 : (u[i] < 0 ? -1.0 : 0.0);
      return;
    }
    const double qc = b.q / (b.q - 1.0);
    const double h = support_impl(b, u);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(u[i]) / h;
      out[i] = (u[i] >= 0 ? 1.0 : -1.0) * std::pow(a, qc - 1.0);
    }
  }

  static void support_point_impl(const body::Polytope& b, std::span<const double> u, Eigen::VectorXd& out) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < b.vertices.size(); i += b.dim) {
      double s = 0.0;
      for (int k = 0; k < b.dim; ++k) s += b.vertices[i + k] * u[k];
      if (s > best) best = s, arg = i;
    }
    for (int k = 0; k < b.dim; ++k) out[k] = b.vertices[arg + k];
  }

  static void support_point_impl(const body::Ellipsoid& b, std::span<const double> u, Eigen::VectorXd& out) {
    Eigen::Map<const Eigen::VectorXd> v(u.data(), static_cast<Eigen::Index>(u.size()));
    const Eigen::VectorXd mv = b.matrix * v;
    out = mv / std::sqrt(v.dot(mv));
  }

  static void support_point_impl(const body::Scaled& b, std::span<const double> u, Eigen::VectorXd& out) {
    out = b.factor * b.base->support_point(u);
  }

  static void support_point_impl(const body::SupportTable& b, std::span<const double> u, Eigen::VectorXd& out) {
    double norm2 = 0.0;
    for (double c : u) norm2 += c * c;
    const double r = std::sqrt(norm2);
    if (b.dim == 1) {
      out[0] = u[0] > 0 ? table_value_1d(b, 1.0) : -table_value_1d(b, -1.0);
      return;
    }
    if (b.dim == 2) {
      const double a = std::atan2(u[1], u[0]);
      double h, dh;
      table_interp_2d(b, a, h, dh);
      const double c = std::cos(a), s = std::sin(a);
      out[0] = h * c - dh * s;
      out[1] = h * s + dh * c;
      return;
    }
    out = table_local_fit(b, u, r);
  }

  // gauges -------------------------------------------------------------------

  static double gauge_impl(const body::Segment& b, std::span<const double> x) {
    return x[0] >= 0 ? x[0] / b.beta : -x[0] / b.alpha;
  }

  static double gauge_impl(const body::LqBall& b, std::span<const double> x) {
    if (!std::isfinite(b.q)) {
      double s = 0.0;
      for (double c : x) s = std::max(s, std::abs(c));
      return s;
    }
    if (b.q == 2.0) {
      double s = 0.0;
      for (double c : x) s += c * c;
      return std::sqrt(s);
    }
    double mx = 0.0;
    for (double c : x) mx = std::max(mx, std::abs(c));
    if (mx == 0.0) return 0.0;
    double s = 0.0;
    for (double c : x) s += std::pow(std::abs(c) / mx, b.q);
    return mx * std::pow(s, 1.0 / b.q);
  }

  static double gauge_impl(const body::Polytope& b, std::span<const double> x) {
    require(b.dim <= 2, ErrorKind::unsupported_body, "polytope gauge is available for dim <= 2");
    double g = 0.0;
    for (std::size_t f = 0; f < b.facet_offsets.size(); ++f) {
      double s = 0.0;
      for (int k = 0; k < b.dim; ++k) s += b.facet_normals[f * b.dim + k] * x[k];
      g = std::max(g, s / b.facet_offsets[f]);
    }
    return g;
  }

  static double gauge_impl(const body::Ellipsoid& b, std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
    return std::sqrt(std::max(0.0, v.dot(b.inverse * v)));
  }

  static double gauge_impl(const body::Scaled& b, std::span<const double> x) { return b.base->gauge(x) / b.factor; }

  static double gauge_impl(const body::SupportTable& b, std::span<const double> x) {
    // Polarity: ||x||_K = sup_u <x, u> / h(u) over the sampled directions.
    double g = 0.0;
    for (std::size_t i = 0; i < b.values.size(); ++i) {
      double s = 0.0;
      for (int k = 0; k < b.dim; ++k) s += b.directions[i * b.dim + k] * x[k];
      g = std::max(g, s / b.values[i]);
    }
    return g;
  }

  Kind kind_;
  bool smooth_ = false;
};

/// vol_n(K) = (1/n) sum_i w_i ||theta_i||_K^{-n}.
inline double volume_from_gauge(const ConvexBody& body, const QuadratureRule& rule) {
  require(rule.dim() == body.dim(), ErrorKind::invalid_argument, "rule dimension does not match body dimension");
  require(body.origin_interior(), ErrorKind::unsupported_body, "volume_from_gauge requires the origin in the interior");
  const int n = body.dim();
  return integrate(rule, [&](std::span<const double> t) { return std::pow(body.gauge(t), -n); }) / n;
}

}  // namespace affine
