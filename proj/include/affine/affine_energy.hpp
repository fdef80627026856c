#pragma once

// The mth-order affine energy
//   E_{Q,p} f = d_{n,p}(Q) ( int_{S^{nm-1}} ||h_Q(theta^t grad f)||_{L^p}^{-nm} dtheta )^{-1/nm}
// and the bodies built from it.  A point theta in R^{nm} is stored as m
// consecutive columns theta_1..theta_m in R^n, so (theta^t xi)_j = <theta_j, xi>.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "affine/convex_body.hpp"
#include "affine/error.hpp"
#include "affine/grid_function.hpp"
#include "affine/sphere_quad.hpp"

namespace affine {

/// Fast evaluation of z -> h_Q(z) and a maximizing point of Q.
class SupportKernel {
 public:
  explicit SupportKernel(const ConvexBody& Q) : Q_(&Q), m_(Q.dim()) {
    double scale = 1.0;
    const ConvexBody* b = &Q;
    while (const auto* s = std::get_if<body::Scaled>(&b->kind())) {
      scale *= s->factor;
      b = s->base.get();
    }
    if (const auto* seg = std::get_if<body::Segment>(&b->kind())) {
      type_ = Type::segment;
      alpha_ = scale * seg->alpha;
      beta_ = scale * seg->beta;
    } else if (const auto* l = std::get_if<body::LqBall>(&b->kind()); l && l->q == 2.0) {
      type_ = Type::quadratic;
      A_ = scale * scale * Eigen::MatrixXd::Identity(m_, m_);
    } else if (const auto* e = std::get_if<body::Ellipsoid>(&b->kind())) {
      type_ = Type::quadratic;
      A_ = scale * scale * e->matrix;
    }
  }

  [[nodiscard]] int dim() const noexcept { return m_; }

  double value(const double* z) const {
    switch (type_) {
      case Type::segment: return z[0] > 0 ? beta_ * z[0] : -alpha_ * z[0];
      case Type::quadratic: return std::sqrt(std::max(0.0, quad(z)));
      default: return Q_->support_unchecked(std::span<const double>(z, static_cast<std::size_t>(m_)));
    }
  }

  /// Returns h_Q(z) and writes a support point (gradient of h_Q where smooth) into grad.
  double value_grad(const double* z, double* grad) const {
    switch (type_) {
      case Type::segment:
        if (z[0] > 0) {
          grad[0] = beta_;
          return beta_ * z[0];
        }
        grad[0] = z[0] < 0 ? -alpha_ : 0.0;
        return -alpha_ * z[0];
      case Type::quadratic: {
        const double h = std::sqrt(std::max(0.0, quad(z)));
        for (int i = 0; i < m_; ++i) {
          double s = 0.0;
          for (int j = 0; j < m_; ++j) s += A_(i, j) * z[j];
          grad[i] = h > 0 ? s / h : 0.0;
        }
        return h;
      }
      default: {
        const double h = Q_->support_unchecked(std::span<const double>(z, static_cast<std::size_t>(m_)));
        bool zero = true;
        for (int i = 0; i < m_; ++i) zero = zero && z[i] == 0.0;
        if (zero) {
          for (int i = 0; i < m_; ++i) grad[i] = 0.0;
        } else {
          Q_->support_point_unchecked(std::span<const double>(z, static_cast<std::size_t>(m_)),
                                      std::span<double>(grad, static_cast<std::size_t>(m_)));
        }
        return h;
      }
    }
  }

  /// A with h_Q(z)^2 = z^T A z when Q is an origin-symmetric ellipsoid (or segment).
  [[nodiscard]] std::optional<Eigen::MatrixXd> quadratic_form() const {
    if (type_ == Type::quadratic) return A_;
    if (type_ == Type::segment && alpha_ == beta_) return Eigen::MatrixXd::Constant(1, 1, alpha_ * alpha_);
    return std::nullopt;
  }

 private:
  enum class Type { segment, quadratic, generic };

  double quad(const double* z) const {
    double s = 0.0;
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) s += z[i] * A_(i, j) * z[j];
    return s;
  }

  const ConvexBody* Q_;
  int m_;
  Type type_ = Type::generic;
  double alpha_ = 0.0, beta_ = 0.0;
  Eigen::MatrixXd A_;
};

/// Star body in R^dim given by its gauge.
struct StarBodyGauge {
  int dim = 0;
  std::function<double(std::span<const double>)> gauge;
  std::string source;
};

class EnergyContext {
 public:
  EnergyContext(int n, ConvexBody Q, double p, QuadratureRule rule_nm, QuadratureRule rule_n, double eps = 0.0)
      : n_(n),
        Q_(std::make_shared<const ConvexBody>(std::move(Q))),
        p_(p),
        rule_nm_(std::move(rule_nm)),
        rule_n_(std::move(rule_n)),
        eps_(eps) {
    require(n >= 1, ErrorKind::invalid_argument, "n must be positive");
    require(p >= 1.0 && std::isfinite(p), ErrorKind::invalid_argument, "p must be a finite real >= 1");
    require(eps >= 0.0, ErrorKind::invalid_argument, "smoothing width must be nonnegative");
    require(rule_nm_.dim() == nm(), ErrorKind::invalid_argument, "rule_nm dimension must equal n*m");
    require(rule_n_.dim() == n_, ErrorKind::invalid_argument, "rule_n dimension must equal n");
    kernel_ = std::make_shared<const SupportKernel>(*Q_);
    if (p_ == 2.0 && eps_ == 0.0) {
      if (auto A = kernel_->quadratic_form()) build_quadratic(*A);
    }
    ball_gauges_.resize(rule_nm_.size());
    for (std::size_t i = 0; i < rule_nm_.size(); ++i) ball_gauges_[i] = ball_gauge(rule_nm_.node(i));
    double s = 0.0;
    for (std::size_t i = 0; i < rule_nm_.size(); ++i) {
      require(ball_gauges_[i] > 0 && std::isfinite(ball_gauges_[i]), ErrorKind::degenerate_input,
              "projection body of the ball has a nonpositive gauge at node " + std::to_string(i));
      s += rule_nm_.weight(i) * std::pow(ball_gauges_[i], -nm());
    }
    ball_volume_ = s / nm();
    d_ = std::pow(sphere_area(n_), 1.0 / p_) * std::pow(nm() * ball_volume_, 1.0 / nm());
  }

  /// Context with the default rules for dimensions n and n*m.
  static EnergyContext with_defaults(int n, const ConvexBody& Q, double p, double eps = 0.0) {
    return EnergyContext(n, Q, p, default_rule(n * Q.dim()), default_rule(n), eps);
  }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int m() const noexcept { return Q_->dim(); }
  [[nodiscard]] int nm() const noexcept { return n_ * Q_->dim(); }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double eps() const noexcept { return eps_; }
  [[nodiscard]] const ConvexBody& Q() const noexcept { return *Q_; }
  [[nodiscard]] const SupportKernel& kernel() const noexcept { return *kernel_; }
  [[nodiscard]] const QuadratureRule& rule_nm() const noexcept { return rule_nm_; }
  [[nodiscard]] const QuadratureRule& rule_n() const noexcept { return rule_n_; }
  /// vol_{nm}(Pi°_{Q,p} B) over rule_nm.
  [[nodiscard]] double ball_volume() const noexcept { return ball_volume_; }
  /// d_{n,p}(Q) = (n omega_n)^{1/p} (nm vol(Pi° B))^{1/nm}.
  [[nodiscard]] double d() const noexcept { return d_; }
  [[nodiscard]] const std::vector<double>& ball_gauges() const noexcept { return ball_gauges_; }
  [[nodiscard]] bool quadratic() const noexcept { return !P_.empty(); }
  /// theta_i A theta_i^T (n x n) per rule node, available on the quadratic path.
  [[nodiscard]] const std::vector<Eigen::MatrixXd>& quadratic_blocks() const noexcept { return P_; }

  /// (int_{S^{n-1}} h_Q(theta^t v)^p dv)^{1/p}.
  [[nodiscard]] double ball_gauge(std::span<const double> theta) const {
    const int m = this->m();
    std::vector<double> z(m);
    double s = 0.0;
    for (std::size_t k = 0; k < rule_n_.size(); ++k) {
      const auto v = rule_n_.node(k);
      for (int j = 0; j < m; ++j) {
        double t = 0.0;
        for (int a = 0; a < n_; ++a) t += theta[j * n_ + a] * v[a];
        z[j] = t;
      }
      s += rule_n_.weight(k) * std::pow(kernel_->value(z.data()), p_);
    }
    return std::pow(s, 1.0 / p_);
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    os << "n=" << n_ << " m=" << m() << " p=" << p_ << " Q=" << Q_->describe() << " rule_nm=" << rule_nm_.describe()
       << " rule_n=" << rule_n_.describe();
    if (eps_ > 0) os << " eps=" << eps_;
    return os.str();
  }

 private:
  void build_quadratic(const Eigen::MatrixXd& A) {
    const int m = this->m();
    P_.reserve(rule_nm_.size());
    for (std::size_t i = 0; i < rule_nm_.size(); ++i) {
      Eigen::Map<const Eigen::MatrixXd> theta(rule_nm_.node(i).data(), n_, m);
      P_.push_back(theta * A * theta.transpose());
    }
  }

  int n_;
  std::shared_ptr<const ConvexBody> Q_;
  double p_;
  QuadratureRule rule_nm_;
  QuadratureRule rule_n_;
  double eps_;
  std::shared_ptr<const SupportKernel> kernel_;
  std::vector<Eigen::MatrixXd> P_;
  std::vector<double> ball_gauges_;
  double ball_volume_ = 0.0;
  double d_ = 0.0;
};

namespace detail {

inline void apply_theta_t(std::span<const double> theta, const double* g, int n, int m, double* z) {
  for (int j = 0; j < m; ++j) {
    double t = 0.0;
    for (int a = 0; a < n; ++a) t += theta[j * n + a] * g[a];
    z[j] = t;
  }
}

inline double smoothed(double h, double eps) { return eps > 0 ? std::sqrt(h * h + eps * eps) : h; }

inline double ipow(double x, double p) {
  if (p == 2.0) return x * x;
  if (p == 1.0) return x;
  return std::pow(x, p);
}

/// h^n sum_c g_c g_c^T.
inline Eigen::MatrixXd gradient_moments(const CellField& g) {
  const int n = g.mask->dim();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double* v = g.values.data() + c * n;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) M(a, b) += v[a] * v[b];
  }
  return M * g.mask->cell_volume();
}

}  // namespace detail

/// ||theta||_{Pi°_{Q,p} f} = (h^n sum_cells h_Q(theta^t g_c)^p)^{1/p} for a cell gradient field.
inline double projection_gauge(const EnergyContext& ctx, const CellField& g, std::span<const double> theta) {
  const int n = ctx.n(), m = ctx.m();
  require(g.mask->dim() == n, ErrorKind::invalid_argument, "field dimension does not match context n");
  require(static_cast<int>(theta.size()) == n * m, ErrorKind::invalid_argument, "theta must lie in R^{nm}");
  std::vector<double> z(m);
  double s = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    detail::apply_theta_t(theta, g.values.data() + c * n, n, m, z.data());
    s += detail::ipow(detail::smoothed(ctx.kernel().value(z.data()), ctx.eps()), ctx.p());
  }
  return std::pow(g.mask->cell_volume() * s, 1.0 / ctx.p());
}

inline double projection_gauge(const EnergyContext& ctx, const GridFunction& f, std::span<const double> theta) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "projection gauge of the zero function");
  return projection_gauge(ctx, gradient(f), theta);
}

/// Gauges of Pi°_{Q,p} f at every rule_nm node.
inline std::vector<double> projection_gauges(const EnergyContext& ctx, const CellField& g) {
  const auto& rule = ctx.rule_nm();
  std::vector<double> G(rule.size());
  if (ctx.quadratic()) {
    const Eigen::MatrixXd M = detail::gradient_moments(g);
    for (std::size_t i = 0; i < rule.size(); ++i)
      G[i] = std::sqrt(std::max(0.0, ctx.quadratic_blocks()[i].cwiseProduct(M).sum()));
    return G;
  }
  const auto count = static_cast<long>(rule.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < count; ++i) G[i] = projection_gauge(ctx, g, rule.node(static_cast<std::size_t>(i)));
  return G;
}

inline std::vector<double> projection_gauges(const EnergyContext& ctx, const GridFunction& f) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "projection body of the zero function");
  return projection_gauges(ctx, gradient(f));
}

inline StarBodyGauge function_projection_body(const EnergyContext& ctx, const GridFunction& f) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "projection body of the zero function");
  auto g = std::make_shared<const CellField>(gradient(f));
  return {ctx.nm(), [&ctx, g](std::span<const double> t) { return projection_gauge(ctx, *g, t); }, "function"};
}

inline StarBodyGauge ball_projection_body(const EnergyContext& ctx) {
  return {ctx.nm(), [&ctx](std::span<const double> t) { return ctx.ball_gauge(t); }, "ball"};
}

/// Pi°_{Q,p} K for K the Euclidean ball (via rule_n) or a planar polytope (exact facet sum):
/// (int h_Q(theta^t v)^p h_K(v)^{1-p} dS_K(v))^{1/p}.
inline double body_projection_gauge(const EnergyContext& ctx, const ConvexBody& K, std::span<const double> theta) {
  const int n = ctx.n(), m = ctx.m();
  require(K.dim() == n, ErrorKind::invalid_argument, "body dimension does not match context n");
  require(static_cast<int>(theta.size()) == n * m, ErrorKind::invalid_argument, "theta must lie in R^{nm}");
  if (const auto* b = std::get_if<body::LqBall>(&K.kind()); b && b->q == 2.0) return ctx.ball_gauge(theta);
  const auto* poly = std::get_if<body::Polytope>(&K.kind());
  require(poly != nullptr && n == 2, ErrorKind::unsupported_body,
          "body_projection_gauge supports the Euclidean ball and planar polytopes");
  if (ctx.p() > 1.0)
    require(K.origin_interior(), ErrorKind::unsupported_body, "p > 1 requires the origin in the interior of K");
  std::vector<double> z(m);
  double s = 0.0;
  const std::size_t nv = poly->vertices.size() / 2;
  for (std::size_t k = 0; k < poly->facet_offsets.size(); ++k) {
    const double a0 = poly->facet_normals[2 * k], a1 = poly->facet_normals[2 * k + 1];
    const double b = poly->facet_offsets[k];
    // Facet length: extent of the vertices lying on the supporting line.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t v = 0; v < nv; ++v) {
      const double x = poly->vertices[2 * v], y = poly->vertices[2 * v + 1];
      if (std::abs(a0 * x + a1 * y - b) <= 1e-12 * (1 + std::abs(b))) {
        const double t = -a1 * x + a0 * y;
        lo = std::min(lo, t), hi = std::max(hi, t);
      }
    }
    const double len = hi - lo;
    const double normal[2] = {a0, a1};
    detail::apply_theta_t(theta, normal, n, m, z.data());
    s += std::pow(ctx.kernel().value(z.data()), ctx.p()) * len * std::pow(b, 1.0 - ctx.p());
  }
  return std::pow(s, 1.0 / ctx.p());
}

/// vol_{nm} = (1/nm) sum_i w_i G_i^{-nm}.
inline double polar_projection_volume(std::span<const double> G, const QuadratureRule& rule) {
  require(G.size() == rule.size(), ErrorKind::invalid_argument, "gauge count does not match rule");
  const int d = rule.dim();
  double s = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    require(G[i] > 0 && std::isfinite(G[i]), ErrorKind::degenerate_input,
            "nonpositive gauge at node " + std::to_string(i));
    s += rule.weight(i) * std::pow(G[i], -d);
  }
  return s / d;
}

inline double polar_projection_volume(const StarBodyGauge& L, const QuadratureRule& rule) {
  require(L.dim == rule.dim(), ErrorKind::invalid_argument, "rule dimension does not match star body");
  std::vector<double> G(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) G[i] = L.gauge(rule.node(i));
  return polar_projection_volume(G, rule);
}

inline double d_constant(const EnergyContext& ctx) { return ctx.d(); }

struct EnergyRoutes {
  double integral_route;  // d (int G^{-nm})^{-1/nm}
  double volume_route;    // d (nm)^{-1/nm} vol^{-1/nm}
  double volume;          // vol_{nm}(Pi°_{Q,p} f)
};

inline EnergyRoutes energy_routes(const EnergyContext& ctx, std::span<const double> G) {
  const auto& rule = ctx.rule_nm();
  const int nm = ctx.nm();
  double s = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    require(G[i] > 0 && std::isfinite(G[i]), ErrorKind::degenerate_input,
            "nonpositive projection gauge at node " + std::to_string(i));
    s += rule.weight(i) * std::pow(G[i], -nm);
  }
  const double vol = polar_projection_volume(G, rule);
  return {ctx.d() * std::pow(s, -1.0 / nm), ctx.d() * std::pow(nm, -1.0 / nm) * std::pow(vol, -1.0 / nm), vol};
}

inline EnergyRoutes energy_routes(const EnergyContext& ctx, const GridFunction& f) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "energy of the zero function");
  return energy_routes(ctx, projection_gauges(ctx, f));
}

inline double energy(const EnergyContext& ctx, const GridFunction& f) { return energy_routes(ctx, f).integral_route; }

/// ||grad f||_{L^p} on the same cells.
inline double gradient_norm(const GridFunction& f, double p) { return field_lp_norm(gradient(f), p); }

/// h_{Gamma_{Q,p} L}(v) for L given by gauges G at the rule_nm nodes.
inline double centroid_support(const EnergyContext& ctx, std::span<const double> G, std::span<const double> v) {
  const int n = ctx.n(), m = ctx.m(), nm = ctx.nm();
  const double p = ctx.p();
  require(static_cast<int>(v.size()) == n, ErrorKind::invalid_argument, "direction must lie in R^n");
  const auto& rule = ctx.rule_nm();
  const double vol = polar_projection_volume(G, rule);
  std::vector<double> z(m);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    detail::apply_theta_t(rule.node(i), v.data(), n, m, z.data());
    s += rule.weight(i) * std::pow(G[i], -nm - p) * std::pow(ctx.kernel().value(z.data()), p);
  }
  return std::pow(s / ((nm + p) * vol), 1.0 / p);
}

inline double centroid_support(const EnergyContext& ctx, const StarBodyGauge& L, std::span<const double> v) {
  std::vector<double> G(ctx.rule_nm().size());
  for (std::size_t i = 0; i < G.size(); ++i) G[i] = L.gauge(ctx.rule_nm().node(i));
  return centroid_support(ctx, G, v);
}

/// h_{K_{Q,p,f}}(z) = (sum_i w_i G_i^{-nm-p} h_Q(theta_i^t z)^p)^{1/p}.
inline double K_body_support(const EnergyContext& ctx, std::span<const double> G, std::span<const double> z) {
  const int n = ctx.n(), m = ctx.m(), nm = ctx.nm();
  const double p = ctx.p();
  require(static_cast<int>(z.size()) == n, ErrorKind::invalid_argument, "direction must lie in R^n");
  const auto& rule = ctx.rule_nm();
  std::vector<double> y(m);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    detail::apply_theta_t(rule.node(i), z.data(), n, m, y.data());
    s += rule.weight(i) * std::pow(G[i], -nm - p) * std::pow(ctx.kernel().value(y.data()), p);
  }
  return std::pow(s, 1.0 / p);
}

/// Dilation factor L = c K with c = d^{-nm/p} E^{nm/p + 1}.
inline double L_body_factor(const EnergyContext& ctx, std::span<const double> G) {
  const double E = energy_routes(ctx, G).integral_route;
  const double r = static_cast<double>(ctx.nm()) / ctx.p();
  return std::pow(ctx.d(), -r) * std::pow(E, r + 1.0);
}

/// The same factor written through volumes: (m/omega_n)^{-1/p} vol_B^{1/nm} / vol_f^{1/p + 1/nm}.
inline double L_body_factor_volume_form(const EnergyContext& ctx, std::span<const double> G) {
  const double vol = polar_projection_volume(G, ctx.rule_nm());
  const double p = ctx.p(), nm = ctx.nm();
  return std::pow(ctx.m() / ball_volume(ctx.n()), -1.0 / p) * std::pow(ctx.ball_volume(), 1.0 / nm) /
         std::pow(vol, 1.0 / p + 1.0 / nm);
}

inline double L_body_support(const EnergyContext& ctx, std::span<const double> G, std::span<const double> z) {
  return L_body_factor(ctx, G) * K_body_support(ctx, G, z);
}

inline double L_body_support(const EnergyContext& ctx, const GridFunction& f, std::span<const double> z) {
  const auto G = projection_gauges(ctx, f);
  return L_body_support(ctx, G, z);
}

inline double K_body_support(const EnergyContext& ctx, const GridFunction& f, std::span<const double> z) {
  const auto G = projection_gauges(ctx, f);
  return K_body_support(ctx, G, z);
}

/// Per-cell w_c = h_L(g_c)^{p-1} grad h_L(g_c) with L = L_{Q,p,f} frozen at the field g.
/// The derivative of E^p/p with respect to g_c is h^n w_c, and sum_c h^n <g_c, w_c> = E^p.
inline CellField energy_flux(const EnergyContext& ctx, const CellField& g, std::span<const double> G) {
  const int n = ctx.n(), m = ctx.m(), nm = ctx.nm();
  const double p = ctx.p();
  const auto& rule = ctx.rule_nm();
  const double E = energy_routes(ctx, G).integral_route;
  const double scale = std::pow(ctx.d(), -nm) * std::pow(E, p + nm);
  std::vector<double> coef(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) coef[i] = scale * rule.weight(i) * std::pow(G[i], -nm - p);
  CellField w{g.mask, std::vector<double>(g.values.size(), 0.0)};
  if (ctx.quadratic()) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < rule.size(); ++i) S += coef[i] * ctx.quadratic_blocks()[i];
    for (std::size_t c = 0; c < g.size(); ++c) {
      Eigen::Map<const Eigen::VectorXd> gc(g.values.data() + c * n, n);
      Eigen::Map<Eigen::VectorXd>(w.values.data() + c * n, n) = S * gc;
    }
    return w;
  }
  const auto cells = static_cast<long>(g.size());
  const double eps = ctx.eps();
#pragma omp parallel for schedule(static)
  for (long c = 0; c < cells; ++c) {
    std::vector<double> z(m), dh(m);
    const double* gc = g.values.data() + c * n;
    double* wc = w.values.data() + c * n;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const auto theta = rule.node(i);
      detail::apply_theta_t(theta, gc, n, m, z.data());
      const double h = ctx.kernel().value_grad(z.data(), dh.data());
      const double hs = detail::smoothed(h, eps);
      if (hs == 0.0) continue;
      // d/dg (hs^p / p) = hs^{p-2} h theta dh
      const double a = coef[i] * std::pow(hs, p - 2.0) * h;
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < n; ++k) wc[k] += a * theta[j * n + k] * dh[j];
    }
  }
  return w;
}

inline CellField energy_flux(const EnergyContext& ctx, const GridFunction& f) {
  const auto g = gradient(f);
  const auto G = projection_gauges(ctx, g);
  return energy_flux(ctx, g, G);
}

/// Area of the planar convex body with support h sampled at the rule_n directions,
/// as the circumscribed (tangent) polygon {x : <x, u_k> <= h(u_k)}.
inline double tangent_polygon_area(const QuadratureRule& rule_n, std::span<const double> h) {
  require(rule_n.dim() == 2, ErrorKind::unsupported, "tangent polygon area is planar");
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t k = 0; k < rule_n.size(); ++k)
    order.emplace_back(std::atan2(rule_n.node(k)[1], rule_n.node(k)[0]), k);
  std::sort(order.begin(), order.end());
  std::vector<std::array<double, 2>> pts;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto i = order[a].second, j = order[(a + 1) % order.size()].second;
    const auto u = rule_n.node(i), v = rule_n.node(j);
    const double det = u[0] * v[1] - u[1] * v[0];
    require(std::abs(det) > 1e-14, ErrorKind::numeric_failure, "degenerate tangent polygon");
    pts.push_back({(h[i] * v[1] - h[j] * u[1]) / det, (u[0] * h[j] - v[0] * h[i]) / det});
  }
  double area = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    const auto& p = pts[a];
    const auto& q = pts[(a + 1) % pts.size()];
    area += p[0] * q[1] - q[0] * p[1];
  }
  return area / 2.0;
}

/// vol_n(Gamma_{Q,p} L) / vol_{nm}(L)^{1/m}, scale invariant; planar only.
inline double busemann_petty_ratio(const EnergyContext& ctx, std::span<const double> G) {
  require(ctx.n() == 2, ErrorKind::unsupported, "Busemann-Petty ratio is available for n = 2");
  const auto& rn = ctx.rule_n();
  std::vector<double> h(rn.size());
  for (std::size_t k = 0; k < rn.size(); ++k) h[k] = centroid_support(ctx, G, rn.node(k));
  const double area = tangent_polygon_area(rn, h);
  return area / std::pow(polar_projection_volume(G, ctx.rule_nm()), 1.0 / ctx.m());
}

}  // namespace affine
