#pragma once

// Scalar fields on uniform grids with a domain mask, representing functions in
// W^{1,p}_0(Omega) by zero extension.  Nodes sit at integer multiples of the
// spacing h; every mask is padded by at least one outside node per side.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "affine/error.hpp"
#include "affine/sphere_quad.hpp"

namespace affine {

namespace domain {

struct Ball {
  std::vector<double> center;
  double radius;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// {x : (x - c)^T M^{-1} (x - c) < 1}
struct Ellipsoid {
  std::vector<double> center;
  Eigen::MatrixXd matrix;
};

/// Simple planar polygon, vertices in order (either orientation).
struct Polygon {
  std::vector<std::array<double, 2>> vertices;
};

/// Mask read from a file or assembled node by node.
struct Explicit {
  std::string source;
};

}  // namespace domain

using DomainDescriptor = std::variant<domain::Ball, domain::Box, domain::Ellipsoid, domain::Polygon, domain::Explicit>;

inline int descriptor_dim(const DomainDescriptor& d) {
  return std::visit(
      [](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, domain::Ball>) return static_cast<int>(x.center.size());
        else if constexpr (std::is_same_v<T, domain::Box>) return static_cast<int>(x.lo.size());
        else if constexpr (std::is_same_v<T, domain::Ellipsoid>) return static_cast<int>(x.center.size());
        else if constexpr (std::is_same_v<T, domain::Polygon>) return 2;
        else return 0;
      },
      d);
}

inline std::string describe(const DomainDescriptor& d) {
  std::ostringstream os;
  os.precision(12);
  std::visit(
      [&os](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        auto vec = [&os](const std::vector<double>& v) {
          os << "[";
          for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
          os << "]";
        };
        if constexpr (std::is_same_v<T, domain::Ball>) {
          os << "ball(center=";
          vec(x.center);
          os << ",radius=" << x.radius << ")";
        } else if constexpr (std::is_same_v<T, domain::Box>) {
          os << "box(lo=";
          vec(x.lo);
          os << ",hi=";
          vec(x.hi);
          os << ")";
        } else if constexpr (std::is_same_v<T, domain::Ellipsoid>) {
          os << "ellipsoid(center=";
          vec(x.center);
          os << ",matrix=";
          vec(std::vector<double>(x.matrix.data(), x.matrix.data() + x.matrix.size()));
          os << ")";
        } else if constexpr (std::is_same_v<T, domain::Polygon>) {
          os << "polygon(" << x.vertices.size() << " vertices)";
        } else {
          os << "mask(" << x.source << ")";
        }
      },
      d);
  return os.str();
}

/// Exact measure of a descriptor (closed forms; shoelace for polygons).
inline double descriptor_measure(const DomainDescriptor& d) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, domain::Ball>) {
          const int n = static_cast<int>(x.center.size());
          return ball_volume(n) * std::pow(x.radius, n);
        } else if constexpr (std::is_same_v<T, domain::Box>) {
          double v = 1.0;
          for (std::size_t i = 0; i < x.lo.size(); ++i) v *= x.hi[i] - x.lo[i];
          return v;
        } else if constexpr (std::is_same_v<T, domain::Ellipsoid>) {
          const int n = static_cast<int>(x.center.size());
          return ball_volume(n) * std::sqrt(x.matrix.determinant());
        } else if constexpr (std::is_same_v<T, domain::Polygon>) {
          double a = 0.0;
          const auto& v = x.vertices;
          for (std::size_t i = 0; i < v.size(); ++i) {
            const auto& p = v[i];
            const auto& q = v[(i + 1) % v.size()];
            a += p[0] * q[1] - q[0] * p[1];
          }
          return std::abs(a) / 2.0;
        } else {
          fail(ErrorKind::unsupported, "explicit masks have no closed-form measure");
        }
      },
      d);
}

/// Descriptor of T^{-1}(Omega), the support of x -> f(Tx) when f lives on Omega.
inline DomainDescriptor pullback_descriptor(const DomainDescriptor& d, const Eigen::MatrixXd& T) {
  const Eigen::MatrixXd Tinv = T.inverse();
  auto map_point = [&Tinv](const std::vector<double>& c) {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    Eigen::VectorXd r = Tinv * v;
    return std::vector<double>(r.data(), r.data() + r.size());
  };
  return std::visit(
      [&](const auto& x) -> DomainDescriptor {
        using T_ = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T_, domain::Ball>) {
          const auto n = static_cast<Eigen::Index>(x.center.size());
          Eigen::MatrixXd M = x.radius * x.radius * Eigen::MatrixXd::Identity(n, n);
          return domain::Ellipsoid{map_point(x.center), Tinv * M * Tinv.transpose()};
        } else if constexpr (std::is_same_v<T_, domain::Ellipsoid>) {
          return domain::Ellipsoid{map_point(x.center), Tinv * x.matrix * Tinv.transpose()};
        } else if constexpr (std::is_same_v<T_, domain::Polygon>) {
          domain::Polygon out;
          for (const auto& v : x.vertices) {
            const auto m = map_point({v[0], v[1]});
            out.vertices.push_back({m[0], m[1]});
          }
          return out;
        } else if constexpr (std::is_same_v<T_, domain::Box>) {
          require(x.lo.size() == 2, ErrorKind::unsupported, "box pullback is available in the plane");
          domain::Polygon out;
          const std::array<std::array<double, 2>, 4> corners{
              {{x.lo[0], x.lo[1]}, {x.hi[0], x.lo[1]}, {x.hi[0], x.hi[1]}, {x.lo[0], x.hi[1]}}};
          for (const auto& v : corners) {
            const auto m = map_point({v[0], v[1]});
            out.vertices.push_back({m[0], m[1]});
          }
          return out;
        } else {
          fail(ErrorKind::unsupported, "cannot pull back an explicit mask descriptor");
        }
      },
      d);
}

namespace detail {

inline bool polygon_contains(const domain::Polygon& poly, double x, double y, double tol) {
  const auto& v = poly.vertices;
  bool in = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    const double xi = v[i][0], yi = v[i][1], xj = v[j][0], yj = v[j][1];
    // distance to edge
    const double ex = xi - xj, ey = yi - yj;
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0 ? ((x - xj) * ex + (y - yj) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = x - (xj + t * ex), dy = y - (yj + t * ey);
    if (dx * dx + dy * dy <= tol * tol) return false;
    if (((yi > y) != (yj > y)) && (x < (xj - xi) * (y - yi) / (yj - yi) + xi)) in = !in;
  }
  return in;
}

}  // namespace detail

class DomainMask {
 public:
  DomainMask() = default;

  /// Builds the mask of a descriptor on the lattice hZ^n; nodes strictly inside are flagged.
  static DomainMask from_descriptor(const DomainDescriptor& desc, double h) {
    require(h > 0, ErrorKind::invalid_argument, "grid spacing must be positive");
    const int dim = descriptor_dim(desc);
    require(dim == 2 || dim == 3, ErrorKind::invalid_argument, "grid domains must be 2- or 3-dimensional");
    std::vector<double> lo(dim), hi(dim);
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, domain::Ball>) {
            require(x.radius > 0, ErrorKind::invalid_argument, "ball radius must be positive");
            for (int k = 0; k < dim; ++k) lo[k] = x.center[k] - x.radius, hi[k] = x.center[k] + x.radius;
          } else if constexpr (std::is_same_v<T, domain::Box>) {
            require(static_cast<int>(x.hi.size()) == dim, ErrorKind::invalid_argument, "box corner dimension mismatch");
            for (int k = 0; k < dim; ++k) {
              require(x.lo[k] < x.hi[k], ErrorKind::invalid_argument, "box must have lo < hi");
              lo[k] = x.lo[k], hi[k] = x.hi[k];
            }
          } else if constexpr (std::is_same_v<T, domain::Ellipsoid>) {
            require(x.matrix.rows() == dim && x.matrix.cols() == dim, ErrorKind::invalid_argument,
                    "ellipsoid matrix dimension mismatch");
            Eigen::LLT<Eigen::MatrixXd> llt(x.matrix);
            require(llt.info() == Eigen::Success, ErrorKind::invalid_argument, "ellipsoid matrix must be SPD");
            for (int k = 0; k < dim; ++k) {
              const double e = std::sqrt(x.matrix(k, k));
              lo[k] = x.center[k] - e, hi[k] = x.center[k] + e;
            }
          } else if constexpr (std::is_same_v<T, domain::Polygon>) {
            require(x.vertices.size() >= 3, ErrorKind::invalid_argument, "polygon domain needs >= 3 vertices");
            lo = {x.vertices[0][0], x.vertices[0][1]};
            hi = lo;
            for (const auto& v : x.vertices)
              for (int k = 0; k < 2; ++k) lo[k] = std::min(lo[k], v[k]), hi[k] = std::max(hi[k], v[k]);
          } else {
            fail(ErrorKind::invalid_argument, "explicit masks are built with from_nodes");
          }
        },
        desc);

    DomainMask m;
    m.dim_ = dim;
    m.h_ = h;
    m.descriptor_ = desc;
    for (int k = 0; k < 3; ++k) m.offset_[k] = 0, m.shape_[k] = 1;
    for (int k = 0; k < dim; ++k) {
      const auto first = static_cast<long>(std::floor(lo[k] / h + 1e-9)) - 1;
      const auto last = static_cast<long>(std::ceil(hi[k] / h - 1e-9)) + 1;
      m.offset_[k] = first;
      m.shape_[k] = static_cast<int>(last - first + 1);
    }
    m.init_strides();
    m.inside_.assign(m.node_count(), 0);
    const double tol = 1e-9 * h;
    std::array<double, 3> x{};
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      m.coords(i, x);
      m.inside_[i] = std::visit(
          [&](const auto& d) -> std::uint8_t {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, domain::Ball>) {
              double r2 = 0.0;
              for (int k = 0; k < dim; ++k) r2 += (x[k] - d.center[k]) * (x[k] - d.center[k]);
              return std::sqrt(r2) < d.radius - tol;
            } else if constexpr (std::is_same_v<T, domain::Box>) {
              for (int k = 0; k < dim; ++k)
                if (!(x[k] > d.lo[k] + tol && x[k] < d.hi[k] - tol)) return 0;
              return 1;
            } else if constexpr (std::is_same_v<T, domain::Ellipsoid>) {
              Eigen::VectorXd v(dim);
              for (int k = 0; k < dim; ++k) v[k] = x[k] - d.center[k];
              const double q = v.dot(d.matrix.ldlt().solve(v));
              return q < 1.0 - 1e-12;
            } else if constexpr (std::is_same_v<T, domain::Polygon>) {
              return detail::polygon_contains(d, x[0], x[1], tol);
            } else {
              return 0;
            }
          },
          desc);
    }
    m.finalize();
    return m;
  }

  /// Mask from explicit lattice data: node (i,j[,k]) sits at ((offset + i) h, ...).
  static DomainMask from_nodes(int dim, double h, std::array<long, 3> offset, std::array<int, 3> shape,
                               std::vector<std::uint8_t> inside, DomainDescriptor desc = domain::Explicit{"nodes"}) {
    require(dim == 2 || dim == 3, ErrorKind::invalid_argument, "grid domains must be 2- or 3-dimensional");
    require(h > 0, ErrorKind::invalid_argument, "grid spacing must be positive");
    DomainMask m;
    m.dim_ = dim;
    m.h_ = h;
    m.offset_ = offset;
    m.shape_ = shape;
    for (int k = dim; k < 3; ++k) m.shape_[k] = 1, m.offset_[k] = 0;
    m.descriptor_ = std::move(desc);
    m.init_strides();
    require(inside.size() == m.node_count(), ErrorKind::invalid_argument, "mask size does not match shape");
    m.inside_ = std::move(inside);
    // Enforce one layer of outside padding so forward differences stay in range.
    for (std::size_t i = 0; i < m.node_count(); ++i) {
      const auto idx = m.unravel(i);
      for (int k = 0; k < dim; ++k)
        if (idx[k] == 0 || idx[k] == m.shape_[k] - 1)
          require(!m.inside_[i], ErrorKind::invalid_argument, "mask must be padded by an outside layer");
    }
    m.finalize();
    return m;
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] double h() const noexcept { return h_; }
  [[nodiscard]] double cell_volume() const noexcept { return std::pow(h_, dim_); }
  [[nodiscard]] const std::array<int, 3>& shape() const noexcept { return shape_; }
  [[nodiscard]] const std::array<long, 3>& offset() const noexcept { return offset_; }
  [[nodiscard]] const std::array<std::size_t, 3>& strides() const noexcept { return stride_; }
  [[nodiscard]] std::size_t node_count() const noexcept {
    return static_cast<std::size_t>(shape_[0]) * shape_[1] * shape_[2];
  }
  [[nodiscard]] bool inside(std::size_t i) const { return inside_[i] != 0; }
  [[nodiscard]] const std::vector<std::uint8_t>& inside_flags() const noexcept { return inside_; }
  [[nodiscard]] const std::vector<std::size_t>& inside_nodes() const noexcept { return inside_nodes_; }
  [[nodiscard]] std::size_t inside_count() const noexcept { return inside_nodes_.size(); }
  /// Lower-corner node indices of cells whose forward-difference stencil touches the domain.
  [[nodiscard]] const std::vector<std::size_t>& active_cells() const noexcept { return cells_; }
  [[nodiscard]] double measure() const { return cell_volume() * static_cast<double>(inside_count()); }
  [[nodiscard]] const DomainDescriptor& descriptor() const noexcept { return descriptor_; }

  [[nodiscard]] std::array<int, 3> unravel(std::size_t i) const {
    return {static_cast<int>(i % shape_[0]), static_cast<int>((i / shape_[0]) % shape_[1]),
            static_cast<int>(i / (static_cast<std::size_t>(shape_[0]) * shape_[1]))};
  }

  [[nodiscard]] std::size_t index(int ix, int iy, int iz = 0) const {
    return static_cast<std::size_t>(ix) + stride_[1] * iy + stride_[2] * iz;
  }

  void coords(std::size_t i, std::array<double, 3>& x) const {
    const auto idx = unravel(i);
    for (int k = 0; k < 3; ++k) x[k] = static_cast<double>(offset_[k] + idx[k]) * h_;
  }

  [[nodiscard]] std::array<double, 3> coords(std::size_t i) const {
    std::array<double, 3> x{};
    coords(i, x);
    return x;
  }

  [[nodiscard]] std::string describe() const {
    std::ostringstream os;
    os.precision(12);
    os << affine::describe(descriptor_) << " h=" << h_ << " shape=" << shape_[0] << "x" << shape_[1];
    if (dim_ == 3) os << "x" << shape_[2];
    os << " inside=" << inside_count();
    return os.str();
  }

 private:
  void init_strides() {
    stride_ = {1, static_cast<std::size_t>(shape_[0]), static_cast<std::size_t>(shape_[0]) * shape_[1]};
  }

  void finalize() {
    inside_nodes_.clear();
    for (std::size_t i = 0; i < inside_.size(); ++i)
      if (inside_[i]) inside_nodes_.push_back(i);
    require(!inside_nodes_.empty(), ErrorKind::invalid_argument, "domain mask has no interior node");
    std::vector<std::uint8_t> active(node_count(), 0);
    for (std::size_t i : inside_nodes_) {
      active[i] = 1;
      for (int k = 0; k < dim_; ++k) active[i - stride_[k]] = 1;
    }
    cells_.clear();
    for (std::size_t i = 0; i < active.size(); ++i)
      if (active[i]) cells_.push_back(i);
  }

  int dim_ = 2;
  double h_ = 1.0;
  std::array<long, 3> offset_{};
  std::array<int, 3> shape_{1, 1, 1};
  std::array<std::size_t, 3> stride_{1, 1, 1};
  std::vector<std::uint8_t> inside_;
  std::vector<std::size_t> inside_nodes_;
  std::vector<std::size_t> cells_;
  DomainDescriptor descriptor_ = domain::Explicit{""};
};

using MaskPtr = std::shared_ptr<const DomainMask>;

inline MaskPtr make_mask(const DomainDescriptor& desc, double h) {
  return std::make_shared<const DomainMask>(DomainMask::from_descriptor(desc, h));
}

/// Per-cell vector field (forward-difference gradients), dim values per active cell.
struct CellField {
  MaskPtr mask;
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return mask->active_cells().size(); }
  [[nodiscard]] std::span<const double> at(std::size_t c) const {
    return {values.data() + c * static_cast<std::size_t>(mask->dim()), static_cast<std::size_t>(mask->dim())};
  }
};

class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(MaskPtr mask) : mask_(std::move(mask)), values_(mask_->node_count(), 0.0) {}
  GridFunction(MaskPtr mask, std::vector<double> values) : mask_(std::move(mask)), values_(std::move(values)) {
    require(values_.size() == mask_->node_count(), ErrorKind::invalid_argument, "value count does not match mask");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      require(std::isfinite(values_[i]), ErrorKind::numeric_failure, "non-finite grid value");
      if (!mask_->inside(i)) values_[i] = 0.0;
    }
  }

  [[nodiscard]] const DomainMask& mask() const { return *mask_; }
  [[nodiscard]] const MaskPtr& mask_ptr() const { return mask_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::vector<double>& mutable_values() noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
  }

  [[nodiscard]] double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  GridFunction& scale(double a) {
    for (double& v : values_) v *= a;
    return *this;
  }

  [[nodiscard]] GridFunction scaled(double a) const {
    GridFunction g = *this;
    g.scale(a);
    return g;
  }

  /// Zero every value outside the mask.
  void project() {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (!mask_->inside(i)) values_[i] = 0.0;
  }

 private:
  MaskPtr mask_;
  std::vector<double> values_;
};

/// Samples fn at inside nodes; zero elsewhere.
template <class Fn>
GridFunction discretize(const MaskPtr& mask, Fn&& fn) {
  GridFunction f(mask);
  auto& v = f.mutable_values();
  std::array<double, 3> x{};
  for (std::size_t i : mask->inside_nodes()) {
    mask->coords(i, x);
    const double y = fn(std::span<const double>(x.data(), static_cast<std::size_t>(mask->dim())));
    if (!std::isfinite(y)) fail(ErrorKind::numeric_failure, "non-finite sample at node " + std::to_string(i));
    v[i] = y;
  }
  return f;
}

/// Forward differences at each active cell's lower corner, zero extension across the boundary.
inline CellField gradient(const GridFunction& f) {
  const auto& m = f.mask();
  const int n = m.dim();
  const double inv_h = 1.0 / m.h();
  const auto& cells = m.active_cells();
  const auto& v = f.values();
  CellField g{f.mask_ptr(), std::vector<double>(cells.size() * static_cast<std::size_t>(n))};
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t i = cells[c];
    for (int k = 0; k < n; ++k) g.values[c * n + k] = (v[i + m.strides()[k]] - v[i]) * inv_h;
  }
  return g;
}

/// Adjoint of gradient(): returns D^T w restricted to inside nodes.
inline GridFunction gradient_adjoint(const CellField& w) {
  const auto& m = *w.mask;
  const int n = m.dim();
  const double inv_h = 1.0 / m.h();
  const auto& cells = m.active_cells();
  GridFunction out(w.mask);
  auto& v = out.mutable_values();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t i = cells[c];
    for (int k = 0; k < n; ++k) {
      const double a = w.values[c * n + k] * inv_h;
      v[i + m.strides()[k]] += a;
      v[i] -= a;
    }
  }
  out.project();
  return out;
}

/// (h^n sum |f|^p)^{1/p} over inside nodes.
inline double lp_norm(const GridFunction& f, double p) {
  require(p >= 1.0, ErrorKind::invalid_argument, "lp_norm requires p >= 1");
  double s = 0.0;
  for (std::size_t i : f.mask().inside_nodes()) s += std::pow(std::abs(f[i]), p);
  return std::pow(f.mask().cell_volume() * s, 1.0 / p);
}

/// (h^n sum_cells |g_c|^p)^{1/p}.
inline double field_lp_norm(const CellField& g, double p) {
  require(p >= 1.0, ErrorKind::invalid_argument, "field_lp_norm requires p >= 1");
  const int n = g.mask->dim();
  double s = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += g.values[c * n + k] * g.values[c * n + k];
    s += std::pow(r2, 0.5 * p);
  }
  return std::pow(g.mask->cell_volume() * s, 1.0 / p);
}

/// mu_f(t) = h^n #{nodes : |f| > t}.
inline double distribution_function(const GridFunction& f, double t) {
  require(t > 0, ErrorKind::invalid_argument, "distribution_function requires t > 0");
  std::size_t count = 0;
  for (std::size_t i : f.mask().inside_nodes())
    if (std::abs(f[i]) > t) ++count;
  return f.mask().cell_volume() * static_cast<double>(count);
}

/// The `count` lattice nodes closest to the origin (ties broken by index), as a mask.
inline MaskPtr centered_ball_mask(int dim, double h, std::size_t count) {
  require(count > 0, ErrorKind::invalid_argument, "centered ball needs at least one node");
  const double radius = std::pow(static_cast<double>(count) * std::pow(h, dim) / ball_volume(dim), 1.0 / dim);
  const int half = static_cast<int>(std::ceil(radius / h)) + 2;
  std::array<int, 3> shape{1, 1, 1};
  std::array<long, 3> offset{0, 0, 0};
  for (int k = 0; k < dim; ++k) shape[k] = 2 * half + 1, offset[k] = -half;
  const std::size_t total = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  std::vector<std::pair<long, std::size_t>> order;
  order.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    const long ix = static_cast<long>(i % shape[0]) - half;
    const long iy = static_cast<long>((i / shape[0]) % shape[1]) - (dim >= 2 ? half : 0);
    const long iz = dim == 3 ? static_cast<long>(i / (static_cast<std::size_t>(shape[0]) * shape[1])) - half : 0;
    order.emplace_back(ix * ix + iy * iy + iz * iz, i);
  }
  std::sort(order.begin(), order.end());
  require(count < total, ErrorKind::invalid_argument, "centered ball lattice too small");
  std::vector<std::uint8_t> inside(total, 0);
  for (std::size_t j = 0; j < count; ++j) inside[order[j].second] = 1;
  std::vector<double> c(static_cast<std::size_t>(dim), 0.0);
  return std::make_shared<const DomainMask>(
      DomainMask::from_nodes(dim, h, offset, shape, std::move(inside), domain::Ball{c, radius}));
}

/// Symmetric decreasing rearrangement: inside values sorted descending are placed on
/// the nodes of a centered lattice ball of equal node count, by increasing radius.
/// The multiset of values is preserved exactly.
inline GridFunction symmetric_rearrangement(const GridFunction& f) {
  const auto& m = f.mask();
  std::vector<double> vals;
  vals.reserve(m.inside_count());
  for (std::size_t i : m.inside_nodes()) {
    require(f[i] >= 0.0, ErrorKind::invalid_argument, "symmetric_rearrangement requires a nonnegative function");
    vals.push_back(f[i]);
  }
  std::sort(vals.begin(), vals.end(), std::greater<>());
  auto target = centered_ball_mask(m.dim(), m.h(), vals.size());
  // Radius order of the target's inside nodes.
  std::vector<std::pair<long, std::size_t>> order;
  for (std::size_t i : target->inside_nodes()) {
    const auto idx = target->unravel(i);
    long r2 = 0;
    for (int k = 0; k < m.dim(); ++k) {
      const long c = target->offset()[k] + idx[k];
      r2 += c * c;
    }
    order.emplace_back(r2, i);
  }
  std::sort(order.begin(), order.end());
  GridFunction out(target);
  auto& v = out.mutable_values();
  for (std::size_t j = 0; j < order.size(); ++j) v[order[j].second] = vals[j];
  return out;
}

/// Multilinear interpolation of the zero-extended node values at x.
inline double interpolate(const GridFunction& f, std::span<const double> x) {
  const auto& m = f.mask();
  const int n = m.dim();
  std::array<int, 3> base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
  for (int k = 0; k < n; ++k) {
    const double s = x[k] / m.h() - static_cast<double>(m.offset()[k]);
    const double fl = std::floor(s);
    base[k] = static_cast<int>(fl);
    frac[k] = s - fl;
    if (base[k] < 0 || base[k] + 1 > m.shape()[k] - 1) {
      // Exactly on the last node is still inside the lattice.
      if (base[k] == m.shape()[k] - 1 && frac[k] == 0.0) {
        base[k] -= 1;
        frac[k] = 1.0;
      } else {
        return 0.0;
      }
    }
  }
  double out = 0.0;
  const int corners = 1 << n;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int k = 0; k < n; ++k) {
      const int bit = (c >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      idx += m.strides()[k] * static_cast<std::size_t>(base[k] + bit);
    }
    if (w != 0.0) out += w * f[idx];
  }
  return out;
}

/// g(x) = f(Tx) on new_mask by multilinear interpolation; zero outside new_mask.
inline GridFunction affine_pullback(const GridFunction& f, const Eigen::MatrixXd& T, const MaskPtr& new_mask) {
  const int n = f.mask().dim();
  require(T.rows() == n && T.cols() == n, ErrorKind::invalid_argument, "transform dimension mismatch");
  require(new_mask->dim() == n, ErrorKind::invalid_argument, "target mask dimension mismatch");
  const double det = T.determinant();
  require(std::abs(det) > 1e-14 * std::pow(std::max(1.0, T.norm()), n), ErrorKind::invalid_argument,
          "affine_pullback requires an invertible transform");
  Eigen::VectorXd y(n);
  return discretize(new_mask, [&](std::span<const double> x) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    y = T * xv;
    return interpolate(f, std::span<const double>(y.data(), static_cast<std::size_t>(n)));
  });
}

/// Positive initializer: Euclidean distance from each inside node to the nearest outside node.
inline GridFunction distance_bump(const MaskPtr& mask) {
  const auto& m = *mask;
  const int n = m.dim();
  std::vector<std::array<double, 3>> boundary;
  for (std::size_t i : m.inside_nodes())
    for (int k = 0; k < n; ++k)
      for (long s : {-1L, 1L}) {
        const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + s * static_cast<long>(m.strides()[k]));
        if (!m.inside(j)) boundary.push_back(m.coords(j));
      }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  GridFunction f(mask);
  auto& v = f.mutable_values();
  for (std::size_t i : m.inside_nodes()) {
    const auto x = m.coords(i);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : boundary) {
      double d2 = 0.0;
      for (int k = 0; k < n; ++k) d2 += (x[k] - b[k]) * (x[k] - b[k]);
      best = std::min(best, d2);
    }
    v[i] = std::sqrt(best);
  }
  return f;
}

// CSV --------------------------------------------------------------------------

/// Header `ix,iy[,iz],x,y[,z],inside,value`, one row per lattice node.
inline void write_grid_csv(std::ostream& os, const GridFunction& f) {
  const auto& m = f.mask();
  const int n = m.dim();
  os << (n == 3 ? "ix,iy,iz,x,y,z,inside,value\n" : "ix,iy,x,y,inside,value\n");
  std::ostringstream line;
  os.precision(17);
  for (std::size_t i = 0; i < m.node_count(); ++i) {
    const auto idx = m.unravel(i);
    const auto x = m.coords(i);
    for (int k = 0; k < n; ++k) os << idx[k] << ",";
    for (int k = 0; k < n; ++k) os << x[k] << ",";
    os << (m.inside(i) ? 1 : 0) << "," << f[i] << "\n";
  }
}

/// Reads the grid CSV format back into a function on an explicit mask.
inline GridFunction read_grid_csv(std::istream& is, const std::string& source = "csv") {
  std::string header;
  require(static_cast<bool>(std::getline(is, header)), ErrorKind::invalid_argument, "empty grid csv");
  const int dim = header.rfind("ix,iy,iz", 0) == 0 ? 3 : 2;
  require(header.rfind("ix,iy", 0) == 0, ErrorKind::invalid_argument, "grid csv header must start with ix,iy");
  struct Row {
    std::array<int, 3> idx{};
    std::array<double, 3> x{};
    int inside = 0;
    double value = 0;
  };
  std::vector<Row> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    Row r;
    for (int k = 0; k < dim; ++k) ls >> r.idx[k];
    for (int k = 0; k < dim; ++k) ls >> r.x[k];
    ls >> r.inside >> r.value;
    require(!ls.fail(), ErrorKind::invalid_argument, "malformed grid csv row: " + line);
    rows.push_back(r);
  }
  require(rows.size() >= 2, ErrorKind::invalid_argument, "grid csv needs at least two rows");
  std::array<int, 3> shape{1, 1, 1};
  for (const auto& r : rows)
    for (int k = 0; k < dim; ++k) shape[k] = std::max(shape[k], r.idx[k] + 1);
  // Spacing from any pair differing along x.
  double h = 0.0;
  for (const auto& r : rows)
    if (r.idx[0] != rows[0].idx[0]) {
      h = (r.x[0] - rows[0].x[0]) / (r.idx[0] - rows[0].idx[0]);
      break;
    }
  require(h > 0, ErrorKind::invalid_argument, "cannot infer grid spacing");
  std::array<long, 3> offset{0, 0, 0};
  for (int k = 0; k < dim; ++k) offset[k] = std::lround(rows[0].x[k] / h) - rows[0].idx[k];
  const std::size_t total = static_cast<std::size_t>(shape[0]) * shape[1] * shape[2];
  require(rows.size() == total, ErrorKind::invalid_argument, "grid csv must list every lattice node");
  std::vector<std::uint8_t> inside(total, 0);
  std::vector<double> values(total, 0.0);
  for (const auto& r : rows) {
    const std::size_t i = static_cast<std::size_t>(r.idx[0]) + static_cast<std::size_t>(shape[0]) * r.idx[1] +
                          static_cast<std::size_t>(shape[0]) * shape[1] * r.idx[2];
    inside[i] = r.inside ? 1 : 0;
    values[i] = r.value;
  }
  auto mask = std::make_shared<const DomainMask>(
      DomainMask::from_nodes(dim, h, offset, shape, std::move(inside), domain::Explicit{source}));
  return GridFunction(mask, std::move(values));
}

/// Plot data: rows of (t, mu(t)).
inline void write_distribution_csv(std::ostream& os, const GridFunction& f, const std::vector<double>& ts) {
  os.precision(17);
  os << "t,mu\n";
  for (double t : ts) os << t << "," << distribution_function(f, t) << "\n";
}

}  // namespace affine
