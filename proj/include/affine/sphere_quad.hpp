#pragma once

// Quadrature rules on the unit sphere S^{d-1} in R^d.
//
// Deterministic rules:
//   uniform_angle  d = 2      : 2^L equally spaced angles (trapezoid rule).
//   product        d = 3      : Gauss-Legendre in z (2^{L-1} nodes) x 2^L azimuths.
//   product        d = 4, 6   : S^{2k-1} in C^k written as (sqrt(u_j) e^{i phi_j});
//                               the pushed-forward measure is uniform on the simplex
//                               {u_j >= 0, sum u_j = 1} times the flat torus.  The
//                               simplex is integrated with (collapsed) Gauss-Legendre,
//                               the torus with the trapezoid rule.
// Monte Carlo rules normalize Gaussian samples and give each node area/count.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "affine/error.hpp"

namespace affine {

enum class QuadScheme { uniform_angle, product, monte_carlo };

inline std::string to_string(QuadScheme s) {
  switch (s) {
    case QuadScheme::uniform_angle: return "uniform_angle";
    case QuadScheme::product: return "product";
    case QuadScheme::monte_carlo: return "monte_carlo";
  }
  return "unknown";
}

inline QuadScheme parse_scheme(const std::string& name) {
  if (name == "uniform_angle") return QuadScheme::uniform_angle;
  if (name == "product") return QuadScheme::product;
  if (name == "monte_carlo") return QuadScheme::monte_carlo;
  fail(ErrorKind::unsupported_scheme, "unknown quadrature scheme '" + name + "'");
}

/// Surface measure of S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
inline double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Volume of the unit ball in R^d.
inline double ball_volume(int d) { return sphere_area(d) / d; }

struct RuleSpec {
  int dim = 2;
  QuadScheme scheme = QuadScheme::uniform_angle;
  int level = 7;
  std::uint64_t seed = 1;
  std::size_t count = 0;  // monte_carlo only
  bool antipodal = true;  // monte_carlo only: pair every node with its negative
};

class QuadratureRule {
 public:
  QuadratureRule() = default;
  QuadratureRule(RuleSpec spec, std::vector<double> nodes, std::vector<double> weights)
      : spec_(spec), nodes_(std::move(nodes)), weights_(std::move(weights)) {}

  [[nodiscard]] int dim() const noexcept { return spec_.dim; }
  [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
  [[nodiscard]] const RuleSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::span<const double> node(std::size_t i) const {
    return {nodes_.data() + i * static_cast<std::size_t>(spec_.dim), static_cast<std::size_t>(spec_.dim)};
  }
  [[nodiscard]] double weight(std::size_t i) const { return weights_[i]; }
  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }

  [[nodiscard]] std::string describe() const {
    std::string s = "S^" + std::to_string(spec_.dim - 1) + ":" + to_string(spec_.scheme);
    if (spec_.scheme == QuadScheme::monte_carlo)
      s += "(seed=" + std::to_string(spec_.seed) + ",count=" + std::to_string(size()) + ")";
    else
      s += "(level=" + std::to_string(spec_.level) + ",nodes=" + std::to_string(size()) + ")";
    return s;
  }

 private:
  RuleSpec spec_{};
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

namespace detail {

/// Gauss-Legendre nodes/weights on [0,1], weights summing to 1.
inline void gauss_legendre_unit(int count, std::vector<double>& x, std::vector<double>& w) {
  x.assign(count, 0.0);
  w.assign(count, 0.0);
  for (int i = 0; i < count; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= count; ++k) {
        const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = count * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged root.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= count; ++k) {
      const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = count * (z * p1 - p0) / (z * z - 1.0);
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);  // (2/((1-z^2)P'^2)) / 2
  }
}

}  // namespace detail

/// Builds a rule; unsupported (dim, scheme) pairings raise unsupported-scheme.
inline QuadratureRule build_rule(const RuleSpec& spec) {
  const int d = spec.dim;
  require(d >= 2, ErrorKind::unsupported_scheme, "sphere dimension must be >= 2");
  std::vector<double> nodes, weights;
  const double area = sphere_area(d);
  constexpr double two_pi = 2.0 * std::numbers::pi;

  switch (spec.scheme) {
    case QuadScheme::uniform_angle: {
      require(d == 2, ErrorKind::unsupported_scheme, "uniform_angle requires dim 2");
      require(spec.level >= 1 && spec.level <= 24, ErrorKind::unsupported_scheme, "uniform_angle level out of range");
      const std::size_t count = std::size_t{1} << spec.level;
      for (std::size_t k = 0; k < count; ++k) {
        const double a = two_pi * static_cast<double>(k) / static_cast<double>(count);
        nodes.push_back(std::cos(a));
        nodes.push_back(std::sin(a));
        weights.push_back(two_pi / static_cast<double>(count));
      }
      break;
    }
    case QuadScheme::product: {
      require(d == 3 || d == 4 || d == 6, ErrorKind::unsupported_scheme,
              "product rule supports dim 3, 4, 6 (got " + std::to_string(d) + ")");
      require(spec.level >= 1 && spec.level <= (d == 6 ? 5 : 9), ErrorKind::unsupported_scheme,
              "product level out of range");
      const int n_angle = 1 << spec.level;
      const int n_radial = std::max(1, 1 << (spec.level - 1));
      std::vector<double> gx, gw;
      detail::gauss_legendre_unit(n_radial, gx, gw);
      if (d == 3) {
        for (int a = 0; a < n_radial; ++a) {
          const double z = 2.0 * gx[a] - 1.0;
          const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
          for (int b = 0; b < n_angle; ++b) {
            const double phi = two_pi * (b + 0.5) / n_angle;
            nodes.insert(nodes.end(), {r * std::cos(phi), r * std::sin(phi), z});
            weights.push_back(area * gw[a] / n_angle);
          }
        }
      } else if (d == 4) {
        for (int a = 0; a < n_radial; ++a) {
          const double u = gx[a];
          const double r1 = std::sqrt(1.0 - u), r2 = std::sqrt(u);
          for (int b = 0; b < n_angle; ++b) {
            const double p1 = two_pi * b / n_angle;
            for (int c = 0; c < n_angle; ++c) {
              const double p2 = two_pi * (c + 0.5) / n_angle;
              nodes.insert(nodes.end(), {r1 * std::cos(p1), r1 * std::sin(p1), r2 * std::cos(p2), r2 * std::sin(p2)});
              weights.push_back(area * gw[a] / (static_cast<double>(n_angle) * n_angle));
            }
          }
        }
      } else {
        // Simplex via u1 = s, u2 = (1-s) t with Jacobian (1-s); uniform density 2.
        for (int a = 0; a < n_radial; ++a) {
          for (int b = 0; b < n_radial; ++b) {
            const double s = gx[a], t = gx[b];
            const double u1 = s, u2 = (1.0 - s) * t, u3 = std::max(0.0, 1.0 - u1 - u2);
            const double ws = 2.0 * gw[a] * gw[b] * (1.0 - s);
            const double r[3] = {std::sqrt(u1), std::sqrt(u2), std::sqrt(u3)};
            for (int i = 0; i < n_angle; ++i)
              for (int j = 0; j < n_angle; ++j)
                for (int k = 0; k < n_angle; ++k) {
                  const double p[3] = {two_pi * i / n_angle, two_pi * (j + 0.5) / n_angle,
                                       two_pi * (k + 0.25) / n_angle};
                  for (int c = 0; c < 3; ++c) {
                    nodes.push_back(r[c] * std::cos(p[c]));
                    nodes.push_back(r[c] * std::sin(p[c]));
                  }
                  weights.push_back(area * ws / (static_cast<double>(n_angle) * n_angle * n_angle));
                }
          }
        }
      }
      break;
    }
    case QuadScheme::monte_carlo: {
      require(spec.count >= 2, ErrorKind::unsupported_scheme, "monte_carlo requires count >= 2");
      std::mt19937_64 rng(spec.seed);
      std::normal_distribution<double> normal(0.0, 1.0);
      const std::size_t draws = spec.antipodal ? spec.count / 2 : spec.count;
      const std::size_t total = spec.antipodal ? 2 * draws : draws;
      std::vector<double> x(static_cast<std::size_t>(d));
      for (std::size_t k = 0; k < draws; ++k) {
        double norm2 = 0.0;
        do {
          norm2 = 0.0;
          for (auto& xi : x) {
            xi = normal(rng);
            norm2 += xi * xi;
          }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& xi : x) xi *= inv;
        nodes.insert(nodes.end(), x.begin(), x.end());
        if (spec.antipodal)
          for (double xi : x) nodes.push_back(-xi);
      }
      weights.assign(total, area / static_cast<double>(total));
      break;
    }
  }
  RuleSpec out = spec;
  if (out.scheme == QuadScheme::monte_carlo) out.count = weights.size();
  return QuadratureRule(out, std::move(nodes), std::move(weights));
}

inline QuadratureRule build_rule(int dim, QuadScheme scheme, int level) {
  RuleSpec s;
  s.dim = dim;
  s.scheme = scheme;
  s.level = level;
  return build_rule(s);
}

inline QuadratureRule build_monte_carlo(int dim, std::uint64_t seed, std::size_t count, bool antipodal = true) {
  RuleSpec s;
  s.dim = dim;
  s.scheme = QuadScheme::monte_carlo;
  s.seed = seed;
  s.count = count;
  s.antipodal = antipodal;
  s.level = 0;
  return build_rule(s);
}

/// Default rule for S^{d-1} used by contexts that are not configured explicitly.
inline QuadratureRule default_rule(int dim) {
  switch (dim) {
    case 2: return build_rule(2, QuadScheme::uniform_angle, 9);
    case 3: return build_rule(3, QuadScheme::product, 5);
    case 4: return build_rule(4, QuadScheme::product, 4);
    case 6: return build_rule(6, QuadScheme::product, 2);
    default: return build_monte_carlo(dim, 1, 200000);
  }
}

/// sum_i w_i g(theta_i); non-finite values raise numeric-failure naming the node.
template <class Integrand>
double integrate(const QuadratureRule& rule, Integrand&& integrand) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double v = integrand(rule.node(i));
    if (!std::isfinite(v)) {
      std::string where = "non-finite integrand at node " + std::to_string(i) + " (";
      for (double c : rule.node(i)) where += std::to_string(c) + " ";
      where += ")";
      fail(ErrorKind::numeric_failure, where);
    }
    sum += rule.weight(i) * v;
  }
  return sum;
}

}  // namespace affine
