#pragma once

// First eigenvalues of the affine and Euclidean p-Laplacians on grid domains,
// by minimizing the Rayleigh quotients over discretized W^{1,p}_0.
//
// The descent runs on J(f) = log E(f) - log ||f||_q, which has the same
// minimizers as E^p/||f||_p^p (q = p) or E/||f||_q.  Directions are the
// gradient preconditioned by the inverse Dirichlet Laplacian D^T D, which for
// p = 2 makes a unit step an inverse-iteration step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "affine/affine_energy.hpp"
#include "affine/error.hpp"
#include "affine/grid_function.hpp"

namespace affine {

struct SolverOptions {
  double tol_stop = 1e-7;  // relative quotient decrease over the patience window
  int patience = 25;
  int max_iter = 20000;
  double armijo_factor = 0.5;
  double armijo_slope = 1e-4;
  std::uint64_t seed = 1;
  double perturbation = 0.0;      // relative random perturbation of the initial bump
  int gradient_check_every = 0;   // 0 disables the embedded finite-difference check
  int gradient_check_directions = 10;
  double smoothing = 1e-6;        // relative width, used only for p < 2
  bool inverse_iteration = true;  // Euclidean p = q = 2 fast path
  std::optional<GridFunction> initial;
};

struct HistoryEntry {
  int iter;
  double quotient;
  double step;
};

struct GradientCheckRecord {
  int iter;
  double max_rel_error;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction minimizer;
  std::vector<HistoryEntry> history;
  std::vector<GradientCheckRecord> gradient_checks;
  std::string stop_reason;
  int iterations = 0;
  double h = 0.0;
  double p = 2.0;
  double q = 2.0;
  double eps = 0.0;
  bool affine = false;
  std::string method;
  std::string rules;
  std::string body;
  std::string domain;
};

namespace detail {

/// Objective adaptor: value and gradient of J = log N(f) - log ||f||_q where N is
/// E_{Q,p} (affine) or ||grad f||_p (Euclidean).
class Objective {
 public:
  Objective(const EnergyContext* ctx, double p, double q, double eps) : ctx_(ctx), p_(p), q_(q), eps_(eps) {}

  struct Eval {
    double J;
    double N;      // energy or gradient norm
    double normq;  // ||f||_q
  };

  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double q() const noexcept { return q_; }

  /// The reported quotient: N^p/||f||_p^p when q = p, N/||f||_q otherwise.
  [[nodiscard]] double quotient(const Eval& e) const {
    return q_ == p_ ? std::pow(e.N / e.normq, p_) : e.N / e.normq;
  }

  Eval value(const GridFunction& f) const {
    const auto g = gradient(f);
    const double N = numerator(g, nullptr);
    const double nq = lp_norm(f, q_);
    return {std::log(N) - std::log(nq), N, nq};
  }

  /// Value and node gradient of J.
  Eval value_grad(const GridFunction& f, std::vector<double>& grad) const {
    const auto& m = f.mask();
    auto g = gradient(f);
    CellField w{g.mask, {}};
    const double N = numerator(g, &w);
    const double nq = lp_norm(f, q_);
    // d log N = D^T(h^n w) / N^p
    const double cv = m.cell_volume();
    for (double& x : w.values) x *= cv / std::pow(N, p_);
    const auto dn = gradient_adjoint(w);
    grad.assign(m.node_count(), 0.0);
    const double nqq = std::pow(nq, q_);
    for (std::size_t i : m.inside_nodes()) {
      const double v = f[i];
      const double dq = cv * std::pow(std::abs(v), q_ - 2.0) * v / nqq;
      grad[i] = dn[i] - (v == 0.0 ? 0.0 : dq);
    }
    return {std::log(N) - std::log(nq), N, nq};
  }

 private:
  double numerator(const CellField& g, CellField* flux) const {
    if (ctx_ != nullptr) {
      const auto G = projection_gauges(*ctx_, g);
      if (flux != nullptr) *flux = energy_flux(*ctx_, g, G);
      return energy_routes(*ctx_, G).integral_route;
    }
    const int n = g.mask->dim();
    double s = 0.0;
    if (flux != nullptr) flux->values.assign(g.values.size(), 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
      double r2 = 0.0;
      for (int k = 0; k < n; ++k) r2 += g.values[c * n + k] * g.values[c * n + k];
      const double r = std::sqrt(r2 + eps_ * eps_);
      s += detail::ipow(r, p_);
      if (flux != nullptr && r > 0) {
        const double a = std::pow(r, p_ - 2.0);
        for (int k = 0; k < n; ++k) flux->values[c * n + k] = a * g.values[c * n + k];
      }
    }
    require(s > 0, ErrorKind::degenerate_input, "gradient norm of the zero function");
    return std::pow(g.mask->cell_volume() * s, 1.0 / p_);
  }

  const EnergyContext* ctx_;
  double p_, q_, eps_;
};

/// h^2 D^T D on inside nodes, i.e. the 5-point (7-point in 3D) Dirichlet Laplacian stencil.
inline Eigen::SparseMatrix<double> dirichlet_laplacian(const DomainMask& m) {
  std::vector<int> slot(m.node_count(), -1);
  const auto& inside = m.inside_nodes();
  for (std::size_t k = 0; k < inside.size(); ++k) slot[inside[k]] = static_cast<int>(k);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(inside.size() * (2 * m.dim() + 1));
  for (std::size_t k = 0; k < inside.size(); ++k) {
    const std::size_t i = inside[k];
    t.emplace_back(static_cast<int>(k), static_cast<int>(k), 2.0 * m.dim());
    for (int a = 0; a < m.dim(); ++a) {
      for (long s : {-1L, 1L}) {
        const auto j = static_cast<std::size_t>(static_cast<long>(i) + s * static_cast<long>(m.strides()[a]));
        if (slot[j] >= 0) t.emplace_back(static_cast<int>(k), slot[j], -1.0);
      }
    }
  }
  Eigen::SparseMatrix<double> L(static_cast<Eigen::Index>(inside.size()), static_cast<Eigen::Index>(inside.size()));
  L.setFromTriplets(t.begin(), t.end());
  return L;
}

class LaplacianSolver {
 public:
  explicit LaplacianSolver(const DomainMask& m) : mask_(&m) {
    ldlt_.compute(dirichlet_laplacian(m));
    require(ldlt_.info() == Eigen::Success, ErrorKind::numeric_failure, "Laplacian factorization failed");
  }

  /// Solves (h^2 D^T D) x = b on inside nodes.
  [[nodiscard]] std::vector<double> solve(const std::vector<double>& b) const {
    const auto& inside = mask_->inside_nodes();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(inside.size()));
    for (std::size_t k = 0; k < inside.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = b[inside[k]];
    const Eigen::VectorXd x = ldlt_.solve(rhs);
    std::vector<double> out(mask_->node_count(), 0.0);
    for (std::size_t k = 0; k < inside.size(); ++k) out[inside[k]] = x[static_cast<Eigen::Index>(k)];
    return out;
  }

 private:
  const DomainMask* mask_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

inline GridFunction initial_guess(const MaskPtr& mask, const SolverOptions& opt) {
  if (opt.initial) {
    require(opt.initial->mask().node_count() == mask->node_count() &&
                opt.initial->mask().inside_flags() == mask->inside_flags(),
            ErrorKind::invalid_argument, "initial function lives on a different mask");
    GridFunction f(mask, opt.initial->values());
    require(!f.is_zero(), ErrorKind::degenerate_input, "initial function is zero");
    return f;
  }
  auto f = distance_bump(mask);
  if (opt.perturbation > 0) {
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i : mask->inside_nodes()) f.mutable_values()[i] *= 1.0 + opt.perturbation * u(rng);
  }
  return f;
}

inline void normalize(GridFunction& f, double q) {
  const double s = lp_norm(f, q);
  require(s > 0 && std::isfinite(s), ErrorKind::degenerate_input, "cannot normalize the zero function");
  f.scale(1.0 / s);
}

inline void align_sign(GridFunction& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  if (s < 0) f.scale(-1.0);
}

/// Random smooth test direction: a low-frequency trigonometric combination, zero outside the mask.
inline GridFunction smooth_direction(const MaskPtr& mask, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  const int n = mask->dim();
  struct Mode {
    std::array<double, 3> k;
    double a, phase;
  };
  std::vector<Mode> modes(6);
  for (auto& md : modes) {
    for (int j = 0; j < 3; ++j) md.k[j] = j < n ? 3.0 * nd(rng) : 0.0;
    md.a = nd(rng);
    md.phase = ph(rng);
  }
  return discretize(mask, [&](std::span<const double> x) {
    double s = 0.0;
    for (const auto& md : modes) {
      double t = md.phase;
      for (int j = 0; j < n; ++j) t += md.k[j] * x[j];
      s += md.a * std::cos(t);
    }
    return amplitude * s;
  });
}

/// Largest relative disagreement between <grad J, phi> and a central difference, over smooth random phi.
inline double check_objective_gradient(const Objective& obj, const GridFunction& f, int directions,
                                       std::uint64_t seed, double step = 1e-4) {
  std::vector<double> grad;
  obj.value_grad(f, grad);
  std::mt19937_64 rng(seed);
  const double fscale = f.max_abs();
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    const GridFunction phi = smooth_direction(f.mask_ptr(), rng, fscale);
    double dot = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * phi[i];
    GridFunction plus = f, minus = f;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      plus.mutable_values()[i] += step * phi[i];
      minus.mutable_values()[i] -= step * phi[i];
    }
    const double fd = (obj.value(plus).J - obj.value(minus).J) / (2 * step);
    // J is 0-homogeneous; its derivatives along phi ~ f are O(||phi||/||f||).
    worst = std::max(worst, std::abs(dot - fd) / (std::abs(fd) + phi.max_abs() / fscale));
  }
  return worst;
}

inline EigenResult run_descent(const Objective& obj, const MaskPtr& mask, const SolverOptions& opt) {
  require(opt.max_iter >= 1 && opt.patience >= 1, ErrorKind::invalid_argument, "iteration limits must be positive");
  require(opt.armijo_factor > 0 && opt.armijo_factor < 1, ErrorKind::invalid_argument, "armijo factor in (0,1)");
  const LaplacianSolver pre(*mask);
  GridFunction f = initial_guess(mask, opt);
  normalize(f, obj.q());
  EigenResult res;
  std::vector<double> grad;
  auto cur = obj.value_grad(f, grad);
  double step = 1.0;
  res.history.push_back({0, obj.quotient(cur), 0.0});
  const double cv = mask->cell_volume();
  res.stop_reason = "max_iter";
  int it = 1;
  for (; it <= opt.max_iter; ++it) {
    if (opt.gradient_check_every > 0 && (it - 1) % opt.gradient_check_every == 0)
      res.gradient_checks.push_back(
          {it - 1, check_objective_gradient(obj, f, opt.gradient_check_directions, opt.seed + static_cast<std::uint64_t>(it))});
    // Preconditioned direction, scaled so that step 1 is an inverse-iteration step at p = 2.
    auto dir = pre.solve(grad);
    const double scale = -obj.quotient(cur) * mask->h() * mask->h() / cv;
    double slope = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) {
      dir[i] *= scale;
      slope += grad[i] * dir[i];
    }
    if (!(slope < 0)) {
      res.stop_reason = "stationary";
      break;
    }
    bool accepted = false;
    GridFunction trial = f;
    Objective::Eval next{};
    for (int bt = 0; bt < 60; ++bt) {
      auto& tv = trial.mutable_values();
      for (std::size_t i = 0; i < tv.size(); ++i) tv[i] = f[i] + step * dir[i];
      if (lp_norm(trial, obj.q()) > 0) {
        next = obj.value(trial);
        if (std::isfinite(next.J) && next.J <= cur.J + opt.armijo_slope * step * slope) {
          accepted = true;
          break;
        }
      }
      step *= opt.armijo_factor;
    }
    if (!accepted) {
      res.stop_reason = "line_search_stalled";
      break;
    }
    f = std::move(trial);
    normalize(f, obj.q());
    cur = obj.value_grad(f, grad);
    if (!std::isfinite(cur.J)) fail(ErrorKind::optimization_failure, "quotient became non-finite");
    res.history.push_back({it, obj.quotient(cur), step});
    step = std::min(step * 2.0, 1e6);
    const auto n = res.history.size();
    if (n > static_cast<std::size_t>(opt.patience)) {
      const double old = res.history[n - 1 - opt.patience].quotient;
      const double now = res.history.back().quotient;
      if ((old - now) / now < opt.tol_stop) {
        res.stop_reason = "converged";
        break;
      }
    }
  }
  res.iterations = std::min(it, opt.max_iter);
  align_sign(f);
  res.lambda = res.history.back().quotient;
  res.minimizer = std::move(f);
  return res;
}

}  // namespace detail

/// R^A_{Q,p,q} f: E^p/||f||_p^p when q = p, E/||f||_q otherwise.
inline double rayleigh_affine(const EnergyContext& ctx, const GridFunction& f, double q) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "Rayleigh quotient of the zero function");
  const double E = energy(ctx, f);
  return q == ctx.p() ? std::pow(E / lp_norm(f, q), q) : E / lp_norm(f, q);
}

inline double rayleigh_affine(const EnergyContext& ctx, const GridFunction& f) {
  return rayleigh_affine(ctx, f, ctx.p());
}

/// R_p f = ||grad f||_p^p / ||f||_p^p (or ||grad f||_p/||f||_q for q != p).
inline double rayleigh_euclidean(const GridFunction& f, double p, double q) {
  require(!f.is_zero(), ErrorKind::degenerate_input, "Rayleigh quotient of the zero function");
  const double N = gradient_norm(f, p);
  return q == p ? std::pow(N / lp_norm(f, p), p) : N / lp_norm(f, q);
}

inline double rayleigh_euclidean(const GridFunction& f, double p) { return rayleigh_euclidean(f, p, p); }

/// Node gradient of E^p/p: D^T(h^n h_L^{p-1} grad h_L) with L frozen at f.
inline GridFunction energy_gradient(const EnergyContext& ctx, const GridFunction& f) {
  require(ctx.p() > 1.0, ErrorKind::unsupported, "energy_gradient requires p > 1; use the polygon path for p = 1");
  require(!f.is_zero(), ErrorKind::degenerate_input, "energy gradient of the zero function");
  auto w = energy_flux(ctx, f);
  const double cv = f.mask().cell_volume();
  for (double& x : w.values) x *= cv;
  return gradient_adjoint(w);
}

/// Max relative error of the energy gradient against central differences of E^p/p along smooth random phi.
inline double energy_gradient_check(const EnergyContext& ctx, const GridFunction& f, int directions,
                                    std::uint64_t seed, double step = 1e-4) {
  const auto grad = energy_gradient(ctx, f);
  std::mt19937_64 rng(seed);
  const double p = ctx.p();
  const double fscale = f.max_abs();
  auto F = [&](const GridFunction& u) { return std::pow(energy(ctx, u), p) / p; };
  double worst = 0.0;
  for (int k = 0; k < directions; ++k) {
    const auto phi = detail::smooth_direction(f.mask_ptr(), rng, fscale);
    double dot = 0.0;
    for (std::size_t i = 0; i < phi.values().size(); ++i) dot += grad[i] * phi[i];
    GridFunction plus = f, minus = f;
    for (std::size_t i = 0; i < phi.values().size(); ++i) {
      plus.mutable_values()[i] += step * phi[i];
      minus.mutable_values()[i] -= step * phi[i];
    }
    const double fd = (F(plus) - F(minus)) / (2 * step);
    // Scale: |fd| plus the size of F along phi, F(f) ||phi|| / ||f||.
    worst = std::max(worst, std::abs(dot - fd) / (std::abs(fd) + F(f) * phi.max_abs() / fscale));
  }
  return worst;
}

inline EigenResult minimize_affine(const EnergyContext& ctx, const MaskPtr& mask, double q,
                                   const SolverOptions& opt = {}) {
  require(ctx.p() > 1.0, ErrorKind::unsupported, "minimize_affine requires p > 1; use the cheeger module for p = 1");
  require(mask->dim() == ctx.n(), ErrorKind::invalid_argument, "mask dimension does not match context n");
  require(q >= 1.0, ErrorKind::invalid_argument, "q must be >= 1");
  std::optional<EnergyContext> smoothed;
  double eps = 0.0;
  if (ctx.p() < 2.0 && opt.smoothing > 0) {
    // Width relative to the gradient scale of the normalized initializer.
    auto f0 = detail::initial_guess(mask, opt);
    detail::normalize(f0, q);
    const auto g = gradient(f0);
    double gmax = 0.0;
    for (double v : g.values) gmax = std::max(gmax, std::abs(v));
    eps = opt.smoothing * gmax;
    smoothed.emplace(ctx.n(), ctx.Q(), ctx.p(), ctx.rule_nm(), ctx.rule_n(), eps);
  }
  const EnergyContext& run_ctx = smoothed ? *smoothed : ctx;
  detail::Objective obj(&run_ctx, ctx.p(), q, 0.0);
  auto res = detail::run_descent(obj, mask, opt);
  if (smoothed) res.lambda = rayleigh_affine(ctx, res.minimizer, q);
  res.affine = true;
  res.method = "preconditioned_descent";
  res.h = mask->h();
  res.p = ctx.p();
  res.q = q;
  res.eps = eps;
  res.rules = "rule_nm=" + ctx.rule_nm().describe() + " rule_n=" + ctx.rule_n().describe();
  res.body = ctx.Q().describe();
  res.domain = mask->describe();
  return res;
}

inline EigenResult minimize_affine(const EnergyContext& ctx, const MaskPtr& mask, const SolverOptions& opt = {}) {
  return minimize_affine(ctx, mask, ctx.p(), opt);
}

/// Inverse power iteration on the Dirichlet Laplacian (p = q = 2).
inline EigenResult inverse_iteration(const MaskPtr& mask, const SolverOptions& opt = {}) {
  const detail::LaplacianSolver solver(*mask);
  GridFunction f = detail::initial_guess(mask, opt);
  detail::normalize(f, 2.0);
  EigenResult res;
  res.stop_reason = "max_iter";
  int it = 1;
  for (; it <= opt.max_iter; ++it) {
    GridFunction next(mask, solver.solve(f.values()));
    detail::normalize(next, 2.0);
    f = std::move(next);
    res.history.push_back({it, rayleigh_euclidean(f, 2.0), 1.0});
    const auto n = res.history.size();
    if (n > 1) {
      const double old = res.history[n - 2].quotient, now = res.history[n - 1].quotient;
      if (std::abs(old - now) / now < 1e-13) {
        res.stop_reason = "converged";
        break;
      }
    }
  }
  res.iterations = std::min(it, opt.max_iter);
  detail::align_sign(f);
  res.lambda = res.history.back().quotient;
  res.minimizer = std::move(f);
  return res;
}

inline EigenResult minimize_euclidean(const MaskPtr& mask, double p, double q, const SolverOptions& opt = {}) {
  require(p > 1.0, ErrorKind::unsupported, "minimize_euclidean requires p > 1");
  require(q >= 1.0, ErrorKind::invalid_argument, "q must be >= 1");
  EigenResult res;
  double eps = 0.0;
  if (p == 2.0 && q == 2.0 && opt.inverse_iteration) {
    res = inverse_iteration(mask, opt);
    res.method = "inverse_iteration";
  } else {
    if (p < 2.0 && opt.smoothing > 0) {
      auto f0 = detail::initial_guess(mask, opt);
      detail::normalize(f0, q);
      double gmax = 0.0;
      for (double v : gradient(f0).values) gmax = std::max(gmax, std::abs(v));
      eps = opt.smoothing * gmax;
    }
    detail::Objective obj(nullptr, p, q, eps);
    res = detail::run_descent(obj, mask, opt);
    if (eps > 0) res.lambda = rayleigh_euclidean(res.minimizer, p, q);
    res.method = "preconditioned_descent";
  }
  res.affine = false;
  res.h = mask->h();
  res.p = p;
  res.q = q;
  res.eps = eps;
  res.domain = mask->describe();
  return res;
}

inline EigenResult minimize_euclidean(const MaskPtr& mask, double p, const SolverOptions& opt = {}) {
  return minimize_euclidean(mask, p, p, opt);
}

/// Sign check: after alignment, min >= -tol * max.
inline bool single_signed(const GridFunction& f, double tol = 1e-8) {
  double lo = 0.0, hi = 0.0;
  for (double v : f.values()) lo = std::min(lo, v), hi = std::max(hi, v);
  return lo >= -tol * hi;
}

/// History is nonincreasing up to a relative slack.
inline bool monotone_history(const EigenResult& r, double slack = 1e-12) {
  for (std::size_t k = 1; k < r.history.size(); ++k)
    if (r.history[k].quotient > r.history[k - 1].quotient * (1 + slack)) return false;
  return true;
}

}  // namespace affine
