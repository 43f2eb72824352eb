#pragma once

// Exponent algebra for the interface ODE  f^(5) = -+ |f|^(alpha-1) f,
// its explicit monomial solution, regularity classes and a fixed-point
// construction of the positive solution through the inverse function y(f).

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

/// Sign of the travelling-wave speed after scaling |lambda| out.
enum class Lambda : int { plus = 1, minus = -1 };

constexpr int sign(Lambda l) { return static_cast<int>(l); }

inline Lambda lambda_from_int(int v) {
  if (v == 1) return Lambda::plus;
  if (v == -1) return Lambda::minus;
  throw std::invalid_argument("lambda must be +1 or -1");
}

inline std::string to_string(Lambda l) { return l == Lambda::plus ? "+1" : "-1"; }

struct PowerParams {
  double m = 1.0;
  double n = 0.0;
  Lambda lambda = Lambda::minus;
  double alpha = 0.0;        ///< (1-m)/(1+n)
  double mu = 5.0;           ///< 5(n+1)/(m+n) = 5/(1-alpha)
  double beta = 1.0 / 7.0;   ///< source-type exponent 1/(6+m+n)
  double gamma_scale = 6.0;  ///< 6/(m+n)
};

inline PowerParams derive(double m, double n, Lambda lambda) {
  if (!(n > -1.0)) throw OutOfRange("n must exceed -1");
  if (!(m > -n && m < n + 2.0))
    throw OutOfRange("m must lie in (-n, n+2); got m=" + std::to_string(m) +
                     ", n=" + std::to_string(n));
  PowerParams p;
  p.m = m;
  p.n = n;
  p.lambda = lambda;
  p.alpha = (1.0 - m) / (1.0 + n);
  p.mu = 5.0 * (n + 1.0) / (m + n);
  p.beta = 1.0 / (6.0 + m + n);
  p.gamma_scale = 6.0 / (m + n);
  return p;
}

/// mu (mu-1)(mu-2)(mu-3)(mu-4)
inline double falling5(double mu) {
  return mu * (mu - 1.0) * (mu - 2.0) * (mu - 3.0) * (mu - 4.0);
}

/// Amplitude phi0 of the monomial solution phi0 * y^mu, i.e. the constant
/// equilibrium of the oscillatory-component system.
inline double phi0(const PowerParams& p) {
  const double prod = falling5(p.mu);
  const double base = (p.lambda == Lambda::minus ? 1.0 : -1.0) / prod;
  if (!(base > 0.0) || !std::isfinite(base))
    throw NoPositiveSolution("no positive monomial solution at mu=" + std::to_string(p.mu) +
                             " for lambda=" + to_string(p.lambda));
  return std::pow(base, (p.n + 1.0) / (p.m + p.n));
}

enum class Smoothness { C4, C3, C2, below };

inline std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C4: return "C4";
    case Smoothness::C3: return "C3";
    case Smoothness::C2: return "C2";
    case Smoothness::below: return "below";
  }
  return "?";
}

struct RegularityClass {
  Smoothness cp_class = Smoothness::C4;
  double fbp_gamma = 0.0;  ///< exponent of the second free-boundary term
  bool fbp_valid = false;  ///< fbp_gamma > 3
};

/// Regularity at the interface of the maximal-regularity (Cauchy problem)
/// solution. Thresholds are half-open with the lower bound on the less
/// smooth side.
inline RegularityClass classify_regularity(double m, double n) {
  RegularityClass r;
  if (m < (n + 5.0) / 4.0)
    r.cp_class = Smoothness::C4;
  else if (m < (2.0 * n + 5.0) / 3.0)
    r.cp_class = Smoothness::C3;
  else if (m < (3.0 * n + 5.0) / 2.0)
    r.cp_class = Smoothness::C2;
  else
    r.cp_class = Smoothness::below;
  r.fbp_gamma = (8.0 + 5.0 * n - 3.0 * m) / (n + 1.0);
  r.fbp_valid = r.fbp_gamma > 3.0;
  return r;
}

struct FixedPointOptions {
  double log_step = 1e-3;        ///< spacing of the geometric grid in ln f
  double decades = 12.0;         ///< grid spans [f_max 10^-decades, f_max]
  int max_iterations = 200;
  double relaxation = 0.2;       ///< geometric weight of the new iterate
  double initial_scale = 2.0;    ///< start from this multiple of the monomial inverse
};

/// Sampled inverse function y(f) of the positive solution.
struct InverseProfile {
  std::vector<double> f;  ///< ascending, geometric
  std::vector<double> y;
  int iterations = 0;
  double last_update = 0.0;  ///< relative sup-norm change of the final sweep
};

namespace detail {

/// Cumulative Stieltjes integral  I(f_i) = int_0^{f_i} g dy  by the
/// trapezoid rule, with the cell [0, f_0] closed by a local power law fitted
/// to the first two nodes.
inline std::vector<double> cumulative_stieltjes(const std::vector<double>& g,
                                                const std::vector<double>& y,
                                                double log_step) {
  const std::size_t K = g.size();
  std::vector<double> out(K);
  const double a = std::log(g[1] / g[0]) / log_step;
  const double b = std::log(y[1] / y[0]) / log_step;
  out[0] = g[0] * y[0] * b / (a + b);
  for (std::size_t i = 1; i < K; ++i)
    out[i] = out[i - 1] + 0.5 * (g[i] + g[i - 1]) * (y[i] - y[i - 1]);
  return out;
}

}  // namespace detail

/// Positive solution of f^(5) = f^alpha (lambda = -1) with a degenerate zero
/// at the origin, found as a fixed point of the five-fold integral operator
/// for the inverse function:
///
///   g5 = f^alpha,  g_{k} = int_0^f g_{k+1} dy  (k = 4..1),  M(y) = int_0^f df / g1.
///
/// M maps c*y to c^-4 M(y), so plain Picard steps oscillate along the
/// scaling direction; the iteration uses y <- y^(1-w) M(y)^w, w = 1/5 by
/// default, which leaves the fixed point unchanged and cancels that mode.
inline InverseProfile fixed_point_positive(const PowerParams& p, double f_max, double tol,
                                           const FixedPointOptions& opt = {}) {
  if (p.lambda != Lambda::minus)
    throw NoConvergence("fixed_point_positive: positive solutions need lambda = -1");
  if (!(p.alpha > 0.0 && p.alpha < 1.0))
    throw NoConvergence("fixed_point_positive: the integral operator needs alpha in (0,1), i.e. "
                        "m in (0,1)");
  if (!(f_max > 0.0) || !(tol > 0.0))
    throw std::invalid_argument("fixed_point_positive: f_max and tol must be positive");

  const double h = opt.log_step;
  const auto K = static_cast<std::size_t>(std::ceil(opt.decades * std::log(10.0) / h)) + 1;
  InverseProfile out;
  out.f.resize(K);
  for (std::size_t i = 0; i < K; ++i)
    out.f[i] = f_max * std::exp(-h * static_cast<double>(K - 1 - i));

  const double amp = phi0(p);
  std::vector<double> y(K);
  for (std::size_t i = 0; i < K; ++i)
    y[i] = opt.initial_scale * std::pow(out.f[i] / amp, 1.0 / p.mu);

  std::vector<double> g5(K);
  for (std::size_t i = 0; i < K; ++i) g5[i] = std::pow(out.f[i], p.alpha);

  auto apply = [&](const std::vector<double>& yk) {
    std::vector<double> g = g5;
    for (int k = 0; k < 4; ++k) g = detail::cumulative_stieltjes(g, yk, h);
    std::vector<double> inv(K);
    for (std::size_t i = 0; i < K; ++i) inv[i] = 1.0 / g[i];
    const double q = std::log(inv[1] / inv[0]) / h;
    std::vector<double> m(K);
    m[0] = out.f[0] * inv[0] / (q + 1.0);
    for (std::size_t i = 1; i < K; ++i)
      m[i] = m[i - 1] + 0.5 * (inv[i] + inv[i - 1]) * (out.f[i] - out.f[i - 1]);
    return m;
  };

  const double w = opt.relaxation;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    const std::vector<double> m = apply(y);
    double change = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double next = std::pow(y[i], 1.0 - w) * std::pow(m[i], w);
      if (!std::isfinite(next) || !(next > 0.0))
        throw NoConvergence("fixed_point_positive: iterate left the positive cone");
      change = std::max(change, std::abs(next - y[i]) / y[i]);
      y[i] = next;
    }
    out.iterations = it;
    out.last_update = change;
    if (change < tol) {
      out.y = std::move(y);
      return out;
    }
  }
  throw NoConvergence("fixed_point_positive: no contraction below tol after " +
                      std::to_string(opt.max_iterations) + " iterations (last change " +
                      std::to_string(out.last_update) + ")");
}

}  // namespace thinfilm
