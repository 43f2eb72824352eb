#pragma once

// Right-hand sides for the three flows studied here:
//
//  * the oscillatory-component system  P_k(phi) = -lambda |phi|^(alpha-1) phi
//    in companion form, k = 5 (the interface ODE) or k = 3 (the thin-film
//    analogue with operator P_3);
//  * the physical interface ODE in the integrated form
//    f'''' = alpha4 - lambda h,  h' = |f|^(alpha-1) f,
//    which never differentiates the non-Lipschitz term.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "thinfilm/errors.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/params.hpp"

namespace thinfilm {

using State5 = Vec<5>;

inline constexpr double kDefaultRegEps = 1e-10;

/// Coefficients of P(phi) = phi^(order) + sum_{k<order} a[k] phi^(k).
struct CoeffSet {
  int order = 5;
  std::array<double, 5> a{};  ///< a[k] multiplies the k-th derivative
};

inline CoeffSet coeffs_p5(double mu) {
  CoeffSet c;
  c.order = 5;
  c.a[4] = 5.0 * (mu - 2.0);
  c.a[3] = 5.0 * (2.0 * mu * mu - 8.0 * mu + 7.0);
  c.a[2] = 5.0 * (mu - 2.0) * (2.0 * mu * mu - 8.0 * mu + 5.0);
  c.a[1] = (((5.0 * mu - 40.0) * mu + 105.0) * mu - 100.0) * mu + 24.0;
  c.a[0] = falling5(mu);
  return c;
}

inline CoeffSet coeffs_p3(double mu) {
  CoeffSet c;
  c.order = 3;
  c.a[2] = 3.0 * (mu - 1.0);
  c.a[1] = 3.0 * mu * mu - 6.0 * mu + 2.0;
  c.a[0] = mu * (mu - 1.0) * (mu - 2.0);
  return c;
}

/// Regularized odd power |v|^(alpha-1) v -> (v^2 + eps^2)^((alpha-1)/2) v.
/// With eps = 0 the exact power is used, with sign(0) = 0.
inline double odd_power(double v, double alpha, double eps) {
  if (eps > 0.0) return std::pow(v * v + eps * eps, 0.5 * (alpha - 1.0)) * v;
  if (v == 0.0) {
    if (alpha < 0.0) throw SingularState("odd_power: |v|^(alpha-1) v at v = 0 with alpha < 0");
    return 0.0;
  }
  return std::copysign(std::pow(std::abs(v), alpha), v);
}

/// d/dv of odd_power.
inline double odd_power_derivative(double v, double alpha, double eps) {
  if (eps > 0.0) {
    const double r = v * v + eps * eps;
    return std::pow(r, 0.5 * (alpha - 3.0)) * (alpha * v * v + eps * eps);
  }
  if (v == 0.0) {
    if (alpha < 1.0) throw SingularState("odd_power_derivative: singular at v = 0");
    return alpha == 1.0 ? 1.0 : 0.0;
  }
  return alpha * std::pow(std::abs(v), alpha - 1.0);
}

/// The oscillatory-component flow of order `Order` in companion form.
template <std::size_t Order>
struct OscillatorySystem {
  static_assert(Order == 3 || Order == 5);
  static constexpr std::size_t dim = Order;
  using State = Vec<Order>;

  CoeffSet coeffs;
  double alpha = 0.0;
  Lambda lambda = Lambda::plus;
  double eps = kDefaultRegEps;

  double forcing(double phi) const { return -sign(lambda) * odd_power(phi, alpha, eps); }

  State operator()(double, const State& x) const {
    State d;
    for (std::size_t i = 0; i + 1 < Order; ++i) d[i] = x[i + 1];
    double lin = 0.0;
    for (std::size_t k = 0; k < Order; ++k) lin += coeffs.a[k] * x[k];
    d[Order - 1] = -lin + forcing(x[0]);
    return d;
  }

  /// Last row of the Jacobian; rows above are the companion shift.
  std::array<double, Order> jacobian_row(const State& x) const {
    std::array<double, Order> row;
    for (std::size_t k = 0; k < Order; ++k) row[k] = -coeffs.a[k];
    row[0] -= sign(lambda) * odd_power_derivative(x[0], alpha, eps);
    return row;
  }

  /// Constant equilibria: a0 phi = -lambda |phi|^(alpha-1) phi, phi != 0.
  /// Returns the positive one, or 0 if none exists.
  double equilibrium() const {
    const double base = -sign(lambda) / coeffs.a[0];
    if (!(base > 0.0) || alpha == 1.0) return 0.0;
    return std::pow(base, 1.0 / (1.0 - alpha));
  }
};

using System5 = OscillatorySystem<5>;
using System3 = OscillatorySystem<3>;

inline System5 make_system(const PowerParams& p, double reg_eps = kDefaultRegEps) {
  return System5{coeffs_p5(p.mu), p.alpha, p.lambda, reg_eps};
}

/// phi^(5) in companion form for P_5(phi) = -lambda |phi|^(alpha-1) phi.
inline State5 rhs_phi(const State5& state, double mu, double alpha, Lambda lambda,
                      double reg_eps) {
  if (reg_eps < 0.0) throw std::invalid_argument("rhs_phi: reg_eps must be >= 0");
  if (!(alpha > -1.0 && alpha < 1.0)) throw std::invalid_argument("rhs_phi: alpha outside (-1,1)");
  return System5{coeffs_p5(mu), alpha, lambda, reg_eps}(0.0, state);
}

/// Physical interface ODE as the first-order system (f, f', f'', f''', h)
/// with f'''' = alpha4 - lambda h and h' = |f|^(alpha-1) f, h(y_start) = 0.
struct PhysicalSystem {
  static constexpr std::size_t dim = 5;
  double alpha = 0.0;
  Lambda lambda = Lambda::minus;
  double eps = kDefaultRegEps;
  double alpha4 = 0.0;  ///< f''''(y_start)

  State5 operator()(double, const State5& z) const {
    return {z[1], z[2], z[3], alpha4 - sign(lambda) * z[4], odd_power(z[0], alpha, eps)};
  }

  double fourth_derivative(const State5& z) const { return alpha4 - sign(lambda) * z[4]; }
};

inline State5 rhs_physical(const State5& state, double alpha, Lambda lambda, double reg_eps,
                           double alpha4) {
  if (reg_eps < 0.0) throw std::invalid_argument("rhs_physical: reg_eps must be >= 0");
  return PhysicalSystem{alpha, lambda, reg_eps, alpha4}(0.0, state);
}

/// Default integration settings: tolerances 1e-11 and events on the value
/// (zeros) and the first derivative (extrema).
inline IntegrateOptions default_flow_options(Tolerance tol = {}) {
  IntegrateOptions o;
  o.tol = tol;
  o.event_components = {0, 1};
  return o;
}

/// Ordering check for two solutions of the physical ODE started at y = 0
/// from Cauchy data (f, f', f'', f''', f'''') with data1 >= data2
/// componentwise and at least one strict inequality. Returns whether
/// f1 > f2 holds on a fine sample of (0, span] from the dense output.
inline bool comparison_check(const State5& data1, const State5& data2, double alpha,
                             Lambda lambda, double span, double reg_eps = kDefaultRegEps,
                             Tolerance tol = {}) {
  bool strict = false;
  for (std::size_t i = 0; i < 5; ++i) {
    if (data1[i] < data2[i])
      throw std::invalid_argument("comparison_check: data1 must dominate data2");
    strict = strict || data1[i] > data2[i];
  }
  if (!strict) throw std::invalid_argument("comparison_check: data must differ somewhere");
  if (!(span > 0.0)) throw std::invalid_argument("comparison_check: span must be positive");

  auto run = [&](const State5& d) {
    PhysicalSystem sys{alpha, lambda, reg_eps, d[4]};
    IntegrateOptions opt;
    opt.tol = tol;
    return integrate<5>(sys, 0.0, span, State5{d[0], d[1], d[2], d[3], 0.0}, opt);
  };
  const auto t1 = run(data1);
  const auto t2 = run(data2);
  constexpr int samples = 4000;
  for (int i = 1; i <= samples; ++i) {
    const double y = span * i / samples;
    if (!(t1.at(y)[0] > t2.at(y)[0])) return false;
  }
  return true;
}

}  // namespace thinfilm
