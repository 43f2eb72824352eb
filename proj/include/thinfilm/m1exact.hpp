#pragma once

// Exact oscillatory profiles at m = 1 (alpha = 0), where the interface ODE
// becomes f^(5) = +-5! sign f and admits piecewise polynomial solutions.
//
// A single hump f0(y) = y(y+1)(a + b y + c y^2 + y^3) on (-1, 0) is copied
// to the right by the scaling group, each copy shrunk by G and multiplied
// by -G^5. The four C^4 matching conditions at the junction form a linear
// system in (a, b, c) whose solvability is the polynomial D(G) = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/params.hpp"
#include "thinfilm/polyroots.hpp"

namespace thinfilm {

struct HumpPolynomial {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// a + b y + c y^2 + y^3
  Polynomial bracket() const { return Polynomial({a, b, c, 1.0}); }
  /// y (y + 1) (a + b y + c y^2 + y^3)
  Polynomial hump() const { return Polynomial({0.0, 1.0, 1.0}) * bracket(); }
};

/// Solves the last three matching equations for (a, b, c).
inline HumpPolynomial solve_abc(double G) {
  if (!(G > 0.0 && G <= 1.0)) throw std::invalid_argument("solve_abc: G must lie in (0, 1]");
  const double G2 = G * G, G3 = G2 * G;
  HumpPolynomial h;
  h.c = (4.0 * G - 1.0) / (1.0 + G);
  h.b = (-6.0 * G2 - (1.0 - 3.0 * G2) * h.c) / (1.0 + G2);
  h.a = (4.0 * G3 - (1.0 - 2.0 * G3) * h.b - 3.0 * G3 * h.c) / (1.0 + G3);
  return h;
}

/// Residual of the first matching equation once (a, b, c) = solve_abc(G).
inline double first_equation_residual(double G) {
  const HumpPolynomial h = solve_abc(G);
  const double G4 = G * G * G * G;
  return (1.0 - G4) * h.a + G4 * h.b - G4 * h.c + G4;
}

/// Coefficient matrix of the matching system acting on (a, b, c, -1).
inline PolyMatrix4 matching_matrix() {
  const Polynomial one = Polynomial::constant(1.0);
  const Polynomial zero;
  const Polynomial G = Polynomial::identity();
  const Polynomial G2 = G * G, G3 = G2 * G, G4 = G3 * G;
  return {{{one - G4, G4, -G4, -G4},
           {one + G3, one - 2.0 * G3, 3.0 * G3, 4.0 * G3},
           {zero, one + G2, one - 3.0 * G2, -6.0 * G2},
           {zero, zero, one + G, 4.0 * G - one}}};
}

/// D(G), the determinant of the matching matrix.
inline Polynomial discriminant() { return det4(matching_matrix()); }

/// F(G) = 3G^2 - 10G + 3; positive exactly when the hump is positive.
inline double positivity_selector(double G) { return (3.0 * G - 10.0) * G + 3.0; }

struct MatchingRatios {
  double G1 = 0.0;  ///< F(G1) > 0, positive hump
  double G2 = 0.0;  ///< F(G2) < 0
};

inline MatchingRatios find_matching_ratios(double tol = 1e-14) {
  const RootList roots = isolate_real_roots(discriminant(), 0.0, 1.0, tol);
  std::size_t simple = 0;
  for (const Root& r : roots) simple += r.flag == RootFlag::simple;
  if (roots.size() != 2 || simple != 2)
    throw RootCountMismatch("D(G) has " + std::to_string(roots.size()) +
                            " roots in (0,1), expected 2 simple roots");
  MatchingRatios out;
  for (const Root& r : roots) (positivity_selector(r.value) > 0.0 ? out.G1 : out.G2) = r.value;
  if (out.G1 == 0.0 || out.G2 == 0.0)
    throw RootCountMismatch("positivity selector does not separate the two roots of D(G)");
  return out;
}

/// Ratio that belongs to a given sign: lambda = +1 uses the positive hump.
inline double matching_ratio(Lambda lambda) {
  const MatchingRatios r = find_matching_ratios();
  return lambda == Lambda::plus ? r.G1 : r.G2;
}

struct ProfilePiece {
  double left = 0.0;
  double right = 0.0;
  double length = 1.0;  ///< G^k, kept separately since right - left loses digits
  Polynomial poly;      ///< in the local chart u = (y - left) / length
};

struct JunctionJump {
  std::size_t junction = 0;  ///< between piece junction and junction + 1
  int order = 0;
  double jump = 0.0;  ///< normalized by the piece scale G^(5k)
};

/// Piecewise polynomial solution of f^(5) = sign * 5! * sign(f) with
/// sign = lambda, supported to the left of the interface y0.
struct PiecewiseProfile {
  std::vector<ProfilePiece> pieces;
  double G = 0.0;
  double y0 = 0.0;
  Lambda lambda = Lambda::plus;

  double length(std::size_t k) const { return pieces[k].length; }

  /// Index of the piece containing y; y must lie in [left_0, right_last].
  std::size_t locate(double y) const {
    if (pieces.empty()) throw std::invalid_argument("PiecewiseProfile: empty profile");
    if (y < pieces.front().left || y > pieces.back().right)
      throw std::invalid_argument("PiecewiseProfile: y outside the constructed support");
    std::size_t lo = 0, hi = pieces.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (pieces[mid].left <= y)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  /// j-th derivative in y.
  double derivative(double y, unsigned j = 0) const {
    const std::size_t k = locate(y);
    const double len = length(k);
    const double u = (y - pieces[k].left) / len;
    return pieces[k].poly.derivative(j)(u) / std::pow(len, static_cast<double>(j));
  }

  double operator()(double y) const { return derivative(y, 0); }

  /// f^(5) - sign(lambda) 5! sign f at y, normalized by 5!.
  double residual(double y) const {
    const double f = derivative(y, 0);
    const double s = (f > 0.0) - (f < 0.0);
    return (derivative(y, 5) - sign(lambda) * 120.0 * s) / 120.0;
  }

  /// Normalized jumps of orders 0..4 at every junction.
  std::vector<JunctionJump> junction_jumps() const {
    std::vector<JunctionJump> out;
    for (std::size_t k = 0; k + 1 < pieces.size(); ++k) {
      const double lk = length(k), lk1 = length(k + 1);
      const double scale = std::pow(lk, 5.0);
      for (int j = 0; j <= 4; ++j) {
        const double left = pieces[k].poly.derivative(j)(1.0) / std::pow(lk, j);
        const double right = pieces[k + 1].poly.derivative(j)(0.0) / std::pow(lk1, j);
        out.push_back({k, j, std::abs(left - right) * std::pow(lk, j) / scale});
      }
    }
    return out;
  }

  double max_junction_jump() const {
    double m = 0.0;
    for (const JunctionJump& jj : junction_jumps()) m = std::max(m, jj.jump);
    return m;
  }

  /// Interior zeros (junctions) with the slope there.
  std::vector<std::pair<double, double>> zeros_with_slope() const {
    std::vector<std::pair<double, double>> out;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      const double y = pieces[k].left;
      out.emplace_back(y, pieces[k].poly.derivative()(0.0) / length(k));
    }
    return out;
  }
};

/// The map f -> scale gamma^5 f(y / gamma + shift), sign = +-1, which sends
/// solutions of the same piecewise ODE to solutions.
struct RescaledProfile {
  const PiecewiseProfile* base = nullptr;
  double gamma = 1.0;
  double shift = 0.0;
  int flip = 1;

  double inner(double y) const { return y / gamma + shift; }
  double derivative(double y, unsigned j = 0) const {
    return flip * std::pow(gamma, 5.0 - j) * base->derivative(inner(y), j);
  }
  double residual(double y) const {
    const double f = derivative(y, 0);
    const double s = (f > 0.0) - (f < 0.0);
    return (derivative(y, 5) - sign(base->lambda) * 120.0 * s) / 120.0;
  }
};

inline RescaledProfile rescaled(const PiecewiseProfile& p, double gamma, double shift, int flip) {
  if (!(gamma > 0.0)) throw std::invalid_argument("rescaled: gamma must be positive");
  if (flip != 1 && flip != -1) throw std::invalid_argument("rescaled: flip must be +-1");
  return {&p, gamma, shift, flip};
}

inline constexpr double kJunctionTolerance = 1e-9;
inline constexpr std::size_t kDefaultPieces = 40;

/// Assembles n_pieces copies of the hump. Throws MatchingFailure when G is
/// not a matching ratio or the hump sign does not fit lambda.
inline PiecewiseProfile build_profile(double G, Lambda lambda,
                                      std::size_t n_pieces = kDefaultPieces) {
  if (!(G > 0.0 && G < 1.0)) throw std::invalid_argument("build_profile: G must lie in (0,1)");
  if (n_pieces == 0) throw std::invalid_argument("build_profile: need at least one piece");

  const HumpPolynomial h = solve_abc(G);
  // local chart of the base piece: y = u - 1
  const Polynomial base = h.hump().compose(Polynomial({-1.0, 1.0}));

  const double mid = base(0.5);
  if (sign(lambda) * mid <= 0.0)
    throw MatchingFailure("build_profile: hump sign at G=" + std::to_string(G) +
                          " does not match lambda=" + to_string(lambda));
  if (!isolate_real_roots(h.bracket(), -1.0, 0.0, 1e-12).empty())
    throw MatchingFailure("build_profile: hump changes sign inside (-1,0) at G=" +
                          std::to_string(G));

  PiecewiseProfile prof;
  prof.G = G;
  prof.y0 = G / (1.0 - G);
  prof.lambda = lambda;
  double left = -1.0, len = 1.0;
  Polynomial poly = base;
  for (std::size_t k = 0; k < n_pieces; ++k) {
    prof.pieces.push_back({left, left + len, len, poly});
    left += len;
    len *= G;
    poly = poly * (-std::pow(G, 5.0));
  }
  // abutting exactly
  for (std::size_t k = 1; k < n_pieces; ++k) prof.pieces[k].left = prof.pieces[k - 1].right;

  for (const JunctionJump& jj : prof.junction_jumps()) {
    if (!(jj.jump < kJunctionTolerance))
      throw MatchingFailure("build_profile: jump " + std::to_string(jj.jump) + " in derivative " +
                            std::to_string(jj.order) + " at junction " +
                            std::to_string(jj.junction) + " (G=" + std::to_string(G) + ")");
  }
  return prof;
}

/// s-range covered by the constructed pieces: s = ln(y0 - y). Piece k ends
/// at y0 - G^(k+1)/(1-G); the closed form avoids cancellation in y0 - y.
inline std::pair<double, double> oscillatory_support(const PiecewiseProfile& p) {
  const double l1 = std::log1p(-p.G);
  return {static_cast<double>(p.pieces.size()) * std::log(p.G) - l1, -l1};
}

/// phi*(s) = f(y0 - e^s) / (5! e^(5s)). The 1/5! turns f^(5) = 5! sign f
/// into the unit-coefficient oscillatory system.
///
/// The local chart of each piece is reached from s directly so that deep
/// pieces keep full relative precision.
inline double oscillatory_value(const PiecewiseProfile& p, double s) {
  const auto [s_lo, s_hi] = oscillatory_support(p);
  if (s < s_lo - 1e-12 || s > s_hi + 1e-12)
    throw std::invalid_argument("oscillatory_component: s outside the constructed support");
  const double lnG = std::log(p.G);
  const double top = std::log(1.0 + p.y0);  // s at the left end of piece 0
  auto k = static_cast<long>(std::floor((top - s) / -lnG));
  k = std::clamp<long>(k, 0, static_cast<long>(p.pieces.size()) - 1);
  // x = y0 - y = G^k (1 + y0 - u)
  const double xk = std::exp(s - k * lnG);
  const double u = 1.0 + p.y0 - xk;
  return p.pieces[k].poly(u) / (120.0 * std::pow(std::exp(s), 5.0));
}

inline std::vector<double> oscillatory_component(const PiecewiseProfile& p,
                                                 const std::vector<double>& s_grid) {
  std::vector<double> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back(oscillatory_value(p, s));
  return out;
}

/// Phase state (phi, phi', ..., phi'''') of the oscillatory component at its
/// extremum inside the base piece, negated if needed so that phi > 0 there.
struct OscillatorySeed {
  std::array<double, 5> state{};
  double s = 0.0;       ///< location of the extremum
  double period = 0.0;  ///< 2 |ln G|
  double amplitude = 0.0;
};

inline OscillatorySeed oscillatory_seed(const PiecewiseProfile& p) {
  if (p.pieces.empty()) throw std::invalid_argument("oscillatory_seed: empty profile");
  // Q(x) = f(y0 - x) on the base piece, x in (y0, 1 + y0)
  const Polynomial Q = p.pieces.front().poly.compose(Polynomial({1.0 + p.y0, -1.0}));
  std::vector<double> rc(Q.degree() + 1);
  for (std::size_t k = 0; k <= Q.degree(); ++k) rc[k] = (static_cast<double>(k) - 5.0) * Q[k];
  const Polynomial R(rc);  // x^6 d/dx [Q(x) / x^5] up to a factor of x
  auto phi_derivs = [&](double x) {
    std::array<double, 5> d{};
    for (int j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= Q.degree(); ++k) {
        const double e = static_cast<double>(k) - 5.0;
        acc += Q[k] * std::pow(e, j) * std::pow(x, e);
      }
      d[j] = acc / 120.0;
    }
    return d;
  };
  OscillatorySeed best;
  for (const Root& r : isolate_real_roots(R, p.y0, 1.0 + p.y0, 1e-15)) {
    const auto d = phi_derivs(r.value);
    if (std::abs(d[0]) > best.amplitude) {
      best.amplitude = std::abs(d[0]);
      best.state = d;
      best.s = std::log(r.value);
    }
  }
  if (best.amplitude == 0.0) throw MatchingFailure("oscillatory_seed: no extremum on base piece");
  if (best.state[0] < 0.0)
    for (double& v : best.state) v = -v;
  best.period = 2.0 * std::abs(std::log(p.G));
  return best;
}

struct MaximaRatio {
  std::vector<double> y;       ///< absolute maximum point of |f| on each piece
  std::vector<double> ratios;  ///< |f(y_n)| / (y0 - y_n)^5
  double limit = 0.0;
  double max_relative_deviation = 0.0;
};

/// y_n = y0 + G^(n-1) (y_1 - y0), the solution of y_(n+1) = (y_n + 1) G.
inline double maximum_point(double G, double y1, std::size_t n) {
  const double y0 = G / (1.0 - G);
  return y0 + std::pow(G, static_cast<double>(n) - 1.0) * (y1 - y0);
}

inline MaximaRatio maxima_ratio_limit(const PiecewiseProfile& p) {
  if (p.pieces.size() < 10)
    throw std::invalid_argument("maxima_ratio_limit: need at least 10 pieces");
  MaximaRatio out;
  for (std::size_t k = 0; k < p.pieces.size(); ++k) {
    const ProfilePiece& pc = p.pieces[k];
    double u_best = 0.5, v_best = 0.0;
    if (!pc.poly.is_zero() && pc.poly.degree() >= 1) {
      const Polynomial d = pc.poly.derivative();
      if (!d.is_zero() && d.degree() >= 1) {
        for (const Root& r : isolate_real_roots(d, 0.0, 1.0, 1e-15)) {
          const double v = std::abs(pc.poly(r.value));
          if (v > v_best) {
            v_best = v;
            u_best = r.value;
          }
        }
      }
    }
    const double len = pc.length;
    // y0 - y in the local chart keeps precision on deep pieces
    const double dist = len * (1.0 + p.y0) - len * u_best;
    out.y.push_back(pc.left + len * u_best);
    out.ratios.push_back(v_best / std::pow(dist, 5.0));
  }
  out.limit = out.ratios.back();
  for (double r : out.ratios) {
    const double dev = out.limit == 0.0 ? std::abs(r) : std::abs(r / out.limit - 1.0);
    out.max_relative_deviation = std::max(out.max_relative_deviation, dev);
  }
  return out;
}

}  // namespace thinfilm
