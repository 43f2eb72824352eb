#pragma once

// Coefficient sign tables of P_5 (nonexistence and hyperbolicity ranges of
// mu), the two integral identities every periodic orbit must satisfy, and
// the radius of the absorbing ball.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/odeflow.hpp"
#include "thinfilm/orbits.hpp"
#include "thinfilm/polyroots.hpp"

namespace thinfilm {

/// a0..a4 of P_5 as polynomials in mu.
inline Polynomial coeff_polynomial(int k) {
  const Polynomial mu = Polynomial::identity();
  const Polynomial one = Polynomial::constant(1.0);
  switch (k) {
    case 4: return 5.0 * (mu - 2.0 * one);
    case 3: return 5.0 * Polynomial({7.0, -8.0, 2.0});
    case 2: return 5.0 * (mu - 2.0 * one) * Polynomial({5.0, -8.0, 2.0});
    case 1: return Polynomial({24.0, -100.0, 105.0, -40.0, 5.0});
    case 0: {
      std::vector<double> roots{0.0, 1.0, 2.0, 3.0, 4.0};
      return Polynomial::from_roots(roots);
    }
  }
  throw std::invalid_argument("coeff_polynomial: k must be 0..4");
}

inline std::string coeff_name(int k) { return "a" + std::to_string(k); }

enum class SignReq { positive, nonnegative, negative, nonpositive };

struct SignCondition {
  int coeff;  ///< index into a0..a4
  SignReq req;
};

struct BoundingRoot {
  std::string poly;
  double value;
};

struct MuInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;
};

/// Maximal subintervals of (lo, hi) on which every condition holds, built
/// from the certified roots of the coefficient polynomials.
inline std::vector<MuInterval> sign_table(const std::vector<SignCondition>& conds, double lo,
                                          double hi, std::vector<BoundingRoot>* roots_out) {
  struct Knot {
    double x;
    std::vector<int> polys;
  };
  std::vector<Knot> knots;
  for (const SignCondition& c : conds) {
    for (const Root& r : isolate_real_roots(coeff_polynomial(c.coeff), lo, hi, 1e-15)) {
      auto it = std::find_if(knots.begin(), knots.end(),
                             [&](const Knot& k) { return std::abs(k.x - r.value) < 1e-12; });
      if (it == knots.end())
        knots.push_back({r.value, {c.coeff}});
      else
        it->polys.push_back(c.coeff);
    }
  }
  std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) { return a.x < b.x; });

  auto holds = [&](double mu, bool at_root, const std::vector<int>& zero_polys) {
    for (const SignCondition& c : conds) {
      const bool zero =
          at_root && std::find(zero_polys.begin(), zero_polys.end(), c.coeff) != zero_polys.end();
      const double v = zero ? 0.0 : coeff_polynomial(c.coeff)(mu);
      bool ok = false;
      switch (c.req) {
        case SignReq::positive: ok = v > 0.0; break;
        case SignReq::nonnegative: ok = v >= 0.0; break;
        case SignReq::negative: ok = v < 0.0; break;
        case SignReq::nonpositive: ok = v <= 0.0; break;
      }
      if (!ok) return false;
    }
    return true;
  };

  std::vector<double> xs{lo};
  for (const Knot& k : knots) xs.push_back(k.x);
  xs.push_back(hi);

  std::vector<MuInterval> out;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (!holds(0.5 * (xs[i] + xs[i + 1]), false, {})) continue;
    const bool lo_ok = i > 0 && holds(xs[i], true, knots[i - 1].polys);
    const bool hi_ok = i + 1 < xs.size() - 1 && holds(xs[i + 1], true, knots[i].polys);
    if (!out.empty() && out.back().hi == xs[i] && out.back().hi_closed) {
      out.back().hi = xs[i + 1];
      out.back().hi_closed = hi_ok;
    } else {
      out.push_back({xs[i], xs[i + 1], lo_ok, hi_ok});
    }
  }
  if (roots_out) {
    for (const MuInterval& iv : out) {
      for (const Knot& k : knots) {
        if (k.x == iv.lo || k.x == iv.hi)
          for (int p : k.polys) roots_out->push_back({coeff_name(p), k.x});
      }
    }
  }
  return out;
}

enum class IntervalKind { nonexistence_minus, nonexistence_plus, hyperbolicity };

inline std::string to_string(IntervalKind k) {
  switch (k) {
    case IntervalKind::nonexistence_minus: return "nonexistence_minus";
    case IntervalKind::nonexistence_plus: return "nonexistence_plus";
    case IntervalKind::hyperbolicity: return "hyperbolicity";
  }
  return "?";
}

struct IntervalReport {
  IntervalKind kind = IntervalKind::nonexistence_minus;
  MuInterval mu;
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  std::vector<BoundingRoot> bounding_roots;
  /// Where the sign conditions hold, before restricting to admissible mu.
  std::vector<MuInterval> sign_intervals;

  bool contains(double m) const {
    return (m > mu.lo || (mu.lo_closed && m == mu.lo)) &&
           (m < mu.hi || (mu.hi_closed && m == mu.hi));
  }
};

/// alpha = (mu - 5)/mu
inline double alpha_of_mu(double mu) { return (mu - 5.0) / mu; }

/// alpha > -1 is mu > 5/2; the upper end of the scan is arbitrary.
inline constexpr double kMuAdmissibleLo = 2.5;
inline constexpr double kMuScanHi = 50.0;

namespace detail {

inline IntervalReport restrict_admissible(IntervalKind kind, std::vector<MuInterval> sign,
                                          std::vector<BoundingRoot> roots) {
  IntervalReport r;
  r.kind = kind;
  r.sign_intervals = sign;
  for (const MuInterval& iv : sign) {
    if (iv.hi <= kMuAdmissibleLo) continue;
    r.mu = iv;
    if (iv.lo <= kMuAdmissibleLo) {
      r.mu.lo = kMuAdmissibleLo;
      r.mu.lo_closed = false;
    }
    break;
  }
  for (const BoundingRoot& b : roots)
    if (b.value == r.mu.lo || b.value == r.mu.hi) r.bounding_roots.push_back(b);
  if (r.mu.lo == kMuAdmissibleLo)
    r.bounding_roots.insert(r.bounding_roots.begin(), {"alpha>-1", kMuAdmissibleLo});
  r.alpha_lo = alpha_of_mu(r.mu.lo);
  r.alpha_hi = alpha_of_mu(r.mu.hi);
  return r;
}

}  // namespace detail

struct NonexistenceReports {
  IntervalReport minus;  ///< lambda = -1: a1 > 0 and a3 < 0
  IntervalReport plus;   ///< lambda = +1: a4 >= 0 and a2 <= 0
};

inline NonexistenceReports nonexistence_intervals() {
  NonexistenceReports out;
  {
    std::vector<BoundingRoot> roots;
    auto sign = sign_table({{1, SignReq::positive}, {3, SignReq::negative}}, 0.0, kMuScanHi,
                           &roots);
    out.minus = detail::restrict_admissible(IntervalKind::nonexistence_minus, sign, roots);
  }
  {
    std::vector<BoundingRoot> roots;
    auto sign = sign_table({{4, SignReq::nonnegative}, {2, SignReq::nonpositive}}, 0.0,
                           kMuScanHi, &roots);
    out.plus = detail::restrict_admissible(IntervalKind::nonexistence_plus, sign, roots);
  }
  return out;
}

/// Coefficient conditions a4 >= 0, a2 <= 0, a0 >= 0, restricted to the part
/// of the admissible range where lambda = -1 orbits are not excluded.
inline IntervalReport hyperbolicity_interval() {
  std::vector<BoundingRoot> roots;
  auto sign = sign_table(
      {{4, SignReq::nonnegative}, {2, SignReq::nonpositive}, {0, SignReq::nonnegative}}, 0.0,
      kMuScanHi, &roots);
  const IntervalReport excl = nonexistence_intervals().minus;
  IntervalReport r;
  r.kind = IntervalKind::hyperbolicity;
  r.sign_intervals = sign;
  for (const MuInterval& iv : sign) {
    if (iv.hi <= excl.mu.hi) continue;
    r.mu = iv;
    if (iv.lo <= excl.mu.hi) {
      r.mu.lo = excl.mu.hi;
      r.mu.lo_closed = false;
      r.bounding_roots.push_back({"a1", excl.mu.hi});
    }
    break;
  }
  for (const BoundingRoot& b : roots)
    if (b.value == r.mu.hi) r.bounding_roots.push_back(b);
  r.alpha_lo = alpha_of_mu(r.mu.lo);
  r.alpha_hi = alpha_of_mu(r.mu.hi);
  return r;
}

/// Whether an orbit at mu and lambda is excluded by the coefficient signs.
inline bool orbit_excluded(double mu, Lambda lambda) {
  const NonexistenceReports r = nonexistence_intervals();
  return (lambda == Lambda::minus ? r.minus : r.plus).contains(mu);
}

struct IdentityResiduals {
  double r1 = 0.0;
  double r2 = 0.0;
  std::array<double, 4> terms1{};  ///< a4 I2, -a2 I1, a0 I0, lambda J
  std::array<double, 3> terms2{};  ///< I3, -a3 I2, a1 I1
};

inline constexpr int kIdentityNodes = 2048;

namespace detail {

/// Quintic smoothstep: w(0) = 0, w(1) = 1, w' and w'' vanish at both ends.
inline double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
inline double smoothstep_derivative(double t) { return 30.0 * t * t * (1.0 - t) * (1.0 - t); }

}  // namespace detail

/// Relative residuals of
///   a4 int phi''^2 - a2 int phi'^2 + a0 int phi^2 + lambda int |phi|^(alpha+1) = 0,
///   int phi'''^2 - a3 int phi''^2 + a1 int phi'^2 = 0
/// over one period, normalized by the largest term of either identity.
///
/// The period is split at the zeros of phi, where |phi|^(alpha+1) has a
/// cusp. Each piece gets its share of the nodes, mapped through a
/// smoothstep so the cusp is flattened before composite Simpson.
inline IdentityResiduals identity_residuals(const OrbitResult& orbit, const PowerParams& p,
                                            double reg_eps = kDefaultRegEps,
                                            const OrbitOptions& o = {}, int nodes = kIdentityNodes) {
  if (!orbit.converged) throw std::invalid_argument("identity_residuals: orbit not converged");
  if (!(p.alpha > -1.0)) throw std::invalid_argument("identity_residuals: need alpha > -1");
  if (nodes < 2) throw std::invalid_argument("identity_residuals: need at least two nodes");
  const System5 sys = make_system(p, reg_eps);
  const Trajectory<5> tr = orbit_trajectory(sys, orbit, o);
  const CoeffSet c = coeffs_p5(p.mu);

  std::vector<double> cuts{0.0};
  for (const Event& e : tr.events)
    if (e.component == 0 && e.s > cuts.back() && e.s < orbit.period) cuts.push_back(e.s);
  cuts.push_back(orbit.period);

  std::array<double, 5> I{};  // int phi^2, phi'^2, phi''^2, phi'''^2, |phi|^(alpha+1)
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double a = cuts[j], len = cuts[j + 1] - cuts[j];
    int m = static_cast<int>(std::ceil(nodes * len / orbit.period));
    m = std::max(m + (m % 2), 16);
    const double h = 1.0 / m;
    for (int i = 0; i <= m; ++i) {
      const double t = i * h;
      const double w = ((i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0 * len *
                       detail::smoothstep_derivative(t);
      if (w == 0.0) continue;
      const Vec<5> x = tr.at(a + len * detail::smoothstep(t));
      for (int k = 0; k < 4; ++k) I[k] += w * x[k] * x[k];
      I[4] += w * std::pow(std::abs(x[0]), p.alpha + 1.0);
    }
  }

  IdentityResiduals r;
  r.terms1 = {c.a[4] * I[2], -c.a[2] * I[1], c.a[0] * I[0], sign(p.lambda) * I[4]};
  r.terms2 = {I[3], -c.a[3] * I[2], c.a[1] * I[1]};
  double big = 0.0, sum1 = 0.0, sum2 = 0.0;
  for (double t : r.terms1) {
    sum1 += t;
    big = std::max(big, std::abs(t));
  }
  for (double t : r.terms2) {
    sum2 += t;
    big = std::max(big, std::abs(t));
  }
  r.r1 = big > 0.0 ? std::abs(sum1) / big : 0.0;
  r.r2 = big > 0.0 ? std::abs(sum2) / big : 0.0;
  return r;
}

struct AbsorbingBound {
  double value = 0.0;
  bool in_range = true;  ///< alpha in [0, 1), where the bound is proved
};

/// C* = (5!)^(-1/(1-alpha)).
inline AbsorbingBound absorbing_bound(double alpha) {
  if (!(alpha < 1.0)) throw std::invalid_argument("absorbing_bound: need alpha < 1");
  return {std::pow(120.0, -1.0 / (1.0 - alpha)), alpha >= 0.0};
}

}  // namespace thinfilm
