#pragma once

// Dense real polynomials and certified real-root isolation.
//
// Root counting uses the derivative chain: the critical points of p on
// (lo, hi) are isolated recursively, which splits the interval into pieces
// on which p is monotone. A monotone piece holds at most one root and it
// holds one exactly when p changes sign across it, so the count is
// certified by construction rather than by sampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

class Polynomial {
 public:
  /// The zero polynomial.
  Polynomial() : c_{0.0} {}
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { normalize(); }
  /// Coefficients lowest degree first.
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { normalize(); }

  static Polynomial constant(double v) { return Polynomial({v}); }
  static Polynomial identity() { return Polynomial({0.0, 1.0}); }

  /// lead * prod (x - r_i)
  static Polynomial from_roots(std::span<const double> roots, double lead = 1.0) {
    Polynomial p = constant(lead);
    for (double r : roots) p *= Polynomial({-r, 1.0});
    return p;
  }

  std::size_t degree() const { return c_.size() - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
  std::span<const double> coeffs() const { return c_; }
  double operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }
  double leading() const { return c_.back(); }

  double operator()(double x) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  /// sum |c_k| |x|^k, the scale against which rounding in Horner is judged.
  double magnitude(double x) const {
    const double ax = std::abs(x);
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * ax + std::abs(*it);
    return acc;
  }

  Polynomial derivative(unsigned order = 1) const {
    if (order == 0) return *this;
    if (degree() < order) return Polynomial();
    std::vector<double> d(c_.size() - order);
    for (std::size_t k = 0; k < d.size(); ++k) {
      double f = 1.0;
      for (unsigned j = 1; j <= order; ++j) f *= static_cast<double>(k + j);
      d[k] = c_[k + order] * f;
    }
    return Polynomial(std::move(d));
  }

  /// p(q(x)) by Horner on polynomials.
  Polynomial compose(const Polynomial& q) const {
    Polynomial acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
      acc *= q;
      acc += constant(*it);
    }
    return acc;
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    normalize();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    normalize();
    return *this;
  }
  Polynomial& operator*=(const Polynomial& o) {
    if (is_zero() || o.is_zero()) {
      *this = Polynomial();
      return *this;
    }
    std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    c_ = std::move(r);
    normalize();
    return *this;
  }
  Polynomial& operator*=(double s) {
    for (double& v : c_) v *= s;
    normalize();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  void normalize() {
    while (c_.size() > 1 && c_.back() == 0.0) c_.pop_back();
    if (c_.empty()) c_.push_back(0.0);
  }

  std::vector<double> c_;
};

enum class PolyOp { add, sub, mul };

inline Polynomial poly_arith(const Polynomial& p, const Polynomial& q, PolyOp op) {
  switch (op) {
    case PolyOp::add: return p + q;
    case PolyOp::sub: return p - q;
    case PolyOp::mul: return p * q;
  }
  throw std::invalid_argument("poly_arith: unknown operation");
}

enum class RootFlag { simple, suspect };

struct Root {
  double value;
  RootFlag flag;
  double lo;  ///< bracket; p(lo) and p(hi) differ in sign for simple roots
  double hi;
};

using RootList = std::vector<Root>;

namespace detail {

inline bool negligible(const Polynomial& p, double x) {
  return std::abs(p(x)) <= 64.0 * std::numeric_limits<double>::epsilon() * p.magnitude(x);
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Root of p on [a, b], where p is monotone and p(a), p(b) have opposite signs.
inline Root refine_monotone(const Polynomial& p, const Polynomial& dp, double a, double b,
                            double tol) {
  double fa = p(a);
  const int sa = sign_of(fa);
  double x = 0.5 * (a + b);
  for (int it = 0; it < 200; ++it) {
    const double fx = p(x);
    if (fx == 0.0) return {x, RootFlag::simple, a, b};
    if (sign_of(fx) == sa) {
      a = x;
      fa = fx;
    } else {
      b = x;
    }
    const double width = b - a;
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;  // bracket collapsed to adjacent doubles
    const double d = dp(x);
    double next = mid;
    if (d != 0.0) {
      const double newton = x - fx / d;
      if (newton > a && newton < b && std::abs(newton - x) < 0.5 * width) next = newton;
    }
    if (width <= tol && std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                                     std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  return {x, RootFlag::simple, a, b};
}

inline RootList isolate(const Polynomial& p, double lo, double hi, double tol) {
  RootList out;
  if (p.degree() == 0) return out;

  std::vector<double> knots{lo};
  std::vector<bool> critical{false};
  if (p.degree() >= 2) {
    for (const Root& r : isolate(p.derivative(), lo, hi, tol)) {
      knots.push_back(r.value);
      critical.push_back(true);
    }
  }
  knots.push_back(hi);
  critical.push_back(false);

  const Polynomial dp = p.derivative();
  for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
    if (negligible(p, knots[i])) {
      // p and p' vanish together to working precision: a possible multiple root
      out.push_back({knots[i], RootFlag::suspect, knots[i], knots[i]});
    }
  }

  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    if ((critical[i] && negligible(p, a)) || (critical[i + 1] && negligible(p, b))) continue;
    const int sa = sign_of(p(a));
    const int sb = sign_of(p(b));
    if (sa == 0 || sb == 0 || sa == sb) continue;
    if (b - a < tol && (critical[i] || critical[i + 1]))
      throw UnresolvedCluster("sign changes closer than tolerance near x = " +
                              std::to_string(0.5 * (a + b)));
    out.push_back(refine_monotone(p, dp, a, b, tol));
  }

  std::sort(out.begin(), out.end(), [](const Root& l, const Root& r) { return l.value < r.value; });
  for (std::size_t i = 1; i < out.size(); ++i) {
    if (out[i].value - out[i - 1].value < tol)
      throw UnresolvedCluster("roots closer than tolerance near x = " +
                              std::to_string(out[i].value));
  }
  return out;
}

}  // namespace detail

/// Every real root of p in the open interval (lo, hi), ascending.
///
/// Simple roots come with a sign-change bracket refined to width <= tol and
/// then Newton-polished. Points where p and p' vanish together are reported
/// once with RootFlag::suspect. Throws UnresolvedCluster when two sign
/// changes cannot be told apart at resolution tol.
inline RootList isolate_real_roots(const Polynomial& p, double lo, double hi, double tol) {
  if (p.is_zero()) throw std::invalid_argument("isolate_real_roots: zero polynomial");
  if (!(tol > 0.0)) throw std::invalid_argument("isolate_real_roots: tol must be positive");
  if (!(lo < hi)) throw std::invalid_argument("isolate_real_roots: empty interval");
  return detail::isolate(p, lo, hi, tol);
}

using PolyMatrix4 = std::array<std::array<Polynomial, 4>, 4>;

/// Determinant by cofactor expansion along the first row.
inline Polynomial det4(const PolyMatrix4& m) {
  auto det3 = [&](std::size_t skip) {
    std::array<std::size_t, 3> cols{};
    for (std::size_t c = 0, k = 0; c < 4; ++c)
      if (c != skip) cols[k++] = c;
    const auto& r1 = m[1];
    const auto& r2 = m[2];
    const auto& r3 = m[3];
    return r1[cols[0]] * (r2[cols[1]] * r3[cols[2]] - r2[cols[2]] * r3[cols[1]]) -
           r1[cols[1]] * (r2[cols[0]] * r3[cols[2]] - r2[cols[2]] * r3[cols[0]]) +
           r1[cols[2]] * (r2[cols[0]] * r3[cols[1]] - r2[cols[1]] * r3[cols[0]]);
  };
  Polynomial d;
  for (std::size_t c = 0; c < 4; ++c) {
    const Polynomial term = m[0][c] * det3(c);
    if (c % 2 == 0)
      d += term;
    else
      d -= term;
  }
  return d;
}

}  // namespace thinfilm
