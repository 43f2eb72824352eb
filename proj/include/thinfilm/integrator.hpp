#pragma once

// Explicit Dormand-Prince 5(4) integrator with the method's own 4th-order
// continuous extension, used both as dense output and for locating sign
// changes of selected components.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "thinfilm/errors.hpp"

namespace thinfilm {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Tolerance {
  double abs = 1e-11;
  double rel = 1e-11;
};

struct Event {
  double s = 0.0;
  std::size_t component = 0;
  int direction = 0;  ///< +1 when the component goes from negative to positive
};

struct IntegrateOptions {
  Tolerance tol;
  double initial_step = 0.0;  ///< 0 picks a step from the local derivative scale
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  bool record = true;  ///< keep every step for dense evaluation
  std::vector<std::size_t> event_components;
  std::size_t max_steps = 20'000'000;
};

/// Coefficients of the continuous extension on one accepted step.
template <std::size_t N>
struct DenseSegment {
  double s0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> r{};

  Vec<N> at(double s) const {
    const double t = (s - s0) / h;
    const double t1 = 1.0 - t;
    Vec<N> out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r[0][i] + t * (r[1][i] + t1 * (r[2][i] + t * (r[3][i] + t1 * r[4][i])));
    return out;
  }
};

template <std::size_t N>
struct Trajectory {
  std::vector<double> s;
  std::vector<Vec<N>> x;
  std::vector<DenseSegment<N>> segments;
  std::vector<Event> events;
  bool stopped_by_event = false;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  double s_begin() const { return s.front(); }
  double s_end() const { return s.back(); }
  const Vec<N>& final_state() const { return x.back(); }

  /// Dense evaluation; needs IntegrateOptions::record.
  Vec<N> at(double q) const {
    if (segments.empty()) return x.back();
    if (q <= segments.front().s0) return segments.front().at(q);
    auto it = std::upper_bound(segments.begin(), segments.end(), q,
                               [](double v, const DenseSegment<N>& seg) { return v < seg.s0; });
    return std::prev(it)->at(q);
  }
};

namespace dopri {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
}  // namespace dopri

struct NoStop {
  template <std::size_t N>
  bool operator()(const Event&, const Vec<N>&) const { return false; }
};

/// Integrates x' = rhs(s, x) from s0 to s1 (s1 > s0).
///
/// Sign changes of the components listed in opt.event_components are
/// located on the continuous extension to ~1e-13 and logged. `on_event`
/// may return true to stop the integration at the event; the trajectory
/// then ends exactly there.
template <std::size_t N, class Rhs, class OnEvent = NoStop>
Trajectory<N> integrate(Rhs&& rhs, double s0, double s1, const Vec<N>& x0,
                        const IntegrateOptions& opt = {}, OnEvent&& on_event = {}) {
  using namespace dopri;
  if (!(opt.tol.abs > 0.0) || !(opt.tol.rel > 0.0))
    throw std::invalid_argument("integrate: tolerances must be positive");
  if (!(s1 > s0)) throw std::invalid_argument("integrate: need s1 > s0");

  Trajectory<N> tr;
  tr.s.push_back(s0);
  tr.x.push_back(x0);

  Vec<N> x = x0, k1, k2, k3, k4, k5, k6, k7, tmp, xn;
  double s = s0;
  k1 = rhs(s, x);

  auto scale = [&](std::size_t i, const Vec<N>& a, const Vec<N>& b) {
    return opt.tol.abs + opt.tol.rel * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    double d0 = 0.0, d1n = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = scale(i, x, x);
      d0 += (x[i] / sc) * (x[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1n = std::sqrt(d1n / N);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    // a component starting at zero under a tiny abs tolerance would otherwise
    // give a guess below min_step; rejection shrinks it from here if needed
    h = std::clamp(h, 1e-6 * (s1 - s0), 1e-2 * (s1 - s0));
  }
  h = std::min({h, opt.max_step, s1 - s0});

  bool last_rejected = false;
  std::size_t steps = 0;
  while (s < s1) {
    if (++steps > opt.max_steps)
      throw StepUnderflow("integrate: step budget exhausted at s=" + std::to_string(s));
    const bool final_step = s + h >= s1;
    if (final_step) h = s1 - s;
    if (h < opt.min_step * std::max(1.0, std::abs(s)) && !final_step)
      throw StepUnderflow("integrate: step collapsed below " + std::to_string(opt.min_step) +
                          " at s=" + std::to_string(s));

    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * a21 * k1[i];
    k2 = rhs(s + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = x[i] + h * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(s + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = x[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(s + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = x[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(s + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = x[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(s + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      xn[i] = x[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = rhs(s + h, xn);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < N; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double r = e / scale(i, x, xn);
      err += r * r;
      finite = finite && std::isfinite(xn[i]);
    }
    err = std::sqrt(err / N);
    if (!finite || !std::isfinite(err)) err = 1e10;

    if (err > 1.0) {
      h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
      last_rejected = true;
      ++tr.rejected;
      continue;
    }

    DenseSegment<N> seg;
    seg.s0 = s;
    seg.h = h;
    for (std::size_t i = 0; i < N; ++i) {
      const double dy = xn[i] - x[i];
      const double bspl = h * k1[i] - dy;
      seg.r[0][i] = x[i];
      seg.r[1][i] = dy;
      seg.r[2][i] = bspl;
      seg.r[3][i] = dy - h * k7[i] - bspl;
      seg.r[4][i] =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }

    // events inside (s, s + h]
    std::vector<Event> found;
    for (std::size_t c : opt.event_components) {
      const double va = x[c], vb = xn[c];
      if (!((va < 0.0 && vb >= 0.0) || (va > 0.0 && vb <= 0.0))) continue;
      double lo = s, hi = s + h, flo = va, fhi = vb;
      if (vb == 0.0) {
        found.push_back({hi, c, va < 0.0 ? 1 : -1});
        continue;
      }
      // Illinois-modified regula falsi on the interpolant
      int side = 0;
      for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = (lo * fhi - hi * flo) / (fhi - flo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double fm = seg.at(mid)[c];
        if (fm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
          if (side == -1) fhi *= 0.5;
          side = -1;
        } else {
          hi = mid;
          fhi = fm;
          if (side == 1) flo *= 0.5;
          side = 1;
        }
      }
      found.push_back({0.5 * (lo + hi), c, va < 0.0 ? 1 : -1});
    }
    std::sort(found.begin(), found.end(), [](const Event& a, const Event& b) { return a.s < b.s; });

    bool stop = false;
    for (const Event& ev : found) {
      tr.events.push_back(ev);
      if (on_event(ev, seg.at(ev.s))) {
        const Vec<N> xe = seg.at(ev.s);
        if (opt.record) {
          DenseSegment<N> cut = seg;
          tr.segments.push_back(cut);
        }
        tr.s.push_back(ev.s);
        tr.x.push_back(xe);
        tr.stopped_by_event = true;
        stop = true;
        break;
      }
    }
    ++tr.accepted;
    if (stop) break;

    s += h;
    x = xn;
    k1 = k7;
    if (opt.record) {
      tr.segments.push_back(seg);
      tr.s.push_back(s);
      tr.x.push_back(x);
    } else {
      tr.s.back() = s;
      tr.x.back() = x;
    }

    double fac = std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-16), -0.2)));
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(h * fac, opt.max_step);
  }
  return tr;
}

}  // namespace thinfilm
