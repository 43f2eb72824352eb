#pragma once

// Periodic oscillatory components: relaxation, Newton shooting with the
// monodromy matrix as Jacobian, Floquet multipliers, and continuation in a
// scalar parameter up to the heteroclinic breakdown of the orbit.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "thinfilm/errors.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/m1exact.hpp"
#include "thinfilm/odeflow.hpp"
#include "thinfilm/params.hpp"
#include "thinfilm/polyroots.hpp"

namespace thinfilm {

enum class OrbitMethod { relaxation, shooting };

inline std::string to_string(OrbitMethod m) {
  return m == OrbitMethod::relaxation ? "relaxation" : "shooting";
}

template <std::size_t N>
struct Orbit {
  Vec<N> section_state{};  ///< phi' = 0, phi'' < 0
  double period = 0.0;
  double amplitude = 0.0;  ///< max |phi| over one period
  double phi_min = 0.0;
  double phi_max = 0.0;
  std::vector<std::complex<double>> floquet;  ///< sorted by decreasing modulus
  bool converged = false;
  OrbitMethod method = OrbitMethod::shooting;
  double residual = 0.0;  ///< |Phi_T(x) - x|_inf / |x|_inf
  int newton_iterations = 0;

  /// Largest modulus among the multipliers other than the one closest to 1.
  double max_nontrivial_multiplier() const {
    if (floquet.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t trivial = 0;
    for (std::size_t i = 1; i < floquet.size(); ++i)
      if (std::abs(floquet[i] - 1.0) < std::abs(floquet[trivial] - 1.0)) trivial = i;
    double m = 0.0;
    for (std::size_t i = 0; i < floquet.size(); ++i)
      if (i != trivial) m = std::max(m, std::abs(floquet[i]));
    return m;
  }

  double trivial_multiplier_distance() const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& z : floquet) d = std::min(d, std::abs(z - 1.0));
    return d;
  }
};

using OrbitResult = Orbit<5>;

/// Settings shared by every orbit computation.
struct OrbitOptions {
  Tolerance tol{1e-11, 1e-11};
  double newton_tol = 1e-9;  ///< on the relative residual
  int max_newton = 25;
  int max_damping = 8;
  double equilibrium_ratio = 1e-6;  ///< derivatives below this times |phi| mean "constant"
};

template <std::size_t N>
double inf_norm(const Vec<N>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Absolute tolerance follows the size of the orbit, whose amplitude can
/// be anywhere between 1e-5 and 1.
template <std::size_t N>
IntegrateOptions orbit_integrate_options(const OrbitOptions& o, const Vec<N>& x) {
  IntegrateOptions io;
  io.tol = o.tol;
  io.tol.abs = o.tol.abs * std::clamp(inf_norm(x), 1e-8, 1.0);
  io.record = false;
  return io;
}

/// Companion system plus its variational equations Y' = J(x) Y.
template <class Sys>
struct VariationalSystem {
  static constexpr std::size_t n = Sys::dim;
  static constexpr std::size_t dim = n + n * n;
  const Sys& sys;

  Vec<dim> operator()(double s, const Vec<dim>& z) const {
    Vec<n> x;
    std::copy_n(z.begin(), n, x.begin());
    const Vec<n> dx = sys(s, x);
    const auto row = sys.jacobian_row(x);
    Vec<dim> dz;
    std::copy_n(dx.begin(), n, dz.begin());
    const double* Y = z.data() + n;
    double* dY = dz.data() + n;
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t c = 0; c < n; ++c) dY[i * n + c] = Y[(i + 1) * n + c];
    for (std::size_t c = 0; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += row[k] * Y[k * n + c];
      dY[(n - 1) * n + c] = acc;
    }
    return dz;
  }
};

template <std::size_t N>
using Mat = Eigen::Matrix<double, static_cast<int>(N), static_cast<int>(N)>;

template <class Sys>
Vec<Sys::dim> flow(const Sys& sys, const Vec<Sys::dim>& x, double T, const OrbitOptions& o) {
  return integrate<Sys::dim>(sys, 0.0, T, x, orbit_integrate_options<Sys::dim>(o, x))
      .final_state();
}

/// Phi_T(x) and the monodromy matrix dPhi_T/dx.
template <class Sys>
std::pair<Vec<Sys::dim>, Mat<Sys::dim>> flow_with_monodromy(const Sys& sys,
                                                            const Vec<Sys::dim>& x, double T,
                                                            const OrbitOptions& o) {
  constexpr std::size_t n = Sys::dim;
  using V = VariationalSystem<Sys>;
  Vec<V::dim> z{};
  std::copy(x.begin(), x.end(), z.begin());
  for (std::size_t i = 0; i < n; ++i) z[n + i * n + i] = 1.0;
  IntegrateOptions io = orbit_integrate_options<n>(o, x);
  const Vec<V::dim> zT = integrate<V::dim>(V{sys}, 0.0, T, z, io).final_state();
  Vec<n> xT;
  std::copy_n(zT.begin(), n, xT.begin());
  Mat<n> M;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) M(i, c) = zT[n + i * n + c];
  return {xT, M};
}

template <std::size_t N>
std::vector<std::complex<double>> multipliers(const Mat<N>& M) {
  Eigen::EigenSolver<Mat<N>> es(M, false);
  std::vector<std::complex<double>> out;
  for (int i = 0; i < static_cast<int>(N); ++i) out.push_back(es.eigenvalues()[i]);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return std::abs(a) > std::abs(b); });
  return out;
}

/// Range of phi over one period, from the extremum events.
template <class Sys>
void measure_orbit(const Sys& sys, Orbit<Sys::dim>& orb, const OrbitOptions& o) {
  constexpr std::size_t n = Sys::dim;
  IntegrateOptions io = orbit_integrate_options<n>(o, orb.section_state);
  io.event_components = {1};
  double lo = orb.section_state[0], hi = orb.section_state[0];
  auto tr = integrate<n>(sys, 0.0, orb.period, orb.section_state, io,
                         [&](const Event&, const Vec<n>& x) {
                           lo = std::min(lo, x[0]);
                           hi = std::max(hi, x[0]);
                           return false;
                         });
  lo = std::min(lo, tr.final_state()[0]);
  hi = std::max(hi, tr.final_state()[0]);
  orb.phi_min = lo;
  orb.phi_max = hi;
  orb.amplitude = std::max(std::abs(lo), std::abs(hi));
}

template <std::size_t N>
bool looks_constant(const Vec<N>& x, double ratio) {
  double d = 0.0;
  for (std::size_t i = 1; i < N; ++i) d = std::max(d, std::abs(x[i]));
  return d <= ratio * std::abs(x[0]) || inf_norm(x) == 0.0;
}

/// Newton shooting for a periodic orbit through the section phi' = 0.
///
/// Unknowns are the section state without its phi' entry and the period T.
/// The Jacobian is [M - I without column 1 | f(Phi_T(x))] with M the
/// monodromy matrix. Steps are damped until the residual decreases.
template <class Sys>
Orbit<Sys::dim> shoot(const Sys& sys, Vec<Sys::dim> x, double T, const OrbitOptions& o = {}) {
  constexpr std::size_t n = Sys::dim;
  using MatN = Mat<n>;
  using VecN = Eigen::Matrix<double, static_cast<int>(n), 1>;
  if (!(T > 0.0)) throw std::invalid_argument("shoot: period guess must be positive");
  x[1] = 0.0;

  auto rel_residual = [&](const Vec<n>& xs, const Vec<n>& xT) {
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r = std::max(r, std::abs(xT[i] - xs[i]));
    return r / std::max(inf_norm(xs), std::numeric_limits<double>::min());
  };

  Orbit<n> orb;
  orb.method = OrbitMethod::shooting;
  Vec<n> xT;
  MatN M;
  try {
    std::tie(xT, M) = flow_with_monodromy(sys, x, T, o);
  } catch (const StepUnderflow& e) {
    throw NewtonDiverged(std::string("shoot: flow from the initial guess failed: ") + e.what());
  }
  double res = rel_residual(x, xT);
  for (int it = 0;; ++it) {
    if (looks_constant(x, o.equilibrium_ratio))
      throw NewtonDiverged("shoot: iterate collapsed onto a constant equilibrium");
    if (res < o.newton_tol) {
      orb.newton_iterations = it;
      break;
    }
    if (it >= o.max_newton)
      throw NewtonDiverged("shoot: no convergence after " + std::to_string(o.max_newton) +
                           " Newton steps, residual " + std::to_string(res));
    MatN A;
    VecN r;
    const Vec<n> fT = sys(0.0, xT);
    for (std::size_t i = 0; i < n; ++i) r(i) = xT[i] - x[i];
    for (std::size_t c = 0, col = 0; c < n; ++c) {
      if (c == 1) continue;
      for (std::size_t i = 0; i < n; ++i) A(i, col) = M(i, c) - (i == c ? 1.0 : 0.0);
      ++col;
    }
    for (std::size_t i = 0; i < n; ++i) A(i, n - 1) = fT[i];
    const VecN du = A.colPivHouseholderQr().solve(-r);
    if (!du.allFinite()) throw NewtonDiverged("shoot: singular Newton system");

    double step = 1.0;
    bool accepted = false;
    for (int d = 0; d <= o.max_damping; ++d, step *= 0.5) {
      Vec<n> xn = x;
      for (std::size_t c = 0, col = 0; c < n; ++c) {
        if (c == 1) continue;
        xn[c] += step * du(col++);
      }
      const double Tn = T + step * du(n - 1);
      if (!(Tn > 0.0)) continue;
      try {
        auto [xTn, Mn] = flow_with_monodromy(sys, xn, Tn, o);
        const double rn = rel_residual(xn, xTn);
        if (std::isfinite(rn) && rn < res) {
          x = xn;
          T = Tn;
          xT = xTn;
          M = Mn;
          res = rn;
          accepted = true;
          break;
        }
      } catch (const StepUnderflow&) {
      }
    }
    if (!accepted)
      throw NewtonDiverged("shoot: damped Newton step failed to reduce residual " +
                           std::to_string(res));
  }

  // re-anchor at a maximum; the system is odd so -x is an orbit too
  if (x[2] > 0.0) {
    for (double& v : x) v = -v;
  }
  orb.section_state = x;
  orb.period = T;
  orb.residual = res;
  orb.converged = true;
  orb.floquet = multipliers<n>(M);
  measure_orbit(sys, orb, o);
  return orb;
}

/// Seed from the exact piecewise polynomial solution at m = 1.
inline Orbit<5> exact_seed(Lambda lambda, std::size_t pieces = kDefaultPieces) {
  const PiecewiseProfile prof = build_profile(matching_ratio(lambda), lambda, pieces);
  const OscillatorySeed s = oscillatory_seed(prof);
  Orbit<5> o;
  o.section_state = s.state;
  o.period = s.period;
  o.amplitude = s.amplitude;
  return o;
}

struct RelaxationOptions {
  double tol = 1e-5;  ///< relative agreement of successive extrema
  int window = 3;     ///< K successive cycles that must agree
  double start_scale = 3e-3;
  double blowup = 1e6;
};

/// Integrates forward from generic data until the maxima, minima and their
/// spacing repeat, then polishes the cycle by shooting.
template <class Sys>
Orbit<Sys::dim> relax(const Sys& sys, double s_max, const RelaxationOptions& ro = {},
                      const OrbitOptions& o = {}) {
  constexpr std::size_t n = Sys::dim;
  Vec<n> x0{};
  x0[0] = ro.start_scale;

  struct Peak {
    double s;
    Vec<n> x;
  };
  std::vector<Peak> maxima;
  std::vector<double> minima;
  const auto K = static_cast<std::size_t>(ro.window);
  int settled_q = 0;

  auto settled = [&]() -> int {
    for (std::size_t q = 1; q <= 3; ++q) {
      if (maxima.size() < K * q + q + 1 || minima.size() < K * q + 1) continue;
      const std::size_t L = maxima.size();
      const double spread = maxima.back().x[0] - minima.back();
      if (!(spread > 0.0)) return 0;
      bool ok = true;
      for (std::size_t k = 0; k < K && ok; ++k) {
        const std::size_t i = L - 1 - k;
        const double gap = maxima[i].s - maxima[i - q].s;
        const double gap_prev = maxima[i - q].s - maxima[i - 2 * q].s;
        ok = std::abs(maxima[i].x[0] - maxima[i - q].x[0]) < ro.tol * spread &&
             std::abs(minima[minima.size() - 1 - k] - minima[minima.size() - 1 - k - q]) <
                 ro.tol * spread &&
             std::abs(gap - gap_prev) < ro.tol * gap;
      }
      if (ok) return static_cast<int>(q);
    }
    return 0;
  };

  IntegrateOptions io;
  io.tol = o.tol;
  io.record = false;
  io.event_components = {1};
  bool blew_up = false;
  integrate<n>(sys, 0.0, s_max, x0, io, [&](const Event& ev, const Vec<n>& x) {
    if (std::abs(x[0]) > ro.blowup) {
      blew_up = true;
      return true;
    }
    if (ev.direction < 0)
      maxima.push_back({ev.s, x});
    else
      minima.push_back(x[0]);
    if (ev.direction < 0) settled_q = settled();
    return settled_q > 0;
  });
  if (blew_up) throw NoSettling("relax: trajectory left every bounded set");
  if (settled_q == 0)
    throw NoSettling("relax: extrema did not settle within s_max = " + std::to_string(s_max));

  const Peak& last = maxima.back();
  const double T = last.s - maxima[maxima.size() - 1 - settled_q].s;
  Orbit<n> orb = shoot(sys, last.x, T, o);
  orb.method = OrbitMethod::relaxation;
  return orb;
}

/// detect_relaxation for the fifth-order component system.
inline OrbitResult detect_relaxation(const PowerParams& p, double s_max = 400.0,
                                     double tol = 1e-5, double reg_eps = kDefaultRegEps,
                                     const OrbitOptions& o = {}) {
  RelaxationOptions ro;
  ro.tol = tol;
  return relax(make_system(p, reg_eps), s_max, ro, o);
}

inline OrbitResult detect_shooting(const PowerParams& p, const OrbitResult& seed,
                                   double reg_eps = kDefaultRegEps, const OrbitOptions& o = {}) {
  return shoot(make_system(p, reg_eps), seed.section_state, seed.period, o);
}

/// Recomputes the Floquet multipliers of a converged orbit.
template <class Sys>
std::vector<std::complex<double>> monodromy(const Sys& sys, const Orbit<Sys::dim>& orb,
                                            const OrbitOptions& o = {}) {
  if (!orb.converged) throw std::invalid_argument("monodromy: orbit not converged");
  return multipliers<Sys::dim>(flow_with_monodromy(sys, orb.section_state, orb.period, o).second);
}

inline std::vector<std::complex<double>> monodromy(const OrbitResult& orb, const PowerParams& p,
                                                   double reg_eps = kDefaultRegEps,
                                                   const OrbitOptions& o = {}) {
  return monodromy(make_system(p, reg_eps), orb, o);
}

/// One period of the orbit with dense output.
template <class Sys>
Trajectory<Sys::dim> orbit_trajectory(const Sys& sys, const Orbit<Sys::dim>& orb,
                                      const OrbitOptions& o = {}) {
  IntegrateOptions io = orbit_integrate_options<Sys::dim>(o, orb.section_state);
  io.record = true;
  io.event_components = {0, 1};
  return integrate<Sys::dim>(sys, 0.0, orb.period, orb.section_state, io);
}

// ---------------------------------------------------------------------------
// continuation

struct ContinuationOptions {
  double initial_step = 0.05;
  double min_step = 1e-4;
  int max_halvings = 4;          ///< consecutive failed halvings that end the branch
  double period_cap = 50.0;      ///< periods beyond this count as heteroclinic
  double max_period_change = 0.3;
  double growth = 1.5;           ///< step growth after a success, capped by initial_step
  std::size_t max_steps = 5000;
};

struct ContinuationPoint {
  double param = 0.0;
  double period = 0.0;
  double amplitude = 0.0;
  double max_multiplier = 0.0;
  bool converged = false;
};

template <std::size_t N>
struct BranchState {
  double param = 0.0;
  Orbit<N> orbit;
};

/// Newton from a secant prediction. Rejects answers whose period jumps by
/// more than max_period_change or that exceed the period cap; the second
/// return flag reports a period-cap hit.
template <class Family>
std::optional<Orbit<Family::dim>> continue_to(const Family& fam,
                                              const std::vector<BranchState<Family::dim>>& br,
                                              double target, const ContinuationOptions& co,
                                              const OrbitOptions& o, bool* cap_hit) {
  constexpr std::size_t n = Family::dim;
  const auto& last = br.back();
  Vec<n> x = last.orbit.section_state;
  double T = last.orbit.period;
  if (br.size() >= 2) {
    const auto& prev = br[br.size() - 2];
    const double t = (target - last.param) / (last.param - prev.param);
    for (std::size_t i = 0; i < n; ++i)
      x[i] += t * (last.orbit.section_state[i] - prev.orbit.section_state[i]);
    T += t * (last.orbit.period - prev.orbit.period);
    if (!(T > 0.0)) T = last.orbit.period;
  }
  try {
    Orbit<n> orb = shoot(fam(target), x, T, o);
    if (std::abs(orb.period - last.orbit.period) > co.max_period_change * last.orbit.period)
      return std::nullopt;
    if (orb.period > co.period_cap) {
      if (cap_hit) *cap_hit = true;
      return std::nullopt;
    }
    return orb;
  } catch (const NewtonDiverged&) {
  } catch (const StepUnderflow&) {
  }
  return std::nullopt;
}

template <std::size_t N>
struct BranchEnd {
  std::vector<BranchState<N>> branch;
  std::vector<ContinuationPoint> sweep;
  double first_failure = std::numeric_limits<double>::quiet_NaN();
  bool reached_end = false;
  bool period_cap = false;
};

/// Follows the orbit from the seed at param0 towards param_end. A parameter
/// family `fam(p)` returns the system at parameter p.
template <class Family>
BranchEnd<Family::dim> follow_branch(const Family& fam, double param0,
                                     const Orbit<Family::dim>& seed, double param_end,
                                     const ContinuationOptions& co, const OrbitOptions& o) {
  constexpr std::size_t n = Family::dim;
  BranchEnd<n> out;
  out.branch.push_back({param0, seed});
  out.sweep.push_back(
      {param0, seed.period, seed.amplitude, seed.max_nontrivial_multiplier(), true});
  const double dir = param_end > param0 ? 1.0 : -1.0;
  double h = co.initial_step;
  int halvings = 0;
  for (std::size_t step = 0; step < co.max_steps; ++step) {
    const double p = out.branch.back().param;
    if (dir * (param_end - p) <= 0.0) {
      out.reached_end = true;
      return out;
    }
    const double target = dir > 0 ? std::min(p + h, param_end) : std::max(p - h, param_end);
    bool cap = false;
    auto orb = continue_to(fam, out.branch, target, co, o, &cap);
    if (orb) {
      out.branch.push_back({target, *orb});
      out.sweep.push_back(
          {target, orb->period, orb->amplitude, orb->max_nontrivial_multiplier(), true});
      halvings = 0;
      h = std::min(h * co.growth, co.initial_step);
      continue;
    }
    out.sweep.push_back({target, 0.0, 0.0, 0.0, false});
    if (cap) {
      out.period_cap = true;
      out.first_failure = target;
      return out;
    }
    h *= 0.5;
    ++halvings;
    if (halvings > co.max_halvings || h < co.min_step) {
      out.first_failure = target;
      return out;
    }
  }
  out.first_failure = out.branch.back().param + dir * h;
  return out;
}

struct BifurcationResult {
  double n = 0.0;
  Lambda lambda = Lambda::plus;
  double m_h = 0.0;
  double m_lo = 0.0;  ///< last parameter with a converged orbit
  double m_hi = 0.0;  ///< first parameter without one
  double period_at_bracket = 0.0;
  double amplitude_at_bracket = 0.0;
  double equilibrium_at_bracket = 0.0;  ///< phi0 at m_lo, 0 if none
  std::string diagnostics;
  std::vector<ContinuationPoint> sweep;
};

/// Continuation followed by bisection between the last success and the
/// first failure.
template <class Family>
BifurcationResult locate_heteroclinic(const Family& fam, double p_lo, const Orbit<Family::dim>& seed,
                                      double p_hi, double tol_p, const ContinuationOptions& co,
                                      const OrbitOptions& o) {
  if (!(tol_p > 0.0)) throw std::invalid_argument("locate: tolerance must be positive");
  BranchEnd<Family::dim> end = follow_branch(fam, p_lo, seed, p_hi, co, o);
  BifurcationResult res;
  res.sweep = end.sweep;
  if (end.reached_end)
    throw BracketInvalid("orbit persists up to the bracket end " + std::to_string(p_hi));

  double lo = end.branch.back().param, hi = end.first_failure;
  while (std::abs(hi - lo) > tol_p) {
    const double mid = 0.5 * (lo + hi);
    bool cap = false;
    auto orb = continue_to(fam, end.branch, mid, co, o, &cap);
    res.sweep.push_back({mid, orb ? orb->period : 0.0, orb ? orb->amplitude : 0.0,
                         orb ? orb->max_nontrivial_multiplier() : 0.0, orb.has_value()});
    if (orb) {
      end.branch.push_back({mid, *orb});
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto& last = end.branch.back();
  res.m_lo = lo;
  res.m_hi = hi;
  res.m_h = 0.5 * (lo + hi);
  res.period_at_bracket = last.orbit.period;
  res.amplitude_at_bracket = last.orbit.amplitude;
  std::ostringstream d;
  d << "continuation steps " << end.sweep.size() << ", branch ended by "
    << (end.period_cap ? "period cap" : "Newton failure") << " at " << end.first_failure
    << "; period at bracket " << last.orbit.period;
  if (end.branch.size() >= 3) {
    const auto& a = end.branch[end.branch.size() - 3].orbit;
    d << "; last periods " << a.period << " -> " << last.orbit.period;
  }
  res.diagnostics = d.str();
  return res;
}

/// Fifth-order family in m at fixed n.
struct MFamily {
  static constexpr std::size_t dim = 5;
  double n = 0.0;
  Lambda lambda = Lambda::plus;
  double reg_eps = kDefaultRegEps;
  System5 operator()(double m) const { return make_system(derive(m, n, lambda), reg_eps); }
};

/// Orbit at (m, n, lambda) to start a continuation from. lambda = +1 relaxes
/// from generic data; lambda = -1 starts at the exact m = 1 solution (which
/// serves every n, since alpha = 0 and mu = 5 there) and continues to m.
inline OrbitResult seed_orbit(double m, double n, Lambda lambda,
                              double reg_eps = kDefaultRegEps, const OrbitOptions& o = {},
                              const ContinuationOptions& co = {}) {
  const PowerParams p = derive(m, n, lambda);
  if (lambda == Lambda::plus) return detect_relaxation(p, 400.0, 1e-5, reg_eps, o);
  const MFamily fam{n, lambda, reg_eps};
  const OrbitResult at1 = shoot(fam(1.0), exact_seed(lambda).section_state,
                                exact_seed(lambda).period, o);
  if (std::abs(m - 1.0) < 1e-14) return at1;
  auto end = follow_branch(fam, 1.0, at1, m, co, o);
  if (!end.reached_end) throw NewtonDiverged("seed_orbit: continuation from m = 1 broke down");
  return end.branch.back().orbit;
}

inline BifurcationResult locate_bifurcation(double n, Lambda lambda, double m_lo, double m_hi,
                                            double tol_m, double reg_eps = kDefaultRegEps,
                                            const OrbitOptions& o = {},
                                            const ContinuationOptions& co = {}) {
  if (!(m_hi > m_lo)) throw std::invalid_argument("locate_bifurcation: empty bracket");
  OrbitResult seed;
  try {
    seed = seed_orbit(m_lo, n, lambda, reg_eps, o, co);
  } catch (const Error& e) {
    throw BracketInvalid(std::string("no orbit at the lower bracket end: ") + e.what());
  }
  BifurcationResult r = locate_heteroclinic(MFamily{n, lambda, reg_eps}, m_lo, seed, m_hi,
                                            tol_m, co, o);
  r.n = n;
  r.lambda = lambda;
  try {
    r.equilibrium_at_bracket = phi0(derive(r.m_lo, n, lambda));
  } catch (const NoPositiveSolution&) {
    r.equilibrium_at_bracket = 0.0;
  }
  return r;
}

/// m_h(n) = 5/mu_h + (5/mu_h - 1) n from the value at n = 0.
inline double linear_law(double m_h0, double n) { return m_h0 + (m_h0 - 1.0) * n; }

// ---------------------------------------------------------------------------
// third-order analogue

/// P_3(phi) = -|phi|^(alpha-1) phi with mu = 3/n and alpha = 1 - n.
struct TfeFamily {
  static constexpr std::size_t dim = 3;
  double reg_eps = kDefaultRegEps;
  System3 operator()(double n) const {
    if (!(n > 0.0)) throw OutOfRange("tfe4: n must be positive");
    return System3{coeffs_p3(3.0 / n), 1.0 - n, Lambda::plus, reg_eps};
  }
};

/// Upper end of the existence interval: 3/mu_+, with mu_+ the largest root
/// of 3 mu^2 - 6 mu + 2.
inline double n_plus() {
  const RootList r = isolate_real_roots(Polynomial({2.0, -6.0, 3.0}), 0.0, 10.0, 1e-15);
  if (r.size() != 2) throw RootCountMismatch("n_plus: expected two roots");
  return 3.0 / r.back().value;
}

inline BifurcationResult tfe4_bifurcation(double n_lo, double n_hi, double tol,
                                          double reg_eps = kDefaultRegEps,
                                          const OrbitOptions& o = {},
                                          const ContinuationOptions& co = {}) {
  if (!(n_hi > n_lo)) throw std::invalid_argument("tfe4_bifurcation: empty bracket");
  const TfeFamily fam{reg_eps};
  Orbit<3> seed;
  try {
    seed = relax(fam(n_lo), 400.0, {}, o);
  } catch (const Error& e) {
    throw BracketInvalid(std::string("no orbit at the lower bracket end: ") + e.what());
  }
  BifurcationResult r = locate_heteroclinic(fam, n_lo, seed, n_hi, tol, co, o);
  r.n = r.m_h;
  r.lambda = Lambda::plus;
  return r;
}

}  // namespace thinfilm
