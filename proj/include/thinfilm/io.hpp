#pragma once

// CSV and JSON serialization of profiles, trajectories, orbits, sweeps and
// interval reports. Numbers in CSV are written with 17 significant digits.

#include <complex>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinfilm/identities.hpp"
#include "thinfilm/integrator.hpp"
#include "thinfilm/m1exact.hpp"
#include "thinfilm/orbits.hpp"
#include "thinfilm/params.hpp"

namespace thinfilm::io {

using nlohmann::json;

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// piece_index, y_left, y_right, c0..c5 in the local chart.
inline void write_profile_csv(std::ostream& os, const PiecewiseProfile& p) {
  os << "piece_index,y_left,y_right,c0,c1,c2,c3,c4,c5\n";
  for (std::size_t k = 0; k < p.pieces.size(); ++k) {
    const ProfilePiece& pc = p.pieces[k];
    os << k << ',' << num(pc.left) << ',' << num(pc.right);
    for (std::size_t j = 0; j <= 5; ++j) os << ',' << num(pc.poly[j]);
    os << '\n';
  }
}

inline json profile_header(const PiecewiseProfile& p) {
  return {{"G", p.G}, {"y0", p.y0}, {"lambda", sign(p.lambda)}, {"pieces", p.pieces.size()}};
}

/// s_or_y, c0..c(N-1), event_flag. Rows are the accepted steps; event rows
/// are interleaved, evaluated on the continuous extension, with the flag set
/// to 1 + the component whose sign changes.
template <std::size_t N>
void write_trajectory_csv(std::ostream& os, const Trajectory<N>& tr) {
  os << "s_or_y";
  for (std::size_t i = 0; i < N; ++i) os << ",c" << i;
  os << ",event_flag\n";
  std::size_t e = 0;
  auto row = [&](double s, const Vec<N>& x, int flag) {
    os << num(s);
    for (double v : x) os << ',' << num(v);
    os << ',' << flag << '\n';
  };
  for (std::size_t i = 0; i < tr.s.size(); ++i) {
    while (e < tr.events.size() && tr.events[e].s < tr.s[i]) {
      row(tr.events[e].s, tr.at(tr.events[e].s), 1 + static_cast<int>(tr.events[e].component));
      ++e;
    }
    row(tr.s[i], tr.x[i], 0);
  }
}

inline json params_json(const PowerParams& p) {
  return {{"m", p.m},         {"n", p.n},         {"lambda", sign(p.lambda)},
          {"alpha", p.alpha}, {"mu", p.mu},       {"beta", p.beta},
          {"gamma", p.gamma_scale}};
}

template <std::size_t N>
json orbit_json(const Orbit<N>& o) {
  json fl = json::array();
  for (const auto& z : o.floquet) fl.push_back({z.real(), z.imag()});
  return {{"section_state", o.section_state},
          {"period", o.period},
          {"amplitude", o.amplitude},
          {"phi_min", o.phi_min},
          {"phi_max", o.phi_max},
          {"floquet", fl},
          {"max_nontrivial_multiplier", o.max_nontrivial_multiplier()},
          {"converged", o.converged},
          {"method", to_string(o.method)},
          {"residual", o.residual},
          {"newton_iterations", o.newton_iterations}};
}

inline json bifurcation_json(const BifurcationResult& r) {
  return {{"n", r.n},
          {"lambda", sign(r.lambda)},
          {"m_h", r.m_h},
          {"bracket", {r.m_lo, r.m_hi}},
          {"period_at_bracket", r.period_at_bracket},
          {"amplitude_at_bracket", r.amplitude_at_bracket},
          {"equilibrium_at_bracket", r.equilibrium_at_bracket},
          {"diagnostics", r.diagnostics}};
}

/// m, n, lambda, period, amplitude, max_multiplier_modulus, converged
inline void write_sweep_csv(std::ostream& os, const std::vector<ContinuationPoint>& sweep,
                            double n, Lambda lambda, bool param_is_n = false) {
  os << "m,n,lambda,period,amplitude,max_multiplier_modulus,converged\n";
  for (const ContinuationPoint& c : sweep) {
    os << (param_is_n ? "" : num(c.param)) << ',' << (param_is_n ? num(c.param) : num(n)) << ','
       << sign(lambda) << ',' << num(c.period) << ',' << num(c.amplitude) << ','
       << num(c.max_multiplier) << ',' << (c.converged ? 1 : 0) << '\n';
  }
}

inline json interval_json(const IntervalReport& r) {
  json roots = json::array();
  for (const BoundingRoot& b : r.bounding_roots) roots.push_back({{"poly", b.poly}, {"value", b.value}});
  return {{"kind", to_string(r.kind)},
          {"mu_lo", r.mu.lo},
          {"mu_hi", r.mu.hi},
          {"mu_lo_closed", r.mu.lo_closed},
          {"mu_hi_closed", r.mu.hi_closed},
          {"alpha_lo", r.alpha_lo},
          {"alpha_hi", r.alpha_hi},
          {"roots", roots}};
}

/// Writes through a temporary file and renames it into place.
inline void write_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw std::runtime_error("cannot rename " + tmp + " to " + path);
}

}  // namespace thinfilm::io
