// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "thinfilm/identities.hpp"
#include "thinfilm/m1exact.hpp"
#include "thinfilm/odeflow.hpp"
#include "thinfilm/orbits.hpp"
#include "thinfilm/params.hpp"
#include "thinfilm/polyroots.hpp"

using namespace thinfilm;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int id, const char* title, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("criterion %2d %s  %s (%.2f s) %s\n", id, out.pass ? "PASS" : "FAIL", title, secs,
              out.detail.str().c_str());
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main() {
  run(1, "matching ratios", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const MatchingRatios r = find_matching_ratios();
    const double secs = seconds_since(t0);
    o.detail.precision(10);
    o.detail << "G1=" << r.G1 << " G2=" << r.G2;
    o.check(std::abs(r.G1 - 0.178318) < 1e-5, "G1");
    o.check(std::abs(r.G2 - 0.7060378) < 1e-6, "G2");
    o.check(secs < 1.0, "runtime");
  });

  run(2, "exact profile quality", [](Outcome& o) {
    double worst_jump = 0.0, worst_anti = 0.0, worst_y0 = 0.0;
    for (Lambda lam : {Lambda::plus, Lambda::minus}) {
      const PiecewiseProfile p = build_profile(matching_ratio(lam), lam, 40);
      worst_jump = std::max(worst_jump, p.max_junction_jump());
      worst_y0 = std::max(worst_y0, std::abs(p.y0 - p.G / (1.0 - p.G)));
      const double lnG = std::log(p.G);
      const auto [lo, hi] = oscillatory_support(p);
      double amp = 0.0, anti = 0.0;
      for (int i = 0; i <= 5000; ++i) {
        const double s = lo - lnG + (hi - lo + lnG) * i / 5000.0;
        const double v = oscillatory_value(p, s);
        amp = std::max(amp, std::abs(v));
        anti = std::max(anti, std::abs(oscillatory_value(p, s + lnG) + v));
      }
      worst_anti = std::max(worst_anti, anti / amp);
    }
    o.detail << "max jump=" << worst_jump << " anti-periodicity=" << worst_anti
             << " y0 error=" << worst_y0;
    o.check(worst_jump < 1e-9, "junction jumps");
    o.check(worst_anti < 1e-8, "anti-periodicity");
    o.check(worst_y0 < 1e-12, "interface");
  });

  run(3, "coefficient roots", [](Outcome& o) {
    const RootList a1 = isolate_real_roots(coeff_polynomial(1), 1.0, 3.0, 1e-14);
    const RootList a2 = isolate_real_roots(coeff_polynomial(2), 0.0, 10.0, 1e-15);
    o.check(a1.size() == 2 && a2.size() == 3, "root counts");
    if (a1.size() != 2 || a2.empty()) return;
    o.detail.precision(12);
    o.detail << "a1 roots " << a1[0].value << ", " << a1[1].value << "; a2 largest " << a2.back().value;
    o.check(std::abs(a1[0].value - 1.45608) < 1e-4, "a1 lower");
    o.check(std::abs(a1[1].value - 2.5439) < 1e-4, "a1 upper");
    o.check(std::abs(a2.back().value - (2.0 + std::sqrt(6.0) / 2.0)) < 1e-12, "a2 largest");
  });

  run(4, "operator identity", [](Outcome& o) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 6.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double mu = u(rng);
      const CoeffSet c = coeffs_p5(mu);
      const auto ref = oracle::shifted_falling_product(mu);
      for (int k = 0; k < 5; ++k) {
        const double scale = std::max({1.0, std::abs(ref[k]), std::pow(mu + 4.0, 5 - k)});
        worst = std::max(worst, std::abs(c.a[k] - ref[k]) / scale);
      }
    }
    o.detail << "max relative deviation " << worst;
    o.check(worst < 1e-12, "expansion");
  });

  run(5, "orbits against the exact construction", [](Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    const OrbitResult plus = detect_relaxation(derive(1.0, 0.0, Lambda::plus));
    const double t_plus = seconds_since(t0);
    const double T1 = 2.0 * std::abs(std::log(matching_ratio(Lambda::plus)));
    const double A1 = oscillatory_seed(build_profile(matching_ratio(Lambda::plus), Lambda::plus)).amplitude;
    t0 = std::chrono::steady_clock::now();
    const OrbitResult minus = detect_shooting(derive(1.0, 0.0, Lambda::minus), exact_seed(Lambda::minus));
    const double t_minus = seconds_since(t0);
    const double T2 = 2.0 * std::abs(std::log(matching_ratio(Lambda::minus)));
    o.detail.precision(10);
    o.detail << "plus T=" << plus.period << " (exact " << T1 << ") A=" << plus.amplitude
             << " (exact " << A1 << "); minus T=" << minus.period << " (exact " << T2 << ")";
    o.check(std::abs(plus.period - T1) < 0.01 * T1, "plus period");
    o.check(std::abs(plus.amplitude - A1) < 0.01 * A1, "plus amplitude");
    o.check(std::abs(minus.period - T2) < 0.01 * T2, "minus period");
    o.check(t_plus < 10.0 && t_minus < 10.0, "runtime");
  });

  run(6, "bifurcation values", [](Outcome& o) {
    const BifurcationResult p = locate_bifurcation(0.0, Lambda::plus, 1.0, 1.6, 1e-3);
    const BifurcationResult m = locate_bifurcation(0.0, Lambda::minus, 1.0, 2.2, 1e-3);
    o.detail.precision(7);
    o.detail << "plus m_h=" << p.m_h << " minus m_h=" << m.m_h;
    o.check(std::abs(p.m_h - 1.3380) < 0.01, "plus");
    o.check(std::abs(m.m_h - 1.909) < 0.02, "minus");
  });

  run(7, "third-order analogue", [](Outcome& o) {
    const double np = n_plus();
    const BifurcationResult r = tfe4_bifurcation(1.0, np, 1e-3);
    o.detail.precision(8);
    o.detail << "n_plus=" << np << " n_h=" << r.m_h;
    o.check(std::abs(np - 1.9019238) < 1e-6, "n_plus");
    o.check(std::abs(r.m_h - 1.7599) < 0.01, "n_h");
  });

  run(8, "integral identities", [](Outcome& o) {
    double worst = 0.0;
    int count = 0;
    auto add = [&](const OrbitResult& orb, const PowerParams& p) {
      const IdentityResiduals r = identity_residuals(orb, p);
      worst = std::max({worst, r.r1, r.r2});
      ++count;
    };
    const OrbitResult plus = detect_relaxation(derive(1.0, 0.0, Lambda::plus));
    add(plus, derive(1.0, 0.0, Lambda::plus));
    add(detect_relaxation(derive(1.0, 1.0, Lambda::plus)), derive(1.0, 1.0, Lambda::plus));
    const OrbitResult minus = detect_shooting(derive(1.0, 0.0, Lambda::minus), exact_seed(Lambda::minus));
    add(minus, derive(1.0, 0.0, Lambda::minus));
    const auto bp = follow_branch(MFamily{0.0, Lambda::plus}, 1.0, plus, 1.3, {}, {});
    for (const auto& st : bp.branch) add(st.orbit, derive(st.param, 0.0, Lambda::plus));
    const auto bm = follow_branch(MFamily{0.0, Lambda::minus}, 1.0, minus, 1.5, {}, {});
    for (const auto& st : bm.branch) add(st.orbit, derive(st.param, 0.0, Lambda::minus));
    o.detail << count << " orbits, worst residual " << worst;
    o.check(bp.reached_end && bm.reached_end, "regression grid");
    o.check(worst < 1e-6, "residuals");
  });

  run(9, "absorbing bound", [](Outcome& o) {
    const System5 sys = make_system(derive(1.0, 0.0, Lambda::plus));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      State5 x0;
      for (double& v : x0) v = u(rng);
      IntegrateOptions io;
      io.tol = {1e-10, 1e-10};
      const auto tr = integrate<5>(sys, 0.0, 50.0, x0, io);
      for (std::size_t i = 0; i < tr.s.size(); ++i)
        if (tr.s[i] >= 25.0) worst = std::max(worst, std::abs(tr.x[i][0]));
    }
    o.detail << "post-transient sup " << worst << " vs " << 1.0 / 120.0 + 0.01;
    o.check(worst <= 1.0 / 120.0 + 0.01, "bound");
  });

  run(10, "positive-solution oracle", [](Outcome& o) {
    const PowerParams p = derive(0.5, 0.0, Lambda::minus);
    const InverseProfile inv = fixed_point_positive(p, 1.0, 1e-9);
    const double a = phi0(p);
    double err = 0.0;
    for (std::size_t i = 0; i < inv.f.size(); ++i) {
      const double exact = std::pow(inv.f[i] / a, 1.0 / p.mu);
      err = std::max(err, std::abs(inv.y[i] - exact) / exact);
    }
    const double unit = phi0(derive(1.0, 0.0, Lambda::minus));
    o.detail << "sup relative error " << err << ", phi0(1,0,-1)*120-1=" << unit * 120.0 - 1.0;
    o.check(err < 1e-6, "fixed point");
    o.check(unit == 1.0 / 120.0, "phi0");
  });

  run(11, "property suites", [](Outcome& o) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    double eig = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double mu = u(rng);
      Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> es(oracle::companion<5>(coeffs_p5(mu).a));
      std::vector<double> ev;
      for (int k = 0; k < 5; ++k) ev.push_back(es.eigenvalues()[k].real());
      std::sort(ev.begin(), ev.end());
      for (int k = 0; k < 5; ++k) eig = std::max(eig, std::abs(ev[k] - (k - mu)));
    }
    o.check(eig < 1e-8, "eigenvalues");

    // scaling symmetry on integrated trajectories, alpha = 1/2
    double scal = 0.0;
    {
      const double alpha = 0.5, g = 5.0 / (1.0 - alpha), a = 2.0;
      const State5 d{0.3, -0.1, 0.2, 0.05, 0.1};
      State5 da;
      for (int j = 0; j < 5; ++j) da[j] = std::pow(a, g - j) * d[j];
      IntegrateOptions io;
      io.tol = {1e-13, 1e-13};
      const auto t1 = integrate<5>(PhysicalSystem{alpha, Lambda::minus, 0.0, d[4]}, 0.0, 1.5,
                                   State5{d[0], d[1], d[2], d[3], 0.0}, io);
      const auto t2 = integrate<5>(PhysicalSystem{alpha, Lambda::minus, 0.0, da[4]}, 0.0, 3.0,
                                   State5{da[0], da[1], da[2], da[3], 0.0}, io);
      for (int i = 1; i <= 50; ++i) {
        const double y = 3.0 * i / 50;
        const double ref = std::pow(a, g) * t1.at(y / a)[0];
        scal = std::max(scal, std::abs(t2.at(y)[0] - ref) / std::max(1.0, std::abs(ref)));
      }
    }
    o.check(scal < 1e-9, "scaling symmetry");

    const State5 d2{0.1, 0.2, 0.0, -0.1, 0.05};
    State5 d1 = d2, d4 = d2;
    d1[0] += 0.1;
    d4[4] += 0.1;
    const bool ordered = comparison_check(d1, d2, 0.5, Lambda::minus, 2.0) &&
                         comparison_check(d4, d2, 0.5, Lambda::minus, 2.0);
    o.check(ordered, "comparison ordering");

    double min_slope = 1e300;
    for (Lambda lam : {Lambda::plus, Lambda::minus}) {
      const PiecewiseProfile p = build_profile(matching_ratio(lam), lam);
      const auto z = p.zeros_with_slope();
      for (std::size_t k = 0; k < z.size(); ++k)
        min_slope = std::min(min_slope, std::abs(z[k].second) / std::pow(p.G, 4.0 * k));
    }
    o.check(min_slope > 1e-3, "transversal zeros");

    // no orbit accepted inside the excluded range; orbits found outside it
    const PowerParams inside = derive(1.98, 0.0, Lambda::minus);
    bool lock = orbit_excluded(inside.mu, Lambda::minus) && !orbit_excluded(5.0, Lambda::minus) &&
                !orbit_excluded(5.0, Lambda::plus);
    std::uniform_real_distribution<double> s(-1.0, 1.0), per(0.3, 3.0);
    OrbitOptions oo;
    oo.max_newton = 12;
    for (int t = 0; t < 20; ++t) {
      OrbitResult seed;
      for (double& v : seed.section_state) v = 0.1 * s(rng);
      seed.period = per(rng);
      try {
        if (detect_shooting(inside, seed, kDefaultRegEps, oo).converged) lock = false;
      } catch (const Error&) {
      }
    }
    o.check(lock, "consistency lock");
    o.detail << "eigen " << eig << ", scaling " << scal << ", min zero slope " << min_slope;
  });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
