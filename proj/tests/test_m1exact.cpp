#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "thinfilm/m1exact.hpp"

using namespace thinfilm;

namespace {

const MatchingRatios& ratios() {
  static const MatchingRatios r = find_matching_ratios();
  return r;
}

}  // namespace

TEST(Abc, SmallRatioLimit) {
  const HumpPolynomial h = solve_abc(1e-9);
  EXPECT_NEAR(h.a, -1.0, 1e-8);
  EXPECT_NEAR(h.b, 1.0, 1e-8);
  EXPECT_NEAR(h.c, -1.0, 1e-8);
  EXPECT_DOUBLE_EQ(solve_abc(1.0).c, 1.5);
}

TEST(Abc, SolvesTheLastThreeMatchingEquations) {
  for (double G = 0.05; G < 1.0; G += 0.05) {
    const HumpPolynomial h = solve_abc(G);
    const PolyMatrix4 M = matching_matrix();
    const double x[4] = {h.a, h.b, h.c, -1.0};
    for (int row = 1; row < 4; ++row) {
      double r = 0.0;
      for (int j = 0; j < 4; ++j) r += M[row][j](G) * x[j];
      EXPECT_NEAR(r, 0.0, 1e-12) << "G=" << G << " row=" << row;
    }
  }
}

TEST(Discriminant, EndpointsAndSignChanges) {
  const Polynomial D = discriminant();
  EXPECT_DOUBLE_EQ(D(0.0), -1.0);
  EXPECT_DOUBLE_EQ(D(1.0), -16.0);
  for (double G : {ratios().G1, ratios().G2}) EXPECT_LT(D(G - 0.01) * D(G + 0.01), 0.0);
}

TEST(Discriminant, ProportionalToFirstEquationResidual) {
  // D = det(reduced system) * residual of the first equation
  for (double G = 0.03; G < 1.0; G += 0.07) {
    const double d = (1 + G * G * G) * (1 + G * G) * (1 + G);
    EXPECT_NEAR(discriminant()(G), d * first_equation_residual(G), 1e-11) << G;
    EXPECT_NEAR(discriminant()(G), oracle::matching_determinant(G), 1e-12) << G;
  }
}

TEST(MatchingRatios, KnownValues) {
  EXPECT_NEAR(ratios().G1, 0.178318, 1e-5);
  EXPECT_NEAR(ratios().G2, 0.7060378, 1e-6);
  EXPECT_GT(positivity_selector(ratios().G1), 0.0);
  EXPECT_LT(positivity_selector(ratios().G2), 0.0);
  EXPECT_NEAR(first_equation_residual(ratios().G1), 0.0, 1e-10);
  EXPECT_NEAR(first_equation_residual(ratios().G2), 0.0, 1e-10);
}

TEST(MatchingRatios, AgreeWithBisectionOracle) {
  EXPECT_NEAR(ratios().G1, oracle::bisect(oracle::matching_determinant, 0.1, 0.3), 1e-13);
  EXPECT_NEAR(ratios().G2, oracle::bisect(oracle::matching_determinant, 0.6, 0.8), 1e-13);
}

TEST(MatchingRatios, SelectedByLambda) {
  EXPECT_EQ(matching_ratio(Lambda::plus), ratios().G1);
  EXPECT_EQ(matching_ratio(Lambda::minus), ratios().G2);
}

TEST(Hump, SignConditionsAtFirstRatio) {
  const HumpPolynomial h = solve_abc(ratios().G1);
  EXPECT_LT(h.a, 0.0);
  EXPECT_GT(1.0 + h.b - h.c, 0.0);
  EXPECT_TRUE(isolate_real_roots(h.bracket(), -1.0, 0.0, 1e-12).empty());
  for (double y = -0.99; y < 0.0; y += 0.01) EXPECT_GT(h.hump()(y), 0.0);
  EXPECT_EQ(h.hump()(0.0), 0.0);
  EXPECT_NEAR(h.hump()(-1.0), 0.0, 1e-15);
}

TEST(Profile, JunctionsAreFourTimesDifferentiable) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    for (std::size_t n : {std::size_t{3}, kDefaultPieces}) {
      const PiecewiseProfile p = build_profile(matching_ratio(lam), lam, n);
      EXPECT_EQ(p.pieces.size(), n);
      EXPECT_LT(p.max_junction_jump(), 1e-9);
      EXPECT_EQ(p.junction_jumps().size(), 5 * (n - 1));
    }
  }
}

TEST(Profile, GeometricPiecesAndInterface) {
  const double G = ratios().G1;
  const PiecewiseProfile p = build_profile(G, Lambda::plus);
  EXPECT_NEAR(p.y0, G / (1.0 - G), 1e-12);
  EXPECT_NEAR(p.y0, 0.21701, 1e-5);
  EXPECT_NEAR(p.pieces.back().right, p.y0, 1e-12);
  double b = 0.0;
  for (std::size_t k = 0; k < p.pieces.size(); ++k) {
    EXPECT_NEAR(p.pieces[k].length, std::pow(G, static_cast<double>(k)), 1e-15);
    if (k > 0) {
      EXPECT_EQ(p.pieces[k].left, p.pieces[k - 1].right);
      EXPECT_NEAR(p.pieces[k].left, b, 1e-14);
      b += std::pow(G, static_cast<double>(k));
    }
  }
}

TEST(Profile, NonRootRatioFails) {
  EXPECT_THROW(build_profile(0.5, Lambda::plus), MatchingFailure);
  // correct root, wrong hump sign
  EXPECT_THROW(build_profile(ratios().G1, Lambda::minus), MatchingFailure);
  EXPECT_THROW(build_profile(ratios().G2, Lambda::plus), MatchingFailure);
  EXPECT_THROW(build_profile(1.5, Lambda::plus), std::invalid_argument);
}

TEST(Profile, PiecesAlternateAndSolveTheOde) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    const PiecewiseProfile p = build_profile(matching_ratio(lam), lam, 12);
    for (std::size_t k = 0; k < p.pieces.size(); ++k) {
      const double y = p.pieces[k].left + 0.5 * p.pieces[k].length;
      const double expected = (k % 2 ? -1.0 : 1.0) * sign(lam);
      EXPECT_EQ((p(y) > 0) - (p(y) < 0), expected);
      for (double t : {0.1, 0.37, 0.8}) EXPECT_NEAR(p.residual(p.pieces[k].left + t * p.pieces[k].length), 0.0, 1e-9);
    }
  }
}

TEST(Profile, SinglePiece) {
  const PiecewiseProfile p = build_profile(ratios().G1, Lambda::plus, 1);
  EXPECT_EQ(p.pieces.size(), 1u);
  EXPECT_TRUE(p.junction_jumps().empty());
}

TEST(Profile, InteriorZerosAreTransversal) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    const PiecewiseProfile p = build_profile(matching_ratio(lam), lam);
    const auto z = p.zeros_with_slope();
    ASSERT_EQ(z.size(), p.pieces.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
      EXPECT_NEAR(p(z[k].first), 0.0, 1e-12);
      // slope scales like G^(4k)
      EXPECT_GT(std::abs(z[k].second) / std::pow(p.G, 4.0 * k), 1e-3) << k;
    }
  }
}

TEST(Profile, RescalingClosure) {
  const PiecewiseProfile p = build_profile(ratios().G1, Lambda::plus, 8);
  for (double gamma : {0.3, 1.0, 2.5}) {
    for (double shift : {-0.2, 0.0, 0.1}) {
      for (int flip : {1, -1}) {
        const RescaledProfile r = rescaled(p, gamma, shift, flip);
        for (std::size_t k = 0; k < 6; ++k) {
          const double inner = p.pieces[k].left + 0.4 * p.pieces[k].length;
          const double y = (inner - shift) * gamma;
          EXPECT_NEAR(r.residual(y), 0.0, 1e-9);
        }
      }
    }
  }
  EXPECT_THROW(rescaled(p, 0.0, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(rescaled(p, 1.0, 0.0, 2), std::invalid_argument);
}

TEST(Oscillatory, AntiPeriodicAndPeriodic) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    const PiecewiseProfile p = build_profile(matching_ratio(lam), lam);
    const double lnG = std::log(p.G);
    const auto [lo, hi] = oscillatory_support(p);
    std::vector<double> s, s1, s2;
    for (int i = 0; i < 2000; ++i) {
      const double t = lo - 2.0 * lnG + (hi - lo + 2.0 * lnG) * i / 1999.0;
      s.push_back(t);
      s1.push_back(t + lnG);
      s2.push_back(t + 2.0 * lnG);
    }
    const auto v = oscillatory_component(p, s), v1 = oscillatory_component(p, s1),
               v2 = oscillatory_component(p, s2);
    double amp = 0.0;
    for (double x : v) amp = std::max(amp, std::abs(x));
    double anti = 0.0, per = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      anti = std::max(anti, std::abs(v1[i] + v[i]));
      per = std::max(per, std::abs(v2[i] - v[i]));
    }
    EXPECT_LT(anti, 1e-8 * amp);
    EXPECT_LT(per, 1e-8 * amp);
    EXPECT_LE(amp, 1.0 / 120.0);
  }
}

TEST(Oscillatory, SeedMatchesSamples) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    const PiecewiseProfile p = build_profile(matching_ratio(lam), lam);
    const OscillatorySeed seed = oscillatory_seed(p);
    EXPECT_NEAR(seed.period, 2.0 * std::abs(std::log(p.G)), 1e-15);
    EXPECT_GT(seed.state[0], 0.0);
    EXPECT_NEAR(seed.state[1], 0.0, 1e-9 * seed.amplitude);
    EXPECT_NEAR(std::abs(oscillatory_value(p, seed.s)), seed.amplitude, 1e-12);
    // brute force over one period
    double amp = 0.0;
    const auto [lo, hi] = oscillatory_support(p);
    for (int i = 0; i <= 20000; ++i)
      amp = std::max(amp, std::abs(oscillatory_value(p, hi - seed.period * i / 20000.0)));
    EXPECT_NEAR(amp, seed.amplitude, 1e-6 * amp);
    (void)lo;
  }
}

TEST(Oscillatory, OutsideSupportRejected) {
  const PiecewiseProfile p = build_profile(ratios().G1, Lambda::plus, 4);
  const auto [lo, hi] = oscillatory_support(p);
  EXPECT_THROW(oscillatory_value(p, hi + 0.1), std::invalid_argument);
  EXPECT_THROW(oscillatory_value(p, lo - 0.1), std::invalid_argument);
}

TEST(MaximaRatio, InvariantUnderScaling) {
  for (Lambda lam : {Lambda::plus, Lambda::minus}) {
    const PiecewiseProfile p = build_profile(matching_ratio(lam), lam);
    const MaximaRatio r = maxima_ratio_limit(p);
    EXPECT_LT(r.max_relative_deviation, 1e-9);
    EXPECT_GT(r.limit, 0.0);
    ASSERT_EQ(r.y.size(), p.pieces.size());
    for (std::size_t n = 1; n < 25; ++n) {
      EXPECT_NEAR(r.y[n], (r.y[n - 1] + 1.0) * p.G, 1e-12);
      EXPECT_NEAR(maximum_point(p.G, r.y[0], n + 1), r.y[n], 1e-12);
    }
  }
}

TEST(MaximaRatio, ZeroProfile) {
  PiecewiseProfile p;
  p.G = 0.5;
  p.y0 = 1.0;
  for (int k = 0; k < 10; ++k) p.pieces.push_back({k * 0.1, (k + 1) * 0.1, 0.1, Polynomial()});
  const MaximaRatio r = maxima_ratio_limit(p);
  EXPECT_EQ(r.limit, 0.0);
  EXPECT_EQ(r.max_relative_deviation, 0.0);
  EXPECT_THROW(maxima_ratio_limit(build_profile(ratios().G1, Lambda::plus, 5)), std::invalid_argument);
}
