#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brolin/equilibrium.hpp"
#include "test_support.hpp"

namespace brolin {
namespace {

using test::suite;

SamplerConfig config(std::size_t n, std::uint64_t seed = 7) {
  SamplerConfig c;
  c.n_samples = n;
  c.seed = seed;
  return c;
}

TEST(Sampler, SquareMapStaysOnUnitCircle) {
  const auto mu = sample_julia(suite("z2"), config(10000));
  ASSERT_EQ(mu.size(), 10000u);
  for (const auto& p : mu.points) EXPECT_NEAR(std::abs(p), 1.0, 1e-6);
  EXPECT_NEAR(mu.total_weight(), 1.0, 1e-12);
}

TEST(Sampler, InverseSquareStaysOnUnitCircle) {
  const auto mu = sample_julia(suite("inv_z2"), config(10000));
  double lo = 1e9, hi = -1e9;
  for (const auto& p : mu.points) {
    lo = std::min(lo, std::abs(p) - 1.0);
    hi = std::max(hi, std::abs(p) - 1.0);
  }
  EXPECT_LT(hi - lo, 1e-6);
}

TEST(Sampler, BasilicaSamplesBounded) {
  const auto mu = sample_julia(suite("z2m1"), config(10000));
  for (const auto& p : mu.points) EXPECT_LE(std::abs(p), 2.0);
}

TEST(Sampler, RejectsBadConfig) {
  auto c = config(0);
  EXPECT_THROW(sample_julia(suite("z2"), c), ValidationError);
  c = config(10);
  c.burn_in = 5;
  EXPECT_THROW(sample_julia(suite("z2"), c), ValidationError);
}

TEST(Sampler, ExplicitExceptionalStartRejected) {
  auto c = config(100);
  c.start = Complex(0.0);
  try {
    sample_julia(suite("z2"), c);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), "ExceptionalStart");
  }
}

TEST(Sampler, Deterministic) {
  auto c = config(3000, 99);
  c.threads = 1;
  const auto a = sample_julia(suite("cubic_pole"), c);
  c.threads = 4;
  const auto b = sample_julia(suite("cubic_pole"), c);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i].real(), b.points[i].real());
    EXPECT_EQ(a.points[i].imag(), b.points[i].imag());
  }
  const auto other = sample_julia(suite("cubic_pole"), config(3000, 100));
  EXPECT_NE(a.points[0], other.points[0]);
}

TEST(Tree, EighthRootsOfUnity) {
  const auto mu = full_preimage_tree(suite("z2"), 1.0, 3);
  ASSERT_EQ(mu.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_NEAR(std::abs(std::pow(mu.points[i], 8) - 1.0), 0.0, 1e-13);
    EXPECT_DOUBLE_EQ(mu.weights[i], 0.125);
  }
  std::vector<double> args;
  for (const auto& p : mu.points) args.push_back(std::arg(p));
  std::sort(args.begin(), args.end());
  for (std::size_t i = 1; i < 8; ++i) EXPECT_NEAR(args[i] - args[i - 1], std::numbers::pi / 4, 1e-12);
}

TEST(Tree, ExceptionalRootRejected) {
  try {
    full_preimage_tree(suite("z2"), 0.0, 2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), "ExceptionalStart");
  }
}

TEST(Tree, TooLarge) {
  try {
    full_preimage_tree(suite("z2"), 1.0, 20);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.kind(), "TreeTooLarge");
  }
}

TEST(Tree, BasilicaDepthTwoMatchesOracle) {
  const auto mu = full_preimage_tree(suite("z2m1"), 10.0, 2);
  ASSERT_EQ(mu.size(), 4u);
  std::vector<std::pair<double, double>> got;
  for (const auto& p : mu.points) got.emplace_back(p.real(), p.imag());
  std::sort(got.begin(), got.end());
  const auto& want = test::oracles()["tree"]["z2m1_tree_z0_10_depth2"];
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(got[i].first, want[i][0].get<double>(), 1e-12);
    EXPECT_NEAR(got[i].second, want[i][1].get<double>(), 1e-12);
  }
}

TEST(Tree, ConfigDispatch) {
  auto c = config(1);
  c.full_tree_depth = 2;
  c.start = Complex(10.0);
  EXPECT_EQ(sample_julia(suite("z2m1"), c).size(), 4u);
}

TEST(Energy, Examples) {
  const auto n = config(20000);
  for (const auto& [id, tol] : {std::pair{"z2", 1e-4}, {"inv_z2", 1e-4}, {"z2m1", 5e-3}}) {
    const auto f = suite(id);
    const EscapeRateEvaluator ev(f.lift());
    EXPECT_NEAR(energy(sample_julia(f, n), ev), 0.0, tol) << id;
  }
}

TEST(Energy, SpecialFamilyMatchesCircle) {
  const auto f = suite("special_2_1_3");
  const EscapeRateEvaluator ev(f.lift());
  const double expected = test::oracles()["lemniscate"]["special_2_1_3"]["energy"].get<double>();
  EXPECT_NEAR(energy(sample_julia(f, config(5000)), ev), expected, 1e-6);
}

TEST(Balance, InvariantSamplesPass) {
  for (const char* id : {"z2", "inv_z2"}) {
    const auto f = suite(id);
    EXPECT_LT(balance_residual(f, sample_julia(f, config(100000))), 0.01) << id;
  }
}

TEST(Balance, PointMassFails) {
  const auto delta = EmpiricalMeasure::uniform({Complex(0.5)});
  EXPECT_GT(balance_residual(suite("z2"), delta), 0.3);
}

// |sum w log|z - z_i| - p(z)| on a circle outside the sample hull
TEST(Properties, PotentialConsistency) {
  const std::size_t n = 10000;
  for (const auto& m : calibration_suite()) {
    const auto f = m.build();
    const auto mu = sample_julia(f, config(n, 3));
    const EscapeRateEvaluator ev(f.lift());
    const double r = 1.25 * mu.max_modulus() + 0.1;
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      const Complex z = std::polar(r, 2.0 * std::numbers::pi * k / 50.0);
      worst = std::max(worst, std::abs(empirical_potential(mu, z) - ev.potential(z)));
    }
    EXPECT_LT(worst, 5.0 / std::sqrt(static_cast<double>(n)) + 1e-3) << m.id;
  }
}

TEST(Properties, ExceptionalAvoidance) {
  for (const auto& m : calibration_suite()) {
    const auto f = m.build();
    const auto ex = exceptional_set(f);
    for (const auto& p : sample_julia(f, config(2000)).points)
      for (const auto& e : ex) ASSERT_GT(chordal(ProjectivePoint::affine(p), e), 1e-9) << m.id;
  }
}

TEST(Properties, NoAtoms) {
  for (const auto& m : calibration_suite()) {
    auto pts = sample_julia(m.build(), config(10000)).points;
    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    std::size_t largest = 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      std::size_t c = 1;
      for (std::size_t j = i + 1; j < pts.size() && pts[j].real() - pts[i].real() < 1e-9; ++j)
        if (std::abs(pts[j] - pts[i]) < 1e-9) ++c;
      largest = std::max(largest, c);
    }
    EXPECT_LT(largest, 10u) << m.id;
  }
}

}  // namespace
}  // namespace brolin
