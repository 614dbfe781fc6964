#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "oracles.hpp"
#include "rydsim/constants.hpp"
#include "rydsim/interactions.hpp"

using namespace rydsim;

namespace {
const PairModel kPlus = PairModel::detection(Branch::Plus);
const PairModel kMinus = PairModel::detection(Branch::Minus);
const PairModel kPrep = PairModel::preparation();
const BlockadeThreshold kGamma3{constants::kThreePhotonLinewidthMHz,
                                ThresholdConvention::FullLinewidth};
}  // namespace

TEST_CASE("pair potential reproduces hand-evaluated values") {
  // 6.31e6/12.7^6 + 2.36e4/12.7^3 and the same at 8.4 um.
  CHECK(pair_potential(kPlus, 12.7) == doctest::Approx(13.0251).epsilon(1e-4));
  CHECK(pair_potential(kPlus, 8.4) == doctest::Approx(57.779).epsilon(1e-4));
  CHECK(pair_potential(kMinus, 8.4) == doctest::Approx(-21.8556).epsilon(1e-4));
  // 1.94e6 / 12^6.
  CHECK(pair_potential(kPrep, 12.0, 0.0) == doctest::Approx(0.649702).epsilon(1e-6));
}

TEST_CASE("pair shift at the rms pair distance exceeds 10 MHz on both branches") {
  CHECK(std::abs(pair_potential(kPlus, 8.4)) > 10.0);
  CHECK(std::abs(pair_potential(kMinus, 8.4)) > 10.0);
}

TEST_CASE("plus branch decays monotonically to zero") {
  double prev = pair_potential(kPlus, 1.0);
  for (double r = 2.0; r <= 90.0; r += 1.0) {
    const double v = pair_potential(kPlus, r);
    CHECK(v > 0.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(pair_potential(kPlus, 99.0) < 0.05);  // dipolar tail dominates out here
}

TEST_CASE("pair potential rejects non-positive separations") {
  CHECK_THROWS_AS(pair_potential(kPlus, 0.0), std::domain_error);
  CHECK_THROWS_AS(pair_potential(kPlus, -1.0), std::domain_error);
}

TEST_CASE("model validation catches inconsistent fields") {
  PairModel bad = kPlus;
  bad.branch = Branch::NotApplicable;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kPlus;
  bad.c6_parallel_MHz_um6 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = kPrep;
  bad.anisotropy_ratio = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("preparation blockade radius lands near 12 um on the axis") {
  const auto r = blockade_radius(kPrep, kGamma3, 0.0);
  REQUIRE(r.has_value());
  // Root of 1.94e6 / R^6 = 0.6.
  CHECK(*r == doctest::Approx(std::pow(1.94e6 / 0.6, 1.0 / 6.0)).epsilon(1e-3));
  CHECK(*r > 11.5);
  CHECK(*r < 14.0);

  const BlockadeThreshold half{constants::kThreePhotonLinewidthMHz,
                               ThresholdConvention::HalfLinewidth};
  const auto r_half = blockade_radius(kPrep, half, 0.0);
  REQUIRE(r_half.has_value());
  CHECK(*r_half == doctest::Approx(13.649).epsilon(1e-3));
}

TEST_CASE("calibrated detection threshold puts the branches at 12.7 and 6.2 um") {
  const BlockadeThreshold eit =
      calibrate_detection_threshold(constants::kDetectionRadiusPlusUm);
  CHECK(eit.threshold_MHz() == doctest::Approx(13.025).epsilon(1e-3));

  const auto r_plus = blockade_radius(kPlus, eit);
  REQUIRE(r_plus.has_value());
  CHECK(std::abs(*r_plus - 12.7) < 0.05);

  // Independent scan of |V-| crossings confirms the innermost minus radius.
  const auto r_minus = blockade_radius(kMinus, eit);
  REQUIRE(r_minus.has_value());
  CHECK(std::abs(*r_minus - 6.2) < 0.1);
  const auto dense = oracles::scan_crossings(
      [&](double r) { return std::abs(pair_potential(kMinus, r)); },
      eit.threshold_MHz(), 0.5, 20.0);
  REQUIRE(!dense.empty());
  CHECK(std::abs(*r_minus - dense.front().r) < 2e-3);
}

TEST_CASE("blockade radius satisfies the threshold condition on re-evaluation") {
  const BlockadeThreshold eit = calibrate_detection_threshold(12.7);
  for (const PairModel* m : {&kPlus, &kMinus, &kPrep}) {
    const BlockadeThreshold& thr =
        m->kind == PairKind::VdwAnisotropic ? kGamma3 : eit;
    const auto r = blockade_radius(*m, thr, 0.4);
    REQUIRE(r.has_value());
    // Radius accurate to 1e-3 um: |V| crosses the threshold inside r +/- 1e-3.
    const double lo = std::abs(pair_potential(*m, *r - 1.5e-3, 0.4));
    const double hi = std::abs(pair_potential(*m, *r + 1.5e-3, 0.4));
    CHECK(((lo - thr.threshold_MHz()) > 0.0) != ((hi - thr.threshold_MHz()) > 0.0));
  }
}

TEST_CASE("an unreachable threshold reports unblockaded") {
  // Potential is below threshold everywhere past 100 um.
  const BlockadeThreshold tiny{1e-9, ThresholdConvention::FullLinewidth};
  CHECK(!blockade_radius(kPrep, tiny, 0.0).has_value());
}

TEST_CASE("minus-branch crossings match a dense-grid scan") {
  const BlockadeThreshold eit = calibrate_detection_threshold(12.7);
  const auto found = threshold_crossings(kMinus, eit, 0.0, 20.0);
  const auto dense = oracles::scan_crossings(
      [&](double r) { return std::abs(pair_potential(kMinus, r)); },
      eit.threshold_MHz(), 0.5, 20.0);
  REQUIRE(found.size() == 3);
  REQUIRE(dense.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(found[i].r_um - dense[i].r) < 2e-3);
    CHECK((found[i].direction == CrossingDirection::Falling) == dense[i].falling);
  }
  // Inner falling crossing near 6.2, rising inside the zero region, outer
  // falling crossing past 11 um.
  CHECK(found[0].r_um == doctest::Approx(6.18).epsilon(0.01));
  CHECK(found[1].direction == CrossingDirection::Rising);
  CHECK(found[2].r_um > 11.0);
}

TEST_CASE("plus branch crosses exactly once") {
  const BlockadeThreshold eit = calibrate_detection_threshold(12.7);
  const auto found = threshold_crossings(kPlus, eit, 0.0, 20.0);
  REQUIRE(found.size() == 1);
  CHECK(found[0].direction == CrossingDirection::Falling);
}

TEST_CASE("a huge threshold yields no crossings") {
  const BlockadeThreshold huge{1e12, ThresholdConvention::FullLinewidth};
  CHECK(threshold_crossings(kPrep, huge, 0.0, 20.0).empty());
}

TEST_CASE("blockade radius scales as the sixth root of c6") {
  for (double theta : {0.0, 0.7, 1.3}) {
    PairModel doubled = kPrep;
    doubled.c6_parallel_MHz_um6 *= 2.0;
    const auto r1 = blockade_radius(kPrep, kGamma3, theta);
    const auto r2 = blockade_radius(doubled, kGamma3, theta);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    // Bisection resolves 1e-3 um; compare ratios at that resolution.
    CHECK(*r2 / *r1 == doctest::Approx(std::pow(2.0, 1.0 / 6.0)).epsilon(2e-4));
  }
}

TEST_CASE("branch mean reproduces the averaged blockade radius") {
  const BlockadeThreshold eit = calibrate_detection_threshold(12.7);
  const double mean = blockade_average(kPlus, eit, AverageConvention::BranchMean);
  CHECK(std::abs(mean - 9.4) < 0.1);
  // Invariant under the branch label of the input model.
  CHECK(blockade_average(kMinus, eit, AverageConvention::BranchMean) ==
        doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("blockade surface has the configured aspect ratio") {
  const auto r0 = blockade_radius(kPrep, kGamma3, 0.0);
  const auto r90 = blockade_radius(kPrep, kGamma3, std::acos(-1.0) / 2.0);
  REQUIRE(r0.has_value());
  REQUIRE(r90.has_value());
  CHECK(*r90 / *r0 == doctest::Approx(1.6).epsilon(1e-3));
}

TEST_CASE("solid-angle mean matches a dense angular scan") {
  const double mean =
      blockade_average(kPrep, kGamma3, AverageConvention::SolidAngleMean);
  // Dense midpoint rule over 10^4 angles.
  const int n = 10000;
  const double pi = std::acos(-1.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double theta = pi * (i + 0.5) / n;
    acc += *blockade_radius(kPrep, kGamma3, theta) * std::sin(theta);
  }
  acc *= pi / n / 2.0;
  CHECK(std::abs(mean - acc) < 1e-3);
}

TEST_CASE("average conventions reject mismatched model kinds") {
  const BlockadeThreshold eit = calibrate_detection_threshold(12.7);
  CHECK_THROWS_AS(blockade_average(kPrep, kGamma3, AverageConvention::BranchMean),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      blockade_average(kPlus, eit, AverageConvention::SolidAngleMean),
      std::invalid_argument);
  CHECK_THROWS_AS(
      blockade_average(kPlus, eit, AverageConvention::ArithmeticAxesMean),
      std::invalid_argument);
}
