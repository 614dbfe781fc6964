#pragma once

#include <optional>
#include <vector>

namespace rydsim {

enum class PairKind { VdwAnisotropic, ExchangePlusVdw };
enum class Branch { Plus, Minus, NotApplicable };

// Pair potential for two Rydberg atoms, energies as ordinary frequencies.
//
// ExchangePlusVdw (detection channel, opposite-parity pair): the exchange
// interaction splits the pair into molecular branches
//   V±(R) = c6/R^6 ± c3/R^3,   angle ignored.
// VdwAnisotropic (preparation channel, like pair): V(R, theta) = C6(theta)/R^6
// with C6(theta) = c6_parallel * (cos^2 theta + k sin^2 theta), k chosen so the
// blockade surface has the configured axis ratio: k = anisotropy_ratio^6.
struct PairModel {
  PairKind kind = PairKind::ExchangePlusVdw;
  double c6_parallel_MHz_um6 = 0.0;
  double c3_MHz_um3 = 0.0;
  double anisotropy_ratio = 1.0;
  Branch branch = Branch::NotApplicable;

  static PairModel detection(Branch b);  // rr' exchange + van der Waals
  static PairModel preparation();        // r'r' anisotropic van der Waals

  void validate() const;  // throws std::invalid_argument on bad fields
};

enum class ThresholdConvention { HalfLinewidth, FullLinewidth };

// Blockade condition |V(r_B)| = h * nu_thr, where nu_thr is half or the full
// linewidth depending on convention.
struct BlockadeThreshold {
  double linewidth_MHz = 0.0;
  ThresholdConvention convention = ThresholdConvention::FullLinewidth;

  double threshold_MHz() const {
    return convention == ThresholdConvention::HalfLinewidth ? 0.5 * linewidth_MHz
                                                            : linewidth_MHz;
  }
};

// Signed pair potential in MHz. Throws std::domain_error for r <= 0.
double pair_potential(const PairModel& model, double r_um, double theta_rad = 0.0);

// Innermost radius at which |V| first drops below the threshold when scanning
// outward from R = 0. Bracketing on a log-spaced grid plus bisection to 1e-3 um.
// Returns nullopt when the threshold is never crossed within (0, 100] um.
std::optional<double> blockade_radius(const PairModel& model,
                                      const BlockadeThreshold& thr,
                                      double theta_rad = 0.0);

enum class CrossingDirection { Falling, Rising };

struct ThresholdCrossing {
  double r_um = 0.0;
  CrossingDirection direction = CrossingDirection::Falling;
};

// All radii in (0, r_max] where |V(R)| crosses the threshold, in increasing
// order. Falling means |V| drops below the threshold as R increases. The Minus
// branch is non-monotone (it has a zero crossing at R^3 = c6/c3), so it can
// cross up to three times.
std::vector<ThresholdCrossing> threshold_crossings(const PairModel& model,
                                                   const BlockadeThreshold& thr,
                                                   double theta_rad, double r_max_um);

enum class AverageConvention { SolidAngleMean, BranchMean, ArithmeticAxesMean };

// Averaged blockade radius. BranchMean applies to ExchangePlusVdw only:
// (r_B+ + r_B-)/2. SolidAngleMean (anisotropic model) is the solid-angle
// average (1/2) int r_B(theta) sin(theta) dtheta by 64-node quadrature.
// ArithmeticAxesMean averages the three ellipsoid semi-axes. Throws when the
// convention does not apply to the model kind.
double blockade_average(const PairModel& model, const BlockadeThreshold& thr,
                        AverageConvention convention);

// The EIT linewidth during detection is not known directly; solve for the
// threshold that puts the Plus-branch blockade radius at target_r_plus_um.
// The Minus-branch radius is then an independent prediction.
BlockadeThreshold calibrate_detection_threshold(double target_r_plus_um);

}  // namespace rydsim
