#include "rydsim/interactions.hpp"

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/estimate.hpp"

namespace rydsim {

namespace {

constexpr double kGridLoUm = 0.5;
constexpr double kGridHiUm = 100.0;
constexpr int kGridPoints = 512;
constexpr double kBisectTolUm = 1e-3;

double abs_potential(const PairModel& model, double r, double theta) {
  return std::abs(pair_potential(model, r, theta));
}

// Bisect |V| - thr between a bracketing pair (g changes sign).
double bisect_crossing(const PairModel& model, double theta, double thr,
                       double lo, double hi) {
  double glo = abs_potential(model, lo, theta) - thr;
  while (hi - lo > kBisectTolUm) {
    double mid = 0.5 * (lo + hi);
    double gmid = abs_potential(model, mid, theta) - thr;
    if ((glo > 0.0) == (gmid > 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PairModel PairModel::detection(Branch b) {
  PairModel m;
  m.kind = PairKind::ExchangePlusVdw;
  m.c6_parallel_MHz_um6 = constants::kC6DetectionMHzUm6;
  m.c3_MHz_um3 = constants::kC3DetectionMHzUm3;
  m.anisotropy_ratio = 1.0;
  m.branch = b;
  return m;
}

PairModel PairModel::preparation() {
  PairModel m;
  m.kind = PairKind::VdwAnisotropic;
  m.c6_parallel_MHz_um6 = constants::kC6PrepParallelMHzUm6;
  m.c3_MHz_um3 = 0.0;
  m.anisotropy_ratio = constants::kBlockadeAspectRatio;
  m.branch = Branch::NotApplicable;
  return m;
}

void PairModel::validate() const {
  if (!(c6_parallel_MHz_um6 > 0.0))
    throw std::invalid_argument("PairModel: c6_parallel must be > 0");
  if (c3_MHz_um3 < 0.0) throw std::invalid_argument("PairModel: c3 must be >= 0");
  if (anisotropy_ratio < 1.0)
    throw std::invalid_argument("PairModel: anisotropy_ratio must be >= 1");
  if (kind == PairKind::ExchangePlusVdw) {
    if (!(c3_MHz_um3 > 0.0))
      throw std::invalid_argument("PairModel: exchange model requires c3 > 0");
    if (branch == Branch::NotApplicable)
      throw std::invalid_argument("PairModel: exchange model requires a branch");
  }
}

double pair_potential(const PairModel& model, double r_um, double theta_rad) {
  if (!(r_um > 0.0)) throw std::domain_error("pair_potential: R must be > 0");
  const double r3 = r_um * r_um * r_um;
  const double r6 = r3 * r3;
  if (model.kind == PairKind::ExchangePlusVdw) {
    const double sign = model.branch == Branch::Minus ? -1.0 : 1.0;
    return model.c6_parallel_MHz_um6 / r6 + sign * model.c3_MHz_um3 / r3;
  }
  const double k = std::pow(model.anisotropy_ratio, 6.0);
  const double c = std::cos(theta_rad);
  const double s = std::sin(theta_rad);
  const double c6_theta = model.c6_parallel_MHz_um6 * (c * c + k * s * s);
  return c6_theta / r6;
}

std::optional<double> blockade_radius(const PairModel& model,
                                      const BlockadeThreshold& thr,
                                      double theta_rad) {
  model.validate();
  if (!(thr.linewidth_MHz > 0.0))
    throw std::invalid_argument("BlockadeThreshold: linewidth must be > 0");
  const double nu = thr.threshold_MHz();

  // The c6/R^6 term dominates at short range, so |V| exceeds any threshold for
  // small enough R. If the innermost grid point is already below threshold the
  // crossing lies inside (0, kGridLoUm).
  if (abs_potential(model, kGridLoUm, theta_rad) < nu)
    return bisect_crossing(model, theta_rad, nu, 1e-6, kGridLoUm);

  const double log_lo = std::log(kGridLoUm);
  const double log_hi = std::log(kGridHiUm);
  double prev_r = kGridLoUm;
  double prev_g = abs_potential(model, prev_r, theta_rad) - nu;
  for (int i = 1; i < kGridPoints; ++i) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * i / (kGridPoints - 1));
    const double g = abs_potential(model, r, theta_rad) - nu;
    if (prev_g > 0.0 && g <= 0.0)
      return bisect_crossing(model, theta_rad, nu, prev_r, r);
    prev_r = r;
    prev_g = g;
  }
  return std::nullopt;  // still blockaded at 100 um
}

std::vector<ThresholdCrossing> threshold_crossings(const PairModel& model,
                                                   const BlockadeThreshold& thr,
                                                   double theta_rad,
                                                   double r_max_um) {
  model.validate();
  if (!(r_max_um > 0.0))
    throw std::invalid_argument("threshold_crossings: r_max must be > 0");
  const double nu = thr.threshold_MHz();

  // Crossings are located on the documented log grid; radii below the grid
  // floor (deep inside the hard blockade core) are out of scope here.
  std::vector<ThresholdCrossing> out;
  const double lo = std::min(kGridLoUm, 0.1 * r_max_um);
  const double log_lo = std::log(lo);
  const double log_hi = std::log(r_max_um);
  double prev_r = lo;
  double prev_g = abs_potential(model, prev_r, theta_rad) - nu;
  for (int i = 1; i < kGridPoints; ++i) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * i / (kGridPoints - 1));
    const double g = abs_potential(model, r, theta_rad) - nu;
    if ((prev_g > 0.0) != (g > 0.0)) {
      out.push_back({bisect_crossing(model, theta_rad, nu, prev_r, r),
                     prev_g > 0.0 ? CrossingDirection::Falling
                                  : CrossingDirection::Rising});
    }
    prev_r = r;
    prev_g = g;
  }
  return out;
}

double blockade_average(const PairModel& model, const BlockadeThreshold& thr,
                        AverageConvention convention) {
  model.validate();
  switch (convention) {
    case AverageConvention::BranchMean: {
      if (model.kind != PairKind::ExchangePlusVdw)
        throw std::invalid_argument(
            "blockade_average: BranchMean requires the exchange model");
      PairModel plus = model;
      plus.branch = Branch::Plus;
      PairModel minus = model;
      minus.branch = Branch::Minus;
      auto rp = blockade_radius(plus, thr);
      auto rm = blockade_radius(minus, thr);
      if (!rp || !rm)
        throw std::runtime_error("blockade_average: branch not blockaded");
      return 0.5 * (*rp + *rm);
    }
    case AverageConvention::SolidAngleMean: {
      if (model.kind != PairKind::VdwAnisotropic)
        throw std::invalid_argument(
            "blockade_average: SolidAngleMean requires the anisotropic model");
      auto integrand = [&](double theta) {
        auto r = blockade_radius(model, thr, theta);
        return r ? *r * std::sin(theta) : 0.0;
      };
      return 0.5 * quadrature(integrand, 0.0, std::acos(-1.0), 64);
    }
    case AverageConvention::ArithmeticAxesMean: {
      if (model.kind != PairKind::VdwAnisotropic)
        throw std::invalid_argument(
            "blockade_average: ArithmeticAxesMean requires the anisotropic model");
      auto r0 = blockade_radius(model, thr, 0.0);
      auto r90 = blockade_radius(model, thr, std::acos(-1.0) / 2.0);
      if (!r0 || !r90)
        throw std::runtime_error("blockade_average: axis not blockaded");
      return (*r0 + 2.0 * *r90) / 3.0;
    }
  }
  throw std::invalid_argument("blockade_average: unknown convention");
}

BlockadeThreshold calibrate_detection_threshold(double target_r_plus_um) {
  if (!(target_r_plus_um > 0.0))
    throw std::invalid_argument("calibrate_detection_threshold: bad target");
  // V+ is strictly decreasing, so the threshold that places the radius at the
  // target is simply |V+(target)|.
  const PairModel plus = PairModel::detection(Branch::Plus);
  BlockadeThreshold thr;
  thr.linewidth_MHz = pair_potential(plus, target_r_plus_um);
  thr.convention = ThresholdConvention::FullLinewidth;
  return thr;
}

}  // namespace rydsim
