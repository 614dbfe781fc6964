#include "rydsim/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/rng.hpp"

namespace rydsim {

CloudGeometry CloudGeometry::defaults() {
  CloudGeometry g;
  g.sigma_x_um = constants::kCloudSigmaXUm;
  g.sigma_y_um = constants::kCloudSigmaYUm;
  g.sigma_z_um = constants::kCloudSigmaZUm;
  g.n_atoms = constants::kCloudAtomNumber;
  g.probe_angle_xy_rad = constants::kProbeAngleFromYDeg * std::numbers::pi / 180.0;
  g.cross_section_reduction = constants::kCrossSectionReduction;
  g.wavelength_um = constants::kProbeWavelengthUm;
  return g;
}

void CloudGeometry::validate() const {
  if (!(sigma_x_um > 0.0 && sigma_y_um > 0.0 && sigma_z_um > 0.0))
    throw std::invalid_argument("CloudGeometry: rms sizes must be > 0");
  if (n_atoms < 1) throw std::invalid_argument("CloudGeometry: n_atoms must be >= 1");
  if (!(cross_section_reduction > 0.0 && cross_section_reduction <= 1.0))
    throw std::invalid_argument("CloudGeometry: cross_section_reduction in (0, 1]");
  if (!(wavelength_um > 0.0))
    throw std::invalid_argument("CloudGeometry: wavelength must be > 0");
}

Vec3 probe_direction(const CloudGeometry& geom) {
  return {std::sin(geom.probe_angle_xy_rad), std::cos(geom.probe_angle_xy_rad), 0.0};
}

double rms_pair_distance(const CloudGeometry& geom) {
  geom.validate();
  return std::sqrt(2.0 * (geom.sigma_x_um * geom.sigma_x_um +
                          geom.sigma_y_um * geom.sigma_y_um +
                          geom.sigma_z_um * geom.sigma_z_um));
}

std::vector<Vec3> sample_positions(const CloudGeometry& geom, std::uint64_t seed) {
  geom.validate();
  Rng rng(seed);
  std::vector<Vec3> pts(geom.n_atoms);
  for (auto& p : pts) {
    p.x = geom.sigma_x_um * rng.normal();
    p.y = geom.sigma_y_um * rng.normal();
    p.z = geom.sigma_z_um * rng.normal();
  }
  return pts;
}

double peak_optical_depth(const CloudGeometry& geom) {
  geom.validate();
  const double sigma0 =
      3.0 * geom.wavelength_um * geom.wavelength_um / (2.0 * std::numbers::pi);
  // Transverse directions: in-plane perpendicular to the probe, and z.
  const double c = std::cos(geom.probe_angle_xy_rad);
  const double s = std::sin(geom.probe_angle_xy_rad);
  const double var_a = c * c * geom.sigma_x_um * geom.sigma_x_um +
                       s * s * geom.sigma_y_um * geom.sigma_y_um;
  const double s_a = std::sqrt(var_a);
  const double s_b = geom.sigma_z_um;
  return geom.n_atoms * sigma0 * geom.cross_section_reduction /
         (2.0 * std::numbers::pi * s_a * s_b);
}

double mean_density_cm3(const CloudGeometry& geom) {
  geom.validate();
  const double per_um3 =
      geom.n_atoms / (8.0 * std::pow(std::numbers::pi, 1.5) * geom.sigma_x_um *
                      geom.sigma_y_um * geom.sigma_z_um);
  return per_um3 * 1e12;  // um^-3 -> cm^-3
}

double double_excitation_fraction(const CloudGeometry& geom, const PairModel& model,
                                  const BlockadeThreshold& thr, int n_pairs,
                                  std::uint64_t seed) {
  geom.validate();
  model.validate();
  if (n_pairs < 1)
    throw std::invalid_argument("double_excitation_fraction: n_pairs >= 1");
  const double nu = thr.threshold_MHz();
  const Vec3 axis = probe_direction(geom);
  Rng rng(seed);
  long unprotected = 0;
  for (int i = 0; i < n_pairs; ++i) {
    const double dx = geom.sigma_x_um * (rng.normal() - rng.normal());
    const double dy = geom.sigma_y_um * (rng.normal() - rng.normal());
    const double dz = geom.sigma_z_um * (rng.normal() - rng.normal());
    const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (r <= 0.0) {
      continue;  // coincident pair is maximally blockaded
    }
    const double cos_theta = (dx * axis.x + dy * axis.y + dz * axis.z) / r;
    const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
    if (std::abs(pair_potential(model, r, theta)) < nu) ++unprotected;
  }
  return static_cast<double>(unprotected) / n_pairs;
}

}  // namespace rydsim
