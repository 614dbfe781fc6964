#pragma once

#include <cstdint>
#include <vector>

#include "rydsim/interactions.hpp"

namespace rydsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Trap parameters carried as metadata only; the traps are off during the
// preparation/rotation/detection sequences, so nothing here enters the model.
struct TrapMetadata {
  double waist_852_um = 10.0;
  double waist_1064_um = 20.0;
  double depth_852_MHz = 2.0;
  double depth_1064_MHz = 20.0;
  double freq_x_kHz = 5.7;
  double freq_y_kHz = 3.0;
  double freq_z_kHz = 4.8;
  double temperature_uK = 80.0;
};

// Static Gaussian cloud. The probe propagates in the xy-plane at
// probe_angle_xy_rad from the +y axis; the quantization axis lies along it.
struct CloudGeometry {
  double sigma_x_um = 0.0;
  double sigma_y_um = 0.0;
  double sigma_z_um = 0.0;
  int n_atoms = 0;
  double probe_angle_xy_rad = 0.0;
  double cross_section_reduction = 1.0;
  double wavelength_um = 0.780;
  TrapMetadata trap;

  static CloudGeometry defaults();
  void validate() const;
};

Vec3 probe_direction(const CloudGeometry& geom);

// rms distance between two atoms: sqrt(2 (sx^2 + sy^2 + sz^2)).
double rms_pair_distance(const CloudGeometry& geom);

// n_atoms i.i.d. Gaussian positions; bit-reproducible for a fixed seed.
std::vector<Vec3> sample_positions(const CloudGeometry& geom, std::uint64_t seed);

// Peak optical depth through the cloud center along the probe:
// OD = N sigma0 reduction / (2 pi s_a s_b), sigma0 = 3 lambda^2 / (2 pi),
// where s_a, s_b are the rms cloud sizes transverse to the probe.
double peak_optical_depth(const CloudGeometry& geom);

// Density-weighted mean density N / (8 pi^{3/2} sx sy sz), in cm^-3.
double mean_density_cm3(const CloudGeometry& geom);

// Fraction of sampled atom pairs whose |V| falls below the blockade threshold,
// i.e. pairs not protected against double excitation. Geometric proxy only.
double double_excitation_fraction(const CloudGeometry& geom, const PairModel& model,
                                  const BlockadeThreshold& thr, int n_pairs,
                                  std::uint64_t seed);

}  // namespace rydsim
