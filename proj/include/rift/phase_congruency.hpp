#pragma once

#include <vector>

#include "rift/log_gabor.hpp"
#include "rift/raster.hpp"

namespace rift {

struct PcParams {
  /// Noise threshold T = mean + noise_k · std of the estimated noise energy.
  double noise_k = 2.0;
  /// Added to denominators; on the amplitude scale of [0,1] images.
  double epsilon = 1e-4;
  /// Frequency-spread weighting 1 / (1 + exp(gain · (cutoff - spread))).
  double weight_cutoff = 0.5;
  double weight_gain = 10.0;

  void validate() const;

  bool operator==(const PcParams&) const = default;
};

struct PcMaps {
  std::vector<RasterF64> per_orientation;  // PC(θ_o), values in [0,1]
  RasterF64 combined;                      // all orientations aggregated
  std::vector<double> angles;              // θ_o of each per-orientation map
  std::vector<double> noise_threshold;     // T_o used for each orientation
};

/// Second-moment analysis of the per-orientation PC maps.
struct MomentMaps {
  RasterF64 a, b, c;
  RasterF64 principal_axis;  // ψ
  RasterF64 min_moment;      // cornerness
  RasterF64 max_moment;      // edge strength
};

/// Per-orientation noise threshold, from the median of the smallest-scale
/// amplitude under a Rayleigh noise model.
std::vector<double> estimate_noise_threshold(const ConvolutionSequence& seq,
                                             const PcParams& params);

PcMaps compute_pc(const ConvolutionSequence& seq, const PcParams& params);

MomentMaps compute_moments(const PcMaps& pc);

}  // namespace rift
