#include "rift/phase_congruency.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rift {

void PcParams::validate() const {
  if (!(noise_k >= 0.0)) throw std::invalid_argument("pc: noise_k must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("pc: epsilon must be > 0");
  if (!(weight_cutoff > 0.0 && weight_cutoff < 1.0)) {
    throw std::invalid_argument("pc: weight_cutoff must lie in (0,1)");
  }
  if (!(weight_gain > 0.0)) throw std::invalid_argument("pc: weight_gain must be > 0");
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

void require_complete(const ConvolutionSequence& seq) {
  if (!seq.complete()) throw std::invalid_argument("convolution sequence is incomplete");
}

}  // namespace

std::vector<double> estimate_noise_threshold(const ConvolutionSequence& seq,
                                             const PcParams& params) {
  require_complete(seq);
  const int n_scales = seq.n_scales();
  const double mult = seq.params.scale_mult;
  std::vector<double> thresholds(seq.n_orientations());
  for (int o = 0; o < seq.n_orientations(); ++o) {
    // The median of a Rayleigh variable is σ·sqrt(ln 4).
    const auto& a = seq.A(0, o).storage();
    const double tau = median(a) / std::sqrt(std::log(4.0));
    // Smaller-scale filters have proportionally more noise energy; the
    // geometric series sums the expected contribution over all scales.
    const double total_tau =
        tau * (1.0 - std::pow(1.0 / mult, n_scales)) / (1.0 - 1.0 / mult);
    const double noise_mean = total_tau * std::sqrt(std::numbers::pi / 2.0);
    const double noise_sigma = total_tau * std::sqrt((4.0 - std::numbers::pi) / 2.0);
    thresholds[o] = std::max(0.0, noise_mean + params.noise_k * noise_sigma);
  }
  return thresholds;
}

PcMaps compute_pc(const ConvolutionSequence& seq, const PcParams& params) {
  params.validate();
  require_complete(seq);
  const int width = seq.width;
  const int height = seq.height;
  const int n_scales = seq.n_scales();
  const int n_orient = seq.n_orientations();
  const double eps = params.epsilon;

  PcMaps pc;
  pc.noise_threshold = estimate_noise_threshold(seq, params);
  pc.per_orientation.assign(n_orient, RasterF64(width, height));
  pc.combined = RasterF64(width, height);
  for (int o = 0; o < n_orient; ++o) pc.angles.push_back(seq.params.orientation_angle(o));

  const auto n = static_cast<std::ptrdiff_t>(seq.width) * seq.height;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double weighted_energy_total = 0.0;
    double amplitude_total = 0.0;
    for (int o = 0; o < n_orient; ++o) {
      double sum_e = 0.0;
      double sum_o = 0.0;
      double sum_a = 0.0;
      double max_a = 0.0;
      for (int s = 0; s < n_scales; ++s) {
        sum_e += seq.E(s, o)[i];
        sum_o += seq.O(s, o)[i];
        const double a = seq.A(s, o)[i];
        sum_a += a;
        max_a = std::max(max_a, a);
      }
      const double local_energy = std::sqrt(sum_e * sum_e + sum_o * sum_o);
      double mean_e = 0.0;
      double mean_o = 0.0;
      if (local_energy > 0.0) {
        mean_e = sum_e / local_energy;
        mean_o = sum_o / local_energy;
      }
      // Σ_s A_so·ΔΦ_so: projection onto the mean phase minus the orthogonal
      // deviation.
      double energy = 0.0;
      for (int s = 0; s < n_scales; ++s) {
        const double e = seq.E(s, o)[i];
        const double od = seq.O(s, o)[i];
        energy += e * mean_e + od * mean_o - std::abs(e * mean_o - od * mean_e);
      }
      const double above_noise = std::max(0.0, energy - pc.noise_threshold[o]);
      const double spread = sum_a / (n_scales * (max_a + eps));
      const double weight =
          1.0 / (1.0 + std::exp(params.weight_gain * (params.weight_cutoff - spread)));
      pc.per_orientation[o][i] = weight * above_noise / (sum_a + eps);
      weighted_energy_total += weight * above_noise;
      amplitude_total += sum_a;
    }
    pc.combined[i] = weighted_energy_total / (amplitude_total + eps);
  }
  return pc;
}

MomentMaps compute_moments(const PcMaps& pc) {
  if (pc.per_orientation.empty() || pc.per_orientation.size() != pc.angles.size()) {
    throw std::invalid_argument("compute_moments: PC maps and angles are inconsistent");
  }
  const int width = pc.per_orientation.front().width();
  const int height = pc.per_orientation.front().height();
  MomentMaps m{RasterF64(width, height), RasterF64(width, height), RasterF64(width, height),
               RasterF64(width, height), RasterF64(width, height), RasterF64(width, height)};

  std::vector<double> cos_t;
  std::vector<double> sin_t;
  for (double angle : pc.angles) {
    cos_t.push_back(std::cos(angle));
    sin_t.push_back(std::sin(angle));
  }

  const auto n = static_cast<std::ptrdiff_t>(width) * height;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    for (std::size_t o = 0; o < pc.angles.size(); ++o) {
      const double px = pc.per_orientation[o][i] * cos_t[o];
      const double py = pc.per_orientation[o][i] * sin_t[o];
      a += px * px;
      b += px * py;
      c += py * py;
    }
    b *= 2.0;
    const double root = std::sqrt(b * b + (a - c) * (a - c));
    m.a[i] = a;
    m.b[i] = b;
    m.c[i] = c;
    m.principal_axis[i] = 0.5 * std::atan2(b, a - c);
    m.max_moment[i] = 0.5 * (c + a + root);
    // Non-negative by Cauchy-Schwarz; clamp the rounding residue.
    m.min_moment[i] = std::max(0.0, 0.5 * (c + a - root));
  }
  return m;
}

}  // namespace rift
