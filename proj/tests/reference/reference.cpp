#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace rift::reference {

ComplexRaster inverse_dft(const RasterF64& spectrum) {
  const int w = spectrum.width();
  const int h = spectrum.height();
  const double n = static_cast<double>(w) * h;
  ComplexRaster out{RasterF64(w, h), RasterF64(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double re = 0.0;
      double im = 0.0;
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          const double angle = 2.0 * std::numbers::pi *
                               (static_cast<double>(u) * x / w + static_cast<double>(v) * y / h);
          re += spectrum(u, v) * std::cos(angle);
          im += spectrum(u, v) * std::sin(angle);
        }
      }
      out.re(x, y) = re / n;
      out.im(x, y) = im / n;
    }
  }
  return out;
}

std::pair<RasterF64, RasterF64> spatial_convolve(const RasterF64& img, const FilterBank& bank,
                                                 int s, int o) {
  const int w = img.width();
  const int h = img.height();
  const ComplexRaster kernel = inverse_dft(bank.combined(s, o));
  RasterF64 even(w, h);
  RasterF64 odd(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double re = 0.0;
      double im = 0.0;
      for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
          const int kx = ((x - u) % w + w) % w;
          const int ky = ((y - v) % h + h) % h;
          re += img(u, v) * kernel.re(kx, ky);
          im += img(u, v) * kernel.im(kx, ky);
        }
      }
      even(x, y) = re;
      odd(x, y) = im;
    }
  }
  return {std::move(even), std::move(odd)};
}

ConvolutionSequence convolve_spatial(const RasterF64& img, const FilterBank& bank) {
  const FilterBankParams& p = bank.params();
  ConvolutionSequence seq;
  seq.params = p;
  seq.width = img.width();
  seq.height = img.height();
  const int channels = p.n_scales * p.n_orientations;
  seq.even.resize(channels);
  seq.odd.resize(channels);
  seq.amplitude.resize(channels);
  for (int o = 0; o < p.n_orientations; ++o) {
    RasterF64 sum(img.width(), img.height());
    for (int s = 0; s < p.n_scales; ++s) {
      auto [e, od] = spatial_convolve(img, bank, s, o);
      RasterF64 a(img.width(), img.height());
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::hypot(e[i], od[i]);
        sum[i] += a[i];
      }
      const std::size_t c = seq.channel(s, o);
      seq.even[c] = std::move(e);
      seq.odd[c] = std::move(od);
      seq.amplitude[c] = std::move(a);
    }
    seq.summed_amplitude.push_back(std::move(sum));
  }
  return seq;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> noise_threshold(const ConvolutionSequence& seq, const PcParams& params) {
  const int n_scales = seq.params.n_scales;
  std::vector<double> out;
  for (int o = 0; o < seq.params.n_orientations; ++o) {
    const double sigma = median(seq.A(0, o).storage()) / std::sqrt(std::log(4.0));
    // Expected noise amplitude of scale s is sigma / mult^s.
    double total = 0.0;
    for (int s = 0; s < n_scales; ++s) total += sigma / std::pow(seq.params.scale_mult, s);
    const double mean = total * std::sqrt(std::numbers::pi / 2.0);
    const double stddev = total * std::sqrt((4.0 - std::numbers::pi) / 2.0);
    out.push_back(std::max(0.0, mean + params.noise_k * stddev));
  }
  return out;
}

PcMaps phase_congruency(const ConvolutionSequence& seq, const PcParams& params) {
  const int w = seq.width;
  const int h = seq.height;
  const int n_scales = seq.params.n_scales;
  const int n_orient = seq.params.n_orientations;
  const double xi = params.epsilon;

  PcMaps pc;
  pc.noise_threshold = noise_threshold(seq, params);
  for (int o = 0; o < n_orient; ++o) {
    pc.per_orientation.emplace_back(w, h);
    pc.angles.push_back(o * std::numbers::pi / n_orient);
  }
  pc.combined = RasterF64(w, h);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double numerator = 0.0;
      double denominator = 0.0;
      for (int o = 0; o < n_orient; ++o) {
        double f = 0.0;  // Σ E
        double g = 0.0;  // Σ O
        double sum_a = 0.0;
        double max_a = 0.0;
        for (int s = 0; s < n_scales; ++s) {
          f += seq.E(s, o)(x, y);
          g += seq.O(s, o)(x, y);
          const double a = std::hypot(seq.E(s, o)(x, y), seq.O(s, o)(x, y));
          sum_a += a;
          max_a = std::max(max_a, a);
        }
        const double mean_phase = std::atan2(g, f);
        double energy = 0.0;
        if (std::hypot(f, g) > 0.0) {
          for (int s = 0; s < n_scales; ++s) {
            const double e = seq.E(s, o)(x, y);
            const double od = seq.O(s, o)(x, y);
            const double a = std::hypot(e, od);
            if (a == 0.0) continue;
            const double dphi = std::atan2(od, e) - mean_phase;
            energy += a * (std::cos(dphi) - std::abs(std::sin(dphi)));
          }
        }
        const double spread = sum_a / n_scales / (max_a + xi);
        const double weight =
            1.0 / (1.0 + std::exp(params.weight_gain * (params.weight_cutoff - spread)));
        const double kept = weight * std::max(energy - pc.noise_threshold[o], 0.0);
        pc.per_orientation[o](x, y) = kept / (sum_a + xi);
        numerator += kept;
        denominator += sum_a;
      }
      pc.combined(x, y) = numerator / (denominator + xi);
    }
  }
  return pc;
}

MomentMaps moments(const PcMaps& pc) {
  const int w = pc.combined.width();
  const int h = pc.combined.height();
  MomentMaps m{RasterF64(w, h), RasterF64(w, h), RasterF64(w, h),
               RasterF64(w, h), RasterF64(w, h), RasterF64(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0.0, b = 0.0, c = 0.0;
      for (std::size_t o = 0; o < pc.angles.size(); ++o) {
        const double p = pc.per_orientation[o](x, y);
        a += std::pow(p * std::cos(pc.angles[o]), 2.0);
        b += 2.0 * (p * std::cos(pc.angles[o])) * (p * std::sin(pc.angles[o]));
        c += std::pow(p * std::sin(pc.angles[o]), 2.0);
      }
      const double root = std::sqrt(b * b + (a - c) * (a - c));
      m.a(x, y) = a;
      m.b(x, y) = b;
      m.c(x, y) = c;
      m.principal_axis(x, y) = 0.5 * std::atan2(b, a - c);
      m.max_moment(x, y) = 0.5 * (c + a + root);
      m.min_moment(x, y) = 0.5 * (c + a - root);
    }
  }
  return m;
}

MaxIndexMap max_index_map(const ConvolutionSequence& seq, int shift) {
  const int n = seq.params.n_orientations;
  MaxIndexMap mim{RasterU8(seq.width, seq.height), RasterF64(seq.width, seq.height), shift, n};
  for (int y = 0; y < seq.height; ++y) {
    for (int x = 0; x < seq.width; ++x) {
      int best = 0;
      for (int o = 1; o < n; ++o) {
        if (seq.summed_amplitude[o](x, y) > seq.summed_amplitude[best](x, y)) best = o;
      }
      // Original channel best+1 sits at position best+1-shift of the ring
      // that starts at channel shift+1.
      int label = best + 1 - shift;
      if (label < 1) label += n;
      mim.index(x, y) = static_cast<std::uint8_t>(label);
      mim.max_amplitude(x, y) = seq.summed_amplitude[best](x, y);
    }
  }
  return mim;
}

namespace {

constexpr int kRing[16][2] = {{0, -3}, {1, -3},  {2, -2},  {3, -1}, {3, 0},   {3, 1},
                              {2, 2},  {1, 3},   {0, 3},   {-1, 3}, {-2, 2},  {-3, 1},
                              {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};

}  // namespace

bool fast_passes(const RasterF64& img, int x, int y, double t) {
  const double c = img(x, y);
  for (int start = 0; start < 16; ++start) {
    bool all_bright = true;
    bool all_dark = true;
    for (int j = 0; j < 9; ++j) {
      const int k = (start + j) % 16;
      const double v = img(x + kRing[k][0], y + kRing[k][1]);
      all_bright = all_bright && v - c > t;
      all_dark = all_dark && c - v > t;
    }
    if (all_bright || all_dark) return true;
  }
  return false;
}

double fast_score(const RasterF64& img, int x, int y) {
  const double c = img(x, y);
  std::vector<double> candidates;
  for (const auto& off : kRing) {
    const double d = std::abs(img(x + off[0], y + off[1]) - c);
    if (d > 0.0) candidates.push_back(d);
  }
  double best = 0.0;
  for (double d : candidates) {
    if (d > best && fast_passes(img, x, y, std::nextafter(d, 0.0))) best = d;
  }
  return best;
}

std::vector<std::pair<int, int>> local_maxima(const RasterF64& map, double threshold, int radius,
                                              int margin) {
  std::vector<std::pair<int, int>> out;
  const int w = map.width();
  const int h = map.height();
  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double v = map(x, y);
      if (!(v > 0.0) || v < threshold) continue;
      bool wins = true;
      for (int qy = y - radius; qy <= y + radius; ++qy) {
        for (int qx = x - radius; qx <= x + radius; ++qx) {
          if (qx < 0 || qy < 0 || qx >= w || qy >= h || (qx == x && qy == y)) continue;
          const double q = map(qx, qy);
          const bool earlier = static_cast<long>(qy) * w + qx < static_cast<long>(y) * w + x;
          if (q > v || (q == v && earlier)) wins = false;
        }
      }
      if (wins) out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<NnMatch> match_nn(std::span<const Descriptor> ref, std::span<const DescriptorSet> tgt,
                              bool mutual) {
  auto dist = [](const Descriptor& a, const Descriptor& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
      const double d = static_cast<double>(a.values[k]) - b.values[k];
      acc += d * d;
    }
    return std::sqrt(acc);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // D[i][j] = min over variants of target j; V[i][j] its first arg-min variant.
  std::vector<std::vector<double>> d(ref.size(), std::vector<double>(tgt.size(), kInf));
  std::vector<std::vector<int>> var(ref.size(), std::vector<int>(tgt.size(), -1));
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (ref[i].degenerate) continue;
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      for (std::size_t v = 0; v < tgt[j].variants.size(); ++v) {
        if (tgt[j].variants[v].degenerate) continue;
        const double dv = dist(ref[i], tgt[j].variants[v]);
        if (dv < d[i][j]) {
          d[i][j] = dv;
          var[i][j] = static_cast<int>(v);
        }
      }
    }
  }
  std::vector<NnMatch> out;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (ref[i].degenerate) continue;
    std::size_t best = tgt.size();
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      if (var[i][j] >= 0 && (best == tgt.size() || d[i][j] < d[i][best])) best = j;
    }
    if (best == tgt.size()) continue;
    if (mutual) {
      std::size_t back = ref.size();
      for (std::size_t k = 0; k < ref.size(); ++k) {
        if (var[k][best] >= 0 && (back == ref.size() || d[k][best] < d[back][best])) back = k;
      }
      if (back != i) continue;
    }
    out.push_back({i, best, tgt[best].variants[static_cast<std::size_t>(var[i][best])].shift,
                   d[i][best]});
  }
  return out;
}

}  // namespace rift::reference
