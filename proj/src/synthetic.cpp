#include "mvsync/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mvsync/error.h"

namespace mvsync {

void SyntheticCorpusSpec::validate() const {
  MVSYNC_CHECK(base_length >= 2, "synthetic corpus: base_length must be at least 2");
  MVSYNC_CHECK(num_versions >= 2, "synthetic corpus: num_versions must be at least 2");
  MVSYNC_CHECK(beat_every >= 1, "synthetic corpus: beat_every must be at least 1");
  MVSYNC_CHECK(warp_strength >= 0.0 && warp_strength <= 1.0,
               "synthetic corpus: warp_strength must lie in [0, 1]");
  MVSYNC_CHECK(noise_level >= 0.0, "synthetic corpus: noise_level must be non-negative");
  MVSYNC_CHECK(articulation_perturbation >= 0.0,
               "synthetic corpus: articulation_perturbation must be non-negative");
  MVSYNC_CHECK(silence_rate >= 0.0 && silence_rate <= 1.0,
               "synthetic corpus: silence_rate must lie in [0, 1]");
  MVSYNC_CHECK(hop_duration > 0.0, "synthetic corpus: hop_duration must be positive");
}

namespace {

/// Smallest per-frame step so that warps stay strictly increasing at warp_strength = 1.
constexpr double kMinStep = 0.05;

struct NoteRegion {
  std::size_t start = 0;
  std::size_t length = 0;
  std::vector<double> weights;  // kChromaDim
};

struct BaseTimeline {
  FrameMatrix chroma;
  std::vector<NoteRegion> regions;
};

BaseTimeline make_base(const SyntheticCorpusSpec& spec, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> region_len(5, 40);
  std::uniform_int_distribution<std::size_t> pitch(0, kChromaDim - 1);
  std::uniform_int_distribution<std::size_t> extra_notes(1, 3);
  std::uniform_real_distribution<double> side_weight(0.2, 0.8);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> period(20.0, 60.0);

  BaseTimeline base;
  std::size_t pos = 0;
  std::size_t previous_root = kChromaDim;
  while (pos < spec.base_length) {
    NoteRegion region;
    region.start = pos;
    region.length = std::min(region_len(rng), spec.base_length - pos);
    region.weights.assign(kChromaDim, 0.0);
    std::size_t root = pitch(rng);
    while (root == previous_root) root = pitch(rng);
    previous_root = root;
    region.weights[root] = 1.0;
    const std::size_t extras = extra_notes(rng);
    for (std::size_t e = 0; e < extras; ++e) region.weights[pitch(rng)] += side_weight(rng);
    base.regions.push_back(region);
    pos += region.length;
  }

  std::vector<double> phases(kChromaDim);
  std::vector<double> periods(kChromaDim);
  for (std::size_t d = 0; d < kChromaDim; ++d) {
    phases[d] = phase(rng);
    periods[d] = period(rng);
  }
  base.chroma = FrameMatrix(spec.base_length, kChromaDim);
  for (const auto& region : base.regions) {
    for (std::size_t i = region.start; i < region.start + region.length; ++i) {
      for (std::size_t d = 0; d < kChromaDim; ++d) {
        const double wobble =
            0.05 * (1.0 + std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / periods[d] +
                                   phases[d]));
        base.chroma[i][d] = region.weights[d] + wobble;
      }
    }
  }
  return base;
}

/// Version position of every base frame: tempo knots drawn in [1 - w, 1 + w], interpolated
/// per frame, accumulated, and rescaled to an integer final position. `slowness` in [0, 1]
/// selects which half-width sub-range of [1 - w, 1 + w] the knots come from.
std::vector<double> make_warp(const SyntheticCorpusSpec& spec, double slowness,
                              std::mt19937_64& rng) {
  const std::size_t n = spec.base_length;
  const double lo = std::max(kMinStep, 1.0 - spec.warp_strength);
  const double hi = 1.0 + spec.warp_strength;
  const double sub_lo = lo + 0.5 * slowness * (hi - lo);
  std::uniform_real_distribution<double> tempo(sub_lo, sub_lo + 0.5 * (hi - lo));
  std::uniform_int_distribution<std::size_t> knot_gap(10, 40);

  std::vector<double> steps(n - 1, 1.0);
  if (spec.warp_strength > 0.0) {
    std::size_t knot = 0;
    double knot_value = tempo(rng);
    while (knot < n - 1) {
      const std::size_t next = std::min(n - 1, knot + knot_gap(rng));
      const double next_value = tempo(rng);
      for (std::size_t i = knot; i < next; ++i) {
        const double t = static_cast<double>(i - knot) / static_cast<double>(next - knot);
        steps[i] = knot_value + t * (next_value - knot_value);
      }
      knot = next;
      knot_value = next_value;
    }
  }
  double total = 0.0;
  for (double s : steps) total += s;
  const double last = std::max(1.0, std::round(total));
  const double scale = last / total;
  std::vector<double> warp(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    acc += steps[i - 1];
    warp[i] = acc * scale;
  }
  warp[n - 1] = last;
  return warp;
}

}  // namespace

double invert_warp(const std::vector<double>& warp, double position) {
  if (position <= warp.front()) return 0.0;
  if (position >= warp.back()) return static_cast<double>(warp.size() - 1);
  const auto it = std::upper_bound(warp.begin(), warp.end(), position);
  const auto i = static_cast<std::size_t>(it - warp.begin()) - 1;
  return static_cast<double>(i) + (position - warp[i]) / (warp[i + 1] - warp[i]);
}

double apply_warp(const std::vector<double>& warp, double base_position) {
  if (base_position <= 0.0) return warp.front();
  const double last = static_cast<double>(warp.size() - 1);
  if (base_position >= last) return warp.back();
  const auto i = static_cast<std::size_t>(std::floor(base_position));
  const double t = base_position - static_cast<double>(i);
  return warp[i] + t * (warp[i + 1] - warp[i]);
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const BaseTimeline base = make_base(spec, rng);

  SyntheticCorpus corpus;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (std::size_t v = 0; v < spec.num_versions; ++v) {
    // Versions differ in how far they stray from the base: intensity spans [0, 2] x nominal.
    // Slower renditions take more expressive liberty.
    const double intensity = unit(rng);
    const std::vector<double> warp = make_warp(spec, intensity, rng);
    const double a = spec.articulation_perturbation * 2.0 * intensity;
    const double silence_rate = std::min(1.0, spec.silence_rate * 2.0 * unit(rng));
    const auto frames = static_cast<std::size_t>(warp.back()) + 1;

    // Global balance plus per-region articulation: each region of this version gets its own
    // multiplicative per-pitch-class factors.
    std::vector<double> balance(kChromaDim);
    for (double& b : balance) b = std::exp(a * gauss(rng));
    std::vector<std::vector<double>> region_balance(base.regions.size(),
                                                    std::vector<double>(kChromaDim, 1.0));
    std::vector<double> pause_fraction(base.regions.size(), 0.0);
    for (std::size_t r = 0; r < base.regions.size(); ++r) {
      if (a > 0.0 && unit(rng) < std::min(1.0, a)) {
        for (double& b : region_balance[r]) b = std::exp(2.0 * a * gauss(rng));
      }
      if (silence_rate > 0.0 && unit(rng) < silence_rate) {
        pause_fraction[r] = 0.3 + 0.4 * unit(rng);
      }
    }

    FeatureSequence seq;
    seq.label = "v" + std::string(v < 10 ? "0" : "") + std::to_string(v);
    seq.hop_duration = spec.hop_duration;
    seq.chroma = FrameMatrix(frames, kChromaDim);
    for (std::size_t m = 0; m < frames; ++m) {
      const double pos = invert_warp(warp, static_cast<double>(m));
      const auto i0 = static_cast<std::size_t>(std::floor(pos));
      const std::size_t i1 = std::min(i0 + 1, spec.base_length - 1);
      const double t = pos - static_cast<double>(i0);
      const auto nearest = static_cast<std::size_t>(std::lround(pos));
      const auto region_it =
          std::upper_bound(base.regions.begin(), base.regions.end(), nearest,
                           [](std::size_t p, const NoteRegion& r) { return p < r.start; });
      const auto r = static_cast<std::size_t>(region_it - base.regions.begin()) - 1;
      const NoteRegion& region = base.regions[r];
      const double within = (static_cast<double>(nearest - region.start) + 0.5) /
                            static_cast<double>(region.length);
      const bool silent = pause_fraction[r] > 0.0 && within > 1.0 - pause_fraction[r];
      for (std::size_t d = 0; d < kChromaDim; ++d) {
        double value = 0.0;
        if (!silent) {
          const double base_value = t == 0.0 ? base.chroma[i0][d]
                                             : (1.0 - t) * base.chroma[i0][d] + t * base.chroma[i1][d];
          value = base_value * balance[d] * region_balance[r][d];
        }
        if (spec.noise_level > 0.0) value += std::abs(spec.noise_level * gauss(rng));
        seq.chroma[m][d] = value;
      }
    }

    if (spec.with_onsets) {
      FrameMatrix onset(frames, kChromaDim);
      static constexpr double kDecay[] = {1.0, 0.5, 0.25};
      for (const auto& region : base.regions) {
        const auto at = static_cast<std::size_t>(std::lround(warp[region.start]));
        const double strength = a > 0.0 ? std::exp(-a * unit(rng)) : 1.0;
        for (std::size_t k = 0; k < 3 && at + k < frames; ++k) {
          for (std::size_t d = 0; d < kChromaDim; ++d) {
            onset[at + k][d] += kDecay[k] * strength * region.weights[d];
          }
        }
      }
      if (spec.noise_level > 0.0) {
        for (std::size_t m = 0; m < frames; ++m)
          for (std::size_t d = 0; d < kChromaDim; ++d)
            onset[m][d] += std::abs(0.5 * spec.noise_level * gauss(rng));
      }
      seq.onset = std::move(onset);
    }

    std::vector<double> beats;
    for (std::size_t b = 0; b < spec.base_length; b += spec.beat_every) {
      beats.push_back((warp[b] + 1.0) * spec.hop_duration);
    }
    corpus.versions.push_back(normalize_chroma(seq));
    corpus.beat_times.push_back(std::move(beats));
    corpus.warps.push_back(warp);
  }
  return corpus;
}

Correspondence ground_truth_correspondence(const SyntheticCorpus& corpus, std::size_t i,
                                           std::size_t j) {
  MVSYNC_CHECK(i < corpus.versions.size() && j < corpus.versions.size(),
               "ground_truth_correspondence: version out of range");
  const std::size_t source = corpus.versions[i].size();
  const std::size_t target = corpus.versions[j].size();
  std::vector<IndexPair> pairs;
  pairs.reserve(source);
  for (std::size_t a = 0; a < source; ++a) {
    const double base_pos = invert_warp(corpus.warps[i], static_cast<double>(a));
    const double b = apply_warp(corpus.warps[j], base_pos);
    const auto rounded = static_cast<std::size_t>(std::floor(b + 0.5));
    pairs.push_back({a, std::min(rounded, target - 1)});
  }
  return Correspondence(std::move(pairs), source, target);
}

}  // namespace mvsync
