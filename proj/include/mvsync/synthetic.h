#pragma once

/// @file synthetic.h
/// @brief Synthetic multi-version corpora with known time warps and beat positions.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mvsync/correspondence.h"
#include "mvsync/features.h"

namespace mvsync {

struct SyntheticCorpusSpec {
  std::size_t base_length = 400;    ///< frames of the underlying score timeline
  std::size_t num_versions = 5;
  double warp_strength = 0.3;       ///< local tempo range [1 - w, 1 + w], w in [0, 1]
  double noise_level = 0.05;        ///< scale of additive non-negative noise
  double articulation_perturbation = 0.2;  ///< per-version balance and articulation changes
  std::size_t beat_every = 25;      ///< base frames between beats
  std::uint64_t seed = 1;
  bool with_onsets = true;
  /// Probability that a note region ends in a pause of random length in a given version.
  double silence_rate = 0.0;
  double hop_duration = kDefaultHopDuration;

  void validate() const;
};

struct SyntheticCorpus {
  std::vector<FeatureSequence> versions;
  /// Beat times in seconds per version; every version has the same beat count.
  std::vector<std::vector<double>> beat_times;
  /// For each version, the (0-based, fractional) frame position of every base frame.
  std::vector<std::vector<double>> warps;
};

/// Deterministic for a given spec. Chroma frames are normalized.
SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec);

/// Exact correspondence from version i to version j derived from the generating warps:
/// every frame of i maps to the rounded position of the same base-timeline point in j.
Correspondence ground_truth_correspondence(const SyntheticCorpus& corpus, std::size_t i,
                                           std::size_t j);

/// Fractional base-timeline position of a fractional frame position under a warp.
double invert_warp(const std::vector<double>& warp, double position);

/// Fractional frame position of a fractional base-timeline position under a warp.
double apply_warp(const std::vector<double>& warp, double base_position);

}  // namespace mvsync
