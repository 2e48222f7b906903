#include "mvsync/multiscale.h"

#include <algorithm>
#include <limits>
#include <string>

#include "mvsync/error.h"

namespace mvsync {

void MultiscaleConfig::validate() const {
  MVSYNC_CHECK(!factors.empty(), "multiscale: no downsampling factors");
  MVSYNC_CHECK(factors.back() == 1, "multiscale: the finest factor must be 1");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    MVSYNC_CHECK(factors[i] >= 1, "multiscale: factors must be positive");
    if (i > 0) {
      MVSYNC_CHECK(factors[i] < factors[i - 1] && factors[i - 1] % factors[i] == 0,
                   "multiscale: factors must strictly decrease, each dividing the previous");
    }
  }
}

BandMask BandMask::full(std::size_t rows, std::size_t cols) {
  BandMask band;
  band.lo.assign(rows, 0);
  band.hi.assign(rows, cols - 1);
  band.cols = cols;
  return band;
}

std::size_t BandMask::cell_count() const {
  std::size_t total = 0;
  for (std::size_t n = 0; n < rows(); ++n) total += hi[n] - lo[n] + 1;
  return total;
}

void BandMask::validate() const {
  MVSYNC_CHECK(rows() > 0 && cols > 0 && hi.size() == lo.size(), "band mask is empty");
  MVSYNC_CHECK(lo.front() == 0 && hi.back() == cols - 1, "band mask excludes a corner cell");
  for (std::size_t n = 0; n < rows(); ++n) {
    MVSYNC_CHECK(lo[n] <= hi[n] && hi[n] < cols, "band mask row interval is invalid");
    if (n > 0) {
      MVSYNC_CHECK(lo[n] <= hi[n - 1] + 1 && hi[n] >= lo[n - 1],
                   "band mask rows " + std::to_string(n) + " and " + std::to_string(n + 1) +
                       " do not connect");
    }
  }
}

namespace {

/// Mean of the listed frames; chroma renormalized.
void append_average(const FeatureSequence& src, const std::vector<std::size_t>& indices,
                    FeatureSequence& dst) {
  std::vector<double> chroma(src.chroma.dim(), 0.0);
  std::vector<double> onset(src.has_onsets() ? src.onset->dim() : 0, 0.0);
  for (std::size_t idx : indices) {
    const auto c = src.chroma[idx];
    for (std::size_t d = 0; d < chroma.size(); ++d) chroma[d] += c[d];
    if (src.onset) {
      const auto o = (*src.onset)[idx];
      for (std::size_t d = 0; d < onset.size(); ++d) onset[d] += o[d];
    }
  }
  const double count = static_cast<double>(indices.size());
  for (double& v : chroma) v /= count;
  for (double& v : onset) v /= count;
  normalize_frame(chroma);
  dst.chroma.push_back(chroma);
  if (dst.onset) dst.onset->push_back(onset);
}

FeatureSequence empty_like(const FeatureSequence& src, std::size_t factor) {
  FeatureSequence out;
  out.label = src.label;
  out.hop_duration = src.hop_duration * static_cast<double>(factor);
  if (src.has_onsets()) out.onset.emplace();
  return out;
}

}  // namespace

FeatureSequence downsample(const FeatureSequence& seq, std::size_t factor) {
  MVSYNC_CHECK(factor >= 1, "downsample: factor must be at least 1");
  if (factor == 1) return seq;
  FeatureSequence out = empty_like(seq, factor);
  std::vector<std::size_t> group;
  for (std::size_t start = 0; start < seq.size(); start += factor) {
    group.clear();
    for (std::size_t i = start; i < std::min(seq.size(), start + factor); ++i) group.push_back(i);
    append_average(seq, group, out);
  }
  return out;
}

Template downsample(const Template& z, std::size_t factor) {
  MVSYNC_CHECK(factor >= 1, "downsample: factor must be at least 1");
  if (factor == 1) return z;
  const std::size_t k = z.rows();
  const std::size_t groups = (z.length() + factor - 1) / factor;
  std::vector<FeatureSequence> rows;
  for (std::size_t r = 0; r < k; ++r) rows.push_back(empty_like(z.version(r), factor));
  std::vector<std::size_t> cells(groups * k, Template::kGap);
  std::vector<std::size_t> members;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t end = std::min(z.length(), (g + 1) * factor);
    for (std::size_t r = 0; r < k; ++r) {
      members.clear();
      for (std::size_t col = g * factor; col < end; ++col) {
        if (!z.is_gap(col, r)) members.push_back(z.entry(col, r));
      }
      if (members.empty()) continue;
      cells[g * k + r] = rows[r].size();
      append_average(z.version(r), members, rows[r]);
    }
  }
  std::vector<std::shared_ptr<const FeatureSequence>> versions;
  for (auto& row : rows) versions.push_back(std::make_shared<const FeatureSequence>(std::move(row)));
  return Template(std::move(versions), std::move(cells));
}

BandMask project_path(const AlignmentPath& coarse, std::size_t factor, std::size_t rows_fine,
                      std::size_t cols_fine, std::size_t radius) {
  MVSYNC_CHECK(factor >= 1 && rows_fine > 0 && cols_fine > 0, "project_path: bad arguments");
  MVSYNC_CHECK(coarse.rows() == (rows_fine + factor - 1) / factor &&
                   coarse.cols() == (cols_fine + factor - 1) / factor,
               "project_path: coarse path does not match the fine grid");
  BandMask band;
  band.cols = cols_fine;
  band.lo.assign(rows_fine, cols_fine);
  band.hi.assign(rows_fine, 0);
  for (const auto& p : coarse.pairs) {
    const std::size_t col_lo = p.m * factor;
    const std::size_t col_hi = std::min(cols_fine, (p.m + 1) * factor) - 1;
    const std::size_t row_end = std::min(rows_fine, (p.n + 1) * factor);
    for (std::size_t n = p.n * factor; n < row_end; ++n) {
      band.lo[n] = std::min(band.lo[n], col_lo);
      band.hi[n] = std::max(band.hi[n], col_hi);
    }
  }
  for (std::size_t n = 0; n < rows_fine; ++n) {
    band.lo[n] = band.lo[n] > radius ? band.lo[n] - radius : 0;
    band.hi[n] = std::min(cols_fine - 1, band.hi[n] + radius);
  }
  band.validate();
  return band;
}

namespace {

enum Step : unsigned char { kStart, kDiagonal, kVertical, kHorizontal };

}  // namespace

AlignmentPath banded_dtw(const BandMask& band, const CellCost& cost, const StepWeights& weights,
                         std::size_t* evaluated_cells) {
  band.validate();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::size_t rows = band.rows();

  std::vector<std::size_t> offset(rows + 1, 0);
  for (std::size_t n = 0; n < rows; ++n) offset[n + 1] = offset[n] + band.hi[n] - band.lo[n] + 1;
  std::vector<double> acc(offset[rows], kInf);
  std::vector<Step> step(offset[rows], kStart);
  auto accumulated = [&](std::size_t n, std::size_t m) {
    return band.contains(n, m) ? acc[offset[n] + m - band.lo[n]] : kInf;
  };

  std::size_t evaluated = 0;
  double first_cost = 0.0;
  for (std::size_t n = 0; n < rows; ++n) {
    for (std::size_t m = band.lo[n]; m <= band.hi[n]; ++m) {
      const double c = cost(n, m);
      ++evaluated;
      double best = kInf;
      Step choice = kStart;
      if (n == 0 && m == 0) {
        first_cost = c;
        best = c;
      } else if (m == 0) {
        const double prev = n == 1 ? weights.vertical * first_cost : accumulated(n - 1, 0);
        best = prev + weights.vertical * c;
        choice = kVertical;
      } else if (n == 0) {
        const double prev = m == 1 ? weights.horizontal * first_cost : accumulated(0, m - 1);
        best = prev + weights.horizontal * c;
        choice = kHorizontal;
      } else {
        best = accumulated(n - 1, m - 1) + weights.diagonal * c;
        choice = kDiagonal;
        const double vert = accumulated(n - 1, m) + weights.vertical * c;
        if (vert < best) {
          best = vert;
          choice = kVertical;
        }
        const double horiz = accumulated(n, m - 1) + weights.horizontal * c;
        if (horiz < best) {
          best = horiz;
          choice = kHorizontal;
        }
      }
      acc[offset[n] + m - band.lo[n]] = best;
      step[offset[n] + m - band.lo[n]] = choice;
    }
  }
  if (evaluated_cells) *evaluated_cells = evaluated;

  AlignmentPath path;
  std::size_t n = rows - 1;
  std::size_t m = band.cols - 1;
  path.total_cost = accumulated(n, m);
  MVSYNC_CHECK(path.total_cost < kInf, "banded DTW: no connected path inside the band");
  path.pairs.push_back({n, m});
  while (n > 0 || m > 0) {
    switch (step[offset[n] + m - band.lo[n]]) {
      case kDiagonal: --n; --m; break;
      case kVertical: --n; break;
      case kHorizontal: --m; break;
      case kStart: throw Error("banded DTW: broken backtracking chain");
    }
    path.pairs.push_back({n, m});
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

AlignmentPath msdtw(const Template& z, const FeatureSequence& x, const CostConfig& cfg,
                    const MultiscaleConfig& ms, MultiscaleStats* stats) {
  ms.validate();
  check_compatible(z, x, cfg.measure);

  std::vector<std::size_t> levels;
  for (std::size_t f : ms.factors) {
    const std::size_t coarse_rows = (z.length() + f - 1) / f;
    const std::size_t coarse_cols = (x.size() + f - 1) / f;
    if (f == 1 || (coarse_rows >= kMinCoarseFrames && coarse_cols >= kMinCoarseFrames)) {
      levels.push_back(f);
    }
  }
  if (stats) *stats = MultiscaleStats{};

  AlignmentPath path;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const std::size_t f = levels[i];
    const Template zl = downsample(z, f);
    const FeatureSequence xl = downsample(x, f);
    const BandMask band = i == 0 ? BandMask::full(zl.length(), xl.size())
                                 : project_path(path, levels[i - 1] / f, zl.length(), xl.size(),
                                                ms.band_radius);
    std::size_t evaluated = 0;
    path = banded_dtw(
        band,
        [&](std::size_t n, std::size_t m) { return template_cost(zl, n, bundle_at(xl, m), cfg); },
        cfg.weights, &evaluated);
    if (stats) {
      stats->level_factors.push_back(f);
      stats->evaluated_cells.push_back(evaluated);
      if (f == 1) stats->finest_band = band;
    }
  }
  return path;
}

AlignmentPath msdtw(const FeatureSequence& x, const FeatureSequence& y, const CostConfig& cfg,
                    const MultiscaleConfig& ms, MultiscaleStats* stats) {
  return msdtw(template_init(x), y, cfg, ms, stats);
}

AlignmentPath align_pair(const FeatureSequence& x, const FeatureSequence& y,
                         const CostConfig& cfg, const MultiscaleConfig& ms) {
  cfg.validate();
  if (ms.enabled) return msdtw(x, y, cfg, ms);
  return dtw(cost_matrix(x, y, cfg), cfg.weights);
}

}  // namespace mvsync
