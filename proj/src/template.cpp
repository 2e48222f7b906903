#include "mvsync/template.h"

#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "mvsync/error.h"

namespace mvsync {

Template::Template(std::vector<std::shared_ptr<const FeatureSequence>> versions,
                   std::vector<std::size_t> cells)
    : versions_(std::move(versions)), cells_(std::move(cells)) {
  const std::size_t k = versions_.size();
  MVSYNC_CHECK(k >= 1, "template needs at least one row");
  MVSYNC_CHECK(cells_.size() % k == 0 && !cells_.empty(), "template cell count mismatch");
  const FeatureSequence& first = *versions_.front();
  for (const auto& v : versions_) {
    v->validate();
    MVSYNC_CHECK(v->chroma.dim() == first.chroma.dim(), "template rows differ in chroma dimension");
    MVSYNC_CHECK(v->has_onsets() == first.has_onsets(), "template rows differ in onset streams");
    if (v->has_onsets()) {
      MVSYNC_CHECK(v->onset->dim() == first.onset->dim(),
                   "template rows differ in onset dimension");
    }
  }

  const std::size_t length = cells_.size() / k;
  for (std::size_t col = 0; col < length; ++col) {
    bool any = false;
    for (std::size_t r = 0; r < k; ++r) any = any || cells_[col * k + r] != kGap;
    MVSYNC_CHECK(any, "template column " + std::to_string(col + 1) + " contains only gaps");
  }
  // Each row must walk its sequence from first to last frame without skipping.
  for (std::size_t r = 0; r < k; ++r) {
    std::size_t next = 0;
    for (std::size_t col = 0; col < length; ++col) {
      const std::size_t idx = cells_[col * k + r];
      if (idx == kGap) continue;
      MVSYNC_CHECK(idx == next || (next > 0 && idx == next - 1),
                   "template row '" + versions_[r]->label + "' is not a monotone walk");
      next = idx + 1;
    }
    MVSYNC_CHECK(next == versions_[r]->size(),
                 "template row '" + versions_[r]->label + "' does not cover its sequence");
  }
}

std::vector<std::string> Template::labels() const {
  std::vector<std::string> out;
  for (const auto& v : versions_) out.push_back(v->label);
  return out;
}

FrameBundle Template::bundle(std::size_t col, std::size_t row) const {
  const std::size_t idx = entry(col, row);
  if (idx == kGap) return FrameBundle::gap_symbol();
  return bundle_at(*versions_[row], idx);
}

std::size_t Template::gap_count(std::size_t row) const {
  std::size_t count = 0;
  for (std::size_t col = 0; col < length(); ++col) count += is_gap(col, row) ? 1 : 0;
  return count;
}

std::size_t Template::gap_count() const {
  std::size_t count = 0;
  for (std::size_t c : cells_) count += c == kGap ? 1 : 0;
  return count;
}

Template template_init(const FeatureSequence& x) {
  x.validate();
  std::vector<std::size_t> cells(x.size());
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
  return Template({std::make_shared<const FeatureSequence>(x)}, std::move(cells));
}

double template_cost(const Template& z, std::size_t col, const FrameBundle& x,
                     const CostConfig& cfg) {
  MVSYNC_CHECK(!x.gap, "template_cost: the compared frame is a gap symbol");
  double sum = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    const FrameBundle zr = z.bundle(col, r);
    sum += zr.gap ? cfg.gap_penalty : local_cost(zr, x, cfg.measure);
  }
  return sum;
}

void check_compatible(const Template& z, const FeatureSequence& x, CostMeasure measure) {
  x.validate();
  MVSYNC_CHECK(x.chroma.dim() == z.chroma_dim(),
               "'" + x.label + "' has chroma dimension " + std::to_string(x.chroma.dim()) +
                   ", template has " + std::to_string(z.chroma_dim()));
  if (measure == CostMeasure::kChromaCosineOnsetEuclidean) {
    MVSYNC_CHECK(z.has_onsets() && x.has_onsets(),
                 "combined cost measure requires onset streams ('" + x.label + "')");
    MVSYNC_CHECK(x.onset->dim() == z.onset_dim(), "'" + x.label + "' onset dimension mismatch");
  }
}

CostMatrix template_cost_matrix(const Template& z, const FeatureSequence& x,
                                const CostConfig& cfg) {
  check_compatible(z, x, cfg.measure);
  CostMatrix c(z.length(), x.size());
  for (std::size_t col = 0; col < z.length(); ++col) {
    for (std::size_t m = 0; m < x.size(); ++m) {
      c(col, m) = template_cost(z, col, bundle_at(x, m), cfg);
    }
  }
  return c;
}

Template template_extend(const Template& z, const FeatureSequence& x, const AlignmentPath& path,
                         GapMode mode) {
  MVSYNC_CHECK(!path.pairs.empty() && path.rows() == z.length() && path.cols() == x.size(),
               "template_extend: path does not span template (" + std::to_string(z.length()) +
                   ") x sequence (" + std::to_string(x.size()) + ")");
  validate_path(path, z.length(), x.size());

  const std::size_t k_old = z.rows();
  const std::size_t k = k_old + 1;
  std::vector<std::size_t> cells;
  cells.reserve(path.length() * k);
  auto append = [&](std::size_t template_col, bool template_gap, std::size_t frame) {
    for (std::size_t r = 0; r < k_old; ++r) {
      cells.push_back(template_gap ? Template::kGap : z.entry(template_col, r));
    }
    cells.push_back(frame);
  };

  for (std::size_t l = 0; l < path.length(); ++l) {
    const IndexPair p = path.pairs[l];
    if (l == 0 || mode == GapMode::kCopyFeatures) {
      append(p.n, false, p.m);
      continue;
    }
    const IndexPair prev = path.pairs[l - 1];
    if (p.n != prev.n && p.m != prev.m) {
      append(p.n, false, p.m);
    } else if (p.n != prev.n) {
      append(p.n, false, Template::kGap);
    } else {
      append(0, true, p.m);
    }
  }

  std::vector<std::shared_ptr<const FeatureSequence>> versions;
  for (std::size_t r = 0; r < k_old; ++r) versions.push_back(z.version_ptr(r));
  versions.push_back(std::make_shared<const FeatureSequence>(x));
  return Template(std::move(versions), std::move(cells));
}

FeatureSequence reconstruct_row(const Template& z, std::size_t row) {
  MVSYNC_CHECK(row < z.rows(), "row " + std::to_string(row) + " out of range");
  const FeatureSequence& src = z.version(row);
  FeatureSequence out;
  out.label = src.label;
  out.hop_duration = src.hop_duration;
  if (src.has_onsets()) out.onset.emplace();
  for (std::size_t col = 0; col < z.length(); ++col) {
    const std::size_t idx = z.entry(col, row);
    if (idx == Template::kGap) continue;
    out.chroma.push_back(src.chroma[idx]);
    if (out.onset) out.onset->push_back((*src.onset)[idx]);
  }
  return out;
}

TemplateRemoval remove_from_template(const Template& z, std::size_t row) {
  MVSYNC_CHECK(z.rows() >= 2, "cannot remove a row from a single-row template");
  MVSYNC_CHECK(row < z.rows(), "row " + std::to_string(row) + " out of range");

  const FeatureSequence& src = z.version(row);
  FeatureSequence removed;
  removed.label = src.label;
  removed.hop_duration = src.hop_duration;
  if (src.has_onsets()) removed.onset.emplace();
  std::size_t last = Template::kGap;
  for (std::size_t col = 0; col < z.length(); ++col) {
    const std::size_t idx = z.entry(col, row);
    // Copy-features templates repeat a frame over consecutive columns.
    if (idx == Template::kGap || idx == last) continue;
    removed.chroma.push_back(src.chroma[idx]);
    if (removed.onset) removed.onset->push_back((*src.onset)[idx]);
    last = idx;
  }

  std::vector<std::shared_ptr<const FeatureSequence>> versions;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    if (r != row) versions.push_back(z.version_ptr(r));
  }
  std::vector<std::size_t> cells;
  cells.reserve(z.cells().size());
  for (std::size_t col = 0; col < z.length(); ++col) {
    bool any = false;
    for (std::size_t r = 0; r < z.rows(); ++r) any = any || (r != row && !z.is_gap(col, r));
    if (!any) continue;
    for (std::size_t r = 0; r < z.rows(); ++r) {
      if (r != row) cells.push_back(z.entry(col, r));
    }
  }
  return {Template(std::move(versions), std::move(cells)), std::move(removed)};
}

Correspondence pairwise_from_template(const Template& z, std::size_t i, std::size_t j) {
  MVSYNC_CHECK(i < z.rows() && j < z.rows(), "pairwise_from_template: row out of range");
  MVSYNC_CHECK(i != j, "pairwise_from_template: rows must differ");
  std::vector<IndexPair> pairs;
  for (std::size_t col = 0; col < z.length(); ++col) {
    const std::size_t a = z.entry(col, i);
    const std::size_t b = z.entry(col, j);
    if (a == Template::kGap || b == Template::kGap) continue;
    if (!pairs.empty() && pairs.back() == IndexPair{a, b}) continue;
    pairs.push_back({a, b});
  }
  return Correspondence(std::move(pairs), z.version(i).size(), z.version(j).size());
}

std::size_t find_row(const Template& z, const std::string& label) {
  for (std::size_t r = 0; r < z.rows(); ++r) {
    if (z.label(r) == label) return r;
  }
  throw Error("template has no row labelled '" + label + "'");
}

void write_template(const Template& z, const std::filesystem::path& csv_path,
                    const std::filesystem::path& json_path) {
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot write " + csv_path.string());
  const std::size_t chroma_dim = z.chroma_dim();
  const std::size_t onset_dim = z.onset_dim();
  char buf[32];
  for (std::size_t col = 0; col < z.length(); ++col) {
    bool first = true;
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      if (!first) csv << ',';
      csv << buf;
      first = false;
    };
    for (std::size_t r = 0; r < z.rows(); ++r) {
      const FrameBundle b = z.bundle(col, r);
      for (std::size_t d = 0; d < chroma_dim; ++d) put(b.gap ? Template::kGapValue : b.chroma[d]);
      for (std::size_t d = 0; d < onset_dim; ++d) put(b.gap ? Template::kGapValue : b.onset[d]);
    }
    csv << '\n';
  }
  if (!csv) throw Error("write failed: " + csv_path.string());

  nlohmann::json meta;
  meta["schema_version"] = 1;
  meta["row_labels"] = z.labels();
  meta["columns"] = z.length();
  meta["chroma_dim"] = chroma_dim;
  meta["onset_dim"] = onset_dim;
  meta["hop_duration"] = z.hop_duration();
  // Gap runs per row as [first_column, run_length], 1-based columns.
  nlohmann::json runs = nlohmann::json::array();
  for (std::size_t r = 0; r < z.rows(); ++r) {
    nlohmann::json row_runs = nlohmann::json::array();
    std::size_t col = 0;
    while (col < z.length()) {
      if (!z.is_gap(col, r)) {
        ++col;
        continue;
      }
      const std::size_t start = col;
      while (col < z.length() && z.is_gap(col, r)) ++col;
      row_runs.push_back({start + 1, col - start});
    }
    runs.push_back({{"label", z.label(r)}, {"runs", row_runs}});
  }
  meta["gap_runs"] = runs;
  std::ofstream js(json_path);
  if (!js) throw Error("cannot write " + json_path.string());
  js << meta.dump(2) << '\n';
}

}  // namespace mvsync
