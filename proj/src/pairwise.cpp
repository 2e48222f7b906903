#include "mvsync/pairwise.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "mvsync/error.h"

namespace mvsync {

void validate_path(const AlignmentPath& path, std::size_t rows, std::size_t cols) {
  MVSYNC_CHECK(!path.pairs.empty(), "alignment path is empty");
  MVSYNC_CHECK(path.pairs.front() == (IndexPair{0, 0}), "alignment path must start at (1,1)");
  MVSYNC_CHECK(path.pairs.back() == (IndexPair{rows - 1, cols - 1}),
               "alignment path must end at (" + std::to_string(rows) + "," +
                   std::to_string(cols) + ")");
  for (std::size_t l = 1; l < path.pairs.size(); ++l) {
    const auto& a = path.pairs[l - 1];
    const auto& b = path.pairs[l];
    const bool ok = (b.n == a.n + 1 && b.m == a.m) || (b.n == a.n && b.m == a.m + 1) ||
                    (b.n == a.n + 1 && b.m == a.m + 1);
    MVSYNC_CHECK(ok, "invalid step at path position " + std::to_string(l + 1));
  }
  MVSYNC_CHECK(path.total_cost >= 0.0, "alignment path has negative cost");
}

CostMatrix CostMatrix::transposed() const {
  CostMatrix t(cols_, rows_);
  for (std::size_t n = 0; n < rows_; ++n)
    for (std::size_t m = 0; m < cols_; ++m) t(m, n) = (*this)(n, m);
  return t;
}

CostMatrix cost_matrix(const FeatureSequence& x, const FeatureSequence& y, const CostConfig& cfg) {
  MVSYNC_CHECK(x.size() > 0 && y.size() > 0, "cost_matrix: empty sequence");
  MVSYNC_CHECK(x.chroma.dim() == y.chroma.dim(), "cost_matrix: chroma dimension mismatch");
  if (cfg.measure == CostMeasure::kChromaCosineOnsetEuclidean) {
    MVSYNC_CHECK(x.has_onsets() && y.has_onsets(),
                 "combined cost measure requires onset streams for '" + x.label + "' and '" +
                     y.label + "'");
    MVSYNC_CHECK(x.onset->dim() == y.onset->dim(), "cost_matrix: onset dimension mismatch");
  }
  CostMatrix c(x.size(), y.size());
  for (std::size_t n = 0; n < x.size(); ++n) {
    const FrameBundle xn = bundle_at(x, n);
    for (std::size_t m = 0; m < y.size(); ++m) {
      c(n, m) = local_cost(xn, bundle_at(y, m), cfg.measure);
    }
  }
  return c;
}

namespace {

enum Step : unsigned char { kStart, kDiagonal, kVertical, kHorizontal };

}  // namespace

AlignmentPath dtw(const CostMatrix& cost, const StepWeights& weights) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  MVSYNC_CHECK(rows > 0 && cols > 0, "dtw: empty cost matrix");
  MVSYNC_CHECK(weights.diagonal > 0 && weights.vertical > 0 && weights.horizontal > 0,
               "dtw: weights must be positive");

  std::vector<double> acc(rows * cols);
  std::vector<Step> step(rows * cols);
  auto at = [cols](std::size_t n, std::size_t m) { return n * cols + m; };

  acc[0] = cost(0, 0);
  step[0] = kStart;
  // The first cell enters the axis sums with the axis weight.
  double running = weights.vertical * cost(0, 0);
  for (std::size_t n = 1; n < rows; ++n) {
    running += weights.vertical * cost(n, 0);
    acc[at(n, 0)] = running;
    step[at(n, 0)] = kVertical;
  }
  running = weights.horizontal * cost(0, 0);
  for (std::size_t m = 1; m < cols; ++m) {
    running += weights.horizontal * cost(0, m);
    acc[at(0, m)] = running;
    step[at(0, m)] = kHorizontal;
  }

  for (std::size_t n = 1; n < rows; ++n) {
    for (std::size_t m = 1; m < cols; ++m) {
      const double c = cost(n, m);
      double best = acc[at(n - 1, m - 1)] + weights.diagonal * c;
      Step choice = kDiagonal;
      const double vert = acc[at(n - 1, m)] + weights.vertical * c;
      if (vert < best) {
        best = vert;
        choice = kVertical;
      }
      const double horiz = acc[at(n, m - 1)] + weights.horizontal * c;
      if (horiz < best) {
        best = horiz;
        choice = kHorizontal;
      }
      acc[at(n, m)] = best;
      step[at(n, m)] = choice;
    }
  }

  AlignmentPath path;
  path.total_cost = acc[at(rows - 1, cols - 1)];
  std::size_t n = rows - 1;
  std::size_t m = cols - 1;
  path.pairs.push_back({n, m});
  while (n > 0 || m > 0) {
    switch (step[at(n, m)]) {
      case kDiagonal: --n; --m; break;
      case kVertical: --n; break;
      case kHorizontal: --m; break;
      case kStart: break;
    }
    path.pairs.push_back({n, m});
  }
  std::reverse(path.pairs.begin(), path.pairs.end());
  return path;
}

double average_cost(const AlignmentPath& path) {
  MVSYNC_CHECK(path.length() >= 1, "average_cost: empty path");
  return path.total_cost / static_cast<double>(path.length());
}

std::size_t map_position(const AlignmentPath& path, std::size_t n) {
  MVSYNC_CHECK(!path.pairs.empty() && n < path.rows(),
               "map_position: row " + std::to_string(n) + " out of range");
  const auto first = std::lower_bound(path.pairs.begin(), path.pairs.end(), n,
                                      [](const IndexPair& p, std::size_t v) { return p.n < v; });
  const auto last = std::upper_bound(first, path.pairs.end(), n,
                                     [](std::size_t v, const IndexPair& p) { return v < p.n; });
  const auto count = static_cast<std::size_t>(last - first);
  MVSYNC_CHECK(count > 0, "map_position: row not covered by path");
  return (first + (count - 1) / 2)->m;
}

void write_path_csv(const std::filesystem::path& file, const AlignmentPath& path) {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  for (const auto& p : path.pairs) out << p.n + 1 << ',' << p.m + 1 << '\n';
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", path.total_cost);
  out << "# total_cost=" << buf << '\n';
  if (!out) throw Error("write failed: " + file.string());
}

AlignmentPath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open file");
  AlignmentPath path;
  bool have_cost = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("# total_cost=")) {
      path.total_cost = std::stod(line.substr(13));
      have_cost = true;
      continue;
    }
    if (line.front() == '#') continue;
    const auto comma = line.find(',');
    std::size_t n = 0;
    std::size_t m = 0;
    bool ok = comma != std::string::npos;
    if (ok) {
      auto r1 = std::from_chars(line.data(), line.data() + comma, n);
      auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), m);
      ok = r1.ec == std::errc() && r1.ptr == line.data() + comma && r2.ec == std::errc() &&
           r2.ptr == line.data() + line.size() && n >= 1 && m >= 1;
    }
    if (!ok) throw ParseError(file.string(), line_no, "expected 'n,m' with 1-based indices");
    path.pairs.push_back({n - 1, m - 1});
  }
  if (!have_cost) throw ParseError(file.string(), 0, "missing '# total_cost=' line");
  validate_path(path, path.rows(), path.cols());
  return path;
}

}  // namespace mvsync
