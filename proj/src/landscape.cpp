#include "settlemorph/landscape.hpp"

#include <algorithm>
#include <numeric>

#include "settlemorph/error.hpp"

namespace settlemorph {

namespace {

std::size_t isqrt(std::size_t n) {
  std::size_t r = 0;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

class DisjointSet {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }
  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

const std::vector<std::string>& HsiVector::column_names() {
  static const std::vector<std::string> kNames = {"CA", "NP", "LPI", "CLUMPY", "AI", "NLSI"};
  return kNames;
}

PatchLabeling label_patches(const SettlementRaster& raster, Connectivity connectivity) {
  const std::size_t w = raster.width();
  const std::size_t h = raster.height();
  PatchLabeling out;
  out.width = w;
  out.height = h;
  out.labels.assign(w * h, 0);

  // Two-pass labelling. Provisional labels start at 1; slot 0 of the disjoint set is unused.
  DisjointSet sets;
  sets.make();
  std::vector<std::uint32_t> provisional(w * h, 0);
  const bool diagonal = connectivity == Connectivity::Eight;
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (raster.at(c, r) == 0) continue;
      std::uint32_t label = 0;
      const auto join = [&](std::size_t cc, std::size_t rr) {
        const std::uint32_t other = provisional[rr * w + cc];
        if (other == 0) return;
        if (label == 0) {
          label = other;
        } else {
          sets.unite(label, other);
        }
      };
      if (c > 0) join(c - 1, r);
      if (r > 0) {
        join(c, r - 1);
        if (diagonal && c > 0) join(c - 1, r - 1);
        if (diagonal && c + 1 < w) join(c + 1, r - 1);
      }
      if (label == 0) label = sets.make();
      provisional[r * w + c] = label;
    }
  }

  std::vector<std::uint32_t> final_id(sets.size(), 0);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < provisional.size(); ++i) {
    if (provisional[i] == 0) continue;
    const std::uint32_t root = sets.find(provisional[i]);
    if (final_id[root] == 0) {
      final_id[root] = ++next;
      out.patch_sizes.push_back(0);
    }
    out.labels[i] = final_id[root];
    ++out.patch_sizes[final_id[root] - 1];
  }

  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      if (raster.at(c, r) == 0) continue;
      ++out.urban_cells;
      if (c + 1 < w && raster.at(c + 1, r) != 0) ++out.like_adjacencies;
      if (r + 1 < h && raster.at(c, r + 1) != 0) ++out.like_adjacencies;
      std::size_t boundary_sides = 0;
      if (c == 0) ++boundary_sides;
      if (c + 1 == w) ++boundary_sides;
      if (r == 0) ++boundary_sides;
      if (r + 1 == h) ++boundary_sides;
      out.total_urban_adjacencies += 4 - boundary_sides;
    }
  }
  out.class_edge = 4 * out.urban_cells - 2 * out.like_adjacencies;
  return out;
}

double compute_ca(const PatchLabeling& labeling, double cell_size) {
  if (!(cell_size > 0.0)) throw InvalidArgument("cell_size must be positive");
  return static_cast<double>(labeling.urban_cells) * cell_size * cell_size / 10000.0;
}

double compute_lpi(const PatchLabeling& labeling) {
  if (labeling.urban_cells == 0) throw EmptyClassError("LPI undefined: raster has no urban cells");
  const std::size_t largest =
      *std::max_element(labeling.patch_sizes.begin(), labeling.patch_sizes.end());
  return static_cast<double>(largest) / static_cast<double>(labeling.landscape_cells()) * 100.0;
}

std::size_t max_like_adjacencies(std::size_t n) {
  if (n == 0) return 0;
  const std::size_t m = isqrt(n);
  const std::size_t rest = n - m * m;
  const std::size_t square = 2 * m * (m - 1);
  if (rest == 0) return square;
  if (rest <= m) return square + 2 * rest - 1;
  return square + 2 * rest - 2;
}

std::size_t min_class_edge(std::size_t n) {
  if (n == 0) return 0;
  const std::size_t m = isqrt(n);
  if (n == m * m) return 4 * m;
  if (n <= m * (m + 1)) return 4 * m + 2;
  return 4 * m + 4;
}

std::size_t max_class_edge(std::size_t n, std::size_t landscape_cells, std::size_t boundary_length) {
  return std::min(4 * n, 4 * (landscape_cells - n) + boundary_length);
}

AggregationIndices compute_aggregation(const PatchLabeling& labeling) {
  const std::size_t n = labeling.urban_cells;
  if (n == 0) throw EmptyClassError("aggregation indices undefined: raster has no urban cells");
  const std::size_t total = labeling.landscape_cells();

  AggregationIndices out;
  const std::size_t g_max = max_like_adjacencies(n);
  const double g_ratio = g_max == 0 ? 1.0
                                    : static_cast<double>(labeling.like_adjacencies) /
                                          static_cast<double>(g_max);
  out.ai = g_ratio * 100.0;

  const double proportion = static_cast<double>(n) / static_cast<double>(total);
  if (n == 1 || n == total) {
    out.clumpy = 1.0;
  } else {
    double clumpy = 0.0;
    if (g_ratio >= proportion || proportion >= 0.5) {
      clumpy = (g_ratio - proportion) / (1.0 - proportion);
    } else {
      clumpy = (g_ratio - proportion) / proportion;
    }
    out.clumpy = std::clamp(clumpy, -1.0, 1.0);
  }

  const std::size_t e_min = min_class_edge(n);
  const std::size_t e_max = max_class_edge(n, total, labeling.boundary_length());
  if (n == total || e_max <= e_min) {
    out.nlsi = 0.0;
  } else {
    const double nlsi = (static_cast<double>(labeling.class_edge) - static_cast<double>(e_min)) /
                        static_cast<double>(e_max - e_min);
    out.nlsi = std::clamp(nlsi, 0.0, 1.0);
  }
  return out;
}

HsiVector compute_hsi(const SettlementRaster& raster, Connectivity connectivity) {
  const PatchLabeling labeling = label_patches(raster, connectivity);
  if (labeling.urban_cells == 0) {
    throw EmptyClassError("raster '" + raster.origin_id() + "' has no urban cells");
  }
  HsiVector hsi;
  hsi.ca = compute_ca(labeling, raster.cell_size());
  hsi.np = static_cast<double>(labeling.patch_count());
  hsi.lpi = compute_lpi(labeling);
  const auto agg = compute_aggregation(labeling);
  hsi.clumpy = agg.clumpy;
  hsi.ai = agg.ai;
  hsi.nlsi = agg.nlsi;
  return hsi;
}

}  // namespace settlemorph
