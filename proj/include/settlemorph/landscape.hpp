#pragma once

// Class-level landscape metrics for the urban class of a binary raster:
// CA, NP, LPI, CLUMPY, AI and NLSI (the Human Settlement Indices).
//
// Conventions (FRAGSTATS class-level, cell-side units):
//   - adjacencies are counted once per shared cell side, landscape boundary excluded;
//   - class edge e counts every side of an urban cell that faces a non-urban cell
//     or the landscape boundary;
//   - patches use 8-neighbour connectivity unless asked otherwise.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "settlemorph/raster.hpp"

namespace settlemorph {

enum class Connectivity { Four = 4, Eight = 8 };

struct PatchLabeling {
  std::size_t width = 0;
  std::size_t height = 0;
  /// Per-cell patch id, 0 for background; ids are contiguous from 1 in raster scan order.
  std::vector<std::uint32_t> labels;
  /// patch_sizes[i] is the cell count of patch id i + 1.
  std::vector<std::size_t> patch_sizes;
  std::size_t urban_cells = 0;
  /// Urban-urban shared sides, single count.
  std::size_t like_adjacencies = 0;
  /// Sides of urban cells that touch another cell (urban or not); boundary sides excluded.
  std::size_t total_urban_adjacencies = 0;
  /// Urban sides facing non-urban cells or the landscape boundary.
  std::size_t class_edge = 0;

  std::size_t patch_count() const noexcept { return patch_sizes.size(); }
  std::size_t landscape_cells() const noexcept { return width * height; }
  std::size_t boundary_length() const noexcept { return 2 * (width + height); }
};

struct AggregationIndices {
  double clumpy = 0.0;
  double ai = 0.0;
  double nlsi = 0.0;
};

struct HsiVector {
  double ca = 0.0;   // hectares
  double np = 0.0;   // patch count
  double lpi = 0.0;  // percent of landscape
  double clumpy = 0.0;
  double ai = 0.0;   // percent
  double nlsi = 0.0;

  static const std::vector<std::string>& column_names();
  std::vector<double> as_vector() const { return {ca, np, lpi, clumpy, ai, nlsi}; }
};

PatchLabeling label_patches(const SettlementRaster& raster,
                            Connectivity connectivity = Connectivity::Eight);

/// Class area in hectares.
double compute_ca(const PatchLabeling& labeling, double cell_size);

/// Largest patch as a percentage of the landscape. Throws EmptyClassError on an empty class.
double compute_lpi(const PatchLabeling& labeling);

/// CLUMPY, AI and NLSI. Throws EmptyClassError on an empty class.
///
/// Degenerate cases: a single-cell class reports ai = 100, clumpy = 1, nlsi = 0;
/// a fully urban landscape reports clumpy = 1 and nlsi = 0. CLUMPY is clamped to [-1, 1]
/// (the piecewise rule can leave that range on tiny odd-sized landscapes).
AggregationIndices compute_aggregation(const PatchLabeling& labeling);

HsiVector compute_hsi(const SettlementRaster& raster,
                      Connectivity connectivity = Connectivity::Eight);

/// Largest number of single-count like adjacencies n cells can share (largest-square packing).
std::size_t max_like_adjacencies(std::size_t n);

/// Perimeter in cell sides of the most compact arrangement of n cells.
std::size_t min_class_edge(std::size_t n);

/// Upper bound on class edge for n cells in a landscape of `landscape_cells` cells with
/// `boundary_length` boundary sides: min(4n, 4(N - n) + B).
std::size_t max_class_edge(std::size_t n, std::size_t landscape_cells, std::size_t boundary_length);

}  // namespace settlemorph
