#pragma once

#include "vinerisk/geo.hpp"
#include "vinerisk/predict.hpp"

#include <Eigen/Core>

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vinerisk {

struct GridLimits {
  double min_cell_size_m = 500.0;
  double max_cell_size_m = 200000.0;
};

/// Square cells in Web-Mercator metres, anchored at the projection origin.
struct GridSpec {
  double cell_size_m = 0.0;
  int level = 0;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct CellIndex {
  std::int64_t i = 0;
  std::int64_t j = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Throws InputError unless cell_size_m lies in [min, max].
GridSpec make_grid(double cell_size_m, const GridLimits& limits = {});
/// Halves the cell size; throws InputError below the minimum.
GridSpec split(const GridSpec& spec, const GridLimits& limits = {});
/// New tiling from the same origin; throws InputError outside the range.
GridSpec resize(const GridSpec& spec, double cell_size_m, const GridLimits& limits = {});

/// (floor(x / size), floor(y / size)); edges belong to the higher index.
CellIndex cell_of(const GridSpec& spec, const Eigen::Vector2d& xy) noexcept;
CellIndex cell_of(const GridSpec& spec, const LonLat& p) noexcept;

/// Lon/lat bounds of a cell.
BoundingBox cell_bounds(const GridSpec& spec, const CellIndex& cell) noexcept;

/// Cell -> member area ids (sorted). Only non-empty cells appear.
using Assignment = std::map<CellIndex, std::vector<std::string>>;

Assignment assign_areas(const GridSpec& spec, std::span<const AreaPolygon> areas);
Assignment assign_areas(const GridSpec& spec, std::span<const AreaFeatures> areas);

struct MonthSummary {
  std::int64_t endangered = 0;
  std::int64_t safe = 0;
  std::optional<double> mean_certainty_endangered;
  std::optional<double> mean_certainty_safe;
  /// Population standard deviation of certainty over all members.
  double stddev_certainty = 0.0;
};

struct CellSummary {
  CellIndex cell;
  double cell_size_m = 0.0;
  std::int64_t vineyard_count = 0;
  std::array<MonthSummary, 12> months{};
  std::vector<std::string> member_area_ids;

  /// Throws InputError when counts, means or members are inconsistent.
  void validate() const;
};

/// Summary of one cell; throws IntegrityError if a member is not in the catalog.
CellSummary summarize_cell(const CellIndex& cell, double cell_size_m,
                           std::span<const std::string> members,
                           const PredictionCatalog& catalog);

/// One summary per non-empty cell, ordered by cell index.
std::vector<CellSummary> summarize(const GridSpec& spec, const Assignment& assignment,
                                   const PredictionCatalog& catalog);

/// Combines disjoint summaries into one: counts add, class means are
/// count-weighted and the certainty spread is pooled.
CellSummary merge_summaries(std::span<const CellSummary> parts, const CellIndex& cell,
                            double cell_size_m);

/// i,j,cell_size_m,month,endangered,safe,mean_ce,mean_cs,stddev (empty means
/// are written as empty fields).
std::string serialize_summaries(std::span<const CellSummary> summaries);

} // namespace vinerisk
