#pragma once

#include "vinerisk/geo.hpp"
#include "vinerisk/ingest.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace vinerisk {

inline constexpr Eigen::Index kFeatureDim = 85;
inline constexpr Eigen::Index kMonthFeature = 0;
inline constexpr Eigen::Index kHeightFeature = 1;
inline constexpr Eigen::Index kLandUseOffset = 2;

/// [month, height_m, landuse_1 .. landuse_83]
using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;
using LandUseVector = Eigen::Matrix<double, static_cast<int>(kCategoryCount), 1>;

FeatureVector assemble_features(int month, double height_m, const LandUseVector& landuse);

struct StationMonthKey {
  std::string station_id;
  int year = 0;
  int month = 0;

  friend auto operator<=>(const StationMonthKey&, const StationMonthKey&) = default;
};

using MonthlyScores = std::map<StationMonthKey, double>;

struct LabeledInstance {
  StationMonthKey key;
  FeatureVector features = FeatureVector::Zero();
  double score = 0.0;
  bool positive = false;
};

struct LabelingSummary {
  double threshold_value = 0.0;
  std::size_t n_total = 0;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
};

/**
 * Min-max normalises trap count, berry infestation and egg rate over the
 * whole record set (a constant measure maps to 0), sums the three per record,
 * and averages record scores per (station, year, month).
 */
MonthlyScores combine_observations(std::span<const StationObservation> records);

/// Nearest-rank percentile of the scores; 1-based rank ceil(p * n).
double nearest_rank_percentile(std::vector<double> values, double percentile);

/// Labels positive iff score > percentile threshold (strict). Features are
/// left zero except the month.
std::pair<std::vector<LabeledInstance>, LabelingSummary>
label_instances(const MonthlyScores& monthly_scores, double percentile = 0.8);

struct LandUseSampling {
  double radius_m = 5000.0;
  double step_fraction = 1.0 / 64.0; // lattice step = radius_m * step_fraction
};

/// Spatial index over a land-use map for repeated fraction queries.
class LandUseIndex {
public:
  explicit LandUseIndex(const LandUseMap& map);

  std::size_t category_count() const noexcept { return categories_.size(); }
  /// Manifest position of the first polygon containing p, if any.
  std::optional<std::size_t> category_at(const LonLat& p) const;

private:
  PolygonIndex index_;
  std::vector<std::size_t> categories_;
};

LandUseVector landuse_fractions(const LonLat& center, const LandUseIndex& index,
                                const LandUseSampling& sampling = {});
LandUseVector landuse_fractions(const LonLat& center, const LandUseMap& map,
                                const LandUseSampling& sampling = {});

/// Height of the containing raster cell. On a shared edge the cell with the
/// lower row/column index wins. Throws RangeError outside the extent and
/// NodataError on nodata cells.
double height_at(const LonLat& location, const ElevationGrid& grid);

struct InstanceOptions {
  double percentile = 0.8;
  LandUseSampling sampling{};
};

/// One instance per (station, year, month) with at least one observation.
std::pair<std::vector<LabeledInstance>, LabelingSummary>
build_instances(std::span<const StationObservation> observations,
                const LandUseMap& landuse, const ElevationGrid& elevation,
                const InstanceOptions& options = {});

// Instance CSV: station_id,year,month,score,label,height_m,lu_1,...,lu_83

std::string serialize_instances(std::span<const LabeledInstance> instances);
std::vector<LabeledInstance> parse_instances_text(std::string_view text,
                                                  std::string_view source = "instances");
std::vector<LabeledInstance> parse_instances(const std::filesystem::path& path);

std::string serialize_labeling_summary(const LabelingSummary& summary);

/// Row-per-instance design matrix and 0/1 label vector.
Eigen::MatrixXd feature_matrix(std::span<const LabeledInstance> instances);
Eigen::VectorXi label_vector(std::span<const LabeledInstance> instances);

} // namespace vinerisk
