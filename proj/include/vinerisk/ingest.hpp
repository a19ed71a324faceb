#pragma once

#include "vinerisk/geo.hpp"

#include <Eigen/Core>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vinerisk {

inline constexpr std::size_t kCategoryCount = 83;

/// One dated measurement at a monitoring station.
struct StationObservation {
  std::string station_id;
  LonLat location;
  std::chrono::year_month_day date;
  double trap_count = 0.0;        // >= 0
  double berry_infestation = 0.0; // percent, [0, 100]
  double egg_rate = 0.0;          // percent, >= 0, may exceed 100

  friend bool operator==(const StationObservation&, const StationObservation&) = default;
};

/**
 * Ordered list of the 83 land-use category codes. The order defines the
 * land-use part of every feature vector.
 */
class CategoryManifest {
public:
  CategoryManifest() = default;
  /// Throws InputError unless exactly 83 unique, non-empty codes are given.
  explicit CategoryManifest(std::vector<std::string> codes,
                            std::vector<std::string> display_names = {});

  std::size_t size() const noexcept { return codes_.size(); }
  const std::vector<std::string>& codes() const noexcept { return codes_; }
  const std::vector<std::string>& display_names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view code) const;

  friend bool operator==(const CategoryManifest& a, const CategoryManifest& b) {
    return a.codes_ == b.codes_;
  }

private:
  std::vector<std::string> codes_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> lookup_;
};

/// Built-in manifest used by the synthetic generator.
CategoryManifest default_category_manifest();

/// Woodland codes are the FOREST_* and WOODLAND_* groups.
bool is_woodland_code(std::string_view code) noexcept;

/// "FOREST_MIXED" -> "Forest mixed".
std::string display_name_for(std::string_view code);

struct LandUsePolygon {
  Ring ring;
  std::size_t category = 0; // position in the manifest

  friend bool operator==(const LandUsePolygon&, const LandUsePolygon&) = default;
};

struct LandUseMap {
  CategoryManifest categories;
  std::vector<LandUsePolygon> polygons;

  friend bool operator==(const LandUseMap&, const LandUseMap&) = default;
};

/// Row-major raster, north row first.
struct ElevationGrid {
  LonLat origin;             // lower-left corner of the lower-left cell
  double cell_size_deg = 0.0;
  std::int64_t ncols = 0;
  std::int64_t nrows = 0;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> values;
  double nodata = -9999.0;

  BoundingBox extent() const noexcept {
    return {origin.lon, origin.lat,
            origin.lon + cell_size_deg * static_cast<double>(ncols),
            origin.lat + cell_size_deg * static_cast<double>(nrows)};
  }

  friend bool operator==(const ElevationGrid& a, const ElevationGrid& b) {
    return a.origin == b.origin && a.cell_size_deg == b.cell_size_deg &&
           a.ncols == b.ncols && a.nrows == b.nrows && a.nodata == b.nodata &&
           a.values == b.values;
  }
};

/// Vineyard polygon with its vertex-mean centroid cached at construction.
class AreaPolygon {
public:
  AreaPolygon(std::string area_id, Ring ring);

  const std::string& area_id() const noexcept { return area_id_; }
  const Ring& ring() const noexcept { return ring_; }
  const LonLat& centroid() const noexcept { return centroid_; }

  friend bool operator==(const AreaPolygon& a, const AreaPolygon& b) {
    return a.area_id_ == b.area_id_ && a.ring_ == b.ring_;
  }

private:
  std::string area_id_;
  Ring ring_;
  LonLat centroid_;
};

// Observations CSV: station_id,lon,lat,date,trap_count,berry_pct,egg_pct

std::vector<StationObservation> parse_observations_text(
    std::string_view text, std::string_view source = "observations",
    std::optional<BoundingBox> region = std::nullopt);
std::vector<StationObservation> parse_observations(
    const std::filesystem::path& path,
    std::optional<BoundingBox> region = std::nullopt);
std::string serialize_observations(const std::vector<StationObservation>& records);

// Category manifest: one code per line, optional "<TAB>display name".

CategoryManifest parse_category_manifest_text(std::string_view text);
CategoryManifest load_category_manifest(const std::filesystem::path& path);
std::string serialize_category_manifest(const CategoryManifest& manifest);

// Land use: GeoJSON FeatureCollection of Polygons with property "category".

LandUseMap parse_landuse_text(std::string_view text, const CategoryManifest& manifest);
LandUseMap parse_landuse(const std::filesystem::path& path,
                         const CategoryManifest& manifest);
std::string serialize_landuse(const LandUseMap& map);

// Elevation: ESRI ASCII grid.

ElevationGrid parse_elevation_text(std::string_view text);
ElevationGrid parse_elevation(const std::filesystem::path& path);
std::string serialize_elevation(const ElevationGrid& grid);

// Areas: GeoJSON FeatureCollection of Polygons with property "area_id".

std::vector<AreaPolygon> parse_areas_text(std::string_view text);
std::vector<AreaPolygon> parse_areas(const std::filesystem::path& path);
std::string serialize_areas(const std::vector<AreaPolygon>& areas);

/**
 * Parameters of the synthetic landscape and monitoring campaign.
 *
 * The observation intensity of a station-month is
 *   baseline + season_strength * peak * season(month, woody) * altitude(height)
 * where season() ramps up from May to a plateau from October to December and
 * woody stations (5 km woodland fraction above wood_threshold) run the same
 * ramp wood_shift_months earlier, blended in by wood_strength, and scaled by
 * wood_peak_factor.
 */
struct SynthConfig {
  int stations = 867;
  int areas = 1700;
  BoundingBox region{7.25, 47.40, 8.95, 48.55};
  int clusters = 16;
  double cluster_sigma_km = 5.0;
  double edge_margin_km = 7.0;

  double block_deg_lon = 0.02;
  double block_deg_lat = 0.015;
  double uncovered_fraction = 0.04;
  int forest_patches = 22;
  double elevation_cell_deg = 0.01;

  double season_strength = 1.0;
  double wood_strength = 1.0;
  int wood_shift_months = 3;
  double wood_peak_factor = 1.35;
  double wood_threshold = 0.3;
  double altitude_strength = 1.0;

  double baseline_intensity = 0.05;
  double peak_intensity = 8.0;
  double traps_per_intensity = 4.0;
  int berries_per_sample = 100;
  double berry_hazard = 0.15;
  double eggs_per_berry_per_intensity = 0.4;

  int first_year = 2013;
  int last_year = 2017;
  double single_day_fraction = 0.2;
  double long_term_fraction = 0.068;
  double mean_active_days = 100.0;
  int max_active_days = 1641;
  int min_visit_interval_days = 7;
  int max_visit_interval_days = 28;

  double lattice_step_fraction = 1.0 / 64.0;

  /// Throws InputError on non-positive counts or an inverted region.
  void validate() const;
};

/// Seasonal ramp in [0, 1] for months 1..12 before shifting.
double season_curve(int month) noexcept;

/// Expected intensity of a station-month under the generator's model.
double expected_intensity(const SynthConfig& config, bool woody, double height_m,
                          int month);

/// Expected trap count of one record; the analytic mean the generator samples from.
double expected_trap_count(const SynthConfig& config, bool woody, double height_m,
                           int month);

struct SyntheticDataset {
  CategoryManifest manifest;
  std::vector<StationObservation> observations;
  LandUseMap landuse;
  ElevationGrid elevation;
  std::vector<AreaPolygon> areas;

  // Ground truth kept for tests; not written to disk.
  std::vector<std::string> station_ids;
  std::vector<double> station_woodland;
  std::vector<bool> station_woody;
  std::vector<double> station_height;
};

/// Deterministic for a fixed (config, seed).
SyntheticDataset generate_synthetic(const SynthConfig& config, std::uint64_t seed);

/// File names used by write_synthetic and the CLI.
struct DatasetPaths {
  std::filesystem::path observations;
  std::filesystem::path landuse;
  std::filesystem::path manifest;
  std::filesystem::path elevation;
  std::filesystem::path areas;

  static DatasetPaths in(const std::filesystem::path& dir);
};

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir);

} // namespace vinerisk
