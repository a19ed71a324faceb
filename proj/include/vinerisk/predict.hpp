#pragma once

#include "vinerisk/ensemble.hpp"
#include "vinerisk/features.hpp"
#include "vinerisk/ingest.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vinerisk {

/// Month-invariant inputs of one area.
struct AreaFeatures {
  std::string area_id;
  LonLat centroid;
  double height_m = 0.0;
  LandUseVector landuse = LandUseVector::Zero();

  FeatureVector for_month(int month) const { return assemble_features(month, height_m, landuse); }
};

struct SkippedArea {
  std::string area_id;
  std::string reason;
};

using MonthlyPredictions = std::array<Prediction, 12>;

/// Immutable (area, month) -> prediction table with the per-area inputs.
class PredictionCatalog {
public:
  PredictionCatalog() = default;
  /// Throws InputError on duplicate area ids or mismatched lengths.
  PredictionCatalog(std::string model_fingerprint, std::vector<AreaFeatures> areas,
                    std::vector<MonthlyPredictions> predictions,
                    std::vector<SkippedArea> skipped);

  const std::string& model_fingerprint() const noexcept { return fingerprint_; }
  std::span<const AreaFeatures> areas() const noexcept { return areas_; }
  std::span<const SkippedArea> skipped() const noexcept { return skipped_; }
  std::size_t size() const noexcept { return areas_.size() * 12; }

  const AreaFeatures* find_area(std::string_view area_id) const;
  const MonthlyPredictions* find(std::string_view area_id) const;
  /// Throws IntegrityError naming the area if it is not in the catalog.
  const Prediction& at(std::string_view area_id, int month) const;

private:
  std::string fingerprint_;
  std::vector<AreaFeatures> areas_;
  std::vector<MonthlyPredictions> predictions_;
  std::vector<SkippedArea> skipped_;
  std::unordered_map<std::string, std::size_t> index_;
};

/**
 * Predicts every month of every area. Land use and height are computed once
 * per area at its centroid. Areas whose centroid has no usable elevation are
 * skipped and listed in the catalog's skip list.
 */
PredictionCatalog build_catalog(const EnsembleModel& model, std::span<const AreaPolygon> areas,
                                const LandUseMap& landuse, const ElevationGrid& elevation,
                                const LandUseSampling& sampling = {},
                                std::string model_fingerprint = {});

/// area_id,month,endangered,certainty
std::string serialize_catalog(const PredictionCatalog& catalog);
/// model_fingerprint, counts, then one "skipped <area_id>: <reason>" line per gap.
std::string serialize_catalog_manifest(const PredictionCatalog& catalog);
/// area_id,lon,lat,height_m,lu_1,...,lu_83
std::string serialize_area_features(const PredictionCatalog& catalog);

struct CatalogPaths {
  std::filesystem::path catalog;
  std::filesystem::path manifest;
  std::filesystem::path area_features;

  static CatalogPaths in(const std::filesystem::path& dir);
};

void write_catalog(const PredictionCatalog& catalog, const std::filesystem::path& dir);
PredictionCatalog parse_catalog_text(std::string_view catalog_csv, std::string_view manifest,
                                     std::string_view area_features_csv);
PredictionCatalog load_catalog(const std::filesystem::path& dir);

} // namespace vinerisk
