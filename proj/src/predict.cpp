#include "vinerisk/predict.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

namespace vinerisk {

PredictionCatalog::PredictionCatalog(std::string model_fingerprint,
                                     std::vector<AreaFeatures> areas,
                                     std::vector<MonthlyPredictions> predictions,
                                     std::vector<SkippedArea> skipped)
    : fingerprint_(std::move(model_fingerprint)), areas_(std::move(areas)),
      predictions_(std::move(predictions)), skipped_(std::move(skipped)) {
  if (areas_.size() != predictions_.size())
    throw InputError("catalog: area and prediction counts differ");
  for (std::size_t i = 0; i < areas_.size(); ++i)
    if (!index_.emplace(areas_[i].area_id, i).second)
      throw InputError("catalog: duplicate area id '" + areas_[i].area_id + "'");
}

const AreaFeatures* PredictionCatalog::find_area(std::string_view area_id) const {
  auto it = index_.find(std::string(area_id));
  return it == index_.end() ? nullptr : &areas_[it->second];
}

const MonthlyPredictions* PredictionCatalog::find(std::string_view area_id) const {
  auto it = index_.find(std::string(area_id));
  return it == index_.end() ? nullptr : &predictions_[it->second];
}

const Prediction& PredictionCatalog::at(std::string_view area_id, int month) const {
  if (month < 1 || month > 12) throw InputError("catalog: month must be 1..12");
  const auto* p = find(area_id);
  if (!p) throw IntegrityError("area '" + std::string(area_id) + "' is missing from the catalog");
  return (*p)[static_cast<std::size_t>(month - 1)];
}

PredictionCatalog build_catalog(const EnsembleModel& model, std::span<const AreaPolygon> areas,
                                const LandUseMap& landuse, const ElevationGrid& elevation,
                                const LandUseSampling& sampling,
                                std::string model_fingerprint) {
  if (model.input_dim() != kFeatureDim)
    throw InputError("build_catalog: model expects " + std::to_string(model.input_dim()) +
                     " features, not " + std::to_string(kFeatureDim));
  const LandUseIndex index(landuse);
  std::vector<AreaFeatures> kept;
  std::vector<SkippedArea> skipped;
  for (const auto& area : areas) {
    AreaFeatures af;
    af.area_id = area.area_id();
    af.centroid = area.centroid();
    try {
      af.height_m = height_at(af.centroid, elevation);
    } catch (const InputError& e) {
      skipped.push_back({area.area_id(), e.what()});
      continue;
    }
    af.landuse = landuse_fractions(af.centroid, index, sampling);
    kept.push_back(std::move(af));
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(kept.size() * 12), kFeatureDim);
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (int m = 1; m <= 12; ++m)
      X.row(static_cast<Eigen::Index>(a * 12 + static_cast<std::size_t>(m - 1))) =
          kept[a].for_month(m).transpose();
  const Eigen::VectorXd p = kept.empty() ? Eigen::VectorXd() : ensemble_proba(model, X);

  std::vector<MonthlyPredictions> predictions(kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a)
    for (std::size_t m = 0; m < 12; ++m)
      predictions[a][m] = to_prediction(p(static_cast<Eigen::Index>(a * 12 + m)));
  return PredictionCatalog(std::move(model_fingerprint), std::move(kept),
                           std::move(predictions), std::move(skipped));
}

std::string serialize_catalog(const PredictionCatalog& catalog) {
  std::string out = "area_id,month,endangered,certainty\n";
  for (const auto& area : catalog.areas()) {
    const auto& months = *catalog.find(area.area_id);
    for (int m = 1; m <= 12; ++m) {
      const auto& p = months[static_cast<std::size_t>(m - 1)];
      out += area.area_id + ',' + std::to_string(m) + (p.endangered ? ",1," : ",0,") +
             format_double(p.certainty) + '\n';
    }
  }
  return out;
}

std::string serialize_catalog_manifest(const PredictionCatalog& catalog) {
  std::string out = "model_fingerprint=" + catalog.model_fingerprint() + '\n';
  out += "areas=" + std::to_string(catalog.areas().size()) + '\n';
  out += "predictions=" + std::to_string(catalog.size()) + '\n';
  out += "skipped=" + std::to_string(catalog.skipped().size()) + '\n';
  for (const auto& s : catalog.skipped()) out += "skipped " + s.area_id + ": " + s.reason + '\n';
  return out;
}

namespace {

std::string area_features_header() {
  std::string h = "area_id,lon,lat,height_m";
  for (std::size_t i = 1; i <= kCategoryCount; ++i) h += ",lu_" + std::to_string(i);
  return h;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    out.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

} // namespace

std::string serialize_area_features(const PredictionCatalog& catalog) {
  std::string out = area_features_header() + '\n';
  for (const auto& a : catalog.areas()) {
    out += a.area_id + ',' + format_double(a.centroid.lon) + ',' + format_double(a.centroid.lat) +
           ',' + format_double(a.height_m);
    for (Eigen::Index i = 0; i < a.landuse.size(); ++i) out += ',' + format_double(a.landuse(i));
    out += '\n';
  }
  return out;
}

CatalogPaths CatalogPaths::in(const std::filesystem::path& dir) {
  return {dir / "catalog.csv", dir / "catalog_manifest.txt", dir / "area_features.csv"};
}

void write_catalog(const PredictionCatalog& catalog, const std::filesystem::path& dir) {
  const auto paths = CatalogPaths::in(dir);
  write_text_file(paths.catalog, serialize_catalog(catalog));
  write_text_file(paths.manifest, serialize_catalog_manifest(catalog));
  write_text_file(paths.area_features, serialize_area_features(catalog));
}

PredictionCatalog parse_catalog_text(std::string_view catalog_csv, std::string_view manifest,
                                     std::string_view area_features_csv) {
  std::string fingerprint;
  std::vector<SkippedArea> skipped;
  for (auto line : lines_of(manifest)) {
    line = trim(line);
    if (line.starts_with("model_fingerprint=")) {
      fingerprint = std::string(line.substr(18));
    } else if (line.starts_with("skipped ")) {
      auto rest = line.substr(8);
      auto colon = rest.find(": ");
      if (colon == std::string_view::npos)
        throw InputError("catalog manifest: malformed skip line '" + std::string(line) + "'");
      skipped.push_back({std::string(rest.substr(0, colon)), std::string(rest.substr(colon + 2))});
    }
  }

  const std::string fsrc = "area_features.csv";
  const auto flines = lines_of(area_features_csv);
  if (flines.empty() || trim(flines[0]) != area_features_header())
    throw ParseError(fsrc, 1, "", "", "malformed header");
  std::vector<AreaFeatures> areas;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t r = 1; r < flines.size(); ++r) {
    if (trim(flines[r]).empty()) continue;
    const auto f = split_fields(flines[r]);
    if (f.size() != 4 + kCategoryCount)
      throw ParseError(fsrc, r + 1, "", "", "expected " + std::to_string(4 + kCategoryCount) +
                                                " fields");
    AreaFeatures a;
    a.area_id = std::string(trim(f[0]));
    auto lon = parse_double(f[1]), lat = parse_double(f[2]), h = parse_double(f[3]);
    if (!lon) throw ParseError(fsrc, r + 1, "lon", std::string(f[1]), "not a number");
    if (!lat) throw ParseError(fsrc, r + 1, "lat", std::string(f[2]), "not a number");
    if (!h) throw ParseError(fsrc, r + 1, "height_m", std::string(f[3]), "not a number");
    a.centroid = {*lon, *lat};
    a.height_m = *h;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      auto v = parse_double(f[4 + i]);
      if (!v || *v < 0.0 || *v > 1.0)
        throw ParseError(fsrc, r + 1, "lu_" + std::to_string(i + 1), std::string(f[4 + i]),
                         "land-use fraction must lie in [0, 1]");
      a.landuse(static_cast<Eigen::Index>(i)) = *v;
    }
    if (!index.emplace(a.area_id, areas.size()).second)
      throw ParseError(fsrc, r + 1, "area_id", a.area_id, "duplicate area id");
    areas.push_back(std::move(a));
  }

  const std::string csrc = "catalog.csv";
  const auto clines = lines_of(catalog_csv);
  if (clines.empty() || trim(clines[0]) != "area_id,month,endangered,certainty")
    throw ParseError(csrc, 1, "", "", "malformed header");
  std::vector<MonthlyPredictions> predictions(areas.size());
  std::vector<std::array<bool, 12>> seen(areas.size(), std::array<bool, 12>{});
  for (std::size_t r = 1; r < clines.size(); ++r) {
    if (trim(clines[r]).empty()) continue;
    const auto f = split_fields(clines[r]);
    if (f.size() != 4) throw ParseError(csrc, r + 1, "", "", "expected 4 fields");
    const std::string id(trim(f[0]));
    auto it = index.find(id);
    if (it == index.end()) throw ParseError(csrc, r + 1, "area_id", id, "area has no feature row");
    auto month = parse_int(f[1]);
    auto endangered = parse_int(f[2]);
    auto certainty = parse_double(f[3]);
    if (!month || *month < 1 || *month > 12)
      throw ParseError(csrc, r + 1, "month", std::string(f[1]), "must be 1..12");
    if (!endangered || (*endangered != 0 && *endangered != 1))
      throw ParseError(csrc, r + 1, "endangered", std::string(f[2]), "must be 0 or 1");
    if (!certainty || *certainty < 0.5 || *certainty > 1.0)
      throw ParseError(csrc, r + 1, "certainty", std::string(f[3]), "must lie in [0.5, 1]");
    const auto m = static_cast<std::size_t>(*month - 1);
    if (seen[it->second][m]) throw ParseError(csrc, r + 1, "month", std::string(f[1]), "duplicate row");
    seen[it->second][m] = true;
    Prediction& p = predictions[it->second][m];
    p.endangered = *endangered == 1;
    p.certainty = *certainty;
    // P(positive) is implied by the class and its certainty.
    p.probability = p.endangered ? *certainty : 1.0 - *certainty;
  }
  for (std::size_t a = 0; a < areas.size(); ++a)
    for (std::size_t m = 0; m < 12; ++m)
      if (!seen[a][m])
        throw InputError("catalog: area '" + areas[a].area_id + "' lacks month " +
                         std::to_string(m + 1));
  return PredictionCatalog(std::move(fingerprint), std::move(areas), std::move(predictions),
                           std::move(skipped));
}

PredictionCatalog load_catalog(const std::filesystem::path& dir) {
  const auto paths = CatalogPaths::in(dir);
  return parse_catalog_text(read_text_file(paths.catalog), read_text_file(paths.manifest),
                            read_text_file(paths.area_features));
}

} // namespace vinerisk
