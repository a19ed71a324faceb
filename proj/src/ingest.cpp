#include "vinerisk/ingest.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

namespace vinerisk {

using json = nlohmann::json;

namespace {

constexpr std::string_view kObservationHeader =
    "station_id,lon,lat,date,trap_count,berry_pct,egg_pct";

std::optional<std::chrono::year_month_day> parse_date(std::string_view s) {
  s = trim(s);
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = parse_int(s.substr(0, 4));
  auto m = parse_int(s.substr(5, 2));
  auto d = parse_int(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(*y)},
                                  std::chrono::month{static_cast<unsigned>(*m)},
                                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string format_date(const std::chrono::year_month_day& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      if (start < text.size()) out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string_view strip_bom(std::string_view s) {
  if (s.size() >= 3 && s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  return s;
}

json parse_json_document(std::string_view text, std::string_view source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(source) + ": invalid JSON: " + e.what());
  }
}

// Shared by land use and areas: validates the FeatureCollection envelope and
// yields (feature number, outer ring, properties) triples.
template <typename Fn>
void for_each_polygon_feature(const json& doc, std::string_view source, Fn&& fn) {
  const std::string src(source);
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array())
    throw InputError(src + ": expected a GeoJSON FeatureCollection");
  std::size_t number = 0;
  for (const auto& feature : doc["features"]) {
    ++number;
    if (!feature.is_object() || !feature.contains("geometry") ||
        !feature["geometry"].is_object())
      throw ParseError(src, number, "geometry", "", "feature without geometry");
    const auto& geom = feature["geometry"];
    if (geom.value("type", "") != "Polygon")
      throw ParseError(src, number, "geometry", geom.value("type", ""),
                       "only Polygon geometries are supported");
    const auto& coords = geom.value("coordinates", json::array());
    if (!coords.is_array() || coords.size() != 1)
      throw ParseError(src, number, "coordinates", "",
                       "polygon must have exactly one ring (holes are unsupported)");
    Ring ring;
    for (const auto& v : coords[0]) {
      if (!v.is_array() || v.size() < 2 || !v[0].is_number() || !v[1].is_number())
        throw ParseError(src, number, "coordinates", "", "malformed vertex");
      ring.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    if (!is_closed_ring(ring))
      throw ParseError(src, number, "coordinates", "",
                       "unclosed ring (first vertex must equal last, >= 4 vertices)");
    const json props = feature.value("properties", json::object());
    fn(number, std::move(ring), props);
  }
}

json ring_to_json(const Ring& ring) {
  json coords = json::array();
  for (const auto& p : ring) coords.push_back({p.lon, p.lat});
  return json::array({coords});
}

} // namespace

// ---------------------------------------------------------------------------
// Category manifest

CategoryManifest::CategoryManifest(std::vector<std::string> codes,
                                   std::vector<std::string> display_names)
    : codes_(std::move(codes)), names_(std::move(display_names)) {
  if (codes_.size() != kCategoryCount)
    throw InputError("category manifest must list exactly " +
                     std::to_string(kCategoryCount) + " codes, found " +
                     std::to_string(codes_.size()));
  if (names_.empty()) {
    names_.reserve(codes_.size());
    for (const auto& c : codes_) names_.push_back(display_name_for(c));
  }
  if (names_.size() != codes_.size())
    throw InputError("category manifest: display name count mismatch");
  for (std::size_t i = 0; i < codes_.size(); ++i) {
    if (codes_[i].empty()) throw InputError("category manifest: empty code");
    if (!lookup_.emplace(codes_[i], i).second)
      throw InputError("category manifest: duplicate code " + codes_[i]);
  }
}

std::optional<std::size_t> CategoryManifest::index_of(std::string_view code) const {
  auto it = lookup_.find(std::string(code));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

CategoryManifest default_category_manifest() {
  static const std::array<const char*, kCategoryCount> codes = {
      // settlement
      "SETTLEMENT_RESIDENTIAL", "SETTLEMENT_INDUSTRIAL", "SETTLEMENT_COMMERCIAL",
      "SETTLEMENT_MIXED_USE", "SETTLEMENT_PUBLIC_FACILITY", "SETTLEMENT_SPORTS_LEISURE",
      "SETTLEMENT_CEMETERY", "SETTLEMENT_PARK", "SETTLEMENT_CAMPSITE",
      "SETTLEMENT_ALLOTMENT_GARDEN", "SETTLEMENT_FARMSTEAD", "SETTLEMENT_WEEKEND_HOUSES",
      "SETTLEMENT_QUARRY", "SETTLEMENT_LANDFILL", "SETTLEMENT_POWER_PLANT",
      "SETTLEMENT_SEWAGE_PLANT", "SETTLEMENT_HISTORIC_SITE",
      // traffic
      "TRAFFIC_ROAD_MOTORWAY", "TRAFFIC_ROAD_MAIN", "TRAFFIC_ROAD_LOCAL",
      "TRAFFIC_FIELD_PATH", "TRAFFIC_CYCLE_PATH", "TRAFFIC_RAILWAY", "TRAFFIC_RAIL_YARD",
      "TRAFFIC_AIRFIELD", "TRAFFIC_HARBOUR", "TRAFFIC_PARKING", "TRAFFIC_SQUARE",
      // agriculture
      "AGRI_ARABLE", "AGRI_GRASSLAND", "AGRI_PASTURE", "AGRI_VINEYARD", "AGRI_ORCHARD",
      "AGRI_HORTICULTURE", "AGRI_NURSERY", "AGRI_HOP_GARDEN", "AGRI_FALLOW",
      "AGRI_GREENHOUSE", "AGRI_BERRY_CULTURE", "AGRI_CHRISTMAS_TREES",
      "AGRI_ENERGY_CROPS",
      // woodland
      "FOREST_DECIDUOUS", "FOREST_CONIFEROUS", "FOREST_MIXED", "WOODLAND_COPSE",
      "WOODLAND_SHRUB",
      // natural
      "NATURAL_HEATH", "NATURAL_MOOR", "NATURAL_SWAMP", "NATURAL_REED_BED",
      "NATURAL_ROCK", "NATURAL_SCREE", "NATURAL_UNVEGETATED", "NATURAL_WET_MEADOW",
      "NATURAL_DRY_GRASSLAND", "NATURAL_HEDGEROW", "NATURAL_RIPARIAN_STRIP",
      "NATURAL_CLEARING",
      // water
      "WATER_RIVER", "WATER_STREAM", "WATER_CANAL", "WATER_LAKE", "WATER_POND",
      "WATER_RESERVOIR", "WATER_DITCH", "WATER_OXBOW", "WATER_FLOODPLAIN",
      // structures
      "STRUCTURE_DAM", "STRUCTURE_DYKE", "STRUCTURE_EMBANKMENT",
      "STRUCTURE_TERRACE_WALL", "STRUCTURE_NOISE_BARRIER", "STRUCTURE_BRIDGE",
      "STRUCTURE_TUNNEL_PORTAL", "STRUCTURE_MAST", "STRUCTURE_WIND_FARM",
      "STRUCTURE_SOLAR_FARM", "STRUCTURE_PIPELINE_CORRIDOR",
      "STRUCTURE_POWER_LINE_CORRIDOR", "STRUCTURE_RETAINING_BASIN",
      "STRUCTURE_SLUICE", "STRUCTURE_WEIR", "STRUCTURE_LOCK",
  };
  return CategoryManifest(std::vector<std::string>(codes.begin(), codes.end()));
}

bool is_woodland_code(std::string_view code) noexcept {
  return code.starts_with("FOREST_") || code.starts_with("WOODLAND_");
}

std::string display_name_for(std::string_view code) {
  std::string out(code);
  for (char& c : out) {
    c = (c == '_') ? ' ' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (!out.empty())
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

CategoryManifest parse_category_manifest_text(std::string_view text) {
  std::vector<std::string> codes;
  std::vector<std::string> names;
  bool any_name = false;
  for (auto line : lines_of(strip_bom(text))) {
    if (trim(line).empty()) continue;
    auto tab = line.find('\t');
    std::string code(trim(line.substr(0, tab)));
    std::string name = tab == std::string_view::npos
                           ? std::string()
                           : std::string(trim(line.substr(tab + 1)));
    if (!name.empty()) any_name = true;
    names.push_back(name.empty() ? display_name_for(code) : name);
    codes.push_back(std::move(code));
  }
  return CategoryManifest(std::move(codes), any_name ? std::move(names)
                                                     : std::vector<std::string>{});
}

CategoryManifest load_category_manifest(const std::filesystem::path& path) {
  return parse_category_manifest_text(read_text_file(path));
}

std::string serialize_category_manifest(const CategoryManifest& manifest) {
  std::string out;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    out += manifest.codes()[i];
    if (manifest.display_names()[i] != display_name_for(manifest.codes()[i])) {
      out += '\t';
      out += manifest.display_names()[i];
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observations

std::vector<StationObservation> parse_observations_text(std::string_view text,
                                                        std::string_view source,
                                                        std::optional<BoundingBox> region) {
  const std::string src(source);
  const auto lines = lines_of(strip_bom(text));
  if (lines.empty() || trim(lines.front()) != kObservationHeader)
    throw ParseError(src, 1, "", "", "malformed header, expected '" +
                                         std::string(kObservationHeader) + "'");
  static constexpr std::array<const char*, 7> columns = {
      "station_id", "lon", "lat", "date", "trap_count", "berry_pct", "egg_pct"};

  std::vector<StationObservation> out;
  out.reserve(lines.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li + 1;
    if (trim(lines[li]).empty()) continue;
    const auto f = split_fields(lines[li]);
    if (f.size() != columns.size())
      throw ParseError(src, row, "", "", "expected 7 fields, found " +
                                             std::to_string(f.size()));
    auto number = [&](std::size_t c) {
      auto v = parse_double(f[c]);
      if (!v) throw ParseError(src, row, columns[c], std::string(f[c]), "not a number");
      return *v;
    };
    StationObservation r;
    r.station_id = std::string(trim(f[0]));
    if (r.station_id.empty())
      throw ParseError(src, row, columns[0], "", "empty station id");
    r.location = {number(1), number(2)};
    if (r.location.lon < -180 || r.location.lon > 180)
      throw ParseError(src, row, "lon", std::string(f[1]), "longitude out of range");
    if (r.location.lat < -90 || r.location.lat > 90)
      throw ParseError(src, row, "lat", std::string(f[2]), "latitude out of range");
    if (region && !region->contains(r.location))
      throw ParseError(src, row, "lon", std::string(f[1]) + " " + std::string(f[2]),
                       "location outside the configured region");
    auto date = parse_date(f[3]);
    if (!date) throw ParseError(src, row, columns[3], std::string(f[3]), "invalid date");
    r.date = *date;
    r.trap_count = number(4);
    if (r.trap_count < 0)
      throw ParseError(src, row, columns[4], std::string(f[4]), "must be >= 0");
    r.berry_infestation = number(5);
    if (r.berry_infestation < 0 || r.berry_infestation > 100)
      throw ParseError(src, row, columns[5], std::string(f[5]), "must be in [0, 100]");
    r.egg_rate = number(6);
    if (r.egg_rate < 0)
      throw ParseError(src, row, columns[6], std::string(f[6]), "must be >= 0");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<StationObservation> parse_observations(const std::filesystem::path& path,
                                                   std::optional<BoundingBox> region) {
  return parse_observations_text(read_text_file(path), path.string(), region);
}

std::string serialize_observations(const std::vector<StationObservation>& records) {
  std::string out(kObservationHeader);
  out += '\n';
  for (const auto& r : records) {
    out += r.station_id;
    out += ',' + format_double(r.location.lon);
    out += ',' + format_double(r.location.lat);
    out += ',' + format_date(r.date);
    out += ',' + format_double(r.trap_count);
    out += ',' + format_double(r.berry_infestation);
    out += ',' + format_double(r.egg_rate);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Land use

LandUseMap parse_landuse_text(std::string_view text, const CategoryManifest& manifest) {
  if (manifest.size() != kCategoryCount)
    throw InputError("land use: category manifest not loaded");
  LandUseMap map;
  map.categories = manifest;
  const auto doc = parse_json_document(text, "land use");
  for_each_polygon_feature(doc, "land use", [&](std::size_t number, Ring ring,
                                                const json& props) {
    if (!props.contains("category") || !props["category"].is_string())
      throw ParseError("land use", number, "category", "", "missing category property");
    const auto code = props["category"].get<std::string>();
    auto idx = manifest.index_of(code);
    if (!idx)
      throw ParseError("land use", number, "category", code, "unknown category code");
    map.polygons.push_back({std::move(ring), *idx});
  });
  return map;
}

LandUseMap parse_landuse(const std::filesystem::path& path,
                         const CategoryManifest& manifest) {
  return parse_landuse_text(read_text_file(path), manifest);
}

std::string serialize_landuse(const LandUseMap& map) {
  json features = json::array();
  for (const auto& p : map.polygons) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"category", map.categories.codes().at(p.category)}}},
                        {"geometry", {{"type", "Polygon"},
                                      {"coordinates", ring_to_json(p.ring)}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump() + "\n";
}

// ---------------------------------------------------------------------------
// Elevation

ElevationGrid parse_elevation_text(std::string_view text) {
  const std::string src = "elevation";
  const auto lines = lines_of(strip_bom(text));
  std::optional<double> ncols, nrows, xll, yll, cell;
  double nodata = -9999.0;
  std::size_t li = 0;
  for (; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty()) continue;
    if (!std::isalpha(static_cast<unsigned char>(line.front()))) break;
    auto sp = line.find_first_of(" \t");
    if (sp == std::string_view::npos)
      throw ParseError(src, li + 1, std::string(line), "", "header line without value");
    std::string key(line.substr(0, sp));
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    auto value_text = trim(line.substr(sp));
    auto value = parse_double(value_text);
    if (!value)
      throw ParseError(src, li + 1, key, std::string(value_text), "not a number");
    if (key == "ncols") ncols = value;
    else if (key == "nrows") nrows = value;
    else if (key == "xllcorner") xll = value;
    else if (key == "yllcorner") yll = value;
    else if (key == "cellsize") cell = value;
    else if (key == "nodata_value") nodata = *value;
    else throw ParseError(src, li + 1, key, "", "unknown header key");
  }
  if (!ncols || !nrows || !xll || !yll || !cell)
    throw InputError("elevation: header must define ncols, nrows, xllcorner, "
                     "yllcorner and cellsize");
  if (*ncols < 1 || *nrows < 1 || *ncols != std::floor(*ncols) ||
      *nrows != std::floor(*nrows))
    throw InputError("elevation: ncols and nrows must be positive integers");
  if (!(*cell > 0)) throw InputError("elevation: cellsize must be positive");

  ElevationGrid grid;
  grid.origin = {*xll, *yll};
  grid.cell_size_deg = *cell;
  grid.ncols = static_cast<std::int64_t>(*ncols);
  grid.nrows = static_cast<std::int64_t>(*nrows);
  grid.nodata = nodata;
  grid.values.resize(grid.nrows, grid.ncols);

  std::int64_t r = 0;
  for (; li < lines.size(); ++li) {
    auto line = trim(lines[li]);
    if (line.empty()) continue;
    if (r >= grid.nrows)
      throw ParseError(src, li + 1, "", "", "more rows than nrows=" +
                                                std::to_string(grid.nrows));
    std::int64_t c = 0;
    std::size_t pos = 0;
    while (pos < line.size()) {
      auto start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      auto end = line.find_first_of(" \t", start);
      auto tok = line.substr(start, end == std::string_view::npos ? end : end - start);
      auto v = parse_double(tok);
      if (!v) throw ParseError(src, li + 1, "col " + std::to_string(c + 1),
                               std::string(tok), "non-numeric cell");
      if (c >= grid.ncols)
        throw ParseError(src, li + 1, "", "", "dimension mismatch: more than ncols=" +
                                                  std::to_string(grid.ncols) + " values");
      grid.values(r, c++) = *v;
      pos = end == std::string_view::npos ? line.size() : end;
    }
    if (c != grid.ncols)
      throw ParseError(src, li + 1, "", "", "dimension mismatch: expected " +
                                                std::to_string(grid.ncols) +
                                                " values, found " + std::to_string(c));
    ++r;
  }
  if (r != grid.nrows)
    throw InputError("elevation: dimension mismatch: expected " +
                     std::to_string(grid.nrows) + " rows, found " + std::to_string(r));
  return grid;
}

ElevationGrid parse_elevation(const std::filesystem::path& path) {
  return parse_elevation_text(read_text_file(path));
}

std::string serialize_elevation(const ElevationGrid& grid) {
  std::string out;
  out += "ncols " + std::to_string(grid.ncols) + "\n";
  out += "nrows " + std::to_string(grid.nrows) + "\n";
  out += "xllcorner " + format_double(grid.origin.lon) + "\n";
  out += "yllcorner " + format_double(grid.origin.lat) + "\n";
  out += "cellsize " + format_double(grid.cell_size_deg) + "\n";
  out += "NODATA_value " + format_double(grid.nodata) + "\n";
  for (std::int64_t r = 0; r < grid.nrows; ++r) {
    for (std::int64_t c = 0; c < grid.ncols; ++c) {
      if (c) out += ' ';
      out += format_double(grid.values(r, c));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Areas

AreaPolygon::AreaPolygon(std::string area_id, Ring ring)
    : area_id_(std::move(area_id)), ring_(std::move(ring)) {
  if (area_id_.empty()) throw InputError("area polygon: empty area_id");
  if (!is_closed_ring(ring_))
    throw InputError("area polygon " + area_id_ + ": unclosed ring");
  centroid_ = vertex_centroid(ring_);
}

std::vector<AreaPolygon> parse_areas_text(std::string_view text) {
  std::vector<AreaPolygon> out;
  std::set<std::string> seen;
  const auto doc = parse_json_document(text, "areas");
  for_each_polygon_feature(doc, "areas", [&](std::size_t number, Ring ring,
                                             const json& props) {
    if (!props.contains("area_id") || !props["area_id"].is_string())
      throw ParseError("areas", number, "area_id", "", "missing area_id property");
    auto id = props["area_id"].get<std::string>();
    if (id.empty()) throw ParseError("areas", number, "area_id", "", "empty area_id");
    if (!seen.insert(id).second)
      throw ParseError("areas", number, "area_id", id, "duplicate area_id");
    out.emplace_back(std::move(id), std::move(ring));
  });
  return out;
}

std::vector<AreaPolygon> parse_areas(const std::filesystem::path& path) {
  return parse_areas_text(read_text_file(path));
}

std::string serialize_areas(const std::vector<AreaPolygon>& areas) {
  json features = json::array();
  for (const auto& a : areas) {
    features.push_back({{"type", "Feature"},
                        {"properties", {{"area_id", a.area_id()}}},
                        {"geometry", {{"type", "Polygon"},
                                      {"coordinates", ring_to_json(a.ring())}}}});
  }
  json doc = {{"type", "FeatureCollection"}, {"features", std::move(features)}};
  return doc.dump() + "\n";
}

DatasetPaths DatasetPaths::in(const std::filesystem::path& dir) {
  return {dir / "observations.csv", dir / "landuse.geojson", dir / "categories.txt",
          dir / "elevation.asc", dir / "areas.geojson"};
}

void write_synthetic(const SyntheticDataset& data, const std::filesystem::path& dir) {
  const auto p = DatasetPaths::in(dir);
  write_text_file(p.observations, serialize_observations(data.observations));
  write_text_file(p.landuse, serialize_landuse(data.landuse));
  write_text_file(p.manifest, serialize_category_manifest(data.manifest));
  write_text_file(p.elevation, serialize_elevation(data.elevation));
  write_text_file(p.areas, serialize_areas(data.areas));
}

} // namespace vinerisk
