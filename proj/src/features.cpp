#include "vinerisk/features.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace vinerisk {

FeatureVector assemble_features(int month, double height_m, const LandUseVector& landuse) {
  FeatureVector fv;
  fv(kMonthFeature) = static_cast<double>(month);
  fv(kHeightFeature) = height_m;
  fv.segment<static_cast<int>(kCategoryCount)>(kLandUseOffset) = landuse;
  return fv;
}

namespace {

struct MinMax {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double normalize(double v) const { return hi > lo ? (v - lo) / (hi - lo) : 0.0; }
};

} // namespace

MonthlyScores combine_observations(std::span<const StationObservation> records) {
  if (records.empty()) throw InputError("combine_observations: no observations");
  MinMax trap, berry, egg;
  for (const auto& r : records) {
    trap.add(r.trap_count);
    berry.add(r.berry_infestation);
    egg.add(r.egg_rate);
  }
  std::map<StationMonthKey, std::pair<double, std::size_t>> sums;
  for (const auto& r : records) {
    const double score = trap.normalize(r.trap_count) +
                         berry.normalize(r.berry_infestation) + egg.normalize(r.egg_rate);
    StationMonthKey key{r.station_id, static_cast<int>(r.date.year()),
                        static_cast<int>(static_cast<unsigned>(r.date.month()))};
    auto& acc = sums[key];
    acc.first += score;
    acc.second += 1;
  }
  MonthlyScores out;
  for (auto& [key, acc] : sums)
    out.emplace_hint(out.end(), key, acc.first / static_cast<double>(acc.second));
  return out;
}

double nearest_rank_percentile(std::vector<double> values, double percentile) {
  if (values.empty()) throw InputError("percentile of an empty score list");
  if (!(percentile > 0.0 && percentile < 1.0))
    throw InputError("percentile must lie in (0, 1)");
  const auto n = values.size();
  // Guard against p*n landing a hair above an integer, e.g. 0.7 * 10.
  auto rank = static_cast<std::size_t>(std::ceil(percentile * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                   values.end());
  return values[rank - 1];
}

std::pair<std::vector<LabeledInstance>, LabelingSummary>
label_instances(const MonthlyScores& monthly_scores, double percentile) {
  if (monthly_scores.empty()) throw InputError("label_instances: no monthly scores");
  std::vector<double> scores;
  scores.reserve(monthly_scores.size());
  for (const auto& [key, s] : monthly_scores) scores.push_back(s);

  LabelingSummary summary;
  summary.threshold_value = nearest_rank_percentile(scores, percentile);
  std::vector<LabeledInstance> out;
  out.reserve(monthly_scores.size());
  for (const auto& [key, s] : monthly_scores) {
    LabeledInstance inst;
    inst.key = key;
    inst.features(kMonthFeature) = key.month;
    inst.score = s;
    inst.positive = s > summary.threshold_value;
    (inst.positive ? summary.n_positive : summary.n_negative) += 1;
    out.push_back(std::move(inst));
  }
  summary.n_total = out.size();
  return {std::move(out), summary};
}

LandUseIndex::LandUseIndex(const LandUseMap& map) {
  std::vector<Ring> rings;
  rings.reserve(map.polygons.size());
  categories_.reserve(map.polygons.size());
  for (const auto& p : map.polygons) {
    rings.push_back(p.ring);
    categories_.push_back(p.category);
  }
  index_ = PolygonIndex(std::move(rings));
}

std::optional<std::size_t> LandUseIndex::category_at(const LonLat& p) const {
  auto k = index_.find_first(p);
  if (!k) return std::nullopt;
  return categories_[*k];
}

LandUseVector landuse_fractions(const LonLat& center, const LandUseIndex& index,
                                const LandUseSampling& sampling) {
  if (!(sampling.radius_m > 0.0)) throw InputError("land-use radius must be positive");
  LandUseVector counts = LandUseVector::Zero();
  if (index.category_count() == 0) return counts;
  const DiskLattice lattice(sampling.radius_m, sampling.radius_m * sampling.step_fraction);
  for (const auto& q : lattice.around(center)) {
    if (auto cat = index.category_at(q)) counts(static_cast<Eigen::Index>(*cat)) += 1.0;
  }
  return counts / static_cast<double>(lattice.size());
}

LandUseVector landuse_fractions(const LonLat& center, const LandUseMap& map,
                                const LandUseSampling& sampling) {
  return landuse_fractions(center, LandUseIndex(map), sampling);
}

double height_at(const LonLat& location, const ElevationGrid& grid) {
  const auto ext = grid.extent();
  if (!ext.contains(location))
    throw RangeError("height_at: location (" + format_double(location.lon) + ", " +
                     format_double(location.lat) + ") outside the elevation extent");
  const double dx = (location.lon - grid.origin.lon) / grid.cell_size_deg;
  const double dy = (ext.max_lat - location.lat) / grid.cell_size_deg;
  const auto col = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(dx)) - 1, 0, grid.ncols - 1);
  const auto row = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::ceil(dy)) - 1, 0, grid.nrows - 1);
  const double v = grid.values(row, col);
  if (v == grid.nodata)
    throw NodataError("height_at: nodata cell at row " + std::to_string(row) +
                      ", column " + std::to_string(col));
  return v;
}

std::pair<std::vector<LabeledInstance>, LabelingSummary>
build_instances(std::span<const StationObservation> observations,
                const LandUseMap& landuse, const ElevationGrid& elevation,
                const InstanceOptions& options) {
  auto [instances, summary] =
      label_instances(combine_observations(observations), options.percentile);

  std::unordered_map<std::string, LonLat> station_location;
  for (const auto& r : observations) station_location.try_emplace(r.station_id, r.location);

  const LandUseIndex index(landuse);
  std::unordered_map<std::string, std::pair<double, LandUseVector>> env;
  for (auto& inst : instances) {
    auto it = env.find(inst.key.station_id);
    if (it == env.end()) {
      const LonLat& loc = station_location.at(inst.key.station_id);
      it = env.emplace(inst.key.station_id,
                       std::make_pair(height_at(loc, elevation),
                                      landuse_fractions(loc, index, options.sampling)))
               .first;
    }
    inst.features = assemble_features(inst.key.month, it->second.first, it->second.second);
  }
  return {std::move(instances), summary};
}

namespace {

std::string instance_header() {
  std::string h = "station_id,year,month,score,label,height_m";
  for (std::size_t i = 1; i <= kCategoryCount; ++i) h += ",lu_" + std::to_string(i);
  return h;
}

} // namespace

std::string serialize_instances(std::span<const LabeledInstance> instances) {
  std::string out = instance_header() + "\n";
  for (const auto& inst : instances) {
    out += inst.key.station_id;
    out += ',' + std::to_string(inst.key.year);
    out += ',' + std::to_string(inst.key.month);
    out += ',' + format_double(inst.score);
    out += inst.positive ? ",1" : ",0";
    out += ',' + format_double(inst.features(kHeightFeature));
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(kCategoryCount); ++i)
      out += ',' + format_double(inst.features(kLandUseOffset + i));
    out += '\n';
  }
  return out;
}

std::vector<LabeledInstance> parse_instances_text(std::string_view text,
                                                  std::string_view source) {
  const std::string src(source);
  std::vector<LabeledInstance> out;
  std::size_t row = 0;
  std::size_t start = 0;
  const std::string header = instance_header();
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++row;
    if (row == 1) {
      if (trim(line) != header) throw ParseError(src, 1, "", "", "malformed header");
      continue;
    }
    if (trim(line).empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 6 + kCategoryCount)
      throw ParseError(src, row, "", "", "expected " + std::to_string(6 + kCategoryCount) +
                                             " fields, found " + std::to_string(f.size()));
    LabeledInstance inst;
    inst.key.station_id = std::string(trim(f[0]));
    auto year = parse_int(f[1]);
    auto month = parse_int(f[2]);
    auto score = parse_double(f[3]);
    auto label = parse_int(f[4]);
    auto height = parse_double(f[5]);
    if (!year) throw ParseError(src, row, "year", std::string(f[1]), "not an integer");
    if (!month || *month < 1 || *month > 12)
      throw ParseError(src, row, "month", std::string(f[2]), "must be 1..12");
    if (!score) throw ParseError(src, row, "score", std::string(f[3]), "not a number");
    if (!label || (*label != 0 && *label != 1))
      throw ParseError(src, row, "label", std::string(f[4]), "must be 0 or 1");
    if (!height) throw ParseError(src, row, "height_m", std::string(f[5]), "not a number");
    inst.key.year = static_cast<int>(*year);
    inst.key.month = static_cast<int>(*month);
    inst.score = *score;
    inst.positive = *label == 1;
    LandUseVector lu;
    double total = 0.0;
    for (std::size_t i = 0; i < kCategoryCount; ++i) {
      auto v = parse_double(f[6 + i]);
      if (!v || *v < 0.0 || *v > 1.0)
        throw ParseError(src, row, "lu_" + std::to_string(i + 1), std::string(f[6 + i]),
                         "land-use fraction must lie in [0, 1]");
      lu(static_cast<Eigen::Index>(i)) = *v;
      total += *v;
    }
    if (total > 1.0 + 1e-9)
      throw ParseError(src, row, "", "", "land-use fractions sum above 1");
    inst.features = assemble_features(inst.key.month, *height, lu);
    out.push_back(std::move(inst));
  }
  if (row == 0) throw ParseError(src, 1, "", "", "malformed header");
  return out;
}

std::vector<LabeledInstance> parse_instances(const std::filesystem::path& path) {
  return parse_instances_text(read_text_file(path), path.string());
}

std::string serialize_labeling_summary(const LabelingSummary& s) {
  return "threshold_value=" + format_double(s.threshold_value) +
         "\nn_total=" + std::to_string(s.n_total) +
         "\nn_positive=" + std::to_string(s.n_positive) +
         "\nn_negative=" + std::to_string(s.n_negative) + "\n";
}

Eigen::MatrixXd feature_matrix(std::span<const LabeledInstance> instances) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(instances.size()), kFeatureDim);
  for (std::size_t i = 0; i < instances.size(); ++i)
    X.row(static_cast<Eigen::Index>(i)) = instances[i].features.transpose();
  return X;
}

Eigen::VectorXi label_vector(std::span<const LabeledInstance> instances) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(instances.size()));
  for (std::size_t i = 0; i < instances.size(); ++i)
    y(static_cast<Eigen::Index>(i)) = instances[i].positive ? 1 : 0;
  return y;
}

} // namespace vinerisk
