#include "vinerisk/ingest.hpp"

#include "vinerisk/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace vinerisk {

namespace {

constexpr double kKmPerDegLat = kEarthMeanRadiusM * kPi / 180.0 / 1000.0;

struct Bump {
  LonLat center;
  double sigma_km;
  double amplitude;
};

struct LocalFrame {
  double km_per_deg_lon;
  double km_per_deg_lat = kKmPerDegLat;

  explicit LocalFrame(const BoundingBox& region)
      : km_per_deg_lon(kKmPerDegLat *
                       std::cos(deg2rad(0.5 * (region.min_lat + region.max_lat)))) {}

  double dist2_km(const LonLat& a, const LonLat& b) const {
    const double dx = (a.lon - b.lon) * km_per_deg_lon;
    const double dy = (a.lat - b.lat) * km_per_deg_lat;
    return dx * dx + dy * dy;
  }
};

double bump_field(const std::vector<Bump>& bumps, const LocalFrame& frame,
                  const LonLat& p) {
  double v = 0.0;
  for (const auto& b : bumps)
    v += b.amplitude *
         std::exp(-frame.dist2_km(p, b.center) / (2.0 * b.sigma_km * b.sigma_km));
  return v;
}

LonLat uniform_point(std::mt19937_64& rng, const BoundingBox& box) {
  std::uniform_real_distribution<double> ulon(box.min_lon, box.max_lon);
  std::uniform_real_distribution<double> ulat(box.min_lat, box.max_lat);
  const double lon = ulon(rng);
  return {lon, ulat(rng)};
}

// Weighted choice over manifest positions.
struct CategorySampler {
  std::vector<std::size_t> positions;
  std::discrete_distribution<std::size_t> dist;

  std::size_t operator()(std::mt19937_64& rng) { return positions[dist(rng)]; }
};

CategorySampler make_sampler(const CategoryManifest& m,
                             const std::vector<std::pair<std::string, double>>& weighted,
                             double rest_weight, bool woodland) {
  CategorySampler s;
  std::vector<double> w;
  std::vector<bool> used(m.size(), false);
  for (const auto& [code, weight] : weighted) {
    auto idx = m.index_of(code);
    if (!idx) continue;
    s.positions.push_back(*idx);
    w.push_back(weight);
    used[*idx] = true;
  }
  if (rest_weight > 0.0) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (!used[i] && is_woodland_code(m.codes()[i]) == woodland) rest.push_back(i);
    for (auto i : rest) {
      s.positions.push_back(i);
      w.push_back(rest_weight / static_cast<double>(rest.size()));
    }
  }
  s.dist = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  return s;
}

Ring square_ring(double lon0, double lat0, double lon1, double lat1) {
  return {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}};
}

double cell_value(const ElevationGrid& g, const LonLat& p) {
  auto col = static_cast<std::int64_t>(std::floor((p.lon - g.origin.lon) / g.cell_size_deg));
  auto row_s = static_cast<std::int64_t>(std::floor((p.lat - g.origin.lat) / g.cell_size_deg));
  col = std::clamp<std::int64_t>(col, 0, g.ncols - 1);
  row_s = std::clamp<std::int64_t>(row_s, 0, g.nrows - 1);
  return g.values(g.nrows - 1 - row_s, col);
}

} // namespace

void SynthConfig::validate() const {
  if (stations <= 0) throw InputError("synth: station count must be positive");
  if (areas <= 0) throw InputError("synth: area count must be positive");
  if (clusters <= 0) throw InputError("synth: cluster count must be positive");
  if (!region.valid()) throw InputError("synth: region bounding box is inverted or empty");
  if (!(block_deg_lon > 0) || !(block_deg_lat > 0) || !(elevation_cell_deg > 0))
    throw InputError("synth: block and cell sizes must be positive");
  if (first_year > last_year) throw InputError("synth: first_year after last_year");
  if (min_visit_interval_days <= 0 || max_visit_interval_days < min_visit_interval_days)
    throw InputError("synth: invalid visit interval range");
  if (berries_per_sample <= 0) throw InputError("synth: berries_per_sample must be positive");
  if (wood_shift_months < 0) throw InputError("synth: wood_shift_months must be >= 0");
  if (season_strength < 0 || wood_strength < 0 || altitude_strength < 0 || wood_peak_factor < 0)
    throw InputError("synth: effect strengths must be >= 0");
}

double season_curve(int month) noexcept {
  static constexpr std::array<double, 12> curve = {0.0,  0.0,  0.0, 0.0, 0.05, 0.15,
                                                   0.35, 0.6, 0.85, 1.0, 1.0,  1.0};
  return curve[static_cast<std::size_t>(std::clamp(month, 1, 12) - 1)];
}

double expected_intensity(const SynthConfig& config, bool woody, double height_m,
                          int month) {
  double season = season_curve(month);
  if (woody) {
    const double w = std::clamp(config.wood_strength, 0.0, 1.0);
    season = (1.0 - w) * season +
             w * season_curve(std::min(12, month + config.wood_shift_months));
    season *= config.wood_peak_factor;
  }
  const double altitude = std::clamp(
      1.0 - config.altitude_strength * (height_m - 150.0) / 900.0, 0.15, 1.0);
  return config.baseline_intensity +
         config.season_strength * config.peak_intensity * season * altitude;
}

double expected_trap_count(const SynthConfig& config, bool woody, double height_m,
                           int month) {
  return config.traps_per_intensity * expected_intensity(config, woody, height_m, month);
}

SyntheticDataset generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const LocalFrame frame(config.region);
  const BoundingBox& region = config.region;

  SyntheticDataset out;
  out.manifest = default_category_manifest();
  out.landuse.categories = out.manifest;

  // Woodiness: Gaussian forest patches plus an eastward rise towards the hills.
  std::vector<Bump> forest;
  for (int i = 0; i < config.forest_patches; ++i) {
    const LonLat c = uniform_point(rng, region);
    std::uniform_real_distribution<double> sig(3.0, 9.0), amp(0.8, 1.3);
    const double s = sig(rng);
    forest.push_back({c, s, amp(rng)});
  }
  const double lon_span = region.max_lon - region.min_lon;
  auto woodiness = [&](const LonLat& p) {
    const double east = (p.lon - region.min_lon) / lon_span;
    return bump_field(forest, frame, p) + 0.35 * east * east;
  };

  // Land-use blocks, row by row from the south-west corner.
  auto forest_sampler = make_sampler(out.manifest,
                                     {{"FOREST_DECIDUOUS", 0.35},
                                      {"FOREST_CONIFEROUS", 0.30},
                                      {"FOREST_MIXED", 0.25},
                                      {"WOODLAND_COPSE", 0.06},
                                      {"WOODLAND_SHRUB", 0.04}},
                                     0.0, true);
  auto open_sampler = make_sampler(out.manifest,
                                   {{"AGRI_ARABLE", 0.30},
                                    {"AGRI_GRASSLAND", 0.15},
                                    {"AGRI_VINEYARD", 0.15},
                                    {"AGRI_ORCHARD", 0.06},
                                    {"SETTLEMENT_RESIDENTIAL", 0.07},
                                    {"AGRI_PASTURE", 0.05}},
                                   0.22, false);
  const auto ncols_lu = static_cast<long>(std::ceil(lon_span / config.block_deg_lon));
  const auto nrows_lu = static_cast<long>(
      std::ceil((region.max_lat - region.min_lat) / config.block_deg_lat));
  for (long r = 0; r < nrows_lu; ++r) {
    for (long c = 0; c < ncols_lu; ++c) {
      const double lon0 = region.min_lon + static_cast<double>(c) * config.block_deg_lon;
      const double lat0 = region.min_lat + static_cast<double>(r) * config.block_deg_lat;
      const double lon1 = lon0 + config.block_deg_lon;
      const double lat1 = lat0 + config.block_deg_lat;
      const double u_cover = unit(rng);
      const double u_forest = unit(rng);
      if (u_cover < config.uncovered_fraction) continue;
      const LonLat mid{0.5 * (lon0 + lon1), 0.5 * (lat0 + lat1)};
      const double p_forest = std::clamp(woodiness(mid) - 0.1, 0.03, 0.92);
      const std::size_t cat =
          u_forest < p_forest ? forest_sampler(rng) : open_sampler(rng);
      out.landuse.polygons.push_back({square_ring(lon0, lat0, lon1, lat1), cat});
    }
  }

  // Elevation: lowland in the south rising northwards, plus hills. Kept
  // independent of woodiness so the altitude effect does not mask the
  // woodland effect.
  std::vector<Bump> hills;
  for (int i = 0; i < 12; ++i) {
    const LonLat c = uniform_point(rng, region);
    std::uniform_real_distribution<double> sig(4.0, 12.0), amp(-60.0, 120.0);
    const double s = sig(rng);
    hills.push_back({c, s, amp(rng)});
  }
  auto& grid = out.elevation;
  grid.origin = {region.min_lon, region.min_lat};
  grid.cell_size_deg = config.elevation_cell_deg;
  grid.ncols = static_cast<std::int64_t>(std::ceil(lon_span / grid.cell_size_deg));
  grid.nrows = static_cast<std::int64_t>(
      std::ceil((region.max_lat - region.min_lat) / grid.cell_size_deg));
  grid.nodata = -9999.0;
  grid.values.resize(grid.nrows, grid.ncols);
  for (std::int64_t r = 0; r < grid.nrows; ++r) {
    for (std::int64_t c = 0; c < grid.ncols; ++c) {
      const LonLat p{grid.origin.lon + (static_cast<double>(c) + 0.5) * grid.cell_size_deg,
                     grid.origin.lat + (static_cast<double>(grid.nrows - 1 - r) + 0.5) *
                                           grid.cell_size_deg};
      const double north = (p.lat - region.min_lat) / (region.max_lat - region.min_lat);
      const double h = 160.0 + 520.0 * north * north + bump_field(hills, frame, p);
      grid.values(r, c) = std::round(std::max(90.0, h));
    }
  }

  // Wine-growing clusters, alternating between wooded and open surroundings so
  // both station populations are present.
  const double margin_lon = config.edge_margin_km / frame.km_per_deg_lon;
  const double margin_lat = config.edge_margin_km / frame.km_per_deg_lat;
  const BoundingBox inner{region.min_lon + margin_lon, region.min_lat + margin_lat,
                          region.max_lon - margin_lon, region.max_lat - margin_lat};
  if (!inner.valid()) throw InputError("synth: region too small for the edge margin");
  std::vector<LonLat> clusters;
  for (int i = 0; i < config.clusters; ++i) {
    const bool want_wooded = (i % 2) == 0;
    LonLat c = uniform_point(rng, inner);
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double w = woodiness(c);
      if (want_wooded ? w > 0.55 : w < 0.2) break;
      c = uniform_point(rng, inner);
    }
    clusters.push_back(c);
  }
  std::uniform_int_distribution<int> pick_cluster(0, config.clusters - 1);
  std::normal_distribution<double> jitter(0.0, config.cluster_sigma_km);
  auto place = [&]() {
    const LonLat& c = clusters[static_cast<std::size_t>(pick_cluster(rng))];
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double dx = jitter(rng);
      const double dy = jitter(rng);
      const LonLat p{c.lon + dx / frame.km_per_deg_lon, c.lat + dy / frame.km_per_deg_lat};
      if (inner.contains(p)) return p;
    }
    return c;
  };

  std::vector<Ring> lu_rings;
  std::vector<bool> lu_wood;
  lu_rings.reserve(out.landuse.polygons.size());
  for (const auto& p : out.landuse.polygons) {
    lu_rings.push_back(p.ring);
    lu_wood.push_back(is_woodland_code(out.manifest.codes()[p.category]));
  }
  const PolygonIndex lu_index(std::move(lu_rings));
  const DiskLattice lattice(5000.0, 5000.0 * config.lattice_step_fraction);
  auto woodland_fraction = [&](const LonLat& center) {
    std::size_t hits = 0;
    for (const auto& q : lattice.around(center)) {
      auto k = lu_index.find_first(q);
      if (k && lu_wood[*k]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(lattice.size());
  };

  // Stations and their monitoring campaigns.
  using namespace std::chrono;
  const sys_days first_day{year{config.first_year} / January / 1};
  const sys_days last_day{year{config.last_year} / December / 31};
  const auto span_days = (last_day - first_day).count();
  std::uniform_int_distribution<long> start_dist(0, span_days);
  std::exponential_distribution<double> duration_dist(1.0 / config.mean_active_days);
  std::uniform_int_distribution<int> long_term_dist(365, config.max_active_days);
  std::uniform_int_distribution<int> interval_dist(config.min_visit_interval_days,
                                                   config.max_visit_interval_days);
  const int n_berries = config.berries_per_sample;

  for (int s = 0; s < config.stations; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "S%04d", s + 1);
    const LonLat loc = place();
    const double wood = woodland_fraction(loc);
    const bool woody = wood > config.wood_threshold;
    const double height = cell_value(grid, loc);
    out.station_ids.emplace_back(id);
    out.station_woodland.push_back(wood);
    out.station_woody.push_back(woody);
    out.station_height.push_back(height);

    const double u_kind = unit(rng);
    long duration = 0;
    if (u_kind < config.single_day_fraction) {
      duration = 0;
    } else if (u_kind < config.single_day_fraction + config.long_term_fraction) {
      duration = long_term_dist(rng);
    } else {
      duration = std::min<long>(config.max_active_days,
                                static_cast<long>(std::floor(duration_dist(rng))) + 1);
    }
    const sys_days start = first_day + days{start_dist(rng)};
    const sys_days end = std::min(last_day, start + days{duration});
    const int interval = interval_dist(rng);
    for (sys_days d = start; d <= end; d += days{interval}) {
      const year_month_day ymd{d};
      const int month = static_cast<int>(static_cast<unsigned>(ymd.month()));
      const double lambda = expected_intensity(config, woody, height, month);
      std::poisson_distribution<long> traps(config.traps_per_intensity * lambda);
      std::binomial_distribution<int> berries(
          n_berries, 1.0 - std::exp(-config.berry_hazard * lambda));
      std::poisson_distribution<long> eggs(n_berries *
                                           config.eggs_per_berry_per_intensity * lambda);
      StationObservation rec;
      rec.station_id = id;
      rec.location = loc;
      rec.date = ymd;
      rec.trap_count = static_cast<double>(traps(rng));
      rec.berry_infestation = 100.0 * berries(rng) / n_berries;
      rec.egg_rate = 100.0 * static_cast<double>(eggs(rng)) / n_berries;
      out.observations.push_back(std::move(rec));
    }
  }

  // Vineyard polygons: small irregular hexagons around cluster positions.
  std::uniform_real_distribution<double> radius_m(60.0, 220.0);
  std::uniform_real_distribution<double> wobble(0.75, 1.25);
  std::uniform_real_distribution<double> rotation(0.0, 2.0 * kPi);
  for (int a = 0; a < config.areas; ++a) {
    char id[16];
    std::snprintf(id, sizeof id, "A%05d", a + 1);
    const LonLat c = place();
    const double rad = radius_m(rng);
    const double rot = rotation(rng);
    Ring ring;
    for (int k = 0; k < 6; ++k) {
      const double ang = rot + 2.0 * kPi * k / 6.0;
      const double r_km = rad * wobble(rng) / 1000.0;
      ring.push_back({c.lon + r_km * std::cos(ang) / frame.km_per_deg_lon,
                      c.lat + r_km * std::sin(ang) / frame.km_per_deg_lat});
    }
    ring.push_back(ring.front());
    out.areas.emplace_back(id, std::move(ring));
  }
  return out;
}

} // namespace vinerisk
