#include "support.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/ingest.hpp"
#include "vinerisk/text_io.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace vinerisk;

namespace {

constexpr const char* kHeader = "station_id,lon,lat,date,trap_count,berry_pct,egg_pct\n";

std::string one_polygon_landuse(const std::string& code, const Ring& ring) {
  std::string coords;
  for (const auto& p : ring) {
    if (!coords.empty()) coords += ',';
    coords += "[" + format_double(p.lon) + "," + format_double(p.lat) + "]";
  }
  return R"({"type":"FeatureCollection","features":[{"type":"Feature","properties":{"category":")" +
         code + R"("},"geometry":{"type":"Polygon","coordinates":[[)" + coords + "]]}}]}";
}

std::string ascii_grid(int ncols, int nrows, const std::string& rows) {
  return "ncols " + std::to_string(ncols) + "\nnrows " + std::to_string(nrows) +
         "\nxllcorner 7.0\nyllcorner 48.0\ncellsize 0.5\nNODATA_value -9999\n" + rows;
}

} // namespace

TEST_SUITE("ingest") {

TEST_CASE("observation CSV: header-only file yields no records") {
  CHECK(parse_observations_text(kHeader).empty());
}

TEST_CASE("observation CSV: egg rate above 100 percent is accepted") {
  const auto records = parse_observations_text(std::string(kHeader) +
                                               "S1,7.85,48.05,2016-09-14,12,35.0,120.0\n");
  REQUIRE(records.size() == 1);
  const auto& r = records[0];
  CHECK(r.station_id == "S1");
  CHECK(r.location.lon == 7.85);
  CHECK(r.location.lat == 48.05);
  CHECK(r.date == std::chrono::year_month_day{std::chrono::year{2016} / 9 / 14});
  CHECK(r.trap_count == 12.0);
  CHECK(r.berry_infestation == 35.0);
  CHECK(r.egg_rate == 120.0);
}

TEST_CASE("observation CSV: berry infestation above 100 names row and column") {
  const std::string text = std::string(kHeader) + "S1,7.85,48.05,2016-09-14,12,35.0,1.0\n" +
                           "S2,7.85,48.05,2016-09-14,3,135.0,1.0\n";
  try {
    parse_observations_text(text, "obs.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == "berry_pct");
    CHECK(e.value() == "135.0");
    CHECK(std::string(e.what()).find("obs.csv") != std::string::npos);
  }
}

TEST_CASE("observation CSV: malformed input is rejected") {
  CHECK_THROWS_AS(parse_observations_text("station,lon\n"), ParseError);
  CHECK_THROWS_AS(parse_observations_text(""), ParseError);
  CHECK_THROWS_AS(parse_observations_text(std::string(kHeader) + "S1,7.8,48.0,2016-02-30,1,1,1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_observations_text(std::string(kHeader) + "S1,7.8,48.0,2016-02-03,x,1,1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_observations_text(std::string(kHeader) + "S1,7.8,48.0,2016-02-03,1,1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_observations_text(std::string(kHeader) + ",7.8,48.0,2016-02-03,1,1,1\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_observations(std::filesystem::path("/nonexistent/obs.csv")), InputError);
}

TEST_CASE("observation CSV: region filter rejects outside locations") {
  const BoundingBox region{7.0, 47.0, 9.0, 49.0};
  const std::string inside = std::string(kHeader) + "S1,7.5,48.0,2016-02-03,1,1,1\n";
  const std::string outside = std::string(kHeader) + "S1,10.5,48.0,2016-02-03,1,1,1\n";
  CHECK(parse_observations_text(inside, "obs", region).size() == 1);
  CHECK_THROWS_AS(parse_observations_text(outside, "obs", region), ParseError);
}

TEST_CASE("observation CSV: generated rows are accepted or rejected by their invariants") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> value(-30.0, 160.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double trap = std::round(value(rng));
    const double berry = std::round(value(rng) * 10.0) / 10.0;
    const double egg = std::round(value(rng) * 10.0) / 10.0;
    const std::string row = "S9,8.1,48.2,2015-07-01," + format_double(trap) + "," +
                            format_double(berry) + "," + format_double(egg) + "\n";
    const bool valid = trap >= 0 && berry >= 0 && berry <= 100 && egg >= 0;
    if (valid) {
      const auto r = parse_observations_text(std::string(kHeader) + row);
      REQUIRE(r.size() == 1);
      CHECK(r[0].trap_count == trap);
      CHECK(r[0].berry_infestation == berry);
      CHECK(r[0].egg_rate == egg);
    } else {
      try {
        parse_observations_text(std::string(kHeader) + row);
        FAIL("invalid row accepted: " << row);
      } catch (const ParseError& e) {
        const std::string expected = trap < 0 ? "trap_count" : (berry < 0 || berry > 100) ? "berry_pct" : "egg_pct";
        CHECK(e.column() == expected);
        CHECK(e.row() == 2);
      }
    }
  }
}

TEST_CASE("category manifest: exactly 83 unique codes") {
  const auto manifest = default_category_manifest();
  CHECK(manifest.size() == kCategoryCount);
  CHECK(manifest.index_of("FOREST_CONIFEROUS").has_value());
  CHECK(!manifest.index_of("BOGUS").has_value());

  std::string text = serialize_category_manifest(manifest);
  CHECK(parse_category_manifest_text(text) == manifest);

  std::vector<std::string> codes = manifest.codes();
  codes.pop_back();
  CHECK_THROWS_AS(CategoryManifest{codes}, InputError);
  codes.push_back(codes.front());
  CHECK_THROWS_AS(CategoryManifest{codes}, InputError);
}

TEST_CASE("category manifest: display names") {
  CHECK(display_name_for("FOREST_MIXED") == "Forest mixed");
  CHECK(is_woodland_code("FOREST_MIXED"));
  CHECK(is_woodland_code("WOODLAND_SHRUB"));
  CHECK(!is_woodland_code("VINEYARD"));
}

TEST_CASE("land use: one square polygon with a manifest code") {
  const auto manifest = default_category_manifest();
  const auto map = parse_landuse_text(
      one_polygon_landuse("FOREST_CONIFEROUS", testing::square(7.0, 48.0, 0.1)), manifest);
  REQUIRE(map.polygons.size() == 1);
  CHECK(map.polygons[0].category == *manifest.index_of("FOREST_CONIFEROUS"));
  CHECK(map.polygons[0].ring.size() == 5);
}

TEST_CASE("land use: unknown category code is named in the error") {
  const auto manifest = default_category_manifest();
  try {
    parse_landuse_text(one_polygon_landuse("BOGUS", testing::square(7.0, 48.0, 0.1)), manifest);
    FAIL("expected an unknown-category error");
  } catch (const ParseError& e) {
    CHECK(e.value() == "BOGUS");
  }
}

TEST_CASE("land use: unclosed ring and malformed documents are rejected") {
  const auto manifest = default_category_manifest();
  Ring open_ring = testing::square(7.0, 48.0, 0.1);
  open_ring.back() = {7.05, 48.05};
  CHECK_THROWS_AS(parse_landuse_text(one_polygon_landuse("FOREST_MIXED", open_ring), manifest),
                  ParseError);
  CHECK_THROWS_AS(parse_landuse_text("{not json", manifest), InputError);
  CHECK_THROWS_AS(parse_landuse_text(R"({"type":"Feature"})", manifest), InputError);
}

TEST_CASE("elevation grid: 2x2 heights") {
  const auto grid = parse_elevation_text(ascii_grid(2, 2, "100 110\n120 130\n"));
  CHECK(grid.ncols == 2);
  CHECK(grid.nrows == 2);
  CHECK(grid.values.size() == 4);
  CHECK(grid.values(0, 0) == 100.0);
  CHECK(grid.values(1, 1) == 130.0);
  CHECK(grid.extent() == BoundingBox{7.0, 48.0, 8.0, 49.0});
}

TEST_CASE("elevation grid: dimension mismatch") {
  CHECK_THROWS_AS(parse_elevation_text(ascii_grid(3, 2, "1 2\n3 4\n")), InputError);
  CHECK_THROWS_AS(parse_elevation_text(ascii_grid(2, 2, "1 2\n3 4\n5 6\n")), InputError);
  CHECK_THROWS_AS(parse_elevation_text(ascii_grid(2, 2, "1 2\n3 x\n")), ParseError);
  CHECK_THROWS_AS(parse_elevation_text("ncols 2\nnrows 2\n1 2\n3 4\n"), InputError);
}

TEST_CASE("elevation grid: nodata cells survive a round trip") {
  const auto grid = parse_elevation_text(ascii_grid(2, 2, "100 -9999\n-9999 130\n"));
  CHECK(grid.values(0, 1) == grid.nodata);
  const auto again = parse_elevation_text(serialize_elevation(grid));
  CHECK(again == grid);
  CHECK(again.values(1, 0) == -9999.0);
}

TEST_CASE("area polygon: centroid is the mean of the distinct vertices") {
  const Ring ring{{0, 0}, {4, 0}, {4, 2}, {1, 3}, {0, 0}};
  const AreaPolygon area("V1", ring);
  // Closing vertex excluded: (0+4+4+1)/4, (0+0+2+3)/4.
  CHECK(area.centroid().lon == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(area.centroid().lat == doctest::Approx(1.25).epsilon(1e-15));
  CHECK_THROWS_AS(AreaPolygon("", ring), InputError);
  CHECK_THROWS_AS(AreaPolygon("V2", Ring{{0, 0}, {1, 0}, {0, 1}}), InputError);
}

TEST_CASE("area GeoJSON: duplicate ids are rejected") {
  const std::vector<AreaPolygon> areas{AreaPolygon("A", testing::square(7, 48, 0.01)),
                                       AreaPolygon("A", testing::square(7.1, 48, 0.01))};
  CHECK_THROWS_AS(parse_areas_text(serialize_areas(areas)), ParseError);
}

TEST_CASE("file formats round-trip on synthetic data") {
  auto config = testing::small_synth_config();
  config.stations = 40;
  config.areas = 25;
  const auto data = generate_synthetic(config, 3);

  const auto obs = parse_observations_text(serialize_observations(data.observations));
  CHECK(obs == data.observations);
  CHECK(serialize_observations(obs) == serialize_observations(data.observations));

  const auto lu = parse_landuse_text(serialize_landuse(data.landuse), data.manifest);
  CHECK(lu == data.landuse);

  const auto elev = parse_elevation_text(serialize_elevation(data.elevation));
  CHECK(elev == data.elevation);

  const auto areas = parse_areas_text(serialize_areas(data.areas));
  CHECK(areas == data.areas);
  for (std::size_t k = 0; k < areas.size(); ++k)
    CHECK(areas[k].centroid() == data.areas[k].centroid());
}

TEST_CASE("synthetic data: same seed gives byte-identical files") {
  auto config = testing::small_synth_config();
  config.stations = 60;
  config.areas = 30;
  for (std::uint64_t seed : {1u, 7u, 99u}) {
    const auto a = generate_synthetic(config, seed);
    const auto b = generate_synthetic(config, seed);
    CHECK(serialize_observations(a.observations) == serialize_observations(b.observations));
    CHECK(serialize_landuse(a.landuse) == serialize_landuse(b.landuse));
    CHECK(serialize_elevation(a.elevation) == serialize_elevation(b.elevation));
    CHECK(serialize_areas(a.areas) == serialize_areas(b.areas));
  }
  const auto c = generate_synthetic(config, 2);
  const auto d = generate_synthetic(config, 3);
  CHECK(serialize_observations(c.observations) != serialize_observations(d.observations));
}

TEST_CASE("synthetic data: default configuration has 867 stations") {
  SynthConfig config;
  CHECK(config.stations == 867);
  config.areas = 10;
  config.lattice_step_fraction = 1.0 / 8.0;
  const auto data = generate_synthetic(config, 7);
  CHECK(data.station_ids.size() == 867);
  std::set<std::string> seen;
  for (const auto& r : data.observations) {
    seen.insert(r.station_id);
    CHECK(config.region.contains(r.location));
    CHECK(r.trap_count >= 0);
    CHECK(r.berry_infestation >= 0);
    CHECK(r.berry_infestation <= 100);
    CHECK(r.egg_rate >= 0);
  }
  CHECK(seen.size() <= 867);
  CHECK(seen.size() > 600);
}

TEST_CASE("synthetic data: monitoring is irregular") {
  SynthConfig config;
  config.areas = 10;
  config.lattice_step_fraction = 1.0 / 8.0;
  const auto data = generate_synthetic(config, 7);
  std::map<std::string, std::set<int>> days;
  for (const auto& r : data.observations)
    days[r.station_id].insert(static_cast<int>(std::chrono::sys_days{r.date}.time_since_epoch().count()));
  std::size_t single = 0, long_term = 0;
  for (const auto& [id, d] : days) {
    if (d.size() == 1) ++single;
    if (*d.rbegin() - *d.begin() > 365) ++long_term;
  }
  CHECK(single > 50);
  CHECK(long_term > 10);
}

TEST_CASE("synthetic effects: intensity rises into late season, earlier for woodland") {
  const SynthConfig config;
  double early = 0.0, late = 0.0;
  for (int m = 1; m <= 6; ++m) early += expected_intensity(config, false, 200.0, m) / 6.0;
  for (int m = 8; m <= 12; ++m) late += expected_intensity(config, false, 200.0, m) / 5.0;
  CHECK(late > 2.0 * early);
  for (int m = 8; m < 12; ++m)
    CHECK(expected_intensity(config, false, 200.0, m + 1) >=
          expected_intensity(config, false, 200.0, m));

  auto first_above = [&](bool woody, double level) {
    for (int m = 1; m <= 12; ++m)
      if (expected_intensity(config, woody, 200.0, m) > level) return m;
    return 13;
  };
  const double half_peak = 0.5 * config.peak_intensity;
  CHECK(first_above(true, half_peak) + 2 <= first_above(false, half_peak));
  CHECK(expected_intensity(config, false, 900.0, 10) < expected_intensity(config, false, 200.0, 10));
}

TEST_CASE("synthetic effects disabled: monthly trap means are flat") {
  auto config = testing::small_synth_config();
  config.stations = 400;
  config.areas = 10;
  config.season_strength = 0.0;
  config.wood_strength = 0.0;
  const double expected = expected_trap_count(config, true, 300.0, 1);
  for (int m = 1; m <= 12; ++m) {
    CHECK(expected_trap_count(config, false, 300.0, m) == doctest::Approx(expected));
    CHECK(expected_trap_count(config, true, 800.0, m) == doctest::Approx(expected));
  }

  const auto data = generate_synthetic(config, 21);
  std::array<double, 12> sum{};
  std::array<double, 12> count{};
  for (const auto& r : data.observations) {
    const auto m = static_cast<unsigned>(r.date.month()) - 1;
    sum[m] += r.trap_count;
    count[m] += 1;
  }
  for (std::size_t m = 0; m < 12; ++m) {
    REQUIRE(count[m] > 30);
    const double mean = sum[m] / count[m];
    const double se = std::sqrt(expected / count[m]); // Poisson variance equals its mean
    CHECK(std::abs(mean - expected) < 5.0 * se);
  }
}

TEST_CASE("synthetic config validation") {
  SynthConfig config;
  config.stations = 0;
  CHECK_THROWS_AS(config.validate(), InputError);
  config = SynthConfig{};
  config.region = {9.0, 48.0, 8.0, 49.0};
  CHECK_THROWS_AS(config.validate(), InputError);
  config = SynthConfig{};
  config.wood_strength = -1.0;
  CHECK_THROWS_AS(generate_synthetic(config, 1), InputError);
}

TEST_CASE("synthetic data written to disk parses back") {
  auto config = testing::small_synth_config();
  config.stations = 30;
  config.areas = 12;
  const auto data = generate_synthetic(config, 4);
  const auto dir = testing::scratch_dir("ingest-write");
  write_synthetic(data, dir);
  const auto paths = DatasetPaths::in(dir);
  const auto manifest = load_category_manifest(paths.manifest);
  CHECK(manifest == data.manifest);
  CHECK(parse_observations(paths.observations) == data.observations);
  CHECK(parse_landuse(paths.landuse, manifest) == data.landuse);
  CHECK(parse_elevation(paths.elevation) == data.elevation);
  CHECK(parse_areas(paths.areas) == data.areas);
  std::filesystem::remove_all(dir);
}

} // TEST_SUITE
