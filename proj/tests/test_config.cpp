#include "support.hpp"

#include "vinerisk/config.hpp"
#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <doctest.h>

using namespace vinerisk;

TEST_SUITE("config") {

TEST_CASE("defaults") {
  const auto c = parse_config_text("");
  CHECK(c.default_cell_size_m == 20000.0);
  CHECK(c.grid.min_cell_size_m == 500.0);
  CHECK(c.grid.max_cell_size_m == 200000.0);
  CHECK(c.glyph.min_radius_px == 16.0);
  CHECK(c.instances.percentile == 0.8);
  CHECK(c.instances.sampling.radius_m == 5000.0);
  CHECK(c.hyper.forest_trees == 100);
  CHECK(c.hyper.stacking_folds == 5);
  CHECK(c.manifest_path.empty());
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("keys, comments and whitespace") {
  const auto c = parse_config_text(
      "# tuned run\n"
      "grid.default_cell_size_m = 5000\n"
      "  learn.forest_trees=40   # fewer trees\n"
      "\n"
      "glyph.color_endangered = 200, 0, 0\n"
      "features.landuse_radius_m = 2500\n"
      "synth.wood_shift_months = 2\n");
  CHECK(c.default_cell_size_m == 5000.0);
  CHECK(c.hyper.forest_trees == 40);
  CHECK(c.colors.endangered == Rgb{200, 0, 0});
  CHECK(c.instances.sampling.radius_m == 2500.0);
  CHECK(c.synth.wood_shift_months == 2);
}

TEST_CASE("every documented key parses") {
  const auto keys = config_keys();
  CHECK(keys.size() >= 20);
  for (const auto& key : keys) {
    CAPTURE(key);
    std::string value = "2";
    if (key.starts_with("glyph.color")) value = "1,2,3";
    else if (key == "categories.manifest") value = "m.csv";
    else if (key == "features.percentile") value = "0.5";
    else if (key.starts_with("grid.") || key.starts_with("glyph.")) continue;
    else if (key == "learn.meta_learning_rate" || key == "learn.nb_variance_floor" ||
             key == "learn.meta_l2")
      value = "0.01";
    CHECK_NOTHROW(parse_config_text(key + " = " + value));
  }
}

TEST_CASE("unknown keys and malformed lines carry their line number") {
  try {
    parse_config_text("learn.forest_trees = 10\n\ngrid.bogus = 3\n", "run.cfg");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 3);
    CHECK(e.column() == "grid.bogus");
  }
  CHECK_THROWS_AS(parse_config_text("just words\n"), ParseError);
  try {
    parse_config_text("learn.forest_trees = many\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.row() == 1);
    CHECK(e.value() == "many");
  }
  CHECK_THROWS_AS(parse_config_text("glyph.color_safe = 1,2\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("glyph.color_safe = 1,2,300\n"), InputError);
}

TEST_CASE("inconsistent ranges are rejected") {
  CHECK_THROWS_AS(parse_config_text("grid.default_cell_size_m = 300\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("grid.min_cell_size_m = 5000\ngrid.max_cell_size_m = 1000\n"),
                  InputError);
  CHECK_THROWS_AS(parse_config_text("glyph.min_radius_px = 8\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("glyph.default_radius_px = 500\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("features.percentile = 1\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("features.landuse_radius_m = 0\n"), InputError);
  CHECK_THROWS_AS(parse_config_text("learn.forest_trees = 0\n"), InputError);
}

TEST_CASE("relative manifest paths resolve against the config file") {
  const auto dir = testing::scratch_dir("config");
  std::filesystem::create_directories(dir / "sub");
  write_text_file(dir / "sub" / "run.cfg", "categories.manifest = codes.csv\n");
  CHECK(load_config(dir / "sub" / "run.cfg").manifest_path == dir / "sub" / "codes.csv");
  write_text_file(dir / "abs.cfg", "categories.manifest = /opt/codes.csv\n");
  CHECK(load_config(dir / "abs.cfg").manifest_path == "/opt/codes.csv");
  CHECK_THROWS_AS(load_config(dir / "missing.cfg"), InputError);
  std::filesystem::remove_all(dir);
}

} // TEST_SUITE
