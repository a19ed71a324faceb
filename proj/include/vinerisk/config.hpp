#pragma once

#include "vinerisk/aggregate.hpp"
#include "vinerisk/classifiers.hpp"
#include "vinerisk/features.hpp"
#include "vinerisk/glyph.hpp"
#include "vinerisk/ingest.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace vinerisk {

struct GlyphLimits {
  double min_radius_px = 16.0;
  double max_radius_px = 128.0;
  double default_radius_px = 48.0;
};

struct AppConfig {
  GridLimits grid{};
  double default_cell_size_m = 20000.0;
  GlyphLimits glyph{};
  ColorAnchors colors{};
  /// Empty: the built-in 83-code manifest.
  std::filesystem::path manifest_path;
  InstanceOptions instances{};
  Hyperparameters hyper{};
  SynthConfig synth{};

  /// Throws InputError on inconsistent ranges.
  void validate() const;
};

/**
 * `key = value` lines; `#` starts a comment. Unknown keys are rejected.
 * Keys: grid.min_cell_size_m, grid.max_cell_size_m, grid.default_cell_size_m,
 * glyph.min_radius_px, glyph.max_radius_px, glyph.default_radius_px,
 * glyph.color_endangered, glyph.color_safe, glyph.color_neutral (r,g,b),
 * categories.manifest, features.percentile, features.landuse_radius_m,
 * learn.* (tree_max_depth, tree_min_leaf, forest_trees, forest_max_features,
 * nb_variance_floor, stacking_folds, smote_k, meta_learning_rate,
 * meta_epochs, meta_l2) and synth.* (stations, areas, season_strength,
 * wood_strength, wood_shift_months, wood_peak_factor, wood_threshold,
 * altitude_strength).
 */
AppConfig parse_config_text(std::string_view text, std::string_view source = "config");

/// Relative manifest paths resolve against the config file's directory.
AppConfig load_config(const std::filesystem::path& path);

/// Every recognised key, for documentation and tests.
std::vector<std::string> config_keys();

} // namespace vinerisk
