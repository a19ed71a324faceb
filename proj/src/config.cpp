#include "vinerisk/config.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <functional>
#include <map>

namespace vinerisk {

namespace {

using Setter = std::function<void(AppConfig&, std::string_view, const std::string&)>;

std::string fail(const std::string& key, std::string_view value, const char* expected) {
  return "config key '" + key + "': '" + std::string(value) + "' is not " + expected;
}

Setter real(double AppConfig::*field) {
  return [field](AppConfig& c, std::string_view v, const std::string& key) {
    auto d = parse_double(v);
    if (!d) throw InputError(fail(key, v, "a number"));
    c.*field = *d;
  };
}

template <typename Part, typename T>
Setter nested(Part AppConfig::*part, T Part::*field) {
  return [part, field](AppConfig& c, std::string_view v, const std::string& key) {
    if constexpr (std::is_integral_v<T>) {
      auto i = parse_int(v);
      if (!i) throw InputError(fail(key, v, "an integer"));
      (c.*part).*field = static_cast<T>(*i);
    } else {
      auto d = parse_double(v);
      if (!d) throw InputError(fail(key, v, "a number"));
      (c.*part).*field = *d;
    }
  };
}

Setter color(Rgb ColorAnchors::*field) {
  return [field](AppConfig& c, std::string_view v, const std::string& key) {
    const auto parts = split_fields(v);
    if (parts.size() != 3) throw InputError(fail(key, v, "an r,g,b triple"));
    std::array<std::uint8_t, 3> rgb{};
    for (std::size_t i = 0; i < 3; ++i) {
      auto x = parse_int(parts[i]);
      if (!x || *x < 0 || *x > 255) throw InputError(fail(key, v, "an r,g,b triple"));
      rgb[i] = static_cast<std::uint8_t>(*x);
    }
    c.colors.*field = {rgb[0], rgb[1], rgb[2]};
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"grid.min_cell_size_m", nested(&AppConfig::grid, &GridLimits::min_cell_size_m)},
      {"grid.max_cell_size_m", nested(&AppConfig::grid, &GridLimits::max_cell_size_m)},
      {"grid.default_cell_size_m", real(&AppConfig::default_cell_size_m)},
      {"glyph.min_radius_px", nested(&AppConfig::glyph, &GlyphLimits::min_radius_px)},
      {"glyph.max_radius_px", nested(&AppConfig::glyph, &GlyphLimits::max_radius_px)},
      {"glyph.default_radius_px", nested(&AppConfig::glyph, &GlyphLimits::default_radius_px)},
      {"glyph.color_endangered", color(&ColorAnchors::endangered)},
      {"glyph.color_safe", color(&ColorAnchors::safe)},
      {"glyph.color_neutral", color(&ColorAnchors::neutral)},
      {"categories.manifest",
       [](AppConfig& c, std::string_view v, const std::string&) { c.manifest_path = std::string(v); }},
      {"features.percentile", nested(&AppConfig::instances, &InstanceOptions::percentile)},
      {"features.landuse_radius_m",
       [](AppConfig& c, std::string_view v, const std::string& key) {
         auto d = parse_double(v);
         if (!d) throw InputError(fail(key, v, "a number"));
         c.instances.sampling.radius_m = *d;
       }},
      {"learn.tree_max_depth", nested(&AppConfig::hyper, &Hyperparameters::tree_max_depth)},
      {"learn.tree_min_leaf", nested(&AppConfig::hyper, &Hyperparameters::tree_min_leaf)},
      {"learn.forest_trees", nested(&AppConfig::hyper, &Hyperparameters::forest_trees)},
      {"learn.forest_max_features", nested(&AppConfig::hyper, &Hyperparameters::forest_max_features)},
      {"learn.nb_variance_floor", nested(&AppConfig::hyper, &Hyperparameters::nb_variance_floor)},
      {"learn.stacking_folds", nested(&AppConfig::hyper, &Hyperparameters::stacking_folds)},
      {"learn.smote_k", nested(&AppConfig::hyper, &Hyperparameters::smote_k)},
      {"learn.meta_learning_rate", nested(&AppConfig::hyper, &Hyperparameters::meta_learning_rate)},
      {"learn.meta_epochs", nested(&AppConfig::hyper, &Hyperparameters::meta_epochs)},
      {"learn.meta_l2", nested(&AppConfig::hyper, &Hyperparameters::meta_l2)},
      {"synth.stations", nested(&AppConfig::synth, &SynthConfig::stations)},
      {"synth.areas", nested(&AppConfig::synth, &SynthConfig::areas)},
      {"synth.season_strength", nested(&AppConfig::synth, &SynthConfig::season_strength)},
      {"synth.wood_strength", nested(&AppConfig::synth, &SynthConfig::wood_strength)},
      {"synth.wood_shift_months", nested(&AppConfig::synth, &SynthConfig::wood_shift_months)},
      {"synth.wood_peak_factor", nested(&AppConfig::synth, &SynthConfig::wood_peak_factor)},
      {"synth.wood_threshold", nested(&AppConfig::synth, &SynthConfig::wood_threshold)},
      {"synth.altitude_strength", nested(&AppConfig::synth, &SynthConfig::altitude_strength)},
  };
  return table;
}

} // namespace

void AppConfig::validate() const {
  if (!(grid.min_cell_size_m > 0.0 && grid.min_cell_size_m <= grid.max_cell_size_m))
    throw InputError("config: grid cell-size range is empty or non-positive");
  if (!(default_cell_size_m >= grid.min_cell_size_m && default_cell_size_m <= grid.max_cell_size_m))
    throw InputError("config: default cell size outside the grid range");
  if (!(glyph.min_radius_px >= kMinGlyphRadiusPx && glyph.min_radius_px <= glyph.max_radius_px))
    throw InputError("config: glyph radius range must start at 16 px or more and be non-empty");
  if (!(glyph.default_radius_px >= glyph.min_radius_px &&
        glyph.default_radius_px <= glyph.max_radius_px))
    throw InputError("config: default glyph radius outside the radius range");
  if (!(instances.percentile > 0.0 && instances.percentile < 1.0))
    throw InputError("config: features.percentile must lie in (0, 1)");
  if (!(instances.sampling.radius_m > 0.0))
    throw InputError("config: features.landuse_radius_m must be positive");
  const auto& h = hyper;
  if (h.tree_max_depth < 1 || h.tree_min_leaf < 1 || h.forest_trees < 1 ||
      h.forest_max_features < 0 || h.stacking_folds < 2 || h.smote_k < 1 || h.meta_epochs < 0 ||
      !(h.nb_variance_floor > 0.0) || !(h.meta_learning_rate > 0.0) || h.meta_l2 < 0.0)
    throw InputError("config: learn.* value out of range");
  synth.validate();
}

AppConfig parse_config_text(std::string_view text, std::string_view source) {
  AppConfig config;
  std::size_t row = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++row;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(std::string(source), row, "", std::string(line), "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end())
      throw ParseError(std::string(source), row, key, std::string(value), "unknown config key");
    try {
      it->second(config, value, key);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(std::string(source), row, key, std::string(value), e.what());
    }
  }
  config.validate();
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  AppConfig config = parse_config_text(read_text_file(path), path.string());
  if (!config.manifest_path.empty() && config.manifest_path.is_relative())
    config.manifest_path = path.parent_path() / config.manifest_path;
  return config;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, setter] : setters()) out.push_back(key);
  return out;
}

} // namespace vinerisk
