#include "support.hpp"

#include "vinerisk/model_io.hpp"

#include <cstdlib>
#include <random>
#include <sys/wait.h>
#include <tuple>
#include <unistd.h>

namespace vinerisk::testing {

SynthConfig small_synth_config() {
  SynthConfig c;
  c.stations = 160;
  c.areas = 90;
  c.clusters = 6;
  c.lattice_step_fraction = 1.0 / 24.0;
  return c;
}

Hyperparameters fast_hyper() {
  Hyperparameters h;
  h.forest_trees = 15;
  return h;
}

const SmallPipeline& small_pipeline() {
  static const SmallPipeline pipeline = [] {
    SmallPipeline p;
    p.data = generate_synthetic(small_synth_config(), 11);
    InstanceOptions options;
    options.sampling.step_fraction = 1.0 / 24.0;
    std::tie(p.instances, p.summary) =
        build_instances(p.data.observations, p.data.landuse, p.data.elevation, options);
    EnsembleOptions ensemble;
    ensemble.hyper = fast_hyper();
    p.model = train_stacked_ensemble(feature_matrix(p.instances), label_vector(p.instances), 11,
                                     ensemble);
    p.model_text = serialize_model(p.model);
    p.catalog = build_catalog(p.model, p.data.areas, p.data.landuse, p.data.elevation,
                              options.sampling, model_fingerprint(p.model_text));
    return p;
  }();
  return pipeline;
}

std::filesystem::path scratch_dir(std::string_view name) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("vinerisk-test-" + std::to_string(::getpid()) + "-" + std::string(name));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

namespace {

CellSummary summary_from(const CellIndex& cell, double size, std::int64_t count,
                         const std::array<std::int64_t, 12>& endangered,
                         const std::array<double, 12>& ce, const std::array<double, 12>& cs,
                         const std::array<double, 12>& spread) {
  CellSummary s;
  s.cell = cell;
  s.cell_size_m = size;
  s.vineyard_count = count;
  for (std::int64_t k = 0; k < count; ++k) s.member_area_ids.push_back("A" + std::to_string(k));
  for (std::size_t m = 0; m < 12; ++m) {
    auto& ms = s.months[m];
    ms.endangered = endangered[m];
    ms.safe = count - endangered[m];
    if (ms.endangered > 0) ms.mean_certainty_endangered = ce[m];
    if (ms.safe > 0) ms.mean_certainty_safe = cs[m];
    ms.stddev_certainty = spread[m];
  }
  return s;
}

} // namespace

std::vector<GlyphFixture> glyph_fixtures() {
  std::vector<GlyphFixture> out;
  std::array<double, 12> flat{};
  flat.fill(0.9);
  out.push_back({"single_endangered",
                 summary_from({3, -2}, 20000.0, 1, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, flat,
                              flat, {}),
                 48.0});
  out.push_back({"mixed_season",
                 summary_from({-5, 7}, 5000.0, 10, {0, 0, 0, 0, 1, 2, 4, 6, 7, 9, 10, 10},
                              {0.5, 0.5, 0.5, 0.5, 0.55, 0.61, 0.68, 0.74, 0.8, 0.87, 0.93, 1.0},
                              {1.0, 0.97, 0.93, 0.9, 0.84, 0.78, 0.71, 0.66, 0.6, 0.55, 0.5, 0.5},
                              {0.0, 0.01, 0.02, 0.03, 0.05, 0.08, 0.1, 0.12, 0.11, 0.09, 0.04,
                               0.0}),
                 64.0});
  std::array<double, 12> safe_c{};
  for (std::size_t m = 0; m < 12; ++m) safe_c[m] = 0.62 + 0.03 * static_cast<double>(m);
  std::array<double, 12> spread{};
  spread.fill(0.125);
  out.push_back({"all_safe_min_radius",
                 summary_from({0, 0}, 200000.0, 37, {}, flat, safe_c, spread), 16.0});
  return out;
}

Ring square(double lon, double lat, double side) {
  return {{lon, lat}, {lon + side, lat}, {lon + side, lat + side}, {lon, lat + side}, {lon, lat}};
}

MonthlyPredictions constant_months(bool endangered, double certainty) {
  MonthlyPredictions out;
  for (auto& p : out) {
    p.endangered = endangered;
    p.certainty = certainty;
    p.probability = endangered ? certainty : 1.0 - certainty;
  }
  return out;
}

PredictionCatalog make_catalog(std::vector<AreaFeatures> areas,
                               std::vector<MonthlyPredictions> predictions) {
  return PredictionCatalog("test", std::move(areas), std::move(predictions), {});
}

int run_command(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace vinerisk::testing
