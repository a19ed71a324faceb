#pragma once

#include "vinerisk/aggregate.hpp"
#include "vinerisk/classifiers.hpp"
#include "vinerisk/ensemble.hpp"
#include "vinerisk/features.hpp"
#include "vinerisk/ingest.hpp"
#include "vinerisk/predict.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vinerisk::testing {

/// A few hundred instances; enough for both classes to fill every fold.
SynthConfig small_synth_config();

/// Smaller forest so unit tests train in well under a second.
Hyperparameters fast_hyper();

/// synth -> instances -> ensemble -> catalog on the small config, built once.
struct SmallPipeline {
  SyntheticDataset data;
  std::vector<LabeledInstance> instances;
  LabelingSummary summary;
  EnsembleModel model;
  std::string model_text;
  PredictionCatalog catalog;
};
const SmallPipeline& small_pipeline();

/// Fresh, empty directory under the system temp dir.
std::filesystem::path scratch_dir(std::string_view name);

/// Named cell summaries used for the golden glyph files, with their radius.
struct GlyphFixture {
  std::string name;
  CellSummary summary;
  double radius_px = 48.0;
};
std::vector<GlyphFixture> glyph_fixtures();

/// Square ring with lower-left corner (lon, lat) and the given side, closed.
Ring square(double lon, double lat, double side);

/// A 12-month catalog entry with the same prediction in every month.
MonthlyPredictions constant_months(bool endangered, double certainty);

/// Catalog over hand-placed areas; predictions are supplied per area.
PredictionCatalog make_catalog(std::vector<AreaFeatures> areas,
                               std::vector<MonthlyPredictions> predictions);

/// Runs a shell command and returns its exit status.
int run_command(const std::string& command);

} // namespace vinerisk::testing
