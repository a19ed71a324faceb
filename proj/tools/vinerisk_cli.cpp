// Command-line driver: synthetic data, instance building, training,
// evaluation, prediction, glyph rendering and the HTTP API.

#include "vinerisk/aggregate.hpp"
#include "vinerisk/config.hpp"
#include "vinerisk/cross_validation.hpp"
#include "vinerisk/error.hpp"
#include "vinerisk/features.hpp"
#include "vinerisk/glyph.hpp"
#include "vinerisk/ingest.hpp"
#include "vinerisk/model_io.hpp"
#include "vinerisk/predict.hpp"
#include "vinerisk/service.hpp"
#include "vinerisk/text_io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>

namespace fs = std::filesystem;
using namespace vinerisk;

namespace {

struct Common {
  std::uint64_t seed = 7;
  std::string config_path;

  AppConfig config() const {
    return config_path.empty() ? AppConfig{} : load_config(config_path);
  }
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  sub->add_option("--config", common.config_path, "Configuration file (key = value)");
}

CategoryManifest manifest_for(const AppConfig& config, const fs::path& data_dir) {
  if (!config.manifest_path.empty()) return load_category_manifest(config.manifest_path);
  const auto in_data = DatasetPaths::in(data_dir).manifest;
  if (!data_dir.empty() && fs::exists(in_data)) return load_category_manifest(in_data);
  return default_category_manifest();
}

EnsembleOptions ensemble_options(const AppConfig& config, const std::string& roster) {
  EnsembleOptions options;
  options.hyper = config.hyper;
  if (!roster.empty()) {
    options.roster.clear();
    for (auto id : split_fields(roster)) {
      auto kind = kind_from_id(trim(id));
      if (!kind) throw InputError("unknown classifier '" + std::string(trim(id)) + "'");
      options.roster.push_back(*kind);
    }
  }
  return options;
}

int run_synth(const Common& common, const std::string& out) {
  const auto config = common.config();
  const auto data = generate_synthetic(config.synth, common.seed);
  write_synthetic(data, out);
  std::cout << "wrote " << data.observations.size() << " observations from "
            << data.station_ids.size() << " stations, " << data.areas.size() << " areas to "
            << out << "\n";
  return 0;
}

int run_build_instances(const Common& common, const std::string& data_dir, const std::string& out) {
  const auto config = common.config();
  const auto paths = DatasetPaths::in(data_dir);
  const auto manifest = manifest_for(config, data_dir);
  const auto observations = parse_observations(paths.observations);
  const auto landuse = parse_landuse(paths.landuse, manifest);
  const auto elevation = parse_elevation(paths.elevation);
  const auto [instances, summary] =
      build_instances(observations, landuse, elevation, config.instances);
  write_text_file(fs::path(out) / "instances.csv", serialize_instances(instances));
  write_text_file(fs::path(out) / "labeling_summary.txt", serialize_labeling_summary(summary));
  std::cout << serialize_labeling_summary(summary);
  return 0;
}

int run_train(const Common& common, const std::string& instances_path, const std::string& out,
              const std::string& roster) {
  const auto config = common.config();
  const auto instances = parse_instances(instances_path);
  const auto model = train_stacked_ensemble(feature_matrix(instances), label_vector(instances),
                                            common.seed, ensemble_options(config, roster));
  const auto text = serialize_model(model);
  write_text_file(out, text);
  std::cout << "model " << model_fingerprint(text) << " trained on " << instances.size()
            << " instances (" << model.metadata.n_balanced << " after balancing)\n";
  return 0;
}

int run_evaluate(const Common& common, const std::string& instances_path, const std::string& out,
                 int folds, bool shuffle_labels, const std::string& roster) {
  const auto config = common.config();
  const auto instances = parse_instances(instances_path);
  const Eigen::MatrixXd X = feature_matrix(instances);
  Eigen::VectorXi y = label_vector(instances);
  if (shuffle_labels) {
    std::mt19937_64 rng(derive_seed(common.seed, 0x5bu));
    std::shuffle(y.data(), y.data() + y.size(), rng);
  }
  const auto report = cross_validate(X, y, folds, common.seed, ensemble_options(config, roster));
  write_text_file(fs::path(out) / "evaluation.csv", report_csv(report));
  write_text_file(fs::path(out) / "evaluation.txt", report_text(report));
  write_text_file(fs::path(out) / "confusion.csv", report_confusion_csv(report));
  std::cout << report_text(report);
  return 0;
}

int run_predict(const Common& common, const std::string& model_path, const std::string& data_dir,
                const std::string& out) {
  const auto config = common.config();
  const auto text = read_text_file(model_path);
  const auto model = parse_model_text(text);
  const auto paths = DatasetPaths::in(data_dir);
  const auto manifest = manifest_for(config, data_dir);
  const auto areas = parse_areas(paths.areas);
  const auto landuse = parse_landuse(paths.landuse, manifest);
  const auto elevation = parse_elevation(paths.elevation);
  const auto catalog = build_catalog(model, areas, landuse, elevation, config.instances.sampling,
                                     model_fingerprint(text));
  write_catalog(catalog, out);
  std::cout << "wrote " << catalog.size() << " predictions for " << catalog.areas().size()
            << " areas (" << catalog.skipped().size() << " skipped) to " << out << "\n";
  return 0;
}

int run_render(const Common& common, const std::string& catalog_dir, const std::string& out,
               double cell_size, double radius) {
  const auto config = common.config();
  if (cell_size <= 0.0) cell_size = config.default_cell_size_m;
  if (radius <= 0.0) radius = config.glyph.default_radius_px;
  if (radius < config.glyph.min_radius_px || radius > config.glyph.max_radius_px)
    throw InputError("--radius-px must lie in [" + format_double(config.glyph.min_radius_px) +
                     ", " + format_double(config.glyph.max_radius_px) + "]");
  const auto catalog = load_catalog(catalog_dir);
  const auto view = make_grid_view(make_grid(cell_size, config.grid), catalog);
  for (const auto& cell : view.cells)
    write_text_file(fs::path(out) / ("glyph_" + std::to_string(cell.cell.i) + "_" +
                                     std::to_string(cell.cell.j) + ".svg"),
                    render_glyph(cell, radius, config.colors));
  write_text_file(fs::path(out) / "summaries.csv", serialize_summaries(view.cells));
  std::cout << "rendered " << view.cells.size() << " glyphs at " << format_double(cell_size)
            << " m to " << out << "\n";
  return 0;
}

int run_serve(const Common& common, const std::string& catalog_dir, std::string listen) {
  auto config = common.config();
  const auto manifest = manifest_for(config, {});
  ApiSession session(std::move(config), load_catalog(catalog_dir), manifest);
  if (listen.empty())
    if (const char* env = std::getenv(kListenEnv)) listen = env;
  const auto address = listen.empty() ? ListenAddress{} : parse_listen_address(listen);
  ApiServer server(session);
  std::cout << "serving " << catalog_dir << " on http://" << address.host << ":" << address.port
            << "/api/\n"
            << std::flush;
  server.listen(address.host, address.port);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infestation-risk prediction and clock-glyph exploration"};
  app.require_subcommand(1);
  Common common;

  std::string out, data_dir, instances, model, catalog, roster, listen;
  int folds = 10;
  bool shuffle = false;
  double cell_size = 0.0, radius = 0.0;

  auto* synth = app.add_subcommand("synth", "Write a synthetic dataset");
  add_common(synth, common);
  synth->add_option("--out", out, "Output directory")->required();

  auto* build = app.add_subcommand("build-instances", "Build labelled monthly instances");
  add_common(build, common);
  build->add_option("--data", data_dir, "Dataset directory")->required();
  build->add_option("--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Train the stacked ensemble");
  add_common(train, common);
  train->add_option("--instances", instances, "Instance CSV")->required();
  train->add_option("--out", out, "Model file")->required();
  train->add_option("--roster", roster, "Comma-separated base classifiers");

  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold evaluation");
  add_common(evaluate, common);
  evaluate->add_option("--instances", instances, "Instance CSV")->required();
  evaluate->add_option("--out", out, "Output directory")->required();
  evaluate->add_option("--folds", folds, "Number of folds")->capture_default_str();
  evaluate->add_flag("--shuffle-labels", shuffle, "Permute labels first (chance baseline)");
  evaluate->add_option("--roster", roster, "Comma-separated base classifiers");

  auto* predict = app.add_subcommand("predict", "Predict every area and month");
  add_common(predict, common);
  predict->add_option("--model", model, "Model file")->required();
  predict->add_option("--data", data_dir, "Dataset directory")->required();
  predict->add_option("--out", out, "Catalog directory")->required();

  auto* render = app.add_subcommand("render", "Render one glyph per non-empty cell");
  add_common(render, common);
  render->add_option("--catalog", catalog, "Catalog directory")->required();
  render->add_option("--out", out, "Output directory")->required();
  render->add_option("--cell-size-m", cell_size, "Grid cell size in metres");
  render->add_option("--radius-px", radius, "Glyph radius in pixels");

  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  add_common(serve, common);
  serve->add_option("--catalog", catalog, "Catalog directory")->required();
  serve->add_option("--listen", listen, std::string("host:port (default from ") + kListenEnv + ")");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*synth) return run_synth(common, out);
    if (*build) return run_build_instances(common, data_dir, out);
    if (*train) return run_train(common, instances, out, roster);
    if (*evaluate) return run_evaluate(common, instances, out, folds, shuffle, roster);
    if (*predict) return run_predict(common, model, data_dir, out);
    if (*render) return run_render(common, catalog, out, cell_size, radius);
    if (*serve) return run_serve(common, catalog, listen);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
