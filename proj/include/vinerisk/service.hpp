#pragma once

#include "vinerisk/aggregate.hpp"
#include "vinerisk/config.hpp"
#include "vinerisk/ingest.hpp"
#include "vinerisk/predict.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace vinerisk {

/// Summaries of every non-empty cell at one cell size, computed once.
struct GridView {
  GridSpec spec;
  std::vector<CellSummary> cells;
  std::map<CellIndex, std::size_t> index;
  /// JSON object per cell, shared by every response that lists the cell.
  std::vector<std::string> cell_json;

  const CellSummary* find(const CellIndex& cell) const;
};

/// Builds the view of a catalog at the given grid.
GridView make_grid_view(const GridSpec& spec, const PredictionCatalog& catalog);

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using QueryParams = std::map<std::string, std::string, std::less<>>;

/**
 * Read-only state behind the HTTP API. Everything except the per-size view
 * cache is immutable after construction; the cache is guarded by a mutex and
 * its entries are immutable once published.
 */
class ApiSession {
public:
  ApiSession(AppConfig config, PredictionCatalog catalog, CategoryManifest manifest);

  const AppConfig& config() const noexcept { return config_; }
  const PredictionCatalog& catalog() const noexcept { return catalog_; }
  const CategoryManifest& manifest() const noexcept { return manifest_; }

  /// Throws InputError for sizes outside the configured range.
  std::shared_ptr<const GridView> view(double cell_size_m) const;

  /// Routes GET requests under /api/.
  ApiResponse handle(std::string_view method, std::string_view path,
                     const QueryParams& query) const;

  ApiResponse get_grid(const QueryParams& query) const;
  ApiResponse get_cell(std::int64_t i, std::int64_t j, const QueryParams& query) const;
  ApiResponse get_compare(const QueryParams& query) const;
  ApiResponse get_glyph(std::int64_t i, std::int64_t j, const QueryParams& query) const;
  ApiResponse get_config() const;

private:
  double cell_size_from(const QueryParams& query) const;

  AppConfig config_;
  PredictionCatalog catalog_;
  CategoryManifest manifest_;
  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::shared_ptr<const GridView>> cache_;
};

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

/// "host:port" or ":port"; throws InputError when malformed.
ListenAddress parse_listen_address(std::string_view text);

/// Environment variable holding the listen address.
inline constexpr const char* kListenEnv = "VINERISK_LISTEN";

/// HTTP front end over an ApiSession.
class ApiServer {
public:
  explicit ApiServer(const ApiSession& session);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  int start(const std::string& host, int port);
  /// Binds and serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace vinerisk
