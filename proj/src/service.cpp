#include "vinerisk/service.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/glyph.hpp"
#include "vinerisk/text_io.hpp"

#include <httplib.h>
#include <json.hpp>

#include <thread>

namespace vinerisk {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxCachedSizes = 64;
constexpr std::size_t kMaxCompareCells = 4;

class HttpError : public std::runtime_error {
public:
  HttpError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
  int status() const noexcept { return status_; }

private:
  int status_;
};

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json months_json(const CellSummary& c) {
  json months = json::array();
  for (std::size_t m = 0; m < 12; ++m) {
    const auto& s = c.months[m];
    months.push_back({{"month", m + 1},
                      {"endangered", s.endangered},
                      {"safe", s.safe},
                      {"mean_certainty_endangered", optional_json(s.mean_certainty_endangered)},
                      {"mean_certainty_safe", optional_json(s.mean_certainty_safe)},
                      {"stddev_certainty", s.stddev_certainty}});
  }
  return months;
}

json cell_json(const GridSpec& spec, const CellSummary& c) {
  const auto b = cell_bounds(spec, c.cell);
  return {{"i", c.cell.i},
          {"j", c.cell.j},
          {"cell_size_m", c.cell_size_m},
          {"bounds", {b.min_lon, b.min_lat, b.max_lon, b.max_lat}},
          {"vineyard_count", c.vineyard_count},
          {"months", months_json(c)}};
}

ApiResponse json_response(const json& body, int status = 200) {
  return {status, "application/json", body.dump() + "\n"};
}

std::int64_t parse_index(std::string_view s, const char* what) {
  auto v = parse_int(s);
  if (!v) throw HttpError(400, std::string("invalid cell index ") + what + " '" + std::string(s) + "'");
  return *v;
}

double parse_number(const QueryParams& q, std::string_view key, double fallback) {
  auto it = q.find(key);
  if (it == q.end()) return fallback;
  auto v = parse_double(it->second);
  if (!v) throw HttpError(400, "parameter '" + std::string(key) + "' is not a number");
  return *v;
}

BoundingBox parse_bbox(const QueryParams& q) {
  auto it = q.find("bbox");
  if (it == q.end()) return {-180.0, -90.0, 180.0, 90.0};
  const auto f = split_fields(it->second);
  if (f.size() != 4) throw HttpError(400, "bbox must be minlon,minlat,maxlon,maxlat");
  std::array<double, 4> v{};
  for (std::size_t i = 0; i < 4; ++i) {
    auto d = parse_double(f[i]);
    if (!d) throw HttpError(400, "bbox must be minlon,minlat,maxlon,maxlat");
    v[i] = *d;
  }
  const BoundingBox box{v[0], v[1], v[2], v[3]};
  if (!(box.min_lon >= -180.0 && box.max_lon <= 180.0 && box.min_lat >= -90.0 &&
        box.max_lat <= 90.0 && box.min_lon <= box.max_lon && box.min_lat <= box.max_lat))
    throw HttpError(400, "bbox is not a valid lon/lat box");
  return box;
}

} // namespace

const CellSummary* GridView::find(const CellIndex& cell) const {
  auto it = index.find(cell);
  return it == index.end() ? nullptr : &cells[it->second];
}

GridView make_grid_view(const GridSpec& spec, const PredictionCatalog& catalog) {
  GridView view;
  view.spec = spec;
  view.cells = summarize(spec, assign_areas(spec, catalog.areas()), catalog);
  view.cell_json.reserve(view.cells.size());
  for (std::size_t k = 0; k < view.cells.size(); ++k) {
    view.index.emplace(view.cells[k].cell, k);
    view.cell_json.push_back(cell_json(spec, view.cells[k]).dump());
  }
  return view;
}

ApiSession::ApiSession(AppConfig config, PredictionCatalog catalog, CategoryManifest manifest)
    : config_(std::move(config)), catalog_(std::move(catalog)), manifest_(std::move(manifest)) {
  config_.validate();
  if (manifest_.size() != kCategoryCount)
    throw InputError("api: category manifest must list " + std::to_string(kCategoryCount) + " codes");
}

std::shared_ptr<const GridView> ApiSession::view(double cell_size_m) const {
  const GridSpec spec = make_grid(cell_size_m, config_.grid);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(cell_size_m); it != cache_.end()) return it->second;
  }
  auto built = std::make_shared<const GridView>(make_grid_view(spec, catalog_));
  std::lock_guard lock(cache_mutex_);
  if (cache_.size() >= kMaxCachedSizes) cache_.clear();
  // A concurrent builder may have won; keep the published entry.
  return cache_.try_emplace(cell_size_m, std::move(built)).first->second;
}

double ApiSession::cell_size_from(const QueryParams& query) const {
  return parse_number(query, "cell_size_m", config_.default_cell_size_m);
}

ApiResponse ApiSession::get_grid(const QueryParams& query) const {
  const auto v = view(cell_size_from(query));
  const BoundingBox box = parse_bbox(query);
  std::string body = "{\"cell_size_m\":" + json(v->spec.cell_size_m).dump() + ",\"cells\":[";
  bool first = true;
  for (std::size_t k = 0; k < v->cells.size(); ++k) {
    if (!cell_bounds(v->spec, v->cells[k].cell).intersects(box)) continue;
    if (!first) body += ',';
    body += v->cell_json[k];
    first = false;
  }
  body += "]}\n";
  return {200, "application/json", std::move(body)};
}

ApiResponse ApiSession::get_cell(std::int64_t i, std::int64_t j, const QueryParams& query) const {
  const auto v = view(cell_size_from(query));
  const auto* c = v->find({i, j});
  if (!c) throw HttpError(404, "cell " + std::to_string(i) + "," + std::to_string(j) + " is empty");
  json body = cell_json(v->spec, *c);
  body["member_area_ids"] = c->member_area_ids;
  return json_response(body);
}

ApiResponse ApiSession::get_compare(const QueryParams& query) const {
  auto it = query.find("cells");
  if (it == query.end() || trim(it->second).empty())
    throw HttpError(400, "parameter 'cells' is required (i1,j1;i2,j2)");
  std::vector<CellIndex> wanted;
  for (auto part : split_fields(it->second, ';')) {
    const auto ij = split_fields(part, ',');
    if (ij.size() != 2) throw HttpError(400, "cells must be given as i,j pairs separated by ';'");
    wanted.push_back({parse_index(ij[0], "i"), parse_index(ij[1], "j")});
  }
  if (wanted.size() > kMaxCompareCells)
    throw HttpError(400, "at most " + std::to_string(kMaxCompareCells) + " cells can be compared");

  const auto v = view(cell_size_from(query));
  json categories = json::array();
  json labels = json::array();
  for (std::size_t k = 0; k < manifest_.size(); ++k) {
    categories.push_back({{"code", manifest_.codes()[k]}, {"name", manifest_.display_names()[k]}});
    labels.push_back(manifest_.display_names()[k]);
  }
  labels.push_back("Height (m)");

  json cells = json::array();
  for (const auto& cell : wanted) {
    const auto* c = v->find(cell);
    if (!c)
      throw HttpError(404, "cell " + std::to_string(cell.i) + "," + std::to_string(cell.j) +
                               " is empty");
    LandUseVector lu = LandUseVector::Zero();
    double height = 0.0;
    for (const auto& id : c->member_area_ids) {
      const auto* a = catalog_.find_area(id);
      if (!a) throw IntegrityError("area '" + id + "' is missing from the catalog");
      lu += a->landuse;
      height += a->height_m;
    }
    const double n = static_cast<double>(c->vineyard_count);
    lu /= n;
    height /= n;
    json landuse = json::array();
    for (Eigen::Index k = 0; k < lu.size(); ++k) landuse.push_back(lu(k));
    json profile = landuse;
    profile.push_back(height);
    cells.push_back({{"i", cell.i},
                     {"j", cell.j},
                     {"vineyard_count", c->vineyard_count},
                     {"landuse", std::move(landuse)},
                     {"height_m", height},
                     {"profile", std::move(profile)}});
  }
  return json_response({{"cell_size_m", v->spec.cell_size_m},
                        {"categories", std::move(categories)},
                        {"profile_labels", std::move(labels)},
                        {"cells", std::move(cells)}});
}

ApiResponse ApiSession::get_glyph(std::int64_t i, std::int64_t j, const QueryParams& query) const {
  const double radius = parse_number(query, "radius_px", config_.glyph.default_radius_px);
  if (!(radius >= config_.glyph.min_radius_px && radius <= config_.glyph.max_radius_px))
    throw HttpError(400, "radius_px must lie in [" + format_double(config_.glyph.min_radius_px) +
                             ", " + format_double(config_.glyph.max_radius_px) + "]");
  const auto v = view(cell_size_from(query));
  const auto* c = v->find({i, j});
  if (!c) throw HttpError(404, "cell " + std::to_string(i) + "," + std::to_string(j) + " is empty");
  return {200, "image/svg+xml", render_glyph(*c, radius, config_.colors)};
}

ApiResponse ApiSession::get_config() const {
  const auto& c = config_;
  return json_response(
      {{"grid",
        {{"min_cell_size_m", c.grid.min_cell_size_m},
         {"max_cell_size_m", c.grid.max_cell_size_m},
         {"default_cell_size_m", c.default_cell_size_m}}},
       {"glyph",
        {{"min_radius_px", c.glyph.min_radius_px},
         {"max_radius_px", c.glyph.max_radius_px},
         {"default_radius_px", c.glyph.default_radius_px},
         {"color_endangered", to_hex(c.colors.endangered)},
         {"color_safe", to_hex(c.colors.safe)},
         {"color_neutral", to_hex(c.colors.neutral)}}},
       {"model_fingerprint", catalog_.model_fingerprint()},
       {"areas", catalog_.areas().size()},
       {"skipped_areas", catalog_.skipped().size()},
       {"categories", manifest_.size()}});
}

ApiResponse ApiSession::handle(std::string_view method, std::string_view path,
                               const QueryParams& query) const {
  try {
    if (method != "GET") throw HttpError(405, "only GET is supported");
    if (path == "/api/grid") return get_grid(query);
    if (path == "/api/compare") return get_compare(query);
    if (path == "/api/config") return get_config();
    auto two_indices = [&](std::string_view rest, std::string_view suffix) {
      if (!rest.ends_with(suffix)) throw HttpError(404, "no such resource");
      rest.remove_suffix(suffix.size());
      const auto slash = rest.find('/');
      if (slash == std::string_view::npos || rest.find('/', slash + 1) != std::string_view::npos)
        throw HttpError(404, "no such resource");
      return std::pair{parse_index(rest.substr(0, slash), "i"),
                       parse_index(rest.substr(slash + 1), "j")};
    };
    if (path.starts_with("/api/cell/")) {
      auto [i, j] = two_indices(path.substr(10), "");
      return get_cell(i, j, query);
    }
    if (path.starts_with("/api/glyph/")) {
      auto [i, j] = two_indices(path.substr(11), ".svg");
      return get_glyph(i, j, query);
    }
    throw HttpError(404, "no such resource");
  } catch (const HttpError& e) {
    return json_response({{"error", e.what()}}, e.status());
  } catch (const InputError& e) {
    return json_response({{"error", e.what()}}, 400);
  } catch (const std::exception& e) {
    return json_response({{"error", e.what()}}, 500);
  }
}

ListenAddress parse_listen_address(std::string_view text) {
  text = trim(text);
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos)
    throw InputError("listen address must be host:port, got '" + std::string(text) + "'");
  ListenAddress out;
  if (colon > 0) out.host = std::string(text.substr(0, colon));
  auto port = parse_int(text.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535)
    throw InputError("listen address has an invalid port: '" + std::string(text) + "'");
  out.port = static_cast<int>(*port);
  return out;
}

struct ApiServer::Impl {
  explicit Impl(const ApiSession& s) : session(s) {
    server.new_task_queue = [] { return new httplib::ThreadPool(16); };
    const auto route = [this](const httplib::Request& req, httplib::Response& res) {
      QueryParams query;
      for (const auto& [k, v] : req.params) query.emplace(k, v);
      const auto r = session.handle(req.method, req.path, query);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    };
    const std::string pattern = R"(/api/.*)";
    server.Get(pattern, route);
    server.Post(pattern, route);
    server.Put(pattern, route);
    server.Patch(pattern, route);
    server.Delete(pattern, route);
  }

  const ApiSession& session;
  httplib::Server server;
  std::thread thread;
};

ApiServer::ApiServer(const ApiSession& session) : impl_(std::make_unique<Impl>(session)) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host) : port;
  if (port != 0 && !impl_->server.bind_to_port(host, port)) bound = -1;
  if (bound < 0) throw InputError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void ApiServer::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port))
    throw InputError("cannot listen on " + host + ":" + std::to_string(port));
}

void ApiServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace vinerisk
