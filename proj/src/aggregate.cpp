#include "vinerisk/aggregate.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace vinerisk {

namespace {

void check_size(double size, const GridLimits& limits) {
  if (!(size >= limits.min_cell_size_m && size <= limits.max_cell_size_m))
    throw InputError("cell size " + format_double(size) + " m outside [" +
                     format_double(limits.min_cell_size_m) + ", " +
                     format_double(limits.max_cell_size_m) + "]");
}

template <typename Area, typename IdOf, typename CentroidOf>
Assignment assign(const GridSpec& spec, std::span<const Area> areas, IdOf id_of,
                  CentroidOf centroid_of) {
  Assignment out;
  for (const auto& a : areas) out[cell_of(spec, centroid_of(a))].push_back(id_of(a));
  for (auto& [cell, ids] : out) std::sort(ids.begin(), ids.end());
  return out;
}

} // namespace

GridSpec make_grid(double cell_size_m, const GridLimits& limits) {
  check_size(cell_size_m, limits);
  return {cell_size_m, 0};
}

GridSpec split(const GridSpec& spec, const GridLimits& limits) {
  const double half = spec.cell_size_m / 2.0;
  if (half < limits.min_cell_size_m)
    throw InputError("cannot split below the minimum cell size of " +
                     format_double(limits.min_cell_size_m) + " m");
  return {half, spec.level + 1};
}

GridSpec resize(const GridSpec&, double cell_size_m, const GridLimits& limits) {
  return make_grid(cell_size_m, limits);
}

CellIndex cell_of(const GridSpec& spec, const Eigen::Vector2d& xy) noexcept {
  return {static_cast<std::int64_t>(std::floor(xy.x() / spec.cell_size_m)),
          static_cast<std::int64_t>(std::floor(xy.y() / spec.cell_size_m))};
}

CellIndex cell_of(const GridSpec& spec, const LonLat& p) noexcept {
  return cell_of(spec, to_web_mercator(p));
}

BoundingBox cell_bounds(const GridSpec& spec, const CellIndex& cell) noexcept {
  const double s = spec.cell_size_m;
  const LonLat lo = from_web_mercator({static_cast<double>(cell.i) * s, static_cast<double>(cell.j) * s});
  const LonLat hi = from_web_mercator(
      {static_cast<double>(cell.i + 1) * s, static_cast<double>(cell.j + 1) * s});
  return {lo.lon, lo.lat, hi.lon, hi.lat};
}

Assignment assign_areas(const GridSpec& spec, std::span<const AreaPolygon> areas) {
  return assign(spec, areas, [](const AreaPolygon& a) { return a.area_id(); },
                [](const AreaPolygon& a) { return a.centroid(); });
}

Assignment assign_areas(const GridSpec& spec, std::span<const AreaFeatures> areas) {
  return assign(spec, areas, [](const AreaFeatures& a) { return a.area_id; },
                [](const AreaFeatures& a) { return a.centroid; });
}

void CellSummary::validate() const {
  if (vineyard_count <= 0) throw InputError("cell summary: empty cell");
  if (!member_area_ids.empty() &&
      static_cast<std::int64_t>(member_area_ids.size()) != vineyard_count)
    throw InputError("cell summary: member list does not match the count");
  for (std::size_t m = 0; m < 12; ++m) {
    const auto& s = months[m];
    const std::string where = "cell summary month " + std::to_string(m + 1);
    if (s.endangered < 0 || s.safe < 0 || s.endangered + s.safe != vineyard_count)
      throw InputError(where + ": counts do not add up to the vineyard count");
    auto check_mean = [&](const std::optional<double>& mean, std::int64_t count) {
      if (count > 0 && !(mean && *mean >= 0.5 && *mean <= 1.0))
        throw InputError(where + ": mean certainty missing or outside [0.5, 1]");
      if (count == 0 && mean) throw InputError(where + ": mean certainty for an empty class");
    };
    check_mean(s.mean_certainty_endangered, s.endangered);
    check_mean(s.mean_certainty_safe, s.safe);
    if (!(s.stddev_certainty >= 0.0)) throw InputError(where + ": negative spread");
  }
}

CellSummary summarize_cell(const CellIndex& cell, double cell_size_m,
                           std::span<const std::string> members,
                           const PredictionCatalog& catalog) {
  CellSummary out;
  out.cell = cell;
  out.cell_size_m = cell_size_m;
  out.vineyard_count = static_cast<std::int64_t>(members.size());
  out.member_area_ids.assign(members.begin(), members.end());
  std::sort(out.member_area_ids.begin(), out.member_area_ids.end());

  std::vector<const MonthlyPredictions*> rows;
  rows.reserve(members.size());
  for (const auto& id : out.member_area_ids) {
    const auto* p = catalog.find(id);
    if (!p) throw IntegrityError("area '" + id + "' is missing from the catalog");
    rows.push_back(p);
  }
  const double n = static_cast<double>(rows.size());
  for (std::size_t m = 0; m < 12; ++m) {
    auto& s = out.months[m];
    double sum_e = 0.0, sum_s = 0.0;
    for (const auto* r : rows) {
      const auto& p = (*r)[m];
      if (p.endangered) {
        ++s.endangered;
        sum_e += p.certainty;
      } else {
        ++s.safe;
        sum_s += p.certainty;
      }
    }
    if (s.endangered > 0) s.mean_certainty_endangered = sum_e / static_cast<double>(s.endangered);
    if (s.safe > 0) s.mean_certainty_safe = sum_s / static_cast<double>(s.safe);
    const double mean = (sum_e + sum_s) / n;
    double ss = 0.0;
    for (const auto* r : rows) ss += ((*r)[m].certainty - mean) * ((*r)[m].certainty - mean);
    s.stddev_certainty = std::sqrt(ss / n);
  }
  return out;
}

std::vector<CellSummary> summarize(const GridSpec& spec, const Assignment& assignment,
                                   const PredictionCatalog& catalog) {
  std::vector<CellSummary> out;
  out.reserve(assignment.size());
  for (const auto& [cell, members] : assignment)
    out.push_back(summarize_cell(cell, spec.cell_size_m, members, catalog));
  return out;
}

CellSummary merge_summaries(std::span<const CellSummary> parts, const CellIndex& cell,
                            double cell_size_m) {
  CellSummary out;
  out.cell = cell;
  out.cell_size_m = cell_size_m;
  for (const auto& p : parts) {
    out.vineyard_count += p.vineyard_count;
    out.member_area_ids.insert(out.member_area_ids.end(), p.member_area_ids.begin(),
                               p.member_area_ids.end());
  }
  std::sort(out.member_area_ids.begin(), out.member_area_ids.end());
  if (out.vineyard_count == 0) throw InputError("merge_summaries: nothing to merge");

  for (std::size_t m = 0; m < 12; ++m) {
    auto& s = out.months[m];
    double sum_e = 0.0, sum_s = 0.0, sum_sq = 0.0;
    for (const auto& p : parts) {
      const auto& ps = p.months[m];
      s.endangered += ps.endangered;
      s.safe += ps.safe;
      const double ce = ps.mean_certainty_endangered.value_or(0.0) * static_cast<double>(ps.endangered);
      const double cs = ps.mean_certainty_safe.value_or(0.0) * static_cast<double>(ps.safe);
      sum_e += ce;
      sum_s += cs;
      // E[x^2] of the part, recovered from its mean and spread.
      const double n_p = static_cast<double>(p.vineyard_count);
      const double mean_p = (ce + cs) / n_p;
      sum_sq += n_p * (ps.stddev_certainty * ps.stddev_certainty + mean_p * mean_p);
    }
    if (s.endangered > 0) s.mean_certainty_endangered = sum_e / static_cast<double>(s.endangered);
    if (s.safe > 0) s.mean_certainty_safe = sum_s / static_cast<double>(s.safe);
    const double n = static_cast<double>(out.vineyard_count);
    const double mean = (sum_e + sum_s) / n;
    s.stddev_certainty = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
  }
  return out;
}

std::string serialize_summaries(std::span<const CellSummary> summaries) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::string out;
  for (const auto& c : summaries)
    for (std::size_t m = 0; m < 12; ++m) {
      const auto& s = c.months[m];
      out += std::to_string(c.cell.i) + ',' + std::to_string(c.cell.j) + ',' +
             format_double(c.cell_size_m) + ',' + std::to_string(m + 1) + ',' +
             std::to_string(s.endangered) + ',' + std::to_string(s.safe) + ',' +
             opt(s.mean_certainty_endangered) + ',' + opt(s.mean_certainty_safe) + ',' +
             format_double(s.stddev_certainty) + '\n';
    }
  return out;
}

} // namespace vinerisk
