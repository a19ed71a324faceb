#include "vinerisk/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vinerisk {

BoundingBox bounds_of(std::span<const LonLat> points) {
  BoundingBox b{std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity()};
  for (const auto& p : points) {
    b.min_lon = std::min(b.min_lon, p.lon);
    b.min_lat = std::min(b.min_lat, p.lat);
    b.max_lon = std::max(b.max_lon, p.lon);
    b.max_lat = std::max(b.max_lat, p.lat);
  }
  return b;
}

bool is_closed_ring(std::span<const LonLat> ring) noexcept {
  return ring.size() >= 4 && ring.front() == ring.back();
}

bool point_in_ring(const LonLat& p, std::span<const LonLat> ring) noexcept {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const LonLat& a = ring[i];
    const LonLat& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

LonLat vertex_centroid(std::span<const LonLat> ring) {
  std::size_t n = ring.size();
  if (n > 1 && ring.front() == ring.back()) --n;
  if (n == 0) throw std::invalid_argument("vertex_centroid: empty ring");
  double lon = 0.0, lat = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lon += ring[i].lon;
    lat += ring[i].lat;
  }
  return {lon / static_cast<double>(n), lat / static_cast<double>(n)};
}

Eigen::Vector2d to_web_mercator(const LonLat& p) noexcept {
  const double x = kWebMercatorRadiusM * deg2rad(p.lon);
  const double y =
      kWebMercatorRadiusM * std::log(std::tan(kPi / 4.0 + deg2rad(p.lat) / 2.0));
  return {x, y};
}

LonLat from_web_mercator(const Eigen::Vector2d& xy) noexcept {
  const double lon = rad2deg(xy.x() / kWebMercatorRadiusM);
  const double lat =
      rad2deg(2.0 * std::atan(std::exp(xy.y() / kWebMercatorRadiusM)) - kPi / 2.0);
  return {lon, lat};
}

double haversine_m(const LonLat& a, const LonLat& b) noexcept {
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(deg2rad(a.lat)) * std::cos(deg2rad(b.lat)) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthMeanRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

DiskLattice::DiskLattice(double radius_m, double step_m)
    : radius_m_(radius_m), step_m_(step_m) {
  if (!(radius_m > 0.0) || !(step_m > 0.0))
    throw std::invalid_argument("DiskLattice: radius and step must be positive");
  const double r = radius_m / step_m;
  const auto n = static_cast<long>(std::floor(r));
  const double r2 = r * r;
  for (long j = -n; j <= n; ++j) {
    for (long i = -n; i <= n; ++i) {
      if (static_cast<double>(i * i + j * j) <= r2 + 1e-9)
        offsets_.emplace_back(static_cast<double>(i) * step_m,
                              static_cast<double>(j) * step_m);
    }
  }
}

std::vector<LonLat> DiskLattice::around(const LonLat& center) const {
  const double m_per_deg_lat = kEarthMeanRadiusM * kPi / 180.0;
  const double m_per_deg_lon = m_per_deg_lat * std::cos(deg2rad(center.lat));
  std::vector<LonLat> out;
  out.reserve(offsets_.size());
  for (const auto& o : offsets_)
    out.push_back({center.lon + o.x() / m_per_deg_lon,
                   center.lat + o.y() / m_per_deg_lat});
  return out;
}

PolygonIndex::PolygonIndex(std::vector<Ring> rings, double bucket_deg)
    : rings_(std::move(rings)), bucket_deg_(bucket_deg) {
  if (rings_.empty()) return;
  boxes_.reserve(rings_.size());
  for (const auto& r : rings_) boxes_.push_back(bounds_of(r));
  extent_ = boxes_.front();
  for (const auto& b : boxes_) {
    extent_.min_lon = std::min(extent_.min_lon, b.min_lon);
    extent_.min_lat = std::min(extent_.min_lat, b.min_lat);
    extent_.max_lon = std::max(extent_.max_lon, b.max_lon);
    extent_.max_lat = std::max(extent_.max_lat, b.max_lat);
  }
  nx_ = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(
             std::ceil((extent_.max_lon - extent_.min_lon) / bucket_deg_)));
  ny_ = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(
             std::ceil((extent_.max_lat - extent_.min_lat) / bucket_deg_)));
  buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
  auto clamp_x = [&](double lon) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((lon - extent_.min_lon) / bucket_deg_)),
        0, nx_ - 1);
  };
  auto clamp_y = [&](double lat) {
    return std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor((lat - extent_.min_lat) / bucket_deg_)),
        0, ny_ - 1);
  };
  for (std::size_t k = 0; k < boxes_.size(); ++k) {
    const auto& b = boxes_[k];
    for (auto y = clamp_y(b.min_lat); y <= clamp_y(b.max_lat); ++y)
      for (auto x = clamp_x(b.min_lon); x <= clamp_x(b.max_lon); ++x)
        buckets_[static_cast<std::size_t>(y * nx_ + x)].push_back(
            static_cast<std::uint32_t>(k));
  }
}

std::optional<std::size_t> PolygonIndex::find_first(const LonLat& p) const {
  if (rings_.empty() || !extent_.contains(p)) return std::nullopt;
  const auto x = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((p.lon - extent_.min_lon) / bucket_deg_)),
      0, nx_ - 1);
  const auto y = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((p.lat - extent_.min_lat) / bucket_deg_)),
      0, ny_ - 1);
  for (std::uint32_t k : buckets_[static_cast<std::size_t>(y * nx_ + x)]) {
    if (boxes_[k].contains(p) && point_in_ring(p, rings_[k])) return k;
  }
  return std::nullopt;
}

} // namespace vinerisk
