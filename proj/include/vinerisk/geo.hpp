#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace vinerisk {

/// WGS84 position in degrees.
struct LonLat {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const LonLat&, const LonLat&) = default;
};

/// Closed linear ring: first vertex equals last, at least four vertices.
using Ring = std::vector<LonLat>;

struct BoundingBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  bool valid() const noexcept { return min_lon < max_lon && min_lat < max_lat; }
  bool contains(const LonLat& p) const noexcept {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat &&
           p.lat <= max_lat;
  }
  bool intersects(const BoundingBox& o) const noexcept {
    return min_lon <= o.max_lon && o.min_lon <= max_lon &&
           min_lat <= o.max_lat && o.min_lat <= max_lat;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

BoundingBox bounds_of(std::span<const LonLat> points);

/// True when the ring is closed and has at least four vertices.
bool is_closed_ring(std::span<const LonLat> ring) noexcept;

/// Even-odd rule. Points exactly on an edge may land on either side.
bool point_in_ring(const LonLat& p, std::span<const LonLat> ring) noexcept;

/// Arithmetic mean of the ring's vertices, excluding the closing duplicate.
LonLat vertex_centroid(std::span<const LonLat> ring);

// Spherical constants.
inline constexpr double kEarthMeanRadiusM = 6371008.8;
inline constexpr double kWebMercatorRadiusM = 6378137.0;
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg2rad(double d) noexcept { return d * kPi / 180.0; }
inline constexpr double rad2deg(double r) noexcept { return r * 180.0 / kPi; }

/// Spherical Web Mercator (EPSG:3857) forward and inverse projection.
Eigen::Vector2d to_web_mercator(const LonLat& p) noexcept;
LonLat from_web_mercator(const Eigen::Vector2d& xy) noexcept;

/// Great-circle distance in meters.
double haversine_m(const LonLat& a, const LonLat& b) noexcept;

/**
 * Square lattice of sample offsets clipped to a disk, in meters east/north of
 * the center. Offsets are (i*step, j*step) for integer i, j with
 * i^2 + j^2 <= (radius/step)^2, enumerated row by row.
 */
class DiskLattice {
public:
  DiskLattice(double radius_m, double step_m);

  double radius_m() const noexcept { return radius_m_; }
  double step_m() const noexcept { return step_m_; }
  std::size_t size() const noexcept { return offsets_.size(); }
  const std::vector<Eigen::Vector2d>& offsets() const noexcept { return offsets_; }

  /// Lattice points placed around a center with a local equirectangular
  /// approximation.
  std::vector<LonLat> around(const LonLat& center) const;

private:
  double radius_m_;
  double step_m_;
  std::vector<Eigen::Vector2d> offsets_;
};

/**
 * Bucket grid over polygon bounding boxes. find_first returns the lowest
 * polygon position containing the point, so overlaps resolve in insertion
 * order.
 */
class PolygonIndex {
public:
  PolygonIndex() = default;
  explicit PolygonIndex(std::vector<Ring> rings, double bucket_deg = 0.02);

  std::optional<std::size_t> find_first(const LonLat& p) const;
  std::size_t size() const noexcept { return rings_.size(); }
  bool empty() const noexcept { return rings_.empty(); }

private:
  std::vector<Ring> rings_;
  std::vector<BoundingBox> boxes_;
  BoundingBox extent_{};
  double bucket_deg_ = 0.02;
  std::int64_t nx_ = 0;
  std::int64_t ny_ = 0;
  std::vector<std::vector<std::uint32_t>> buckets_;
};

} // namespace vinerisk
