#pragma once

#include "vinerisk/aggregate.hpp"

#include <cstdint>
#include <string>

namespace vinerisk {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

std::string to_hex(const Rgb& c);

struct ColorAnchors {
  Rgb endangered{180, 4, 38};
  Rgb safe{59, 76, 192};
  Rgb neutral{242, 242, 242};
};

enum class Outcome { endangered, safe };

/// Linear RGB blend from the neutral anchor (certainty 0.5) to the outcome's
/// hue (certainty 1), rounded per channel. Throws InputError outside [0.5, 1].
Rgb color_for(Outcome outcome, double certainty, const ColorAnchors& anchors = {});

inline constexpr double kHubFraction = 0.25;
inline constexpr double kMinGlyphRadiusPx = 16.0;

/// Radius separating the outer (endangered) band from the inner band so that
/// the outer band holds fraction f of the annulus area.
double boundary_radius(double f, double radius, double hub);

/// Area share of the annulus [hub, radius] lying outside r_b.
double outer_band_fraction(double r_b, double radius, double hub);

/// Month m covers [start, end) degrees from the positive x axis, clockwise on
/// screen; January starts at -90 (12 o'clock).
struct WedgeAngles {
  double start_deg = 0.0;
  double end_deg = 0.0;
};
WedgeAngles wedge_angles(int month);

/**
 * Clock-glyph SVG for one cell: twelve annular month wedges around a hub
 * showing the vineyard count. Each wedge splits at r_b(f) with the
 * endangered band outside; band colours follow the class's mean certainty.
 * Output is byte-stable (3-decimal coordinates, fixed element order).
 * Throws InputError for radius_px < 16 or an inconsistent summary.
 */
std::string render_glyph(const CellSummary& summary, double radius_px,
                         const ColorAnchors& anchors = {});

} // namespace vinerisk
