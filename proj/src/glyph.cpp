#include "vinerisk/glyph.hpp"

#include "vinerisk/error.hpp"
#include "vinerisk/geo.hpp"
#include "vinerisk/text_io.hpp"

#include <array>
#include <cmath>
#include <cstdio>

namespace vinerisk {

namespace {

constexpr std::array<const char*, 12> kMonthNames = {"January", "February", "March",
                                                     "April",   "May",      "June",
                                                     "July",    "August",   "September",
                                                     "October", "November", "December"};

std::string fx(double v) { return format_fixed(v, 3); }

std::uint8_t blend(std::uint8_t from, std::uint8_t to, double t) {
  return static_cast<std::uint8_t>(
      std::lround(static_cast<double>(from) + t * (static_cast<double>(to) - from)));
}

// Annular sector between radii [r0, r1] and angles [a0, a1] (degrees).
std::string annular_sector(double cx, double cy, double r0, double r1, double a0, double a1) {
  auto pt = [&](double r, double deg) {
    const double t = deg2rad(deg);
    return fx(cx + r * std::cos(t)) + ' ' + fx(cy + r * std::sin(t));
  };
  std::string d = "M " + pt(r1, a0) + " A " + fx(r1) + ' ' + fx(r1) + " 0 0 1 " + pt(r1, a1);
  d += " L " + pt(r0, a1) + " A " + fx(r0) + ' ' + fx(r0) + " 0 0 0 " + pt(r0, a0) + " Z";
  return d;
}

} // namespace

std::string to_hex(const Rgb& c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

Rgb color_for(Outcome outcome, double certainty, const ColorAnchors& anchors) {
  if (!(certainty >= 0.5 && certainty <= 1.0))
    throw InputError("color_for: certainty " + format_double(certainty) + " outside [0.5, 1]");
  const double t = (certainty - 0.5) / 0.5;
  const Rgb& hue = outcome == Outcome::endangered ? anchors.endangered : anchors.safe;
  const Rgb& w = anchors.neutral;
  return {blend(w.r, hue.r, t), blend(w.g, hue.g, t), blend(w.b, hue.b, t)};
}

double boundary_radius(double f, double radius, double hub) {
  if (!(f >= 0.0 && f <= 1.0)) throw InputError("boundary_radius: fraction outside [0, 1]");
  return std::sqrt(hub * hub + (1.0 - f) * (radius * radius - hub * hub));
}

double outer_band_fraction(double r_b, double radius, double hub) {
  return (radius * radius - r_b * r_b) / (radius * radius - hub * hub);
}

WedgeAngles wedge_angles(int month) {
  if (month < 1 || month > 12) throw InputError("wedge_angles: month must be 1..12");
  return {-90.0 + 30.0 * (month - 1), -90.0 + 30.0 * month};
}

std::string render_glyph(const CellSummary& summary, double radius_px,
                         const ColorAnchors& anchors) {
  if (!(radius_px >= kMinGlyphRadiusPx))
    throw InputError("render_glyph: radius must be at least " + fx(kMinGlyphRadiusPx) + " px");
  summary.validate();

  const double R = radius_px;
  const double hub = kHubFraction * R;
  const double c = R;
  const std::string size = fx(2.0 * R);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + size +
                    "\" height=\"" + size + "\" viewBox=\"0 0 " + size + ' ' + size +
                    "\" data-cell-i=\"" + std::to_string(summary.cell.i) +
                    "\" data-cell-j=\"" + std::to_string(summary.cell.j) +
                    "\" data-cell-size-m=\"" + format_double(summary.cell_size_m) + "\">\n";
  svg += "<g class=\"months\">\n";
  const double n = static_cast<double>(summary.vineyard_count);
  for (int m = 1; m <= 12; ++m) {
    const auto& s = summary.months[static_cast<std::size_t>(m - 1)];
    const auto a = wedge_angles(m);
    const double f = static_cast<double>(s.endangered) / n;
    const double r_b = boundary_radius(f, R, hub);
    svg += "<g class=\"month\" data-month=\"" + std::to_string(m) + "\">\n";
    svg += "<title>" + std::string(kMonthNames[static_cast<std::size_t>(m - 1)]) + ": " +
           std::to_string(s.endangered) + " endangered, " + std::to_string(s.safe) +
           " not endangered</title>\n";
    if (s.endangered > 0)
      svg += "<path class=\"endangered\" d=\"" + annular_sector(c, c, r_b, R, a.start_deg, a.end_deg) +
             "\" fill=\"" + to_hex(color_for(Outcome::endangered, *s.mean_certainty_endangered, anchors)) +
             "\"/>\n";
    if (s.safe > 0)
      svg += "<path class=\"safe\" d=\"" + annular_sector(c, c, hub, r_b, a.start_deg, a.end_deg) +
             "\" fill=\"" + to_hex(color_for(Outcome::safe, *s.mean_certainty_safe, anchors)) +
             "\"/>\n";
    svg += "</g>\n";
  }
  svg += "</g>\n";
  svg += "<circle class=\"rim\" cx=\"" + fx(c) + "\" cy=\"" + fx(c) + "\" r=\"" + fx(R - 0.5) +
         "\" fill=\"none\" stroke=\"#666666\" stroke-width=\"1\"/>\n";
  svg += "<circle class=\"hub\" cx=\"" + fx(c) + "\" cy=\"" + fx(c) + "\" r=\"" + fx(hub) +
         "\" fill=\"#ffffff\" stroke=\"#666666\" stroke-width=\"1\"/>\n";
  svg += "<text class=\"count\" x=\"" + fx(c) + "\" y=\"" + fx(c) +
         "\" text-anchor=\"middle\" dominant-baseline=\"central\" font-family=\"sans-serif\" "
         "font-size=\"" + fx(hub * 0.9) + "\">" + std::to_string(summary.vineyard_count) +
         "</text>\n";
  svg += "</svg>\n";
  return svg;
}

} // namespace vinerisk
