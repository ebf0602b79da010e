#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "phenocurve/dates.hpp"
#include "phenocurve/fpca.hpp"
#include "phenocurve/series.hpp"

namespace phenocurve {

// Marker colours in canonical phase order GU, SoS, Mat, Sen, EoS, Dor.
inline constexpr std::array<std::string_view, 6> kPhaseColors = {"#1b9e77", "#d95f02", "#7570b3",
                                                                 "#e7298a", "#66a61e", "#e6ab02"};

struct SpiralStyle {
  double r0 = 30.0;          // radius at the start of the first loop
  double b = 10.0;           // radial growth per loop
  double marker_radius = 3.0;
  double margin = 40.0;
  int segments_per_loop = 96;
  std::string title = "Phenological dates per pixel";
};

struct SpiralPoint {
  double angle = 0.0;  // radians clockwise from 12 o'clock
  double radius = 0.0;
};

// Position of day `doy` on loop `loop` (0-based).
SpiralPoint spiral_point(int loop, int doy, const SpiralStyle& style);

/// One loop per record; present dates are drawn as coloured markers.
std::string render_spiral(const std::vector<PhenoDates>& dates, const SpiralStyle& style = {});

struct ProfileStyle {
  double width = 760.0;
  double height = 420.0;
  double margin = 50.0;
  std::string title = "Annual curves and idealized trend";
};

/// Thin annual curves with the thick trend on a day-of-year axis; dates as vertical guides.
std::string render_profile(const CurveMatrix& curves, const TrendCurve& trend, const PhenoDates* dates,
                           const ProfileStyle& style = {});

std::string xml_escape(std::string_view text);

}  // namespace phenocurve
