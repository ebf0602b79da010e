#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "phenocurve/errors.hpp"
#include "phenocurve/harmonic.hpp"
#include "phenocurve/svg.hpp"

using namespace phenocurve;

namespace {

PhenoDates six(int shift = 0) {
  return PhenoDates::from_doy({30 + shift, 90 + shift, 150 + shift, 200 + shift, 260 + shift, 320 + shift}, 23.0);
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("spiral with one pixel has six markers") {
  const auto svg = render_spiral({six()});
  CHECK(fixtures::well_formed_xml(svg));
  // Six date markers plus six legend swatches.
  CHECK(count(svg, "<circle") == 12);
  for (auto c : kPhaseColors) CHECK(count(svg, std::string(c)) == 2);
  CHECK(count(svg, ">Jan<") == 1);
}

TEST_CASE("spiral geometry") {
  const SpiralStyle style;
  const auto first = spiral_point(0, 1, style);
  const auto last = spiral_point(0, 365, style);
  CHECK(std::abs(first.angle) < 0.02);
  CHECK(std::abs(last.angle - 2 * std::numbers::pi) < 1e-12);
  CHECK(std::abs(std::sin(first.angle) - std::sin(last.angle)) < 0.02);

  double previous = -1.0;
  for (int k = 0; k < 62; ++k) {
    const double r = spiral_point(k, 100, style).radius;
    CHECK(r > previous);
    previous = r;
  }
}

TEST_CASE("spiral with 62 pixels is deterministic and well formed") {
  std::vector<PhenoDates> d;
  for (int k = 0; k < 62; ++k) d.push_back(six(k % 7));
  const auto a = render_spiral(d);
  CHECK(a == render_spiral(d));
  CHECK(fixtures::well_formed_xml(a));
  CHECK(count(a, "<circle") == 62 * 6 + 6);
  CHECK_THROWS_AS(render_spiral({}), Error);
}

TEST_CASE("profile plot") {
  const std::vector<HarmonicModel> ms = {HarmonicModel::single_cosine(0.4, 0.2, 23, 200),
                                         HarmonicModel::single_cosine(0.42, 0.25, 23, 210)};
  auto curves = resample_curves(ms, 60, {"2001", "2002 <wet>"});
  TrendCurve trend{curves.samples.rowwise().mean(), 23.0};
  const auto dates = closed_form_phenodates(0.4, 0.2, 23, 200);
  const auto svg = render_profile(curves, trend, &dates);
  CHECK(fixtures::well_formed_xml(svg));
  CHECK(count(svg, "<polyline") == 3);
  CHECK(svg.find("stroke-width=\"2.50\"") != std::string::npos);
  CHECK(svg.find("2002 &lt;wet&gt;") != std::string::npos);
  CHECK(svg == render_profile(curves, trend, &dates));
  CHECK(svg.find("Day of year") != std::string::npos);
}

TEST_CASE("xml escaping") {
  CHECK(xml_escape("a<b & \"c\"") == "a&lt;b &amp; &quot;c&quot;");
}
