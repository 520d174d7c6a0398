#include <regex>

#include <gtest/gtest.h>

#include "dimerhole/render.hpp"
#include "dimerhole/sampler.hpp"

using namespace dimerhole;

namespace {

int count_of(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::vector<std::string> circle_fills(const std::string& svg) {
  static const std::regex re("<circle class=\"height\"[^>]* fill=\"([^\"]+)\"");
  std::vector<std::string> out;
  for (std::sregex_iterator it(svg.begin(), svg.end(), re), end; it != end; ++it) {
    out.push_back((*it)[1]);
  }
  return out;
}

PolyominoRegion annulus(double eps) {
  DomainSpec d;
  d.outer = RectilinearPolygon::rectangle(0, 0, 1, 1);
  d.holes.push_back(RectilinearPolygon::rectangle(0.35, 0.35, 0.65, 0.65));
  d.marked_points = {{0.5, 0.0}, {0.5, 0.35}};
  return build_temperleyan(d, eps);
}

}  // namespace

TEST(Render, TwoByTwoBlockHasTwoDominoes) {
  const auto region = PolyominoRegion::from_squares({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  const auto tilings = enumerate_tilings(region);
  ASSERT_EQ(tilings.size(), 2u);
  for (const auto& t : tilings) {
    const std::string svg = render_svg(region, t);
    EXPECT_EQ(count_of(svg, "<rect class=\"domino"), 2);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  }
  EXPECT_EQ(count_of(render_svg(region, tilings[0]), "domino horizontal") +
                count_of(render_svg(region, tilings[1]), "domino horizontal"),
            2);
}

TEST(Render, HoleIsVoidAndAddedSquareHighlighted) {
  const auto region = annulus(0.05);
  const auto system = KasteleynSystem::build(region);
  const Tiling t = sample_exact(system, 3);
  const std::string svg = render_svg(region, t);
  EXPECT_EQ(count_of(svg, "<rect class=\"domino"), system.size());
  EXPECT_EQ(count_of(svg, "<rect class=\"added\""), 1);
  EXPECT_EQ(count_of(svg, "<rect class=\"removed\""), 1);
  // No domino covers a square of the hole.
  for (const auto& d : t.dominoes) {
    for (const auto& s : {d.white, d.black}) {
      const Point p = square_center(s, region.scale());
      EXPECT_FALSE(p.x > 0.35 && p.x < 0.65 && p.y > 0.35 && p.y < 0.65 &&
                   s != region.added_squares()[0]);
    }
  }
}

TEST(Render, BoundaryColoursAgreeAcrossSamples) {
  const auto region = annulus(0.05);
  const auto system = KasteleynSystem::build(region);
  const HeightLattice lattice(region);
  const Tiling a = sample_exact(system, 11), b = sample_exact(system, 12);
  ASSERT_NE(a, b);
  const HeightField ha = height_field(lattice, a), hb = height_field(lattice, b);
  RenderOptions oa, ob;
  oa.lattice = ob.lattice = &lattice;
  oa.heights = &ha;
  ob.heights = &hb;
  const auto fa = circle_fills(render_svg(region, a, oa));
  const auto fb = circle_fills(render_svg(region, b, ob));
  ASSERT_EQ(fa.size(), lattice.vertices().size());
  ASSERT_EQ(fb.size(), fa.size());
  // Outer-boundary heights are fixed, so their colours match exactly. Hole
  // boundaries move by a multiple of 4 between tilings, which keeps the
  // lightness (the h mod 4 channel).
  auto lightness = [](const std::string& c) { return c.substr(c.rfind(',')); };
  int outer = 0, inner = 0, differ = 0;
  for (std::size_t v = 0; v < fa.size(); ++v) {
    const int loop = region.loop_of(lattice.vertices()[v]);
    if (loop == 0) {
      EXPECT_EQ(fa[v], fb[v]) << "vertex " << v;
      ++outer;
    } else if (loop > 0) {
      EXPECT_EQ(lightness(fa[v]), lightness(fb[v])) << "vertex " << v;
      EXPECT_EQ((ha.values[v] - hb.values[v]) % 4, 0);
      ++inner;
    } else {
      differ += fa[v] != fb[v];
    }
  }
  EXPECT_GT(outer, 50);
  EXPECT_GT(inner, 10);
  EXPECT_GT(differ, 0);
}

TEST(Render, ColourMapIsAFunctionOfTheValue) {
  EXPECT_EQ(height_color(5), height_color(5));
  EXPECT_NE(height_color(5), height_color(6));
  EXPECT_NE(height_color(-3), height_color(1));
  EXPECT_EQ(height_color(-3), height_color(-3));
}
