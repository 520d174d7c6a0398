#include "dimerhole/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dimerhole/error.hpp"

namespace dimerhole {

namespace {

constexpr const char* kHorizontal = "#4a7fb5";
constexpr const char* kVertical = "#d9a441";

struct Frame {
  int i0, j1, px;
  // SVG y runs downwards; lattice row j maps to pixel row j1 - j.
  int x(int i) const { return (i - i0 + 1) * px; }
  int y(int j) const { return (j1 - j + 1) * px; }
};

void rect(std::ostringstream& out, const char* cls, int x, int y, int w, int h,
          const std::string& style) {
  out << "<rect class=\"" << cls << "\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
      << "\" height=\"" << h << "\" " << style << "/>\n";
}

}  // namespace

std::string height_color(int value) {
  // Hue cycles every 36 height units; lightness alternates with h mod 4 so
  // the mod-4 classes stay distinguishable.
  const int hue = (((value % 36) + 36) % 36) * 10;
  const int light = 35 + 10 * (((value % 4) + 4) % 4);
  char buf[32];
  std::snprintf(buf, sizeof buf, "hsl(%d,70%%,%d%%)", hue, light);
  return buf;
}

std::string render_svg(const PolyominoRegion& region, const Tiling& tiling,
                       const RenderOptions& options) {
  const SquareSet& sq = region.squares();
  std::vector<LatticeSquare> all = sq.sorted();
  if (region.removed_square()) all.push_back(*region.removed_square());
  if (all.empty()) throw Error(ErrorCode::kIo, "nothing to render");
  int i0 = all[0].i, i1 = all[0].i, j0 = all[0].j, j1 = all[0].j;
  for (const auto& s : all) {
    i0 = std::min(i0, s.i);
    i1 = std::max(i1, s.i);
    j0 = std::min(j0, s.j);
    j1 = std::max(j1, s.j);
  }
  const int px = std::max(options.cell_px, 2);
  const Frame f{i0, j1, px};
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << (i1 - i0 + 3) * px
      << "\" height=\"" << (j1 - j0 + 3) * px << "\">\n";
  const std::string stroke = "stroke=\"#222\" stroke-width=\"" + std::to_string(px / 8 + 1) + "\"";
  for (const auto& d : tiling.dominoes) {
    const int lo_i = std::min(d.white.i, d.black.i), hi_j = std::max(d.white.j, d.black.j);
    const bool horizontal = d.white.j == d.black.j;
    rect(out, horizontal ? "domino horizontal" : "domino vertical", f.x(lo_i), f.y(hi_j),
         horizontal ? 2 * px : px, horizontal ? px : 2 * px,
         std::string("fill=\"") + (horizontal ? kHorizontal : kVertical) + "\" " + stroke);
  }
  if (const auto& r = region.removed_square()) {
    rect(out, "removed", f.x(r->i), f.y(r->j), px, px,
         "fill=\"none\" stroke=\"#c0392b\" stroke-dasharray=\"2,2\"");
  }
  for (const auto& a : region.added_squares()) {
    rect(out, "added", f.x(a.i), f.y(a.j), px, px,
         "fill=\"#e74c3c\" fill-opacity=\"0.45\" stroke=\"#c0392b\" stroke-width=\"2\"");
  }
  if (options.lattice && options.heights) {
    const auto& verts = options.lattice->vertices();
    if (options.heights->values.size() != verts.size()) {
      throw Error(ErrorCode::kMissingHarmonicData, "height overlay does not match the lattice");
    }
    const double r = px / 5.0 + 1.0;
    for (std::size_t v = 0; v < verts.size(); ++v) {
      // Vertex (a, b) is the lower-left corner of square (a, b).
      out << "<circle class=\"height\" cx=\"" << f.x(verts[v].a) << "\" cy=\""
          << f.y(verts[v].b - 1) << "\" r=\"" << r << "\" fill=\""
          << height_color(options.heights->values[v]) << "\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

void render_tiling(const PolyominoRegion& region, const Tiling& tiling,
                   const std::string& path, const RenderOptions& options) {
  const std::string svg = render_svg(region, tiling, options);
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << svg)) throw Error(ErrorCode::kIo, "cannot write " + path);
}

}  // namespace dimerhole
