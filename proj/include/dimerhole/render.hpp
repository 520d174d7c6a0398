#pragma once

#include <string>

#include "dimerhole/height.hpp"
#include "dimerhole/kasteleyn.hpp"

namespace dimerhole {

struct RenderOptions {
  int cell_px = 12;
  // Optional overlay: one dot per lattice vertex coloured by its height.
  const HeightLattice* lattice = nullptr;
  const HeightField* heights = nullptr;
};

// Colour of a height value. Depends on the value alone, so vertices with
// equal heights get equal colours in every render.
std::string height_color(int value);

// SVG with one <rect class="domino ..."> per domino, horizontal and vertical
// dominoes in different colours. Holes stay empty; the removed square is
// outlined and the added squares are highlighted.
std::string render_svg(const PolyominoRegion& region, const Tiling& tiling,
                       const RenderOptions& options = {});

// Writes render_svg to `path`. Throws kIo.
void render_tiling(const PolyominoRegion& region, const Tiling& tiling,
                   const std::string& path, const RenderOptions& options = {});

}  // namespace dimerhole
