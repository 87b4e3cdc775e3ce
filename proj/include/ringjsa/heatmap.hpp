#pragma once

#include <string>

#include "ringjsa/common.hpp"

namespace ringjsa {

enum class Colormap { viridis, cyclic };

struct HeatmapOptions {
    Colormap colormap = Colormap::viridis;
    int cell_px = 16;  // pixels per grid cell
    double vmin = 0.0;
    double vmax = 0.0;  // vmin == vmax: autoscale (cyclic: fixed to [-pi, pi])
};

/// Writes an RGB PNG of `map`, first row at the bottom. NaN cells are white.
void write_heatmap_png(const std::string& path, const RealMatrix& map, const HeatmapOptions& opts = {});

/// RGB in [0, 255] for t in [0, 1].
void colormap_rgb(Colormap cmap, double t, unsigned char rgb[3]);

}  // namespace ringjsa
