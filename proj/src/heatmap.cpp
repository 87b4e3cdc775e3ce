#include "ringjsa/heatmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <vector>

#include <png.h>

namespace ringjsa {

namespace {

using Anchor = std::array<double, 3>;

// viridis sampled at 9 evenly spaced points
constexpr std::array<Anchor, 9> kViridis = {{
    {0.267, 0.005, 0.329},
    {0.283, 0.141, 0.458},
    {0.254, 0.265, 0.530},
    {0.207, 0.372, 0.553},
    {0.164, 0.471, 0.558},
    {0.128, 0.567, 0.551},
    {0.135, 0.659, 0.518},
    {0.478, 0.821, 0.318},
    {0.993, 0.906, 0.144},
}};

// closed loop: first and last anchors coincide
constexpr std::array<Anchor, 9> kCyclic = {{
    {0.886, 0.851, 0.886},
    {0.627, 0.690, 0.804},
    {0.365, 0.447, 0.737},
    {0.255, 0.192, 0.459},
    {0.184, 0.078, 0.212},
    {0.451, 0.137, 0.251},
    {0.698, 0.353, 0.306},
    {0.812, 0.655, 0.580},
    {0.886, 0.851, 0.886},
}};

template <std::size_t N>
void interpolate(const std::array<Anchor, N>& table, double t, unsigned char rgb[3])
{
    t = std::clamp(t, 0.0, 1.0) * static_cast<double>(N - 1);
    const std::size_t k = std::min(static_cast<std::size_t>(t), N - 2);
    const double f = t - static_cast<double>(k);
    for (int ch = 0; ch < 3; ++ch) {
        const double v = (1.0 - f) * table[k][ch] + f * table[k + 1][ch];
        rgb[ch] = static_cast<unsigned char>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
    }
}

}  // namespace

void colormap_rgb(Colormap cmap, double t, unsigned char rgb[3])
{
    if (cmap == Colormap::viridis)
        interpolate(kViridis, t, rgb);
    else
        interpolate(kCyclic, t - std::floor(t), rgb);
}

void write_heatmap_png(const std::string& path, const RealMatrix& map, const HeatmapOptions& opts)
{
    if (map.size() == 0) throw ConfigError("cannot render an empty map");
    if (opts.cell_px < 1) throw ConfigError("cell size must be >= 1 pixel");

    double lo = opts.vmin, hi = opts.vmax;
    if (opts.colormap == Colormap::cyclic && lo == hi) {
        lo = -kPi;
        hi = kPi;
    } else if (lo == hi) {
        lo = std::numeric_limits<double>::infinity();
        hi = -lo;
        for (Eigen::Index k = 0; k < map.size(); ++k)
            if (std::isfinite(map.data()[k])) {
                lo = std::min(lo, map.data()[k]);
                hi = std::max(hi, map.data()[k]);
            }
        if (!std::isfinite(lo)) lo = hi = 0.0;
        if (hi == lo) hi = lo + 1.0;
    }

    const auto rows = static_cast<int>(map.rows()), cols = static_cast<int>(map.cols());
    const int width = cols * opts.cell_px, height = rows * opts.cell_px;
    std::vector<unsigned char> image(static_cast<std::size_t>(width) * height * 3, 255);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double v = map(r, c);
            unsigned char rgb[3] = {255, 255, 255};
            if (std::isfinite(v)) colormap_rgb(opts.colormap, (v - lo) / (hi - lo), rgb);
            const int y0 = (rows - 1 - r) * opts.cell_px;
            for (int y = y0; y < y0 + opts.cell_px; ++y)
                for (int x = c * opts.cell_px; x < (c + 1) * opts.cell_px; ++x)
                    std::copy(rgb, rgb + 3, &image[(static_cast<std::size_t>(y) * width + x) * 3]);
        }
    }

    std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
    if (!fp) throw ConfigError("cannot write '" + path + "'");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw NumericalError("libpng initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw NumericalError("libpng failed writing '" + path + "'");
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) png_write_row(png, &image[static_cast<std::size_t>(y) * width * 3]);
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace ringjsa
