#pragma once

#include <cstddef>
#include <vector>

namespace carbospec {

// Versioned recipe turning one preprocessed spectrum into the CNN's input
// image: resample to `width` columns by linear interpolation, min-max scale
// into row indices (row 0 = maximum), rasterize as a connected one-pixel
// polyline (intensity 1 on the curve, 0 elsewhere).
inline constexpr int kSpectrogramRecipeVersion = 1;

struct SpectrogramImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> pixels; // row-major [height][width], values in {0, 1}
};

// Linear resample of n samples to m columns (endpoints preserved).
std::vector<double> resampleLinear(const double* values, std::size_t n, std::size_t m);

// Column j gets the pixel at rowPerColumn[j]; jumps between neighbouring
// columns are closed with a vertical run in the later column, so the curve is
// 4-connected.
SpectrogramImage rasterizePolyline(const std::vector<std::size_t>& rowPerColumn, std::size_t height);

SpectrogramImage renderSpectrogram(const double* values, std::size_t n,
                                   std::size_t height = 244, std::size_t width = 488);

} // namespace carbospec
