#include "carbospec/neural/spectrogram.hpp"

#include <algorithm>
#include <cmath>

#include "carbospec/errors.hpp"

namespace carbospec {

std::vector<double> resampleLinear(const double* values, std::size_t n, std::size_t m) {
    if (n < 2 || m < 2) {
        throw Error(ErrorCode::InvalidParams, "resample needs at least two points on both grids");
    }
    std::vector<double> out(m);
    const double scale = static_cast<double>(n - 1) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j < m; ++j) {
        const double pos = static_cast<double>(j) * scale;
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= n) lo = n - 2;
        const double frac = pos - static_cast<double>(lo);
        out[j] = values[lo] + frac * (values[lo + 1] - values[lo]);
    }
    return out;
}

SpectrogramImage rasterizePolyline(const std::vector<std::size_t>& rowPerColumn, std::size_t height) {
    SpectrogramImage image;
    image.height = height;
    image.width = rowPerColumn.size();
    image.pixels.assign(height * image.width, 0.0);
    for (std::size_t j = 0; j < image.width; ++j) {
        const std::size_t r = rowPerColumn[j];
        image.pixels[r * image.width + j] = 1.0;
        if (j > 0) {
            const std::size_t prev = rowPerColumn[j - 1];
            const std::size_t lo = std::min(prev, r);
            const std::size_t hi = std::max(prev, r);
            for (std::size_t run = lo; run <= hi; ++run) {
                image.pixels[run * image.width + j] = 1.0;
            }
        }
    }
    return image;
}

SpectrogramImage renderSpectrogram(const double* values, std::size_t n,
                                   std::size_t height, std::size_t width) {
    const std::vector<double> columns = resampleLinear(values, n, width);
    const auto [minIt, maxIt] = std::minmax_element(columns.begin(), columns.end());
    const double lo = *minIt;
    const double hi = *maxIt;
    if (!(hi > lo)) {
        throw Error(ErrorCode::ConstantSpectrum, "spectrum has no spread to rasterize");
    }
    const double rowScale = static_cast<double>(height - 1) / (hi - lo);
    std::vector<std::size_t> rows(width);
    for (std::size_t j = 0; j < width; ++j) {
        rows[j] = static_cast<std::size_t>(std::lround((hi - columns[j]) * rowScale));
    }
    return rasterizePolyline(rows, height);
}

} // namespace carbospec
