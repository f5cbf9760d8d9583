#pragma once

#include <string>
#include <vector>

#include "carbospec/grid.hpp"
#include "carbospec/io/reference_data.hpp"
#include "carbospec/neural/saliency.hpp"

namespace carbospec {

// Deterministic SVG emitters: fixed canvas, fixed number formatting, no
// timestamps, so identical inputs give byte-identical files.

struct SvgOptions {
    int width = 960;
    int height = 480;
    std::string title;
};

// Spectrum polyline with optional dashed vertical markers at the carbonate
// absorption bands.
std::string spectrumSvg(const std::vector<double>& wavelengthsNm,
                        const std::vector<double>& values, bool drawBandMarkers,
                        const SvgOptions& options = {});

// Spectrum colored by normalized saliency (red = high, light blue = low) with
// a peak table.
std::string saliencySvg(const std::vector<double>& wavelengthsNm,
                        const std::vector<double>& values, const SaliencyMap& saliency,
                        const SvgOptions& options = {});

} // namespace carbospec
