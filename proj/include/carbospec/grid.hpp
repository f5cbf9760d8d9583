#pragma once

#include <cstddef>

namespace carbospec {

// Uniform wavelength grid in nanometres; the instrument grid used throughout
// is 1150-2500 nm at 0.5 nm steps (2701 points).
struct WavelengthGrid {
    double startNm = 1150.0;
    double endNm = 2500.0;
    double stepNm = 0.5;
    std::size_t nPoints = 2701;

    static const WavelengthGrid& standard();

    double wavelengthAt(std::size_t index) const { return startNm + stepNm * static_cast<double>(index); }

    bool operator==(const WavelengthGrid& other) const = default;
};

} // namespace carbospec
