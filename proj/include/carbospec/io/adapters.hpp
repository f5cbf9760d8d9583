#pragma once

#include <optional>
#include <string>

#include "carbospec/dataset.hpp"

namespace carbospec {

enum class ReflectanceUnit { Percent, Fraction };

// Options for the library-export adapters. Sources are wide CSVs (one row per
// sample, wavelength columns in nm) with portal-dependent column names, so
// the id/carbonate column names are configurable. Every column whose header
// parses as a number is treated as a wavelength column.
struct AdapterOptions {
    std::string idColumn = "sample_id";
    std::string carbonateColumn = "carbonate";
    // Required for KSSL: whether reflectance is exported as percent or as a
    // 0-1 fraction. The portal does not say, so the caller must.
    std::optional<ReflectanceUnit> reflectanceUnit;
};

struct AdaptResult {
    SpectralDataset dataset;
    RejectionLog rejected;
};

// KSSL export: reflectance spectra over 350-2500 nm. Crops to the canonical
// range, screens reflectance against (0, 100], converts to absorbance and
// resamples onto the canonical grid by linear interpolation. Labels are
// already g/100g.
AdaptResult adaptKssl(const std::string& path, const AdapterOptions& options);

// LUCAS export: spectra already absorbance, labels in g/kg (converted to
// g/100g). Resampled onto the canonical grid by linear interpolation.
AdaptResult adaptLucas(const std::string& path, const AdapterOptions& options);

} // namespace carbospec
