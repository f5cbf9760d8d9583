#pragma once

#include <string>

#include "carbospec/dataset.hpp"

namespace carbospec {

// Canonical wide CSV: header "sample_id,carbonate_g100g,1150.0,...,2500.0"
// (2701 wavelength columns at 0.5 nm), UTF-8, comma separated, dot decimals,
// LF line endings. Values are written with 17 significant digits so a
// write/read round trip is value-exact.
void writeCanonicalCsv(const SpectralDataset& dataset, const std::string& path);

SpectralDataset loadCanonicalCsv(const std::string& path, SpectrumKind kind,
                                 Source source = Source::Local);

// Rejection log: one "sample_id<TAB>reason" line per dropped sample.
void writeRejectionLog(const RejectionLog& log, const std::string& path);

} // namespace carbospec
