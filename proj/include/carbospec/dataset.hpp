#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "carbospec/grid.hpp"
#include "carbospec/linalg.hpp"
#include "carbospec/spectrum.hpp"

namespace carbospec {

enum class Source { Kssl, Lucas, Local, Merged };

const char* sourceName(Source source);
Source parseSource(const std::string& name);

// Immutable after construction; safe to share read-only across workers.
// Spectra live in one row-major matrix (one row per sample) on a shared grid.
class SpectralDataset {
public:
    SpectralDataset() = default;
    SpectralDataset(WavelengthGrid grid, SpectrumKind kind, Source source,
                    Matrix values, std::vector<double> labels,
                    std::vector<std::string> sampleIds,
                    std::vector<Source> sampleSources = {});

    std::size_t size() const { return values_.rows(); }
    const WavelengthGrid& grid() const { return grid_; }
    const SpectrumKind& kind() const { return kind_; }
    Source source() const { return source_; }
    const Matrix& values() const { return values_; }
    const std::vector<double>& labels() const { return labels_; }
    const std::vector<std::string>& sampleIds() const { return sampleIds_; }
    const std::vector<Source>& sampleSources() const { return sampleSources_; }

    const double* row(std::size_t i) const { return values_.row(i); }
    Spectrum spectrum(std::size_t i) const;

private:
    WavelengthGrid grid_;
    SpectrumKind kind_;
    Source source_ = Source::Local;
    Matrix values_;
    std::vector<double> labels_;
    std::vector<std::string> sampleIds_;
    std::vector<Source> sampleSources_;
};

enum class RejectionReason { NonPositive, AboveTheoretical, NonFinite };

const char* rejectionReasonName(RejectionReason reason);

struct RejectionEntry {
    std::string sampleId;
    std::size_t valueIndex = 0;
    RejectionReason reason = RejectionReason::NonPositive;
};

using RejectionLog = std::vector<RejectionEntry>;

struct ScreenResult {
    SpectralDataset dataset;
    RejectionLog rejected;
};

// Drops whole reflectance samples whose values fall outside (0, 100] or are
// non-finite. Retained rows are copied bit-identically.
ScreenResult screen(const SpectralDataset& dataset);

} // namespace carbospec
