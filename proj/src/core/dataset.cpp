#include "carbospec/dataset.hpp"

#include <cmath>
#include <cstring>

#include "carbospec/errors.hpp"

namespace carbospec {

const char* sourceName(Source source) {
    switch (source) {
        case Source::Kssl: return "kssl";
        case Source::Lucas: return "lucas";
        case Source::Local: return "local";
        case Source::Merged: return "merged";
    }
    return "unknown";
}

Source parseSource(const std::string& name) {
    if (name == "kssl") return Source::Kssl;
    if (name == "lucas") return Source::Lucas;
    if (name == "local") return Source::Local;
    if (name == "merged") return Source::Merged;
    throw Error(ErrorCode::ParseError, "unknown source '" + name + "'");
}

SpectralDataset::SpectralDataset(WavelengthGrid grid, SpectrumKind kind, Source source,
                                 Matrix values, std::vector<double> labels,
                                 std::vector<std::string> sampleIds,
                                 std::vector<Source> sampleSources)
    : grid_(grid),
      kind_(kind),
      source_(source),
      values_(std::move(values)),
      labels_(std::move(labels)),
      sampleIds_(std::move(sampleIds)),
      sampleSources_(std::move(sampleSources)) {
    if (values_.rows() == 0) {
        throw Error(ErrorCode::EmptyInput, "dataset needs at least one sample");
    }
    if (values_.cols() != grid_.nPoints) {
        throw Error(ErrorCode::GridMismatch,
                    "spectra have " + std::to_string(values_.cols()) + " points, grid has " +
                        std::to_string(grid_.nPoints));
    }
    if (labels_.size() != values_.rows() || sampleIds_.size() != values_.rows()) {
        throw Error(ErrorCode::LengthMismatch, "labels/sample ids must match sample count");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (!(labels_[i] >= 0.0)) {
            throw Error(ErrorCode::NegativeContent,
                        "sample '" + sampleIds_[i] + "' has negative carbonate label");
        }
    }
    if (sampleSources_.empty()) {
        sampleSources_.assign(values_.rows(), source_);
    } else if (sampleSources_.size() != values_.rows()) {
        throw Error(ErrorCode::LengthMismatch, "per-sample sources must match sample count");
    }
}

Spectrum SpectralDataset::spectrum(std::size_t i) const {
    Spectrum s;
    s.kind = kind_;
    s.sampleId = sampleIds_[i];
    s.values.assign(row(i), row(i) + grid_.nPoints);
    return s;
}

const char* rejectionReasonName(RejectionReason reason) {
    switch (reason) {
        case RejectionReason::NonPositive: return "NonPositiveReflectance";
        case RejectionReason::AboveTheoretical: return "AboveTheoreticalLimit";
        case RejectionReason::NonFinite: return "NonFinite";
    }
    return "Unknown";
}

ScreenResult screen(const SpectralDataset& dataset) {
    if (dataset.kind() != SpectrumKind::reflectancePct()) {
        throw Error(ErrorCode::KindMismatch, "screening applies to percent reflectance data");
    }
    const std::size_t n = dataset.size();
    const std::size_t width = dataset.grid().nPoints;

    RejectionLog log;
    std::vector<std::size_t> keep;
    keep.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* values = dataset.row(i);
        bool ok = true;
        for (std::size_t j = 0; j < width; ++j) {
            const double v = values[j];
            if (!std::isfinite(v)) {
                log.push_back({dataset.sampleIds()[i], j, RejectionReason::NonFinite});
                ok = false;
                break;
            }
            if (v <= 0.0) {
                log.push_back({dataset.sampleIds()[i], j, RejectionReason::NonPositive});
                ok = false;
                break;
            }
            if (v > 100.0) {
                log.push_back({dataset.sampleIds()[i], j, RejectionReason::AboveTheoretical});
                ok = false;
                break;
            }
        }
        if (ok) keep.push_back(i);
    }
    if (keep.empty()) {
        throw Error(ErrorCode::EmptyAfterScreening, "all " + std::to_string(n) + " samples rejected");
    }

    Matrix values(keep.size(), width);
    std::vector<double> labels(keep.size());
    std::vector<std::string> ids(keep.size());
    std::vector<Source> sources(keep.size());
    for (std::size_t out = 0; out < keep.size(); ++out) {
        const std::size_t in = keep[out];
        std::memcpy(values.row(out), dataset.row(in), width * sizeof(double));
        labels[out] = dataset.labels()[in];
        ids[out] = dataset.sampleIds()[in];
        sources[out] = dataset.sampleSources()[in];
    }
    return {SpectralDataset(dataset.grid(), dataset.kind(), dataset.source(), std::move(values),
                            std::move(labels), std::move(ids), std::move(sources)),
            std::move(log)};
}

} // namespace carbospec
