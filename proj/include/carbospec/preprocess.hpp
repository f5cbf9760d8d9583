#pragma once

#include <string>
#include <vector>

#include "carbospec/dataset.hpp"
#include "carbospec/spectrum.hpp"

namespace carbospec {

struct SgParams {
    int window = 13;
    int polyorder = 2;
    int derivOrder = 2;

    void validate() const;
    bool operator==(const SgParams& other) const = default;
};

// Precomputed Savitzky-Golay convolution weights for one (window, polyorder,
// derivOrder) triple. Row t holds the weights that evaluate the fitted
// polynomial's derivative at offset t inside the window; interior points use
// the centre row, boundary points reuse the first/last full window with the
// matching off-centre row, so the output keeps the input length.
class SgCoefficients {
public:
    static const SgCoefficients& get(const SgParams& params);

    const std::vector<double>& rowAt(int offset) const { return rows_[offset]; }
    int window() const { return params_.window; }
    int half() const { return params_.window / 2; }
    const SgParams& params() const { return params_; }

    // Filters one signal; derivatives are divided by stepNm^derivOrder so the
    // result is in physical units per nm.
    std::vector<double> apply(const double* values, std::size_t n, double stepNm) const;

private:
    explicit SgCoefficients(const SgParams& params);

    SgParams params_;
    std::vector<std::vector<double>> rows_;
};

Spectrum savitzkyGolay(const Spectrum& spectrum, const SgParams& params, double stepNm);

// (v - min) / (max - min) per spectrum; rejects constant spectra instead of
// emitting NaN.
Spectrum minmaxNormalize(const Spectrum& spectrum);

struct PipelineStep {
    enum class Op { Absorbance, MinMaxNormalize, SavitzkyGolay };

    Op op = Op::Absorbance;
    SgParams sg{};

    static PipelineStep absorbance() { return {Op::Absorbance, {}}; }
    static PipelineStep minmax() { return {Op::MinMaxNormalize, {}}; }
    static PipelineStep savgol(SgParams params) { return {Op::SavitzkyGolay, params}; }

    bool operator==(const PipelineStep& other) const = default;
};

// Ordered transform chain. Replay is deterministic: the same input bytes give
// the same output bytes.
struct PreprocessPipeline {
    std::vector<PipelineStep> steps;

    void validate() const;

    Spectrum applyTo(const Spectrum& spectrum, double stepNm) const;
    SpectralDataset apply(const SpectralDataset& dataset) const;

    // Kind of the output given the input kind (also validates the chain).
    SpectrumKind outputKind(SpectrumKind input) const;

    std::string toJson() const;
    static PreprocessPipeline fromJson(const std::string& json);

    bool operator==(const PreprocessPipeline& other) const = default;
};

} // namespace carbospec
