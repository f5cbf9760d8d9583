#pragma once

#include <vector>

#include "carbospec/dataset.hpp"
#include "carbospec/grid.hpp"
#include "carbospec/neural/cnn.hpp"
#include "carbospec/neural/mlp.hpp"

namespace carbospec {

struct SaliencyPeak {
    double wavelengthNm = 0.0;
    double magnitude = 0.0;
};

struct SaliencyMap {
    std::vector<double> wavelengthsNm;
    std::vector<double> magnitudes;   // |d pred / d input| per wavelength, >= 0
    std::vector<SaliencyPeak> peaks;  // descending by magnitude
};

// Local maxima above the 90th percentile of the magnitudes, sorted descending.
std::vector<SaliencyPeak> extractPeaks(const std::vector<double>& wavelengthsNm,
                                       const std::vector<double>& magnitudes);

// MLP: gradient magnitude straight on the input features.
SaliencyMap mlpSaliency(const MlpModel& model, const double* input, const WavelengthGrid& grid);

// CNN: gradient w.r.t. the rendered spectrogram, magnitudes summed over image
// rows per column, mapped back to wavelengths by inverse interpolation of the
// column coordinates.
SaliencyMap cnnSaliency(const CnnModel& model, const double* spectrumValues, std::size_t n,
                        const WavelengthGrid& grid);

// Mean of the per-sample magnitude maps over a dataset.
SaliencyMap mlpMeanSaliency(const MlpModel& model, const SpectralDataset& dataset);
SaliencyMap cnnMeanSaliency(const CnnModel& model, const SpectralDataset& dataset);

} // namespace carbospec
