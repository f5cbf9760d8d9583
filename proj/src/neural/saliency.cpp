#include "carbospec/neural/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/metrics.hpp"
#include "carbospec/neural/spectrogram.hpp"

namespace carbospec {
namespace {

std::vector<double> gridWavelengths(const WavelengthGrid& grid) {
    std::vector<double> wl(grid.nPoints);
    for (std::size_t i = 0; i < grid.nPoints; ++i) wl[i] = grid.wavelengthAt(i);
    return wl;
}

SaliencyMap finalizeMap(std::vector<double> wavelengths, std::vector<double> magnitudes) {
    SaliencyMap map;
    map.wavelengthsNm = std::move(wavelengths);
    map.magnitudes = std::move(magnitudes);
    map.peaks = extractPeaks(map.wavelengthsNm, map.magnitudes);
    return map;
}

// Column-space saliency of one rendered spectrum, mapped back to the
// wavelength grid.
std::vector<double> cnnMagnitudes(const CnnModel& model, const double* values, std::size_t n) {
    const std::size_t height = model.config().inputH;
    const std::size_t width = model.config().inputW;
    const SpectrogramImage image = renderSpectrogram(values, n, height, width);
    const std::vector<double> dImage = model.imageGradient(image.pixels.data());

    std::vector<double> perColumn(width, 0.0);
    for (std::size_t r = 0; r < height; ++r) {
        const double* row = dImage.data() + r * width;
        for (std::size_t c = 0; c < width; ++c) perColumn[c] += std::fabs(row[c]);
    }

    // Wavelength i sits at fractional column i*(width-1)/(n-1).
    std::vector<double> magnitudes(n);
    const double scale = static_cast<double>(width - 1) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = static_cast<double>(i) * scale;
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= width) lo = width - 2;
        const double frac = pos - static_cast<double>(lo);
        magnitudes[i] = perColumn[lo] + frac * (perColumn[lo + 1] - perColumn[lo]);
    }
    return magnitudes;
}

} // namespace

std::vector<SaliencyPeak> extractPeaks(const std::vector<double>& wavelengthsNm,
                                       const std::vector<double>& magnitudes) {
    if (magnitudes.size() != wavelengthsNm.size() || magnitudes.size() < 3) {
        return {};
    }
    const double threshold = quantile(magnitudes, 0.9);
    std::vector<SaliencyPeak> peaks;
    for (std::size_t i = 1; i + 1 < magnitudes.size(); ++i) {
        if (magnitudes[i] > magnitudes[i - 1] && magnitudes[i] > magnitudes[i + 1] &&
            magnitudes[i] > threshold) {
            peaks.push_back({wavelengthsNm[i], magnitudes[i]});
        }
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const SaliencyPeak& a, const SaliencyPeak& b) {
        return a.magnitude > b.magnitude;
    });
    return peaks;
}

SaliencyMap mlpSaliency(const MlpModel& model, const double* input, const WavelengthGrid& grid) {
    if (model.inputDim() != grid.nPoints) {
        throw Error(ErrorCode::WidthMismatch, "model input width does not match the grid");
    }
    std::vector<double> g = model.inputGradient(input);
    for (double& v : g) v = std::fabs(v);
    return finalizeMap(gridWavelengths(grid), std::move(g));
}

SaliencyMap cnnSaliency(const CnnModel& model, const double* spectrumValues, std::size_t n,
                        const WavelengthGrid& grid) {
    if (n != grid.nPoints) {
        throw Error(ErrorCode::WidthMismatch, "spectrum length does not match the grid");
    }
    return finalizeMap(gridWavelengths(grid), cnnMagnitudes(model, spectrumValues, n));
}

SaliencyMap mlpMeanSaliency(const MlpModel& model, const SpectralDataset& dataset) {
    if (model.inputDim() != dataset.grid().nPoints) {
        throw Error(ErrorCode::WidthMismatch, "model input width does not match the dataset grid");
    }
    std::vector<double> mean(dataset.grid().nPoints, 0.0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const std::vector<double> g = model.inputGradient(dataset.row(i));
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += std::fabs(g[j]);
    }
    const double inv = 1.0 / static_cast<double>(dataset.size());
    for (double& v : mean) v *= inv;
    return finalizeMap(gridWavelengths(dataset.grid()), std::move(mean));
}

SaliencyMap cnnMeanSaliency(const CnnModel& model, const SpectralDataset& dataset) {
    std::vector<double> mean(dataset.grid().nPoints, 0.0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const std::vector<double> g =
            cnnMagnitudes(model, dataset.row(i), dataset.grid().nPoints);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += g[j];
    }
    const double inv = 1.0 / static_cast<double>(dataset.size());
    for (double& v : mean) v *= inv;
    return finalizeMap(gridWavelengths(dataset.grid()), std::move(mean));
}

} // namespace carbospec
