#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carbospec/dataset.hpp"
#include "carbospec/neural/adam.hpp"
#include "carbospec/neural/cnn.hpp"
#include "carbospec/neural/mlp.hpp"

namespace carbospec {

struct TrainConfig {
    std::uint64_t seed = 42;
    double trainFraction = 0.8; // in (0, 1]; 1.0 trains on everything
    bool shuffle = true;
    std::size_t epochs = 100;
    std::size_t batchSize = 64;
    double lr0 = 1e-3;
    double lrDecay = 0.97;
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double trainLoss = 0.0;
    double valRmse = 0.0; // NaN when there is no validation split
};

struct TrainLog {
    std::vector<EpochMetrics> rows;
    std::size_t bestEpoch = 0;
    double bestValRmse = 0.0;

    std::string toText() const;
};

struct MlpTrainResult {
    MlpModel model;
    TrainLog log;
    std::vector<std::size_t> trainIndices;
    std::vector<std::size_t> valIndices;
};

struct CnnTrainResult {
    CnnModel model;
    TrainLog log;
    std::vector<std::size_t> trainIndices;
    std::vector<std::size_t> valIndices;
};

// Trains on the dataset's value matrix (rows as inputs). Deterministic given
// the seed: fixed init order, fixed shuffles, fixed batch order, best
// validation-RMSE snapshot restored at the end.
MlpTrainResult trainMlp(const SpectralDataset& dataset, const MlpConfig& modelConfig,
                        const TrainConfig& trainConfig);

// Renders spectrograms from the dataset's (preprocessed) spectra and trains
// on the images. Images are cached when small enough, re-rendered per batch
// otherwise.
CnnTrainResult trainCnn(const SpectralDataset& dataset, const CnnConfig& modelConfig,
                        const TrainConfig& trainConfig);

} // namespace carbospec
