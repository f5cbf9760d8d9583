#include "carbospec/neural/train.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include "carbospec/errors.hpp"
#include "carbospec/metrics.hpp"
#include "carbospec/neural/spectrogram.hpp"
#include "carbospec/rng.hpp"

namespace carbospec {
namespace {

constexpr std::size_t kImageCacheBudgetBytes = 256ull << 20;

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
};

Split makeSplit(std::size_t n, const TrainConfig& config, Rng& rng) {
    if (!(config.trainFraction > 0.0) || config.trainFraction > 1.0) {
        throw Error(ErrorCode::InvalidParams, "train fraction must be in (0, 1]");
    }
    std::vector<std::size_t> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    if (config.shuffle) rng.shuffle(indices);
    std::size_t nTrain = static_cast<std::size_t>(std::llround(config.trainFraction * static_cast<double>(n)));
    if (nTrain < 1) nTrain = 1;
    if (nTrain > n) nTrain = n;
    Split split;
    split.train.assign(indices.begin(), indices.begin() + nTrain);
    split.val.assign(indices.begin() + nTrain, indices.end());
    return split;
}

std::string formatDouble(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename SnapshotFn, typename RestoreFn>
void trackBest(TrainLog& log, std::size_t epoch, double valRmse, bool hasVal,
               const SnapshotFn& snapshot, const RestoreFn& restore, bool lastEpoch) {
    if (hasVal) {
        if (log.rows.size() == 1 || valRmse < log.bestValRmse) {
            log.bestValRmse = valRmse;
            log.bestEpoch = epoch;
            snapshot();
        }
        if (lastEpoch) restore();
    } else {
        log.bestEpoch = epoch;
        log.bestValRmse = std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

std::string TrainLog::toText() const {
    std::ostringstream out;
    for (const EpochMetrics& row : rows) {
        out << "epoch=" << row.epoch << " train_loss=" << formatDouble(row.trainLoss);
        if (std::isfinite(row.valRmse)) {
            out << " val_rmse=" << formatDouble(row.valRmse);
        }
        out << "\n";
    }
    out << "best_epoch=" << bestEpoch;
    if (std::isfinite(bestValRmse)) {
        out << " best_val_rmse=" << formatDouble(bestValRmse);
    }
    out << "\n";
    return out.str();
}

MlpTrainResult trainMlp(const SpectralDataset& dataset, const MlpConfig& modelConfig,
                        const TrainConfig& trainConfig) {
    const Matrix& x = dataset.values();
    const std::vector<double>& y = dataset.labels();
    const std::size_t d = x.cols();

    Rng rng(trainConfig.seed);
    const Split split = makeSplit(x.rows(), trainConfig, rng);
    const bool hasVal = !split.val.empty();

    MlpTrainResult result;
    result.trainIndices = split.train;
    result.valIndices = split.val;
    result.model = MlpModel(d, modelConfig);

    Matrix valX(split.val.size(), d);
    std::vector<double> valY(split.val.size());
    for (std::size_t i = 0; i < split.val.size(); ++i) {
        std::memcpy(valX.row(i), x.row(split.val[i]), d * sizeof(double));
        valY[i] = y[split.val[i]];
    }

    std::vector<Tensor*> params = result.model.parameters();
    AdamConfig adamConfig;
    adamConfig.lr0 = trainConfig.lr0;
    adamConfig.decay = trainConfig.lrDecay;
    AdamOptimizer optimizer(adamConfig, params);

    std::vector<std::size_t> order = split.train;
    std::vector<std::vector<double>> snapshot;
    const auto takeSnapshot = [&] {
        snapshot.clear();
        for (const Tensor* p : params) snapshot.push_back(p->data);
    };
    const auto restoreSnapshot = [&] {
        if (snapshot.empty()) return;
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->data = snapshot[i];
    };

    for (std::size_t epoch = 0; epoch < trainConfig.epochs; ++epoch) {
        if (trainConfig.shuffle) rng.shuffle(order);
        double lossSum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += trainConfig.batchSize) {
            const std::size_t count = std::min(trainConfig.batchSize, order.size() - start);
            Matrix batchX(count, d);
            std::vector<double> batchY(count);
            for (std::size_t i = 0; i < count; ++i) {
                std::memcpy(batchX.row(i), x.row(order[start + i]), d * sizeof(double));
                batchY[i] = y[order[start + i]];
            }
            const double loss = result.model.lossAndGrads(batchX, batchY);
            if (!std::isfinite(loss)) {
                throw Error(ErrorCode::DivergedTraining, "loss diverged at epoch " + std::to_string(epoch));
            }
            lossSum += loss * static_cast<double>(count);
            optimizer.step(params, epoch);
        }

        EpochMetrics row;
        row.epoch = epoch;
        row.trainLoss = lossSum / static_cast<double>(order.size());
        row.valRmse = std::numeric_limits<double>::quiet_NaN();
        if (hasVal) {
            const std::vector<double> pred = result.model.predict(valX);
            row.valRmse = rmse(valY, pred);
        }
        result.log.rows.push_back(row);
        trackBest(result.log, epoch, row.valRmse, hasVal, takeSnapshot, restoreSnapshot,
                  epoch + 1 == trainConfig.epochs);
    }
    return result;
}

CnnTrainResult trainCnn(const SpectralDataset& dataset, const CnnConfig& modelConfig,
                        const TrainConfig& trainConfig) {
    const std::size_t n = dataset.size();
    const std::size_t width = dataset.grid().nPoints;
    const std::size_t imageSize = modelConfig.inputH * modelConfig.inputW;

    Rng rng(trainConfig.seed);
    const Split split = makeSplit(n, trainConfig, rng);
    const bool hasVal = !split.val.empty();

    CnnTrainResult result;
    result.trainIndices = split.train;
    result.valIndices = split.val;
    result.model = CnnModel(modelConfig);

    // Spectrogram provider: cache when the whole set fits the budget.
    const bool cacheImages = n * imageSize * sizeof(double) <= kImageCacheBudgetBytes;
    std::vector<std::vector<double>> imageCache;
    if (cacheImages) {
        imageCache.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            imageCache[i] = renderSpectrogram(dataset.row(i), width, modelConfig.inputH,
                                              modelConfig.inputW)
                                .pixels;
        }
    }
    std::vector<double> scratch;
    const auto imageFor = [&](std::size_t i) -> const double* {
        if (cacheImages) return imageCache[i].data();
        scratch = renderSpectrogram(dataset.row(i), width, modelConfig.inputH, modelConfig.inputW)
                      .pixels;
        return scratch.data();
    };

    std::vector<Tensor*> params = result.model.parameters();
    AdamConfig adamConfig;
    adamConfig.lr0 = trainConfig.lr0;
    adamConfig.decay = trainConfig.lrDecay;
    AdamOptimizer optimizer(adamConfig, params);

    std::vector<std::size_t> order = split.train;
    std::vector<std::vector<double>> snapshot;
    const auto takeSnapshot = [&] {
        snapshot.clear();
        for (const Tensor* p : params) snapshot.push_back(p->data);
    };
    const auto restoreSnapshot = [&] {
        if (snapshot.empty()) return;
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->data = snapshot[i];
    };

    CnnCache cache;
    const std::vector<double>& y = dataset.labels();
    for (std::size_t epoch = 0; epoch < trainConfig.epochs; ++epoch) {
        if (trainConfig.shuffle) rng.shuffle(order);
        double lossSum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += trainConfig.batchSize) {
            const std::size_t count = std::min(trainConfig.batchSize, order.size() - start);
            result.model.zeroGrads();
            // Samples run sequentially (parallelism lives inside the conv
            // kernels) so gradient accumulation order is fixed.
            double batchLoss = 0.0;
            const double invCount = 1.0 / static_cast<double>(count);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t idx = order[start + i];
                const double* image = imageFor(idx);
                const double pred = result.model.forwardOne(image, cache);
                const double diff = pred - y[idx];
                batchLoss += diff * diff;
                result.model.backwardOne(image, cache, 2.0 * diff * invCount);
            }
            batchLoss *= invCount;
            if (!std::isfinite(batchLoss)) {
                throw Error(ErrorCode::DivergedTraining, "loss diverged at epoch " + std::to_string(epoch));
            }
            lossSum += batchLoss * static_cast<double>(count);
            optimizer.step(params, epoch);
        }

        EpochMetrics row;
        row.epoch = epoch;
        row.trainLoss = lossSum / static_cast<double>(order.size());
        row.valRmse = std::numeric_limits<double>::quiet_NaN();
        if (hasVal) {
            std::vector<double> pred(split.val.size());
            std::vector<double> obs(split.val.size());
            for (std::size_t i = 0; i < split.val.size(); ++i) {
                pred[i] = result.model.predictOne(imageFor(split.val[i]));
                obs[i] = y[split.val[i]];
            }
            row.valRmse = rmse(obs, pred);
        }
        result.log.rows.push_back(row);
        trackBest(result.log, epoch, row.valRmse, hasVal, takeSnapshot, restoreSnapshot,
                  epoch + 1 == trainConfig.epochs);
    }
    return result;
}

} // namespace carbospec
