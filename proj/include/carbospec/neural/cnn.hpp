#pragma once

#include <cstdint>
#include <vector>

#include "carbospec/neural/layers.hpp"

namespace carbospec {

// Convolutional regressor on spectrogram images: [conv3x3-same -> ReLU ->
// maxpool3x3/3] per stage, then flatten -> dense -> ReLU -> affine scalar
// head. With the default 244x488 input and 32/64/128 stages the flatten size
// is 9*18*128 = 20736.
struct CnnConfig {
    std::vector<std::size_t> convChannels{32, 64, 128};
    std::size_t denseUnits = 50;
    std::size_t inputH = 244;
    std::size_t inputW = 488;
    std::uint64_t seed = 42;
};

struct CnnStageShape {
    std::size_t convH = 0, convW = 0, convC = 0;
    std::size_t poolH = 0, poolW = 0, poolC = 0;
};

// Per-sample forward intermediates kept for the backward pass.
struct CnnCache {
    std::vector<std::vector<double>> convActs;        // post-ReLU conv outputs
    std::vector<std::vector<double>> poolOuts;        // pooled activations
    std::vector<std::vector<std::int32_t>> poolArgs;  // winning input index per output
    std::vector<double> denseAct;                     // post-ReLU dense output
    double prediction = 0.0;
};

class CnnModel {
public:
    CnnModel() = default;
    explicit CnnModel(CnnConfig config);

    const CnnConfig& config() const { return config_; }
    std::vector<CnnStageShape> stageShapes() const;
    std::size_t flattenSize() const;

    std::vector<Conv2dLayer>& convs() { return convs_; }
    const std::vector<Conv2dLayer>& convs() const { return convs_; }
    DenseLayer& dense() { return dense_; }
    const DenseLayer& dense() const { return dense_; }
    DenseLayer& head() { return head_; }
    const DenseLayer& head() const { return head_; }

    std::vector<Tensor*> parameters();
    void zeroGrads();

    double forwardOne(const double* image, CnnCache& cache) const;
    double predictOne(const double* image) const;

    // Accumulates parameter gradients for one sample given d loss / d pred.
    void backwardOne(const double* image, const CnnCache& cache, double dPred);

    // d pred / d image for one sample (saliency path).
    std::vector<double> imageGradient(const double* image) const;

private:
    CnnConfig config_;
    std::vector<Conv2dLayer> convs_;
    DenseLayer dense_;
    DenseLayer head_;
};

} // namespace carbospec
