#pragma once

#include <cstdint>
#include <vector>

#include "carbospec/linalg.hpp"
#include "carbospec/neural/layers.hpp"

namespace carbospec {

// Feedforward regressor: dense -> ReLU per hidden layer, affine scalar head.
// L1 and L2 penalties apply to the last hidden layer's weight matrix only
// (the 200 -> 50 weights in the default 500/200/50 stack).
struct MlpConfig {
    std::vector<std::size_t> hidden{500, 200, 50};
    double l1 = 1e-5;
    double l2 = 1e-5;
    std::uint64_t seed = 42;
};

class MlpModel {
public:
    MlpModel() = default;
    MlpModel(std::size_t inputDim, MlpConfig config);

    const MlpConfig& config() const { return config_; }
    std::size_t inputDim() const { return inputDim_; }

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

    std::vector<Tensor*> parameters();

    std::vector<double> predict(const Matrix& x) const;

    // Zeroes gradients, runs forward/backward on the batch and accumulates
    // parameter gradients. Returns MSE + l1*||W||_1 + l2*||W||_2^2.
    double lossAndGrads(const Matrix& x, const std::vector<double>& y);

    // d pred / d input for one sample; drives the saliency map.
    std::vector<double> inputGradient(const double* x) const;

private:
    MlpConfig config_;
    std::size_t inputDim_ = 0;
    std::vector<DenseLayer> layers_; // hidden layers + scalar head

    int regularizedLayer() const {
        return config_.hidden.empty() ? -1 : static_cast<int>(config_.hidden.size()) - 1;
    }
};

} // namespace carbospec
