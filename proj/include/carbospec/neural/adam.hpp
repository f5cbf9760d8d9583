#pragma once

#include <cstdint>
#include <vector>

#include "carbospec/neural/tensor.hpp"

namespace carbospec {

struct AdamConfig {
    double lr0 = 1e-3;
    double decay = 0.97; // multiplicative per-epoch learning-rate factor
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam with a per-epoch decaying learning rate. Moment buffers
// mirror the parameter tensors; t advances by exactly one per step().
class AdamOptimizer {
public:
    AdamOptimizer(AdamConfig config, const std::vector<Tensor*>& params);

    void step(const std::vector<Tensor*>& params, std::size_t epoch);

    std::uint64_t stepCount() const { return t_; }
    double learningRateFor(std::size_t epoch) const;

private:
    AdamConfig config_;
    std::uint64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

} // namespace carbospec
