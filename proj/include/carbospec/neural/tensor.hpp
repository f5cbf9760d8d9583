#pragma once

#include <cstddef>
#include <numeric>
#include <vector>

namespace carbospec {

// Dense row-major tensor; trainable tensors carry a gradient buffer of the
// same shape.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    bool requiresGrad = false;
    std::vector<double> grad;

    Tensor() = default;
    Tensor(std::vector<std::size_t> s, bool requires)
        : shape(std::move(s)), requiresGrad(requires) {
        data.assign(size(), 0.0);
        if (requiresGrad) grad.assign(size(), 0.0);
    }

    std::size_t size() const {
        return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                               [](std::size_t a, std::size_t b) { return a * b; });
    }

    void zeroGrad() {
        if (requiresGrad) grad.assign(grad.size(), 0.0);
    }
};

} // namespace carbospec
