#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "carbospec/linalg.hpp"
#include "carbospec/neural/tensor.hpp"
#include "carbospec/rng.hpp"

namespace carbospec {

// Fully connected layer on batches (rows = samples). Weights are [in x out]
// so the forward pass streams contiguous weight rows.
struct DenseLayer {
    Tensor w; // [in, out]
    Tensor b; // [out]

    DenseLayer() = default;
    DenseLayer(std::size_t in, std::size_t out);

    std::size_t inDim() const { return w.shape[0]; }
    std::size_t outDim() const { return w.shape[1]; }

    void initHeUniform(Rng& rng);

    // z = x W + b
    Matrix forward(const Matrix& x) const;
    // Accumulates w.grad, b.grad from (cached input, dz); returns dx when
    // requested (skip for the first layer).
    Matrix backward(const Matrix& x, const Matrix& dz, bool needDx);

    // Per-sample variants used by the CNN head.
    void forwardOne(const double* x, double* z) const;
    void backwardOne(const double* x, const double* dz, double* dx, bool needDx);
};

// ReLU over a whole buffer; backward derives the mask from the activations
// (a > 0 iff z > 0, and the derivative at exactly 0 is pinned to 0).
void reluForwardBuffer(double* out, const double* in, std::size_t n);
void reluBackwardBuffer(double* dIn, const double* activations, const double* dOut, std::size_t n);

// 3x3 same-padding convolution in NHWC layout. Weight rows are indexed by
// (ky*3 + kx)*inC + ci and hold outC contiguous values.
struct Conv2dLayer {
    std::size_t inC = 0;
    std::size_t outC = 0;
    Tensor w; // [9 * inC, outC]
    Tensor b; // [outC]

    Conv2dLayer() = default;
    Conv2dLayer(std::size_t inChannels, std::size_t outChannels);

    void initHeUniform(Rng& rng);

    void forward(const double* in, std::size_t h, std::size_t wdt, double* out) const;
    // dIn gather (transposed-kernel form); pass dIn = nullptr to skip.
    void backwardData(const double* dOut, std::size_t h, std::size_t wdt, double* dIn) const;
    void backwardParams(const double* in, const double* dOut, std::size_t h, std::size_t wdt);
};

// 3x3 stride-3 max pool, floor division; remainder rows/columns are dropped.
// Ties route to the first maximum in row-major window order, so the gradient
// goes to exactly one input per window.
struct MaxPool3 {
    static std::size_t outDim(std::size_t in) { return in / 3; }

    static void forward(const double* in, std::size_t h, std::size_t w, std::size_t c,
                        double* out, std::int32_t* argIndex);
    static void backward(const double* dOut, std::size_t h, std::size_t w, std::size_t c,
                         const std::int32_t* argIndex, double* dIn);
};

} // namespace carbospec
