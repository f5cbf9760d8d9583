#include "carbospec/neural/mlp.hpp"

#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/rng.hpp"

namespace carbospec {

MlpModel::MlpModel(std::size_t inputDim, MlpConfig config)
    : config_(std::move(config)), inputDim_(inputDim) {
    Rng rng(config_.seed);
    std::size_t prev = inputDim_;
    for (std::size_t units : config_.hidden) {
        layers_.emplace_back(prev, units);
        layers_.back().initHeUniform(rng);
        prev = units;
    }
    layers_.emplace_back(prev, 1);
    layers_.back().initHeUniform(rng);
}

std::vector<Tensor*> MlpModel::parameters() {
    std::vector<Tensor*> params;
    for (DenseLayer& layer : layers_) {
        params.push_back(&layer.w);
        params.push_back(&layer.b);
    }
    return params;
}

std::vector<double> MlpModel::predict(const Matrix& x) const {
    const std::size_t hiddenCount = config_.hidden.size();
    Matrix a = layers_[0].forward(x);
    for (std::size_t l = 0; l < hiddenCount; ++l) {
        if (l > 0) a = layers_[l].forward(a);
        reluForwardBuffer(a.data().data(), a.data().data(), a.data().size());
    }
    const Matrix out = hiddenCount == 0 ? std::move(a) : layers_[hiddenCount].forward(a);
    std::vector<double> pred(out.rows());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        pred[i] = out.at(i, 0);
        if (!std::isfinite(pred[i])) {
            throw Error(ErrorCode::NonFiniteActivation, "prediction diverged for batch row " + std::to_string(i));
        }
    }
    return pred;
}

double MlpModel::lossAndGrads(const Matrix& x, const std::vector<double>& y) {
    const std::size_t n = x.rows();
    if (n == 0 || y.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "batch rows must match label count");
    }
    for (DenseLayer& layer : layers_) {
        layer.w.zeroGrad();
        layer.b.zeroGrad();
    }

    const std::size_t hiddenCount = config_.hidden.size();
    const Kernels& kr = kernels();

    // Forward with cached post-ReLU activations.
    std::vector<Matrix> acts; // acts[l] = input to layers_[l]
    acts.reserve(hiddenCount + 1);
    acts.push_back(x);
    for (std::size_t l = 0; l < hiddenCount; ++l) {
        Matrix z = layers_[l].forward(acts.back());
        reluForwardBuffer(z.data().data(), z.data().data(), z.data().size());
        acts.push_back(std::move(z));
    }
    Matrix out = layers_[hiddenCount].forward(acts.back());

    double mse = 0.0;
    Matrix dOut(n, 1);
    const double invN = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = out.at(i, 0) - y[i];
        mse += diff * diff;
        dOut.at(i, 0) = 2.0 * diff * invN;
    }
    mse *= invN;

    double loss = mse;
    const int regLayer = regularizedLayer();
    if (regLayer >= 0) {
        const Tensor& w = layers_[regLayer].w;
        loss += config_.l1 * kr.sumAbs(w.data.data(), w.data.size());
        loss += config_.l2 * kr.sumSquares(w.data.data(), w.data.size());
    }
    if (!std::isfinite(loss)) {
        throw Error(ErrorCode::NonFiniteLoss, "loss diverged");
    }

    // Backward.
    Matrix d = layers_[hiddenCount].backward(acts.back(), dOut, hiddenCount > 0);
    for (std::size_t l = hiddenCount; l-- > 0;) {
        reluBackwardBuffer(d.data().data(), acts[l + 1].data().data(), d.data().data(),
                           d.data().size());
        d = layers_[l].backward(acts[l], d, l > 0);
    }

    if (regLayer >= 0) {
        Tensor& w = layers_[regLayer].w;
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            const double wi = w.data[i];
            const double sign = wi > 0.0 ? 1.0 : (wi < 0.0 ? -1.0 : 0.0);
            w.grad[i] += config_.l1 * sign + 2.0 * config_.l2 * wi;
        }
    }
    return loss;
}

std::vector<double> MlpModel::inputGradient(const double* x) const {
    const std::size_t hiddenCount = config_.hidden.size();

    std::vector<std::vector<double>> acts;
    acts.reserve(hiddenCount + 1);
    acts.emplace_back(x, x + inputDim_);
    for (std::size_t l = 0; l < hiddenCount; ++l) {
        std::vector<double> z(layers_[l].outDim());
        layers_[l].forwardOne(acts.back().data(), z.data());
        reluForwardBuffer(z.data(), z.data(), z.size());
        acts.push_back(std::move(z));
    }

    // Head gradient: d pred / d a = head weight column.
    const DenseLayer& head = layers_[hiddenCount];
    std::vector<double> d(head.inDim());
    for (std::size_t i = 0; i < head.inDim(); ++i) d[i] = head.w.data[i];

    const Kernels& kr = kernels();
    for (std::size_t l = hiddenCount; l-- > 0;) {
        kr.reluBackward(d.data(), acts[l + 1].data(), d.data(), d.size());
        const DenseLayer& layer = layers_[l];
        std::vector<double> dPrev(layer.inDim());
        for (std::size_t i = 0; i < layer.inDim(); ++i) {
            dPrev[i] = kr.dot(layer.w.data.data() + i * layer.outDim(), d.data(), layer.outDim());
        }
        d = std::move(dPrev);
    }
    return d;
}

} // namespace carbospec
