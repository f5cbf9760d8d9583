#include "carbospec/neural/cnn.hpp"

#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/rng.hpp"

namespace carbospec {

CnnModel::CnnModel(CnnConfig config) : config_(std::move(config)) {
    if (config_.convChannels.empty()) {
        throw Error(ErrorCode::InvalidParams, "CNN needs at least one convolution stage");
    }
    Rng rng(config_.seed);
    std::size_t prevC = 1;
    for (std::size_t channels : config_.convChannels) {
        convs_.emplace_back(prevC, channels);
        convs_.back().initHeUniform(rng);
        prevC = channels;
    }
    dense_ = DenseLayer(flattenSize(), config_.denseUnits);
    dense_.initHeUniform(rng);
    head_ = DenseLayer(config_.denseUnits, 1);
    head_.initHeUniform(rng);
}

std::vector<CnnStageShape> CnnModel::stageShapes() const {
    std::vector<CnnStageShape> shapes;
    std::size_t h = config_.inputH;
    std::size_t w = config_.inputW;
    for (std::size_t channels : config_.convChannels) {
        CnnStageShape s;
        s.convH = h;
        s.convW = w;
        s.convC = channels;
        s.poolH = MaxPool3::outDim(h);
        s.poolW = MaxPool3::outDim(w);
        s.poolC = channels;
        shapes.push_back(s);
        h = s.poolH;
        w = s.poolW;
    }
    return shapes;
}

std::size_t CnnModel::flattenSize() const {
    const auto shapes = stageShapes();
    const CnnStageShape& last = shapes.back();
    return last.poolH * last.poolW * last.poolC;
}

std::vector<Tensor*> CnnModel::parameters() {
    std::vector<Tensor*> params;
    for (Conv2dLayer& conv : convs_) {
        params.push_back(&conv.w);
        params.push_back(&conv.b);
    }
    params.push_back(&dense_.w);
    params.push_back(&dense_.b);
    params.push_back(&head_.w);
    params.push_back(&head_.b);
    return params;
}

void CnnModel::zeroGrads() {
    for (Tensor* t : parameters()) t->zeroGrad();
}

double CnnModel::forwardOne(const double* image, CnnCache& cache) const {
    const auto shapes = stageShapes();
    const std::size_t stages = convs_.size();
    cache.convActs.resize(stages);
    cache.poolOuts.resize(stages);
    cache.poolArgs.resize(stages);

    const double* cur = image;
    std::size_t h = config_.inputH;
    std::size_t w = config_.inputW;
    for (std::size_t s = 0; s < stages; ++s) {
        const CnnStageShape& shape = shapes[s];
        cache.convActs[s].assign(shape.convH * shape.convW * shape.convC, 0.0);
        convs_[s].forward(cur, h, w, cache.convActs[s].data());
        reluForwardBuffer(cache.convActs[s].data(), cache.convActs[s].data(),
                          cache.convActs[s].size());
        cache.poolOuts[s].assign(shape.poolH * shape.poolW * shape.poolC, 0.0);
        cache.poolArgs[s].assign(shape.poolH * shape.poolW * shape.poolC, 0);
        MaxPool3::forward(cache.convActs[s].data(), shape.convH, shape.convW, shape.convC,
                          cache.poolOuts[s].data(), cache.poolArgs[s].data());
        cur = cache.poolOuts[s].data();
        h = shape.poolH;
        w = shape.poolW;
    }

    std::vector<double> z(dense_.outDim());
    dense_.forwardOne(cache.poolOuts.back().data(), z.data());
    reluForwardBuffer(z.data(), z.data(), z.size());
    cache.denseAct = std::move(z);

    double pred = 0.0;
    head_.forwardOne(cache.denseAct.data(), &pred);
    if (!std::isfinite(pred)) {
        throw Error(ErrorCode::NonFiniteActivation, "CNN prediction diverged");
    }
    cache.prediction = pred;
    return pred;
}

double CnnModel::predictOne(const double* image) const {
    CnnCache cache;
    return forwardOne(image, cache);
}

void CnnModel::backwardOne(const double* image, const CnnCache& cache, double dPred) {
    const auto shapes = stageShapes();
    const std::size_t stages = convs_.size();
    const Kernels& kr = kernels();

    std::vector<double> dDense(head_.inDim());
    head_.backwardOne(cache.denseAct.data(), &dPred, dDense.data(), true);
    kr.reluBackward(dDense.data(), cache.denseAct.data(), dDense.data(), dDense.size());

    std::vector<double> dFlat(dense_.inDim());
    dense_.backwardOne(cache.poolOuts.back().data(), dDense.data(), dFlat.data(), true);

    std::vector<double> dPool = std::move(dFlat);
    for (std::size_t s = stages; s-- > 0;) {
        const CnnStageShape& shape = shapes[s];
        std::vector<double> dConv(shape.convH * shape.convW * shape.convC);
        MaxPool3::backward(dPool.data(), shape.convH, shape.convW, shape.convC,
                           cache.poolArgs[s].data(), dConv.data());
        kr.reluBackward(dConv.data(), cache.convActs[s].data(), dConv.data(), dConv.size());

        const double* stageInput = s == 0 ? image : cache.poolOuts[s - 1].data();
        convs_[s].backwardParams(stageInput, dConv.data(), shape.convH, shape.convW);
        if (s > 0) {
            const CnnStageShape& prev = shapes[s - 1];
            dPool.assign(prev.poolH * prev.poolW * prev.poolC, 0.0);
            convs_[s].backwardData(dConv.data(), shape.convH, shape.convW, dPool.data());
        }
    }
}

std::vector<double> CnnModel::imageGradient(const double* image) const {
    CnnCache cache;
    forwardOne(image, cache);

    const auto shapes = stageShapes();
    const std::size_t stages = convs_.size();
    const Kernels& kr = kernels();

    // d pred / d denseAct is the head weight column; walk it back down.
    std::vector<double> dDense(head_.inDim());
    for (std::size_t i = 0; i < head_.inDim(); ++i) dDense[i] = head_.w.data[i];
    kr.reluBackward(dDense.data(), cache.denseAct.data(), dDense.data(), dDense.size());

    std::vector<double> dFlat(dense_.inDim());
    for (std::size_t i = 0; i < dense_.inDim(); ++i) {
        dFlat[i] = kr.dot(dense_.w.data.data() + i * dense_.outDim(), dDense.data(), dense_.outDim());
    }

    std::vector<double> dPool = std::move(dFlat);
    for (std::size_t s = stages; s-- > 0;) {
        const CnnStageShape& shape = shapes[s];
        std::vector<double> dConv(shape.convH * shape.convW * shape.convC);
        MaxPool3::backward(dPool.data(), shape.convH, shape.convW, shape.convC,
                           cache.poolArgs[s].data(), dConv.data());
        kr.reluBackward(dConv.data(), cache.convActs[s].data(), dConv.data(), dConv.size());

        const std::size_t prevC = convs_[s].inC;
        dPool.assign(shape.convH * shape.convW * prevC, 0.0);
        convs_[s].backwardData(dConv.data(), shape.convH, shape.convW, dPool.data());
    }
    return dPool; // gradient w.r.t. the input image
}

} // namespace carbospec
