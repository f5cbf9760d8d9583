#include "carbospec/neural/adam.hpp"

#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {

AdamOptimizer::AdamOptimizer(AdamConfig config, const std::vector<Tensor*>& params)
    : config_(config) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Tensor* p : params) {
        m_.emplace_back(p->size(), 0.0);
        v_.emplace_back(p->size(), 0.0);
    }
}

double AdamOptimizer::learningRateFor(std::size_t epoch) const {
    return config_.lr0 * std::pow(config_.decay, static_cast<double>(epoch));
}

void AdamOptimizer::step(const std::vector<Tensor*>& params, std::size_t epoch) {
    if (params.size() != m_.size()) {
        throw Error(ErrorCode::ShapeMismatch, "optimizer was attached to a different parameter set");
    }
    ++t_;
    const double lr = learningRateFor(epoch);
    const double invBc1 = 1.0 / (1.0 - std::pow(config_.beta1, static_cast<double>(t_)));
    const double invBc2 = 1.0 / (1.0 - std::pow(config_.beta2, static_cast<double>(t_)));
    const Kernels& kr = kernels();
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor& p = *params[pi];
        if (p.size() != m_[pi].size()) {
            throw Error(ErrorCode::ShapeMismatch, "parameter shape changed under the optimizer");
        }
        double* pData = p.data.data();
        double* mData = m_[pi].data();
        double* vData = v_[pi].data();
        const double* gData = p.grad.data();
        parallelFor(p.size(), [&](std::size_t b, std::size_t e) {
            kr.adamStep(pData + b, mData + b, vData + b, gData + b, e - b, lr, config_.beta1,
                        config_.beta2, config_.eps, invBc1, invBc2);
        });
    }
}

} // namespace carbospec
