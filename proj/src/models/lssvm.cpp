#include "carbospec/lssvm.hpp"

#include <algorithm>
#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {
namespace {

// Per-feature min-max scaling; features with no spread map to 0. Test-time
// values clamp to [0, 1].
double scaleValue(double v, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    return (v - lo) / (hi - lo);
}

} // namespace

LssvmModel lssvmFit(const Matrix& features, const std::vector<double>& y, double gamma) {
    const std::size_t n = features.rows();
    const std::size_t k = features.cols();
    if (n != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "lssvmFit: rows of features must match length of y");
    }
    if (n < 2) {
        throw Error(ErrorCode::TooFewSamples, "lssvmFit needs at least two samples");
    }
    if (!(gamma > 0.0)) {
        throw Error(ErrorCode::InvalidParams, "gamma must be positive");
    }

    LssvmModel model;
    model.gamma = gamma;
    model.scalerMin.assign(k, 0.0);
    model.scalerMax.assign(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double lo = features.at(0, j);
        double hi = lo;
        for (std::size_t i = 1; i < n; ++i) {
            lo = std::min(lo, features.at(i, j));
            hi = std::max(hi, features.at(i, j));
        }
        model.scalerMin[j] = lo;
        model.scalerMax[j] = hi;
    }

    model.supportInputs = Matrix(n, k);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            model.supportInputs.at(i, j) =
                scaleValue(features.at(i, j), model.scalerMin[j], model.scalerMax[j]);
        }
    }

    const Kernels& kr = kernels();
    Matrix system(n + 1, n + 1, 0.0);
    std::vector<double> rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        system.at(0, i + 1) = 1.0;
        system.at(i + 1, 0) = 1.0;
        rhs[i + 1] = y[i];
    }
    parallelFor(n, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                const double kij = kr.dot(model.supportInputs.row(i), model.supportInputs.row(j), k);
                system.at(i + 1, j + 1) = kij;
                system.at(j + 1, i + 1) = kij;
            }
            system.at(i + 1, i + 1) += 1.0 / gamma;
        }
    });

    std::vector<double> solution;
    try {
        solution = luSolve(system, rhs);
    } catch (const Error&) {
        double fro = 0.0;
        for (std::size_t i = 0; i < system.rows(); ++i) {
            fro += kr.sumSquares(system.row(i), system.cols());
        }
        const double damping = 1e-10 * std::sqrt(fro) / static_cast<double>(n + 1);
        Matrix damped = system;
        for (std::size_t i = 0; i < damped.rows(); ++i) damped.at(i, i) += damping;
        solution = luSolve(std::move(damped), rhs);
        model.warnings.push_back("SingularSystem: dual system solved with Tikhonov damping " +
                                 std::to_string(damping));
    }

    model.bias = solution[0];
    model.alphas.assign(solution.begin() + 1, solution.end());
    model.weights = vecTMat(model.supportInputs, model.alphas);

    // ||A z - rhs|| / ||rhs||, kept on the model so callers can verify it.
    double num = 0.0;
    for (std::size_t i = 0; i < n + 1; ++i) {
        const double r = kr.dot(system.row(i), solution.data(), n + 1) - rhs[i];
        num += r * r;
    }
    const double den = kr.sumSquares(rhs.data(), n + 1);
    model.solveResidual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    return model;
}

std::vector<double> lssvmPredict(const LssvmModel& model, const Matrix& features) {
    const std::size_t k = model.featureDim();
    if (features.cols() != k) {
        throw Error(ErrorCode::WidthMismatch,
                    "expected " + std::to_string(k) + " features, got " +
                        std::to_string(features.cols()));
    }
    const Kernels& kr = kernels();
    std::vector<double> out(features.rows());
    parallelFor(features.rows(), [&](std::size_t r0, std::size_t r1) {
        std::vector<double> scaled(k);
        for (std::size_t i = r0; i < r1; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                const double v = scaleValue(features.at(i, j), model.scalerMin[j], model.scalerMax[j]);
                scaled[j] = std::clamp(v, 0.0, 1.0);
            }
            out[i] = kr.dot(model.weights.data(), scaled.data(), k) + model.bias;
        }
    });
    return out;
}

} // namespace carbospec
