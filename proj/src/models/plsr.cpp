#include "carbospec/plsr.hpp"

#include <cmath>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {
namespace {

constexpr double kScoreNormTolerance = 1e-12;

// R = W (P^T W)^-1, stored with one column of R per row. The score matrix is
// then T = Xc R^T and the prediction weights are beta = R^T C.
Matrix rotationRows(const PlsrModel& model) {
    const std::size_t k = model.nComponents;
    const std::size_t d = model.featureDim();
    const Kernels& kr = kernels();

    Matrix ptw(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            ptw.at(i, j) = kr.dot(model.loadings.row(i), model.weights.row(j), d);
        }
    }
    Matrix rotation(k, d, 0.0);
    for (std::size_t col = 0; col < k; ++col) {
        std::vector<double> unit(k, 0.0);
        unit[col] = 1.0;
        const std::vector<double> z = luSolve(ptw, std::move(unit)); // (P^T W)^-1 e_col
        for (std::size_t i = 0; i < k; ++i) {
            kr.axpy(rotation.row(col), z[i], model.weights.row(i), d);
        }
    }
    return rotation;
}

} // namespace

PlsrModel plsrFit(const Matrix& x, const std::vector<double>& y, std::size_t k) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (n != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "plsrFit: rows of X must match length of y");
    }
    if (n < 2) {
        throw Error(ErrorCode::TooFewSamples, "plsrFit needs at least two samples");
    }
    const std::size_t kMax = std::min(n - 1, d);
    if (k < 1 || k > kMax) {
        throw Error(ErrorCode::InvalidParams,
                    "component count " + std::to_string(k) + " outside [1, " + std::to_string(kMax) + "]");
    }

    const Kernels& kr = kernels();
    PlsrModel model;
    model.requestedComponents = k;
    model.xMean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) kr.axpy(model.xMean.data(), 1.0, x.row(i), d);
    kr.scale(model.xMean.data(), 1.0 / static_cast<double>(n), d);
    model.yMean = kr.sum(y.data(), n) / static_cast<double>(n);

    Matrix xc = x;
    parallelFor(n, [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            kr.axpy(xc.row(i), -1.0, model.xMean.data(), d);
        }
    });
    std::vector<double> yc(n);
    for (std::size_t i = 0; i < n; ++i) yc[i] = y[i] - model.yMean;

    model.weights = Matrix(k, d);
    model.loadings = Matrix(k, d);
    model.yLoadings.assign(k, 0.0);

    std::size_t extracted = 0;
    for (std::size_t a = 0; a < k; ++a) {
        // For a univariate target the NIPALS inner loop converges in one pass.
        std::vector<double> w = vecTMat(xc, yc);
        const double wNorm = std::sqrt(kr.sumSquares(w.data(), d));
        if (!(wNorm > kScoreNormTolerance)) break;
        kr.scale(w.data(), 1.0 / wNorm, d);

        const std::vector<double> t = matVec(xc, w);
        const double tt = kr.sumSquares(t.data(), n);
        if (!(std::sqrt(tt) > kScoreNormTolerance)) break;

        std::vector<double> p = vecTMat(xc, t);
        kr.scale(p.data(), 1.0 / tt, d);
        const double c = kr.dot(yc.data(), t.data(), n) / tt;

        parallelFor(n, [&](std::size_t r0, std::size_t r1) {
            for (std::size_t i = r0; i < r1; ++i) {
                kr.axpy(xc.row(i), -t[i], p.data(), d);
            }
        });
        for (std::size_t i = 0; i < n; ++i) yc[i] -= c * t[i];

        std::copy(w.begin(), w.end(), model.weights.row(a));
        std::copy(p.begin(), p.end(), model.loadings.row(a));
        model.yLoadings[a] = c;
        ++extracted;
    }

    if (extracted == 0) {
        // Constant target: zero-coefficient model predicting the mean.
        model.nComponents = 0;
        model.weights = Matrix();
        model.loadings = Matrix();
        model.yLoadings.clear();
        model.beta.assign(d, 0.0);
        model.warnings.push_back("DegenerateComponent: no usable component, predicting the mean");
        return model;
    }
    if (extracted < k) {
        model.warnings.push_back("DegenerateComponent: stopped after " + std::to_string(extracted) +
                                 " of " + std::to_string(k) + " components (score norm below tolerance)");
        Matrix w(extracted, d);
        Matrix p(extracted, d);
        for (std::size_t a = 0; a < extracted; ++a) {
            std::copy(model.weights.row(a), model.weights.row(a) + d, w.row(a));
            std::copy(model.loadings.row(a), model.loadings.row(a) + d, p.row(a));
        }
        model.weights = std::move(w);
        model.loadings = std::move(p);
        model.yLoadings.resize(extracted);
    }
    model.nComponents = extracted;

    const Matrix rotation = rotationRows(model);
    model.beta.assign(d, 0.0);
    for (std::size_t a = 0; a < model.nComponents; ++a) {
        kr.axpy(model.beta.data(), model.yLoadings[a], rotation.row(a), d);
    }
    return model;
}

Matrix plsrTransform(const PlsrModel& model, const Matrix& x) {
    if (x.cols() != model.featureDim()) {
        throw Error(ErrorCode::WidthMismatch,
                    "expected " + std::to_string(model.featureDim()) + " features, got " +
                        std::to_string(x.cols()));
    }
    if (model.nComponents == 0) {
        throw Error(ErrorCode::DegenerateComponent, "model has no components to transform with");
    }
    const std::size_t d = model.featureDim();
    const Matrix rotation = rotationRows(model);
    const Kernels& kr = kernels();
    Matrix scores(x.rows(), model.nComponents);
    parallelFor(x.rows(), [&](std::size_t r0, std::size_t r1) {
        std::vector<double> centered(d);
        for (std::size_t i = r0; i < r1; ++i) {
            const double* row = x.row(i);
            for (std::size_t j = 0; j < d; ++j) centered[j] = row[j] - model.xMean[j];
            for (std::size_t a = 0; a < model.nComponents; ++a) {
                scores.at(i, a) = kr.dot(centered.data(), rotation.row(a), d);
            }
        }
    });
    return scores;
}

std::vector<double> plsrPredict(const PlsrModel& model, const Matrix& x) {
    if (x.cols() != model.featureDim()) {
        throw Error(ErrorCode::WidthMismatch,
                    "expected " + std::to_string(model.featureDim()) + " features, got " +
                        std::to_string(x.cols()));
    }
    const std::size_t d = model.featureDim();
    const Kernels& kr = kernels();
    const double offset = model.yMean - kr.dot(model.xMean.data(), model.beta.data(), d);
    std::vector<double> out(x.rows());
    parallelFor(x.rows(), [&](std::size_t r0, std::size_t r1) {
        for (std::size_t i = r0; i < r1; ++i) {
            out[i] = kr.dot(x.row(i), model.beta.data(), d) + offset;
        }
    });
    return out;
}

} // namespace carbospec
