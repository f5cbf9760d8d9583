#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "carbospec/linalg.hpp"

namespace carbospec {

// Partial least squares regression (PLS1, NIPALS). Components are stored one
// per row for contiguity: weights.row(a) is the a-th weight vector in feature
// space. Prediction collapses to a single affine map (x - xMean) . beta +
// yMean.
struct PlsrModel {
    std::size_t nComponents = 0;   // actually extracted
    std::size_t requestedComponents = 0;
    Matrix weights;                // k x d (W columns of the usual notation)
    Matrix loadings;               // k x d (P)
    std::vector<double> yLoadings; // k (C)
    std::vector<double> xMean;     // d
    double yMean = 0.0;
    std::vector<double> beta;      // d
    std::vector<std::string> warnings;

    std::size_t featureDim() const { return xMean.size(); }
};

PlsrModel plsrFit(const Matrix& x, const std::vector<double>& y, std::size_t k);

// Score matrix T (n x k), the compressed features fed to Cubist/LS-SVM.
Matrix plsrTransform(const PlsrModel& model, const Matrix& x);

std::vector<double> plsrPredict(const PlsrModel& model, const Matrix& x);

} // namespace carbospec
