#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "carbospec/linalg.hpp"

namespace carbospec {

// Least-squares SVM with a linear kernel on min-max scaled features. Training
// solves the dual system [0 1^T; 1 K + I/gamma][b; alpha] = [0; y] in one
// shot; prediction uses the equivalent primal weights.
struct LssvmModel {
    std::vector<double> alphas;
    double bias = 0.0;
    double gamma = 1.0;
    Matrix supportInputs;           // scaled training features, n x k
    std::vector<double> scalerMin;  // per-feature
    std::vector<double> scalerMax;
    std::vector<double> weights;    // k, support^T alpha
    double solveResidual = 0.0;     // relative residual of the dual solve
    std::vector<std::string> warnings;

    std::size_t featureDim() const { return scalerMin.size(); }
};

LssvmModel lssvmFit(const Matrix& features, const std::vector<double>& y, double gamma);

std::vector<double> lssvmPredict(const LssvmModel& model, const Matrix& features);

} // namespace carbospec
