#pragma once

#include <cstddef>
#include <vector>

#include "carbospec/linalg.hpp"

namespace carbospec {

// M5-style rule tree: greedy standard-deviation-reduction splits, linear
// models fitted at every node, bottom-up pruning, rules read off the pruned
// root-to-leaf paths.
struct CubistConfig {
    std::size_t minLeaf = 10;
    bool smoothing = false;
    double smoothingK = 15.0;
};

struct CubistCondition {
    std::size_t feature = 0;
    bool greaterThan = false; // false: feature <= threshold
    double threshold = 0.0;
};

struct CubistRule {
    std::vector<CubistCondition> conditions;
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::size_t nSamples = 0;
};

struct CubistNode {
    int splitFeature = -1; // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::size_t nSamples = 0;
};

struct CubistModel {
    std::size_t nFeatures = 0;
    CubistConfig config{};
    std::vector<CubistNode> nodes; // nodes[0] is the root
    std::vector<CubistRule> rules;
};

CubistModel cubistFit(const Matrix& features, const std::vector<double>& y,
                      const CubistConfig& config = {});

double cubistPredictOne(const CubistModel& model, const double* features);
std::vector<double> cubistPredict(const CubistModel& model, const Matrix& features);

} // namespace carbospec
