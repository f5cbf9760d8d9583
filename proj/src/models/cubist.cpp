#include "carbospec/cubist.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "carbospec/errors.hpp"

namespace carbospec {
namespace {

struct NodeModel {
    std::vector<double> coefficients;
    double intercept = 0.0;
    double rmse = 0.0;
};

double populationSd(const std::vector<double>& y, const std::vector<std::size_t>& idx) {
    double mean = 0.0;
    for (std::size_t i : idx) mean += y[i];
    mean /= static_cast<double>(idx.size());
    double ss = 0.0;
    for (std::size_t i : idx) ss += (y[i] - mean) * (y[i] - mean);
    return std::sqrt(ss / static_cast<double>(idx.size()));
}

// Centered least squares on the node's samples. Singular systems (collinear
// or underdetermined leaves) retry with a small ridge so a model always
// exists; pruning then decides whether it survives.
NodeModel fitLinearModel(const Matrix& x, const std::vector<double>& y,
                         const std::vector<std::size_t>& idx) {
    const std::size_t k = x.cols();
    const std::size_t n = idx.size();

    std::vector<double> xMean(k, 0.0);
    double yMean = 0.0;
    for (std::size_t i : idx) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < k; ++j) xMean[j] += row[j];
        yMean += y[i];
    }
    for (double& m : xMean) m /= static_cast<double>(n);
    yMean /= static_cast<double>(n);

    Matrix gram(k, k, 0.0);
    std::vector<double> rhs(k, 0.0);
    std::vector<double> centered(k);
    for (std::size_t i : idx) {
        const double* row = x.row(i);
        for (std::size_t j = 0; j < k; ++j) centered[j] = row[j] - xMean[j];
        const double yc = y[i] - yMean;
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = r; c < k; ++c) gram.at(r, c) += centered[r] * centered[c];
            rhs[r] += centered[r] * yc;
        }
    }
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < r; ++c) gram.at(r, c) = gram.at(c, r);
    }

    NodeModel model;
    try {
        model.coefficients = luSolve(gram, rhs);
    } catch (const Error&) {
        double trace = 0.0;
        for (std::size_t j = 0; j < k; ++j) trace += gram.at(j, j);
        const double ridge = 1e-8 * (trace / static_cast<double>(k) + 1.0);
        Matrix damped = gram;
        for (std::size_t j = 0; j < k; ++j) damped.at(j, j) += ridge;
        model.coefficients = luSolve(std::move(damped), rhs);
    }
    model.intercept = yMean;
    for (std::size_t j = 0; j < k; ++j) model.intercept -= model.coefficients[j] * xMean[j];

    double ss = 0.0;
    for (std::size_t i : idx) {
        const double* row = x.row(i);
        double pred = model.intercept;
        for (std::size_t j = 0; j < k; ++j) pred += model.coefficients[j] * row[j];
        ss += (pred - y[i]) * (pred - y[i]);
    }
    model.rmse = std::sqrt(ss / static_cast<double>(n));
    return model;
}

// Quinlan's pessimistic error adjustment: rmse * (n + v)/(n - v) with v the
// parameter count; underdetermined nodes get a large factor instead.
double estimatedError(const NodeModel& model, std::size_t n, std::size_t k) {
    const double v = static_cast<double>(k + 1);
    const double nn = static_cast<double>(n);
    const double factor = nn > v ? (nn + v) / (nn - v) : nn + v;
    return model.rmse * factor;
}

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double reduction = 0.0;
};

BestSplit findSplit(const Matrix& x, const std::vector<double>& y,
                    const std::vector<std::size_t>& idx, std::size_t minLeaf) {
    const std::size_t n = idx.size();
    const double sdParent = populationSd(y, idx);
    BestSplit best;
    if (!(sdParent > 0.0)) return best;

    std::vector<std::size_t> order(idx);
    std::vector<double> prefixY(n + 1), prefixY2(n + 1);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double va = x.at(a, f);
            const double vb = x.at(b, f);
            return va < vb || (va == vb && a < b);
        });
        prefixY[0] = 0.0;
        prefixY2[0] = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = y[order[i]];
            prefixY[i + 1] = prefixY[i] + v;
            prefixY2[i + 1] = prefixY2[i] + v * v;
        }
        const double totalY = prefixY[n];
        const double totalY2 = prefixY2[n];
        for (std::size_t s = minLeaf; s + minLeaf <= n; ++s) {
            const double lo = x.at(order[s - 1], f);
            const double hi = x.at(order[s], f);
            if (!(lo < hi)) continue;
            const double nl = static_cast<double>(s);
            const double nr = static_cast<double>(n - s);
            const double varL = std::max(0.0, prefixY2[s] / nl - (prefixY[s] / nl) * (prefixY[s] / nl));
            const double sumR = totalY - prefixY[s];
            const double varR = std::max(0.0, (totalY2 - prefixY2[s]) / nr - (sumR / nr) * (sumR / nr));
            const double reduction =
                sdParent - (nl / static_cast<double>(n)) * std::sqrt(varL) -
                (nr / static_cast<double>(n)) * std::sqrt(varR);
            if (!(reduction > 0.0)) continue;
            const double threshold = 0.5 * (lo + hi);
            // Deterministic tie-break: larger reduction, then lower feature
            // index, then lower threshold.
            if (!best.found || reduction > best.reduction ||
                (reduction == best.reduction &&
                 (f < best.feature || (f == best.feature && threshold < best.threshold)))) {
                best.found = true;
                best.feature = f;
                best.threshold = threshold;
                best.reduction = reduction;
            }
        }
    }
    return best;
}

struct Builder {
    const Matrix& x;
    const std::vector<double>& y;
    CubistConfig config;
    std::vector<CubistNode> nodes;
    std::vector<NodeModel> models;
    double sdRoot = 0.0;

    int build(const std::vector<std::size_t>& idx) {
        const int id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        models.emplace_back();

        NodeModel model = fitLinearModel(x, y, idx);
        nodes[id].nSamples = idx.size();
        nodes[id].coefficients = model.coefficients;
        nodes[id].intercept = model.intercept;
        models[id] = std::move(model);

        if (idx.size() < 2 * config.minLeaf) return id;
        if (populationSd(y, idx) <= 1e-12 * (sdRoot + 1.0)) return id;

        const BestSplit split = findSplit(x, y, idx, config.minLeaf);
        if (!split.found) return id;

        std::vector<std::size_t> leftIdx;
        std::vector<std::size_t> rightIdx;
        leftIdx.reserve(idx.size());
        rightIdx.reserve(idx.size());
        for (std::size_t i : idx) {
            (x.at(i, split.feature) <= split.threshold ? leftIdx : rightIdx).push_back(i);
        }
        nodes[id].splitFeature = static_cast<int>(split.feature);
        nodes[id].threshold = split.threshold;
        nodes[id].left = build(leftIdx);
        nodes[id].right = build(rightIdx);
        return id;
    }

    // Returns the pessimistic subtree error; collapses subtrees that do not
    // beat their parent's own model.
    double prune(int id) {
        CubistNode& node = nodes[id];
        const double own = estimatedError(models[id], node.nSamples, x.cols());
        if (node.splitFeature < 0) return own;
        const double nl = static_cast<double>(nodes[node.left].nSamples);
        const double nr = static_cast<double>(nodes[node.right].nSamples);
        const double subtree =
            (nl * prune(node.left) + nr * prune(node.right)) / static_cast<double>(node.nSamples);
        if (own <= subtree * (1.0 + 1e-9) + 1e-12) {
            node.splitFeature = -1;
            node.left = -1;
            node.right = -1;
            return own;
        }
        return subtree;
    }
};

void collectRules(const std::vector<CubistNode>& nodes, int id,
                  std::vector<CubistCondition>& path, std::vector<CubistRule>& rules) {
    const CubistNode& node = nodes[id];
    if (node.splitFeature < 0) {
        CubistRule rule;
        rule.conditions = path;
        rule.coefficients = node.coefficients;
        rule.intercept = node.intercept;
        rule.nSamples = node.nSamples;
        rules.push_back(std::move(rule));
        return;
    }
    path.push_back({static_cast<std::size_t>(node.splitFeature), false, node.threshold});
    collectRules(nodes, node.left, path, rules);
    path.back().greaterThan = true;
    collectRules(nodes, node.right, path, rules);
    path.pop_back();
}

double nodePrediction(const CubistNode& node, const double* features, std::size_t k) {
    double pred = node.intercept;
    for (std::size_t j = 0; j < k; ++j) pred += node.coefficients[j] * features[j];
    return pred;
}

} // namespace

CubistModel cubistFit(const Matrix& features, const std::vector<double>& y,
                      const CubistConfig& config) {
    if (features.rows() != y.size()) {
        throw Error(ErrorCode::LengthMismatch, "cubistFit: rows of features must match length of y");
    }
    if (config.minLeaf < 1) {
        throw Error(ErrorCode::InvalidParams, "minLeaf must be >= 1");
    }
    if (features.rows() < 2 * config.minLeaf) {
        throw Error(ErrorCode::TooFewSamples,
                    "need at least " + std::to_string(2 * config.minLeaf) + " samples, got " +
                        std::to_string(features.rows()));
    }

    std::vector<std::size_t> all(features.rows());
    std::iota(all.begin(), all.end(), 0);

    Builder builder{features, y, config, {}, {}, populationSd(y, all)};
    builder.build(all);
    builder.prune(0);

    CubistModel model;
    model.nFeatures = features.cols();
    model.config = config;
    model.nodes = std::move(builder.nodes);
    std::vector<CubistCondition> path;
    collectRules(model.nodes, 0, path, model.rules);
    return model;
}

double cubistPredictOne(const CubistModel& model, const double* features) {
    int id = 0;
    std::vector<int> pathNodes;
    while (model.nodes[id].splitFeature >= 0) {
        pathNodes.push_back(id);
        const CubistNode& node = model.nodes[id];
        id = features[node.splitFeature] <= node.threshold ? node.left : node.right;
    }
    double pred = nodePrediction(model.nodes[id], features, model.nFeatures);
    if (model.config.smoothing) {
        double nBelow = static_cast<double>(model.nodes[id].nSamples);
        for (auto it = pathNodes.rbegin(); it != pathNodes.rend(); ++it) {
            const CubistNode& node = model.nodes[*it];
            pred = (nBelow * pred + model.config.smoothingK * nodePrediction(node, features, model.nFeatures)) /
                   (nBelow + model.config.smoothingK);
            nBelow = static_cast<double>(node.nSamples);
        }
    }
    return pred;
}

std::vector<double> cubistPredict(const CubistModel& model, const Matrix& features) {
    if (features.cols() != model.nFeatures) {
        throw Error(ErrorCode::WidthMismatch,
                    "expected " + std::to_string(model.nFeatures) + " features, got " +
                        std::to_string(features.cols()));
    }
    std::vector<double> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        out[i] = cubistPredictOne(model, features.row(i));
    }
    return out;
}

} // namespace carbospec
