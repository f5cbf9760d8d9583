#pragma once

#include "carbospec/dataset.hpp"

namespace carbospec {

struct MergeResult {
    SpectralDataset dataset;
    // 1-Wasserstein distance between the two label distributions, reported so
    // callers can judge whether the libraries were similar enough to combine.
    double labelDistance = 0.0;
};

// Concatenates two datasets (a's rows first) sharing one kind and grid.
// Sample ids must be disjoint; per-sample source tags are retained.
MergeResult merge(const SpectralDataset& a, const SpectralDataset& b);

} // namespace carbospec
