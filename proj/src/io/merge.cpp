#include "carbospec/io/merge.hpp"

#include <cstring>
#include <unordered_set>

#include "carbospec/errors.hpp"
#include "carbospec/metrics.hpp"

namespace carbospec {

MergeResult merge(const SpectralDataset& a, const SpectralDataset& b) {
    if (a.kind() != b.kind()) {
        throw Error(ErrorCode::KindMismatch,
                    "cannot merge " + a.kind().name() + " with " + b.kind().name());
    }
    if (!(a.grid() == b.grid())) {
        throw Error(ErrorCode::GridMismatch, "datasets live on different wavelength grids");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(a.size() + b.size());
    for (const std::string& id : a.sampleIds()) seen.insert(id);
    for (const std::string& id : b.sampleIds()) {
        if (!seen.insert(id).second) {
            throw Error(ErrorCode::DuplicateSampleId, "sample id '" + id + "' exists in both datasets");
        }
    }

    const std::size_t width = a.grid().nPoints;
    Matrix values(a.size() + b.size(), width);
    std::memcpy(values.row(0), a.values().data().data(), a.size() * width * sizeof(double));
    std::memcpy(values.row(a.size()), b.values().data().data(), b.size() * width * sizeof(double));

    std::vector<double> labels = a.labels();
    labels.insert(labels.end(), b.labels().begin(), b.labels().end());
    std::vector<std::string> ids = a.sampleIds();
    ids.insert(ids.end(), b.sampleIds().begin(), b.sampleIds().end());
    std::vector<Source> sources = a.sampleSources();
    sources.insert(sources.end(), b.sampleSources().begin(), b.sampleSources().end());

    MergeResult result{SpectralDataset(a.grid(), a.kind(), Source::Merged, std::move(values),
                                       std::move(labels), std::move(ids), std::move(sources)),
                       wasserstein(a.labels(), b.labels(), 1)};
    return result;
}

} // namespace carbospec
