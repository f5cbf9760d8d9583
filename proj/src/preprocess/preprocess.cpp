#include "carbospec/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "carbospec/errors.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/linalg.hpp"
#include "carbospec/parallel.hpp"

namespace carbospec {

void SgParams::validate() const {
    if (window < 3 || window % 2 == 0) {
        throw Error(ErrorCode::InvalidParams, "window must be odd and >= 3, got " + std::to_string(window));
    }
    if (polyorder < 0 || polyorder >= window) {
        throw Error(ErrorCode::InvalidParams, "polyorder must satisfy 0 <= polyorder < window");
    }
    if (derivOrder < 0 || derivOrder > polyorder) {
        throw Error(ErrorCode::InvalidParams, "derivOrder must satisfy 0 <= derivOrder <= polyorder");
    }
}

SgCoefficients::SgCoefficients(const SgParams& params) : params_(params) {
    params.validate();
    const int w = params.window;
    const int p = params.polyorder;
    const int d = params.derivOrder;

    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) factorial *= i;

    rows_.resize(w);
    for (int t = 0; t < w; ++t) {
        // Least-squares fit of a degree-p polynomial in (j - t); the d-th
        // derivative at the evaluation point is d! times coefficient d.
        Matrix gram(p + 1, p + 1, 0.0);
        std::vector<double> powers(p + 1);
        for (int j = 0; j < w; ++j) {
            const double z = static_cast<double>(j - t);
            double zp = 1.0;
            for (int m = 0; m <= p; ++m) {
                powers[m] = zp;
                zp *= z;
            }
            for (int r = 0; r <= p; ++r) {
                for (int c = 0; c <= p; ++c) gram.at(r, c) += powers[r] * powers[c];
            }
        }
        std::vector<double> rhs(p + 1, 0.0);
        rhs[d] = 1.0;
        const std::vector<double> u = luSolve(std::move(gram), std::move(rhs));

        std::vector<double> row(w);
        for (int j = 0; j < w; ++j) {
            const double z = static_cast<double>(j - t);
            double acc = 0.0;
            double zp = 1.0;
            for (int m = 0; m <= p; ++m) {
                acc += u[m] * zp;
                zp *= z;
            }
            row[j] = factorial * acc;
        }
        if (d == 0) {
            // Make smoothing preserve constants exactly.
            double total = 0.0;
            for (double c : row) total += c;
            for (double& c : row) c /= total;
        }
        rows_[t] = std::move(row);
    }
}

const SgCoefficients& SgCoefficients::get(const SgParams& params) {
    static std::map<std::tuple<int, int, int>, SgCoefficients> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    const auto key = std::make_tuple(params.window, params.polyorder, params.derivOrder);
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, SgCoefficients(params)).first;
    }
    return it->second;
}

std::vector<double> SgCoefficients::apply(const double* values, std::size_t n, double stepNm) const {
    const int w = params_.window;
    if (n < static_cast<std::size_t>(w)) {
        throw Error(ErrorCode::WindowTooLarge,
                    "signal length " + std::to_string(n) + " < window " + std::to_string(w));
    }
    const int h = half();
    double unitScale = 1.0;
    for (int i = 0; i < params_.derivOrder; ++i) unitScale /= stepNm;

    const Kernels& kr = kernels();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t start;
        int offset;
        if (i < static_cast<std::size_t>(h)) {
            start = 0;
            offset = static_cast<int>(i);
        } else if (i + h >= n) {
            start = n - w;
            offset = static_cast<int>(i - (n - w));
        } else {
            start = i - h;
            offset = h;
        }
        out[i] = kr.dot(rows_[offset].data(), values + start, w) * unitScale;
    }
    return out;
}

Spectrum savitzkyGolay(const Spectrum& spectrum, const SgParams& params, double stepNm) {
    const SgCoefficients& coeffs = SgCoefficients::get(params);
    Spectrum out;
    out.sampleId = spectrum.sampleId;
    out.kind = SpectrumKind::derivative(params.derivOrder);
    out.values = coeffs.apply(spectrum.values.data(), spectrum.values.size(), stepNm);
    return out;
}

Spectrum minmaxNormalize(const Spectrum& spectrum) {
    const auto [minIt, maxIt] = std::minmax_element(spectrum.values.begin(), spectrum.values.end());
    const double lo = *minIt;
    const double hi = *maxIt;
    if (!(hi > lo)) {
        throw Error(ErrorCode::ConstantSpectrum,
                    "sample '" + spectrum.sampleId + "' has no spread to normalize");
    }
    const double inv = 1.0 / (hi - lo);
    Spectrum out = spectrum;
    for (double& v : out.values) v = (v - lo) * inv;
    return out;
}

void PreprocessPipeline::validate() const {
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].op == PipelineStep::Op::Absorbance && i != 0) {
            throw Error(ErrorCode::InvalidParams, "absorbance step is only valid first in the pipeline");
        }
        if (steps[i].op == PipelineStep::Op::SavitzkyGolay) {
            steps[i].sg.validate();
        }
    }
}

SpectrumKind PreprocessPipeline::outputKind(SpectrumKind kind) const {
    validate();
    for (const PipelineStep& step : steps) {
        switch (step.op) {
            case PipelineStep::Op::Absorbance:
                if (kind != SpectrumKind::reflectancePct()) {
                    throw Error(ErrorCode::KindMismatch,
                                "absorbance step expects percent reflectance input");
                }
                kind = SpectrumKind::absorbance();
                break;
            case PipelineStep::Op::MinMaxNormalize:
                break;
            case PipelineStep::Op::SavitzkyGolay:
                kind = SpectrumKind::derivative(step.sg.derivOrder);
                break;
        }
    }
    return kind;
}

Spectrum PreprocessPipeline::applyTo(const Spectrum& spectrum, double stepNm) const {
    Spectrum current = spectrum;
    for (const PipelineStep& step : steps) {
        switch (step.op) {
            case PipelineStep::Op::Absorbance:
                current = toAbsorbance(current);
                break;
            case PipelineStep::Op::MinMaxNormalize:
                current = minmaxNormalize(current);
                break;
            case PipelineStep::Op::SavitzkyGolay:
                current = savitzkyGolay(current, step.sg, stepNm);
                break;
        }
    }
    return current;
}

SpectralDataset PreprocessPipeline::apply(const SpectralDataset& dataset) const {
    const SpectrumKind outKind = outputKind(dataset.kind());
    if (steps.empty()) return dataset;

    for (const PipelineStep& step : steps) {
        if (step.op == PipelineStep::Op::SavitzkyGolay) {
            SgCoefficients::get(step.sg); // build the cache before going parallel
        }
    }

    const std::size_t n = dataset.size();
    Matrix out(n, dataset.grid().nPoints);
    std::vector<std::string> failures(n);
    parallelFor(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                const Spectrum result = applyTo(dataset.spectrum(i), dataset.grid().stepNm);
                std::copy(result.values.begin(), result.values.end(), out.row(i));
            } catch (const Error& e) {
                failures[i] = e.what();
            }
        }
    });
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            throw Error(ErrorCode::InvalidParams,
                        "pipeline failed for sample '" + dataset.sampleIds()[i] + "': " + failures[i]);
        }
    }
    return SpectralDataset(dataset.grid(), outKind, dataset.source(), std::move(out),
                           dataset.labels(), dataset.sampleIds(), dataset.sampleSources());
}

std::string PreprocessPipeline::toJson() const {
    nlohmann::json doc;
    doc["steps"] = nlohmann::json::array();
    for (const PipelineStep& step : steps) {
        nlohmann::json s;
        switch (step.op) {
            case PipelineStep::Op::Absorbance:
                s["op"] = "absorbance";
                break;
            case PipelineStep::Op::MinMaxNormalize:
                s["op"] = "minmax_normalize";
                break;
            case PipelineStep::Op::SavitzkyGolay:
                s["op"] = "savitzky_golay";
                s["window"] = step.sg.window;
                s["polyorder"] = step.sg.polyorder;
                s["deriv"] = step.sg.derivOrder;
                break;
        }
        doc["steps"].push_back(std::move(s));
    }
    return doc.dump();
}

PreprocessPipeline PreprocessPipeline::fromJson(const std::string& json) {
    PreprocessPipeline pipeline;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("pipeline json: ") + e.what());
    }
    if (!doc.contains("steps") || !doc["steps"].is_array()) {
        throw Error(ErrorCode::ParseError, "pipeline json missing 'steps' array");
    }
    for (const auto& s : doc["steps"]) {
        const std::string op = s.value("op", "");
        if (op == "absorbance") {
            pipeline.steps.push_back(PipelineStep::absorbance());
        } else if (op == "minmax_normalize") {
            pipeline.steps.push_back(PipelineStep::minmax());
        } else if (op == "savitzky_golay") {
            SgParams sg;
            sg.window = s.value("window", 0);
            sg.polyorder = s.value("polyorder", 0);
            sg.derivOrder = s.value("deriv", 0);
            pipeline.steps.push_back(PipelineStep::savgol(sg));
        } else {
            throw Error(ErrorCode::ParseError, "unknown pipeline op '" + op + "'");
        }
    }
    pipeline.validate();
    return pipeline;
}

} // namespace carbospec
