#include "carbospec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "carbospec/errors.hpp"

namespace carbospec {
namespace {

void requireSameNonEmpty(const std::vector<double>& obs, const std::vector<double>& pred) {
    if (obs.empty() || pred.empty()) {
        throw Error(ErrorCode::EmptyInput, "need at least one (obs, pred) pair");
    }
    if (obs.size() != pred.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::to_string(obs.size()) + " observed vs " + std::to_string(pred.size()) +
                        " predicted");
    }
}

// Per-metric band; the joint rule takes the weaker of the two.
QualityBand r2Band(double r2) {
    if (r2 > 0.90) return QualityBand::Excellent;
    if (r2 > 0.82) return QualityBand::Good;
    if (r2 > 0.66) return QualityBand::Moderate;
    return QualityBand::Poor;
}

QualityBand rpdBand(double rpdValue) {
    if (rpdValue > 3.0) return QualityBand::Excellent;
    if (rpdValue > 2.5) return QualityBand::Good;
    if (rpdValue > 2.0) return QualityBand::Moderate;
    return QualityBand::Poor;
}

} // namespace

const char* qualityBandName(QualityBand band) {
    switch (band) {
        case QualityBand::Poor: return "poor";
        case QualityBand::Moderate: return "moderate";
        case QualityBand::Good: return "good";
        case QualityBand::Excellent: return "excellent";
    }
    return "unknown";
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error(ErrorCode::EmptyInput, "quantile of empty sample");
    }
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

QuartileSummary quartileSummary(const std::vector<double>& values) {
    QuartileSummary s;
    s.q1 = quantile(values, 0.25);
    s.q2 = quantile(values, 0.50);
    s.q3 = quantile(values, 0.75);
    s.iq = s.q3 - s.q1;
    return s;
}

double standardDeviation(const std::vector<double>& values, bool sample) {
    const std::size_t n = values.size();
    if (n < 2) {
        throw Error(ErrorCode::EmptyInput, "standard deviation needs >= 2 values");
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(sample ? n - 1 : n));
}

double wasserstein(const std::vector<double>& x, const std::vector<double>& y, int p) {
    if (x.empty() || y.empty()) {
        throw Error(ErrorCode::EmptyInput, "wasserstein needs non-empty samples");
    }
    if (p < 1) {
        throw Error(ErrorCode::InvalidParams, "wasserstein order must be >= 1");
    }
    std::vector<double> xs = x;
    std::vector<double> ys = y;
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    const auto interpQuantile = [](const std::vector<double>& sorted, double q) {
        const double pos = q * static_cast<double>(sorted.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= sorted.size()) return sorted.back();
        const double frac = pos - static_cast<double>(lo);
        return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
    };

    double acc = 0.0;
    std::size_t count = 0;
    if (xs.size() == ys.size()) {
        count = xs.size();
        for (std::size_t i = 0; i < count; ++i) {
            const double diff = std::fabs(xs[i] - ys[i]);
            double term = 1.0;
            for (int e = 0; e < p; ++e) term *= diff;
            acc += term;
        }
    } else {
        count = std::max(xs.size(), ys.size());
        for (std::size_t i = 0; i < count; ++i) {
            const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double diff = std::fabs(interpQuantile(xs, q) - interpQuantile(ys, q));
            double term = 1.0;
            for (int e = 0; e < p; ++e) term *= diff;
            acc += term;
        }
    }
    const double mean = acc / static_cast<double>(count);
    return p == 1 ? mean : std::pow(mean, 1.0 / static_cast<double>(p));
}

double rSquared(const std::vector<double>& obs, const std::vector<double>& pred) {
    requireSameNonEmpty(obs, pred);
    if (obs.size() < 2) {
        throw Error(ErrorCode::EmptyInput, "r_squared needs >= 2 pairs");
    }
    double mean = 0.0;
    for (double v : obs) mean += v;
    mean /= static_cast<double>(obs.size());
    double ssRes = 0.0;
    double ssTot = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        ssRes += (obs[i] - pred[i]) * (obs[i] - pred[i]);
        ssTot += (obs[i] - mean) * (obs[i] - mean);
    }
    if (!(ssTot > 0.0)) {
        throw Error(ErrorCode::ZeroVariance, "observed values are all equal");
    }
    return 1.0 - ssRes / ssTot;
}

double rmse(const std::vector<double>& obs, const std::vector<double>& pred) {
    requireSameNonEmpty(obs, pred);
    double acc = 0.0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        acc += (pred[i] - obs[i]) * (pred[i] - obs[i]);
    }
    return std::sqrt(acc / static_cast<double>(obs.size()));
}

double rpd(const std::vector<double>& obs, double rmseValue, bool sampleStd) {
    if (!(rmseValue > 0.0)) {
        throw Error(ErrorCode::ZeroRmse, "rpd undefined for zero RMSE (perfect prediction)");
    }
    return standardDeviation(obs, sampleStd) / rmseValue;
}

double rpiq(const std::vector<double>& obs, double rmseValue) {
    if (!(rmseValue > 0.0)) {
        throw Error(ErrorCode::ZeroRmse, "rpiq undefined for zero RMSE (perfect prediction)");
    }
    if (obs.size() < 4) {
        throw Error(ErrorCode::EmptyInput, "rpiq needs >= 4 observations");
    }
    const QuartileSummary q = quartileSummary(obs);
    return q.iq / rmseValue;
}

QualityBand qualityBand(double r2, double rpdValue) {
    return std::min(r2Band(r2), rpdBand(rpdValue));
}

double xrdTotalCarbonates(double crystallineWtPct, double crystallineIndex) {
    if (!(crystallineIndex > 0.0) || crystallineIndex > 1.0) {
        throw Error(ErrorCode::InvalidCrystallineIndex,
                    "crystalline index must be in (0, 1], got " + std::to_string(crystallineIndex));
    }
    if (!(crystallineWtPct >= 0.0)) {
        throw Error(ErrorCode::InvalidParams, "crystalline weight percent must be >= 0");
    }
    return crystallineWtPct / crystallineIndex;
}

EvaluationReport evaluate(const std::vector<double>& obs, const std::vector<double>& pred,
                          const EvaluateOptions& options) {
    requireSameNonEmpty(obs, pred);
    EvaluationReport report;
    report.residuals.resize(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) report.residuals[i] = pred[i] - obs[i];
    report.rmse = rmse(obs, pred);
    report.r2 = rSquared(obs, pred);
    report.quartiles = quartileSummary(obs);
    report.obsStd = standardDeviation(obs, options.sampleStd);
    if (report.rmse > 0.0) {
        report.rpd = rpd(obs, report.rmse, options.sampleStd);
        report.rpiq = obs.size() >= 4 ? rpiq(obs, report.rmse)
                                      : std::numeric_limits<double>::quiet_NaN();
    } else {
        // Perfect prediction: report the excellent band with infinite ratios.
        report.rpd = std::numeric_limits<double>::infinity();
        report.rpiq = std::numeric_limits<double>::infinity();
    }
    report.band = qualityBand(report.r2, report.rpd);
    return report;
}

std::string EvaluationReport::toKeyValueText() const {
    std::ostringstream out;
    out.precision(12);
    out << "r2=" << r2 << "\n"
        << "rmse=" << rmse << "\n"
        << "rpd=" << rpd << "\n"
        << "rpiq=" << rpiq << "\n"
        << "obs_std=" << obsStd << "\n"
        << "q1=" << quartiles.q1 << "\n"
        << "q2=" << quartiles.q2 << "\n"
        << "q3=" << quartiles.q3 << "\n"
        << "iq=" << quartiles.iq << "\n"
        << "band=" << qualityBandName(band) << "\n"
        << "n=" << residuals.size() << "\n";
    return out.str();
}

std::string EvaluationReport::toJson() const {
    nlohmann::json doc;
    doc["r2"] = r2;
    doc["rmse"] = rmse;
    doc["rpd"] = rpd;
    doc["rpiq"] = rpiq;
    doc["obs_std"] = obsStd;
    doc["quartiles"] = {{"q1", quartiles.q1}, {"q2", quartiles.q2}, {"q3", quartiles.q3}, {"iq", quartiles.iq}};
    doc["band"] = qualityBandName(band);
    doc["n"] = residuals.size();
    doc["residuals"] = residuals;
    return doc.dump();
}

} // namespace carbospec
