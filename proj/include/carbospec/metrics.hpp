#pragma once

#include <string>
#include <vector>

namespace carbospec {

struct QuartileSummary {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
    double iq = 0.0;
};

enum class QualityBand { Poor, Moderate, Good, Excellent };

const char* qualityBandName(QualityBand band);

struct EvaluationReport {
    double r2 = 0.0;
    double rmse = 0.0;
    double rpd = 0.0;
    double rpiq = 0.0;
    QuartileSummary quartiles{};
    double obsStd = 0.0;
    QualityBand band = QualityBand::Poor;
    std::vector<double> residuals; // pred - obs

    // Flat key=value lines, one metric per line.
    std::string toKeyValueText() const;
    std::string toJson() const;
};

// Quantile by linear interpolation of order statistics at position (n-1)*q.
double quantile(std::vector<double> values, double q);
QuartileSummary quartileSummary(const std::vector<double>& values);

// Population standard deviation by default (divide by n); sample form
// divides by n-1.
double standardDeviation(const std::vector<double>& values, bool sample = false);

// p-Wasserstein distance between two one-dimensional empirical distributions.
// Equal sizes: mean |x_(i) - y_(i)|^p over sorted samples, to the 1/p. Unequal
// sizes: the same formula over both quantile functions sampled at midpoints of
// max(n, m) equal-probability bins.
double wasserstein(const std::vector<double>& x, const std::vector<double>& y, int p = 1);

double rSquared(const std::vector<double>& obs, const std::vector<double>& pred);
double rmse(const std::vector<double>& obs, const std::vector<double>& pred);

// Ratio of the observed standard deviation to the RMSE (plain ratio).
double rpd(const std::vector<double>& obs, double rmseValue, bool sampleStd = false);

// Ratio of the observed interquartile range to the RMSE (plain ratio).
double rpiq(const std::vector<double>& obs, double rmseValue);

// Joint R2/RPD banding: each metric maps to its own band
// (>0.90 / >3.0 excellent, >0.82 / >2.5 good, >0.66 / >2.0 moderate, else
// poor) and the weaker of the two wins.
QualityBand qualityBand(double r2, double rpdValue);

// Total carbonates from the crystalline-phase weight and the crystalline
// index: total = crystalline / index.
double xrdTotalCarbonates(double crystallineWtPct, double crystallineIndex);

struct EvaluateOptions {
    bool sampleStd = false;
};

EvaluationReport evaluate(const std::vector<double>& obs, const std::vector<double>& pred,
                          const EvaluateOptions& options = {});

} // namespace carbospec
