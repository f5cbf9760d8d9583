#include "carbospec/io/adapters.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "carbospec/errors.hpp"

namespace carbospec {
namespace {

struct WideCsv {
    std::vector<std::string> ids;
    std::vector<double> carbonate;
    std::vector<double> wavelengths;       // sorted ascending
    std::vector<std::vector<double>> rows; // per sample, aligned with wavelengths
};

std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

bool tryParseDouble(const std::string& text, double& out) {
    try {
        std::size_t consumed = 0;
        out = std::stod(text, &consumed);
        return consumed == text.size();
    } catch (const std::exception&) {
        return false;
    }
}

WideCsv loadWideCsv(const std::string& path, const AdapterOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::HeaderMismatch, "empty file '" + path + "'");
    }
    const std::vector<std::string> header = splitCsvLine(line);

    std::ptrdiff_t idCol = -1;
    std::ptrdiff_t carbCol = -1;
    std::vector<std::pair<double, std::size_t>> wavelengthCols;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == options.idColumn) {
            idCol = static_cast<std::ptrdiff_t>(j);
        } else if (header[j] == options.carbonateColumn) {
            carbCol = static_cast<std::ptrdiff_t>(j);
        } else {
            double nm = 0.0;
            if (tryParseDouble(header[j], nm)) {
                wavelengthCols.emplace_back(nm, j);
            }
        }
    }
    if (idCol < 0 || carbCol < 0) {
        throw Error(ErrorCode::MissingColumns, "need columns '" + options.idColumn + "' and '" +
                                                   options.carbonateColumn + "' in '" + path + "'");
    }
    if (wavelengthCols.size() < 2) {
        throw Error(ErrorCode::MissingColumns, "no wavelength columns found in '" + path + "'");
    }
    std::sort(wavelengthCols.begin(), wavelengthCols.end());

    WideCsv csv;
    csv.wavelengths.reserve(wavelengthCols.size());
    for (const auto& [nm, col] : wavelengthCols) csv.wavelengths.push_back(nm);

    std::size_t rowIndex = 0;
    while (std::getline(in, line)) {
        ++rowIndex;
        if (line.empty()) continue;
        const std::vector<std::string> fields = splitCsvLine(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(rowIndex) + " has " +
                                                   std::to_string(fields.size()) + " fields, header has " +
                                                   std::to_string(header.size()));
        }
        csv.ids.push_back(fields[static_cast<std::size_t>(idCol)]);
        double carbonate = 0.0;
        if (!tryParseDouble(fields[static_cast<std::size_t>(carbCol)], carbonate)) {
            throw Error(ErrorCode::ParseError,
                        "row " + std::to_string(rowIndex) + ": bad carbonate value");
        }
        csv.carbonate.push_back(carbonate);
        std::vector<double> values(wavelengthCols.size());
        for (std::size_t j = 0; j < wavelengthCols.size(); ++j) {
            const std::string& text = fields[wavelengthCols[j].second];
            double v = std::numeric_limits<double>::quiet_NaN();
            tryParseDouble(text, v); // non-parsable values stay NaN; screening drops them
            values[j] = v;
        }
        csv.rows.push_back(std::move(values));
    }
    if (csv.ids.empty()) {
        throw Error(ErrorCode::EmptyInput, "no data rows in '" + path + "'");
    }
    return csv;
}

// Linear interpolation of (xs, ys) at x; xs strictly increasing and covering x.
double interpAt(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    if (hi == 0) hi = 1;
    if (hi >= xs.size()) hi = xs.size() - 1;
    const std::size_t lo = hi - 1;
    const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

void requireCoverage(const std::vector<double>& wavelengths, const WavelengthGrid& grid) {
    if (wavelengths.front() > grid.startNm || wavelengths.back() < grid.endNm) {
        std::ostringstream msg;
        msg << "source grid " << wavelengths.front() << "-" << wavelengths.back()
            << " nm does not cover " << grid.startNm << "-" << grid.endNm << " nm";
        throw Error(ErrorCode::GridMismatch, msg.str());
    }
}

std::vector<double> resampleToGrid(const std::vector<double>& wavelengths,
                                   const std::vector<double>& values, const WavelengthGrid& grid) {
    std::vector<double> out(grid.nPoints);
    for (std::size_t j = 0; j < grid.nPoints; ++j) {
        out[j] = interpAt(wavelengths, values, grid.wavelengthAt(j));
    }
    return out;
}

} // namespace

AdaptResult adaptKssl(const std::string& path, const AdapterOptions& options) {
    if (!options.reflectanceUnit.has_value()) {
        throw Error(ErrorCode::UnitFlagRequired,
                    "KSSL exports do not state whether reflectance is percent or fraction; "
                    "set AdapterOptions::reflectanceUnit");
    }
    const WideCsv csv = loadWideCsv(path, options);
    const WavelengthGrid& grid = WavelengthGrid::standard();

    // Crop to the canonical range (keep one sample beyond each edge for
    // interpolation support).
    std::size_t lo = 0;
    while (lo + 1 < csv.wavelengths.size() && csv.wavelengths[lo + 1] <= grid.startNm) ++lo;
    std::size_t hi = csv.wavelengths.size() - 1;
    while (hi > 0 && csv.wavelengths[hi - 1] >= grid.endNm) --hi;
    const std::vector<double> croppedWl(csv.wavelengths.begin() + lo, csv.wavelengths.begin() + hi + 1);
    requireCoverage(croppedWl, grid);

    const double unitScale = options.reflectanceUnit == ReflectanceUnit::Fraction ? 100.0 : 1.0;

    RejectionLog rejected;
    std::vector<std::string> ids;
    std::vector<double> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < csv.ids.size(); ++i) {
        std::vector<double> reflectance(croppedWl.size());
        bool ok = true;
        for (std::size_t j = 0; j < croppedWl.size(); ++j) {
            const double r = csv.rows[i][lo + j] * unitScale;
            if (!std::isfinite(r)) {
                rejected.push_back({csv.ids[i], j, RejectionReason::NonFinite});
                ok = false;
                break;
            }
            if (r <= 0.0) {
                rejected.push_back({csv.ids[i], j, RejectionReason::NonPositive});
                ok = false;
                break;
            }
            if (r > 100.0) {
                rejected.push_back({csv.ids[i], j, RejectionReason::AboveTheoretical});
                ok = false;
                break;
            }
            reflectance[j] = r;
        }
        if (!ok) continue;
        std::vector<double> absorbance(reflectance.size());
        for (std::size_t j = 0; j < reflectance.size(); ++j) {
            absorbance[j] = std::log10(100.0 / reflectance[j]);
        }
        const std::vector<double> resampled = resampleToGrid(croppedWl, absorbance, grid);
        if (!(csv.carbonate[i] >= 0.0)) {
            throw Error(ErrorCode::NegativeContent, "sample '" + csv.ids[i] + "' has negative carbonate");
        }
        ids.push_back(csv.ids[i]);
        labels.push_back(csv.carbonate[i]);
        values.insert(values.end(), resampled.begin(), resampled.end());
    }
    if (ids.empty()) {
        throw Error(ErrorCode::EmptyAfterScreening, "all samples rejected in '" + path + "'");
    }
    Matrix matrix(ids.size(), grid.nPoints);
    matrix.data() = std::move(values);
    return {SpectralDataset(grid, SpectrumKind::absorbance(), Source::Kssl, std::move(matrix),
                            std::move(labels), std::move(ids)),
            std::move(rejected)};
}

AdaptResult adaptLucas(const std::string& path, const AdapterOptions& options) {
    const WideCsv csv = loadWideCsv(path, options);
    const WavelengthGrid& grid = WavelengthGrid::standard();
    requireCoverage(csv.wavelengths, grid);

    RejectionLog rejected;
    std::vector<std::string> ids;
    std::vector<double> labels;
    std::vector<double> values;
    for (std::size_t i = 0; i < csv.ids.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < csv.wavelengths.size(); ++j) {
            if (!std::isfinite(csv.rows[i][j])) {
                rejected.push_back({csv.ids[i], j, RejectionReason::NonFinite});
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const std::vector<double> resampled = resampleToGrid(csv.wavelengths, csv.rows[i], grid);
        ids.push_back(csv.ids[i]);
        labels.push_back(carbonateGPerKgToG100g(csv.carbonate[i]));
        values.insert(values.end(), resampled.begin(), resampled.end());
    }
    if (ids.empty()) {
        throw Error(ErrorCode::EmptyAfterScreening, "all samples rejected in '" + path + "'");
    }
    Matrix matrix(ids.size(), grid.nPoints);
    matrix.data() = std::move(values);
    return {SpectralDataset(grid, SpectrumKind::absorbance(), Source::Lucas, std::move(matrix),
                            std::move(labels), std::move(ids)),
            std::move(rejected)};
}

} // namespace carbospec
