#include "carbospec/io/canonical_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "carbospec/errors.hpp"

namespace carbospec {
namespace {

std::string wavelengthLabel(double nm) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", nm);
    return buf;
}

std::string fullPrecision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

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

double parseDouble(const std::string& text, std::size_t row, std::size_t col) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(text, &consumed);
        if (consumed != text.size()) {
            throw std::invalid_argument("trailing characters");
        }
        if (!std::isfinite(v)) {
            throw std::invalid_argument("not finite");
        }
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError, "row " + std::to_string(row) + ", column " +
                                               std::to_string(col) + ": bad value '" + text + "'");
    }
}

} // namespace

void writeCanonicalCsv(const SpectralDataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    const WavelengthGrid& grid = dataset.grid();
    out << "sample_id,carbonate_g100g";
    for (std::size_t j = 0; j < grid.nPoints; ++j) {
        out << ',' << wavelengthLabel(grid.wavelengthAt(j));
    }
    out << '\n';
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        out << dataset.sampleIds()[i] << ',' << fullPrecision(dataset.labels()[i]);
        const double* row = dataset.row(i);
        for (std::size_t j = 0; j < grid.nPoints; ++j) {
            out << ',' << fullPrecision(row[j]);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::IoFailure, "write failed for '" + path + "'");
    }
}

SpectralDataset loadCanonicalCsv(const std::string& path, SpectrumKind kind, Source source) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    const WavelengthGrid& grid = WavelengthGrid::standard();

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::HeaderMismatch, "empty file '" + path + "'");
    }
    const std::vector<std::string> header = splitCsvLine(line);
    if (header.size() != grid.nPoints + 2) {
        throw Error(ErrorCode::HeaderMismatch,
                    "expected " + std::to_string(grid.nPoints + 2) + " columns, found " +
                        std::to_string(header.size()));
    }
    if (header[0] != "sample_id") {
        throw Error(ErrorCode::HeaderMismatch, "column 0 must be 'sample_id', found '" + header[0] + "'");
    }
    if (header[1] != "carbonate_g100g") {
        throw Error(ErrorCode::HeaderMismatch,
                    "column 1 must be 'carbonate_g100g', found '" + header[1] + "'");
    }
    for (std::size_t j = 0; j < grid.nPoints; ++j) {
        const std::string expected = wavelengthLabel(grid.wavelengthAt(j));
        if (header[j + 2] != expected) {
            throw Error(ErrorCode::GridMismatch, "wavelength column " + std::to_string(j + 2) +
                                                     " is '" + header[j + 2] + "', expected '" +
                                                     expected + "'");
        }
    }

    std::vector<std::string> ids;
    std::vector<double> labels;
    std::vector<double> values;
    std::size_t rowIndex = 0;
    while (std::getline(in, line)) {
        ++rowIndex;
        if (line.empty()) continue;
        const std::vector<std::string> fields = splitCsvLine(line);
        if (fields.size() != grid.nPoints + 2) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(rowIndex) + " has " +
                                                   std::to_string(fields.size()) + " fields");
        }
        ids.push_back(fields[0]);
        const double label = parseDouble(fields[1], rowIndex, 1);
        if (label < 0.0) {
            throw Error(ErrorCode::NegativeContent,
                        "row " + std::to_string(rowIndex) + ": carbonate label " + fields[1]);
        }
        labels.push_back(label);
        for (std::size_t j = 0; j < grid.nPoints; ++j) {
            values.push_back(parseDouble(fields[j + 2], rowIndex, j + 2));
        }
    }
    if (ids.empty()) {
        throw Error(ErrorCode::EmptyInput, "no data rows in '" + path + "'");
    }
    Matrix matrix(ids.size(), grid.nPoints);
    matrix.data() = std::move(values);
    return SpectralDataset(grid, kind, source, std::move(matrix), std::move(labels), std::move(ids));
}

void writeRejectionLog(const RejectionLog& log, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    for (const RejectionEntry& entry : log) {
        out << entry.sampleId << '\t' << rejectionReasonName(entry.reason) << '\n';
    }
}

} // namespace carbospec
