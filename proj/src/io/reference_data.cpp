#include "carbospec/io/reference_data.hpp"

namespace carbospec {

const std::vector<Table1Row>& table1Rows() {
    static const std::vector<Table1Row> rows = {
        {"S01", 7.85, 11.53, SampleGroup::Sam1},  {"S02", 1.83, 0.86, SampleGroup::Sam1},
        {"S03", 8.56, 8.80, SampleGroup::Sam1},   {"S04", 10.84, 5.85, SampleGroup::Sam1},
        {"S05", 9.32, 8.37, SampleGroup::Sam1},   {"S06", 4.63, 1.64, SampleGroup::Sam1},
        {"S07", 3.39, 1.52, SampleGroup::Sam1},   {"S08", 5.75, 3.31, SampleGroup::Sam1},
        {"S09", 1.18, 1.07, SampleGroup::Sam1},   {"S10", 18.14, 13.44, SampleGroup::Sam1},
        {"S11", 11.28, 14.18, SampleGroup::Sam1}, {"S12", 17.32, 14.38, SampleGroup::Sam1},
        {"S13", 17.00, 18.57, SampleGroup::Sam1}, {"S14", 1.12, 1.80, SampleGroup::Sam1},
        {"S15", 0.07, 0.60, SampleGroup::Sam2},   {"S16", 0.13, 0.59, SampleGroup::Sam2},
        {"S17", 0.13, 0.53, SampleGroup::Sam2},   {"S18", 0.09, 0.51, SampleGroup::Sam2},
        {"S19", 0.04, 0.51, SampleGroup::Sam2},
    };
    return rows;
}

const std::vector<Table2Row>& table2Rows() {
    static const std::vector<Table2Row> rows = {
        {"plsr", -1.43, 9.42, 0.64, 1.00}, {"svm", -0.19, 6.59, 0.91, 1.43},
        {"cubist", 0.45, 4.47, 1.35, 2.11}, {"mlp", 0.84, 2.11, 2.14, 3.33},
        {"cnn", 0.68, 4.11, 1.47, 2.29},
    };
    return rows;
}

const XrdReference& xrdReference() {
    static const XrdReference ref{};
    return ref;
}

const std::vector<BandMarker>& carbonateBandMarkers() {
    static const std::vector<BandMarker> markers = {
        {1415.0, "1415"}, {1900.0, "1900"}, {2000.0, "2000"},
        {2160.0, "2160"}, {2340.0, "2340"}, {2500.0, "2500-2550"},
    };
    return markers;
}

const std::array<double, 4>& documentedSaliencyPeaksNm() {
    static const std::array<double, 4> peaks = {1415.0, 1908.0, 2209.0, 2335.0};
    return peaks;
}

} // namespace carbospec
