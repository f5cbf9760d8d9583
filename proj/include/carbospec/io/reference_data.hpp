#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace carbospec {

// Compiled-in reference data: the only published dataset small enough to
// reproduce metric arithmetic exactly, plus the published per-model metric
// rows and the XRD phase-quantification numbers they are checked against.

enum class SampleGroup { Sam1, Sam2 };

struct Table1Row {
    const char* sampleId;
    double experimental; // volumetric method, g/100g
    double predicted;    // MLP prediction, g/100g
    SampleGroup group;
};

// 19 (experimental, predicted) pairs.
const std::vector<Table1Row>& table1Rows();

struct Table2Row {
    const char* model;
    double r2;
    double rmse;
    double rpd;
    double rpiq;
};

// Published evaluation-metric rows (second-derivative spectra), one per model
// family.
const std::vector<Table2Row>& table2Rows();

struct XrdReference {
    double calciteWtPct = 3.88;
    double hydromagnesiteWtPct = 2.19;
    double crystallineTotalWtPct = 6.07;
    double crystallineIndex = 0.72;
    double volumetricWtPct = 8.56; // S03, volumetric method
    double mlpWtPct = 8.80;        // S03, model prediction
};

const XrdReference& xrdReference();

// Carbonate absorption band markers (nm) drawn on spectrum plots. The last
// band extends past the grid edge and is clipped to 2500 nm.
struct BandMarker {
    double wavelengthNm;
    const char* label;
};

const std::vector<BandMarker>& carbonateBandMarkers();

// Expected saliency peak positions (nm) documented for the reference model;
// only checkable against the real libraries, shipped for reporting.
const std::array<double, 4>& documentedSaliencyPeaksNm();

} // namespace carbospec
