#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <limits>

#include "carbospec/dataset.hpp"
#include "carbospec/errors.hpp"
#include "carbospec/rng.hpp"
#include "carbospec/spectrum.hpp"

using namespace carbospec;

namespace {

// Small helper grid so tests stay readable; the standard 2701-point grid is
// exercised where the spec depends on it.
Spectrum flatReflectance(double value, std::size_t n = 8) {
    Spectrum s;
    s.kind = SpectrumKind::reflectancePct();
    s.sampleId = "flat";
    s.values.assign(n, value);
    return s;
}

SpectralDataset reflectanceDataset(const std::vector<std::vector<double>>& rows) {
    WavelengthGrid grid;
    grid.startNm = 1150.0;
    grid.stepNm = 0.5;
    grid.nPoints = rows[0].size();
    grid.endNm = grid.startNm + grid.stepNm * static_cast<double>(grid.nPoints - 1);
    Matrix values(rows.size(), rows[0].size());
    std::vector<double> labels(rows.size(), 1.0);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::memcpy(values.row(i), rows[i].data(), rows[i].size() * sizeof(double));
        ids.push_back("s" + std::to_string(i));
    }
    return SpectralDataset(grid, SpectrumKind::reflectancePct(), Source::Local, std::move(values),
                           std::move(labels), std::move(ids));
}

} // namespace

TEST_CASE("standard grid matches the instrument export") {
    const WavelengthGrid& grid = WavelengthGrid::standard();
    CHECK(grid.startNm == 1150.0);
    CHECK(grid.endNm == 2500.0);
    CHECK(grid.stepNm == 0.5);
    CHECK(grid.nPoints == 2701);
    CHECK(grid.nPoints ==
          static_cast<std::size_t>(std::lround((grid.endNm - grid.startNm) / grid.stepNm)) + 1);
    CHECK(grid.wavelengthAt(0) == 1150.0);
    CHECK(grid.wavelengthAt(2700) == 2500.0);
}

TEST_CASE("absorbance transform hits the textbook values") {
    CHECK(toAbsorbance(flatReflectance(100.0)).values[0] == 0.0);
    CHECK(toAbsorbance(flatReflectance(10.0)).values[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(toAbsorbance(flatReflectance(50.0)).values[0] ==
          doctest::Approx(0.3010299957).epsilon(1e-9));
}

TEST_CASE("absorbance rejects non-positive reflectance instead of clamping") {
    Spectrum s = flatReflectance(10.0);
    s.values[3] = 0.0;
    CHECK_THROWS_AS(toAbsorbance(s), Error);
    try {
        toAbsorbance(s);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonPositiveReflectance);
    }
    s.values[3] = 101.0;
    try {
        toAbsorbance(s);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ReflectanceAboveLimit);
    }
}

TEST_CASE("absorbance round-trips through reflectance") {
    Rng rng(3);
    Spectrum s = flatReflectance(0.0, 64);
    for (double& v : s.values) v = rng.uniform(1e-6, 100.0);
    const Spectrum back = toReflectance(toAbsorbance(s));
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        CHECK(back.values[i] == doctest::Approx(s.values[i]).epsilon(1e-12));
    }
}

TEST_CASE("absorbance is strictly decreasing in reflectance") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const double r1 = rng.uniform(1e-3, 100.0);
        const double r2 = rng.uniform(1e-3, 100.0);
        if (r1 == r2) continue;
        const double a1 = toAbsorbance(flatReflectance(r1)).values[0];
        const double a2 = toAbsorbance(flatReflectance(r2)).values[0];
        CHECK(((r1 < r2) == (a1 > a2)));
    }
}

TEST_CASE("screen keeps clean data and is bit-exact on retained rows") {
    const SpectralDataset d = reflectanceDataset({{50.0, 60.0, 70.0}, {10.0, 20.0, 30.0}});
    const ScreenResult result = screen(d);
    CHECK(result.dataset.size() == 2);
    CHECK(result.rejected.empty());
    CHECK(std::memcmp(result.dataset.values().data().data(), d.values().data().data(),
                      d.values().data().size() * sizeof(double)) == 0);
}

TEST_CASE("screen drops out-of-range and non-finite samples with reasons") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const SpectralDataset d = reflectanceDataset(
        {{50.0, 60.0, 70.0}, {10.0, 101.0, 30.0}, {10.0, nan, 30.0}, {0.0, 20.0, 30.0}});
    const ScreenResult result = screen(d);
    CHECK(result.dataset.size() == 1);
    REQUIRE(result.rejected.size() == 3);
    CHECK(result.rejected[0].reason == RejectionReason::AboveTheoretical);
    CHECK(result.rejected[0].sampleId == "s1");
    CHECK(result.rejected[0].valueIndex == 1);
    CHECK(result.rejected[1].reason == RejectionReason::NonFinite);
    CHECK(result.rejected[2].reason == RejectionReason::NonPositive);
}

TEST_CASE("screening everything out is an error") {
    const SpectralDataset d = reflectanceDataset({{-1.0, 2.0, 3.0}});
    CHECK_THROWS_AS(screen(d), Error);
}

TEST_CASE("carbonate unit conversion divides by ten") {
    CHECK(carbonateGPerKgToG100g(0.0) == 0.0);
    CHECK(carbonateGPerKgToG100g(85.6) == doctest::Approx(8.56).epsilon(1e-15));
    CHECK(carbonateGPerKgToG100g(1000.0) == 100.0);
    CHECK_THROWS_AS(carbonateGPerKgToG100g(-0.1), Error);
}

TEST_CASE("dataset construction enforces the shared-grid invariants") {
    Matrix values(1, 3, 1.0);
    CHECK_THROWS_AS(SpectralDataset(WavelengthGrid::standard(), SpectrumKind::absorbance(),
                                    Source::Local, values, {1.0}, {"a"}),
                    Error);
    WavelengthGrid grid;
    grid.nPoints = 3;
    grid.endNm = grid.startNm + grid.stepNm * 2;
    CHECK_THROWS_AS(
        SpectralDataset(grid, SpectrumKind::absorbance(), Source::Local, values, {-1.0}, {"a"}),
        Error);
    CHECK_THROWS_AS(
        SpectralDataset(grid, SpectrumKind::absorbance(), Source::Local, values, {1.0, 2.0}, {"a"}),
        Error);
}
