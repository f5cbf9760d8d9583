#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <vector>

#include "carbospec/dataset.hpp"
#include "carbospec/errors.hpp"
#include "carbospec/preprocess.hpp"
#include "carbospec/rng.hpp"

using namespace carbospec;

namespace {

// Independent oracle: fit a degree-p polynomial to one window by solving the
// normal equations in long double with Gauss-Jordan elimination, then
// evaluate the d-th derivative at the requested offset. Shares no code with
// the production coefficient path.
double polyfitDerivativeAt(const std::vector<double>& window, int polyorder, int deriv,
                           int evalOffset, double step) {
    const int w = static_cast<int>(window.size());
    const int m = polyorder + 1;
    std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
    for (int j = 0; j < w; ++j) {
        const long double z = static_cast<long double>(j - evalOffset);
        long double powers[8];
        powers[0] = 1.0L;
        for (int k = 1; k < m; ++k) powers[k] = powers[k - 1] * z;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) a[r][c] += powers[r] * powers[c];
            a[r][m] += powers[r] * static_cast<long double>(window[j]);
        }
    }
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r) {
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        const long double scale = a[col][col];
        for (int c = col; c <= m; ++c) a[col][c] /= scale;
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            const long double factor = a[r][col];
            for (int c = col; c <= m; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    long double factorial = 1.0L;
    for (int k = 2; k <= deriv; ++k) factorial *= k;
    long double result = a[deriv][m] * factorial;
    for (int k = 0; k < deriv; ++k) result /= static_cast<long double>(step);
    return static_cast<double>(result);
}

Spectrum makeSpectrum(std::vector<double> values) {
    Spectrum s;
    s.kind = SpectrumKind::absorbance();
    s.sampleId = "t";
    s.values = std::move(values);
    return s;
}

} // namespace

TEST_CASE("sg params validation") {
    CHECK_THROWS_AS(SgParams{4, 2, 1}.validate(), Error);   // even window
    CHECK_THROWS_AS(SgParams{11, 11, 1}.validate(), Error); // polyorder >= window
    CHECK_THROWS_AS(SgParams{11, 2, 3}.validate(), Error);  // deriv > polyorder
    CHECK_NOTHROW(SgParams{11, 2, 1}.validate());
}

TEST_CASE("sg derivative of a constant signal is zero") {
    const Spectrum s = makeSpectrum(std::vector<double>(64, 3.7));
    const Spectrum out = savitzkyGolay(s, {11, 2, 1}, 0.5);
    CHECK(out.kind == SpectrumKind::derivative(1));
    for (double v : out.values) CHECK(std::fabs(v) < 1e-12);
}

TEST_CASE("sg-1 recovers the slope of a line everywhere, edges included") {
    const double step = 0.5;
    const double slope = 2.25; // per nm
    std::vector<double> values(80);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = slope * (1150.0 + step * static_cast<double>(i)) - 4.0;
    }
    const Spectrum out = savitzkyGolay(makeSpectrum(values), {11, 2, 1}, step);
    for (double v : out.values) CHECK(v == doctest::Approx(slope).epsilon(1e-9));
}

TEST_CASE("sg-2 recovers the curvature of a parabola everywhere") {
    const double step = 0.5;
    const double a = 0.75;
    std::vector<double> values(90);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double x = step * static_cast<double>(i);
        values[i] = a * x * x - 3.0 * x + 1.0;
    }
    const Spectrum out = savitzkyGolay(makeSpectrum(values), {13, 2, 2}, step);
    for (double v : out.values) CHECK(v == doctest::Approx(2.0 * a).epsilon(1e-9));
}

TEST_CASE("sg interior output matches the per-window polyfit oracle") {
    Rng rng(17);
    for (const SgParams params : {SgParams{11, 2, 1}, SgParams{13, 2, 2}, SgParams{9, 3, 0}}) {
        std::vector<double> values(200);
        for (double& v : values) v = rng.uniform(-1.0, 1.0);
        const Spectrum out = savitzkyGolay(makeSpectrum(values), params, 0.5);
        const int h = params.window / 2;
        for (std::size_t i = h; i + h < values.size(); i += 7) {
            const std::vector<double> window(values.begin() + i - h, values.begin() + i + h + 1);
            const double expected =
                polyfitDerivativeAt(window, params.polyorder, params.derivOrder, h, 0.5);
            CHECK(out.values[i] == doctest::Approx(expected).epsilon(0).scale(1).epsilon(1e-12));
            CHECK(std::fabs(out.values[i] - expected) < 1e-9);
        }
    }
}

TEST_CASE("sg edge outputs match the boundary-window oracle") {
    Rng rng(23);
    const SgParams params{11, 2, 1};
    std::vector<double> values(60);
    for (double& v : values) v = rng.uniform(-1.0, 1.0);
    const Spectrum out = savitzkyGolay(makeSpectrum(values), params, 0.5);
    const int h = params.window / 2;
    const int w = params.window;
    for (int i = 0; i < h; ++i) {
        const std::vector<double> window(values.begin(), values.begin() + w);
        const double expected = polyfitDerivativeAt(window, 2, 1, i, 0.5);
        CHECK(std::fabs(out.values[i] - expected) < 1e-9);
    }
    const std::size_t n = values.size();
    for (std::size_t i = n - h; i < n; ++i) {
        const std::vector<double> window(values.end() - w, values.end());
        const double expected = polyfitDerivativeAt(window, 2, 1, static_cast<int>(i - (n - w)), 0.5);
        CHECK(std::fabs(out.values[i] - expected) < 1e-9);
    }
}

TEST_CASE("sg is linear in its input") {
    Rng rng(29);
    std::vector<double> x(100), y(100);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = rng.uniform(-1.0, 1.0);
        y[i] = rng.uniform(-1.0, 1.0);
    }
    const double alpha = 1.3;
    const double beta = -0.6;
    std::vector<double> combo(100);
    for (std::size_t i = 0; i < x.size(); ++i) combo[i] = alpha * x[i] + beta * y[i];
    const SgParams params{13, 2, 2};
    const Spectrum fx = savitzkyGolay(makeSpectrum(x), params, 0.5);
    const Spectrum fy = savitzkyGolay(makeSpectrum(y), params, 0.5);
    const Spectrum fc = savitzkyGolay(makeSpectrum(combo), params, 0.5);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double expected = alpha * fx.values[i] + beta * fy.values[i];
        CHECK(fc.values[i] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("sg smoothing preserves a constant signal exactly") {
    const Spectrum s = makeSpectrum(std::vector<double>(40, 2.5));
    const Spectrum out = savitzkyGolay(s, {9, 2, 0}, 0.5);
    for (double v : out.values) CHECK(v == 2.5);
}

TEST_CASE("sg window larger than the signal is rejected") {
    const Spectrum s = makeSpectrum(std::vector<double>(9, 1.0));
    CHECK_THROWS_AS(savitzkyGolay(s, {11, 2, 1}, 0.5), Error);
}

TEST_CASE("minmax normalization basics") {
    const Spectrum out = minmaxNormalize(makeSpectrum({0.0, 5.0, 10.0}));
    CHECK(out.values[0] == 0.0);
    CHECK(out.values[1] == 0.5);
    CHECK(out.values[2] == 1.0);

    CHECK_THROWS_AS(minmaxNormalize(makeSpectrum({2.0, 2.0, 2.0})), Error);
}

TEST_CASE("minmax normalization is affine-invariant and idempotent") {
    Rng rng(31);
    std::vector<double> x(50);
    for (double& v : x) v = rng.uniform(-5.0, 5.0);
    const Spectrum base = minmaxNormalize(makeSpectrum(x));

    std::vector<double> affine(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) affine[i] = 3.2 * x[i] + 17.0;
    const Spectrum scaled = minmaxNormalize(makeSpectrum(affine));
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(scaled.values[i] == doctest::Approx(base.values[i]).epsilon(1e-12));
    }

    const Spectrum again = minmaxNormalize(base);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(again.values[i] == base.values[i]);
    }
    for (double v : base.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("pipeline bookkeeping, determinism and serialization round-trip") {
    PreprocessPipeline pipeline;
    pipeline.steps = {PipelineStep::absorbance(), PipelineStep::savgol({13, 2, 2})};

    WavelengthGrid grid;
    grid.nPoints = 32;
    grid.endNm = grid.startNm + grid.stepNm * 31;
    Rng rng(37);
    Matrix values(3, 32);
    for (double& v : values.data()) v = rng.uniform(5.0, 95.0);
    SpectralDataset data(grid, SpectrumKind::reflectancePct(), Source::Local, values,
                         {1.0, 2.0, 3.0}, {"a", "b", "c"});

    const SpectralDataset out1 = pipeline.apply(data);
    CHECK(out1.kind() == SpectrumKind::derivative(2));
    const SpectralDataset out2 = pipeline.apply(data);
    CHECK(std::memcmp(out1.values().data().data(), out2.values().data().data(),
                      out1.values().data().size() * sizeof(double)) == 0);

    const PreprocessPipeline parsed = PreprocessPipeline::fromJson(pipeline.toJson());
    CHECK(parsed == pipeline);

    PreprocessPipeline empty;
    const SpectralDataset same = empty.apply(data);
    CHECK(std::memcmp(same.values().data().data(), data.values().data().data(),
                      data.values().data().size() * sizeof(double)) == 0);
}

TEST_CASE("pipeline rejects absorbance anywhere but first") {
    PreprocessPipeline pipeline;
    pipeline.steps = {PipelineStep::minmax(), PipelineStep::absorbance()};
    CHECK_THROWS_AS(pipeline.validate(), Error);
}

TEST_CASE("pipeline errors carry the failing sample id") {
    PreprocessPipeline pipeline;
    pipeline.steps = {PipelineStep::minmax()};
    WavelengthGrid grid;
    grid.nPoints = 4;
    grid.endNm = grid.startNm + grid.stepNm * 3;
    Matrix values(2, 4, 1.0);
    values.at(0, 1) = 2.0; // row 0 fine, row 1 constant
    SpectralDataset data(grid, SpectrumKind::absorbance(), Source::Local, values, {1.0, 1.0},
                         {"good", "bad"});
    try {
        pipeline.apply(data);
        FAIL("expected pipeline failure");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("bad") != std::string::npos);
    }
}
