#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "carbospec/errors.hpp"
#include "carbospec/io/adapters.hpp"
#include "carbospec/io/canonical_csv.hpp"
#include "carbospec/io/crc32.hpp"
#include "carbospec/io/merge.hpp"
#include "carbospec/io/model_container.hpp"
#include "carbospec/io/reference_data.hpp"
#include "carbospec/rng.hpp"

using namespace carbospec;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("carbospec_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

SpectralDataset smallStandardDataset(Rng& rng, std::size_t n, SpectrumKind kind) {
    const WavelengthGrid& grid = WavelengthGrid::standard();
    Matrix values(n, grid.nPoints);
    std::vector<double> labels(n);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < grid.nPoints; ++j) {
            values.at(i, j) = rng.uniform(0.01, 1.5);
        }
        labels[i] = rng.uniform(0.0, 20.0);
        ids.push_back("sample_" + std::to_string(i));
    }
    return SpectralDataset(grid, kind, Source::Local, std::move(values), std::move(labels),
                           std::move(ids));
}

std::string readFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

} // namespace

TEST_CASE("crc32 matches the published check value") {
    const char* data = "123456789";
    CHECK(crc32(data, 9) == 0xCBF43926u);
    CHECK(crc32("", 0) == 0x00000000u);
}

TEST_CASE("canonical csv round-trips bit-exact values") {
    Rng rng(181);
    const SpectralDataset original = smallStandardDataset(rng, 3, SpectrumKind::absorbance());
    TempDir tmp;
    const std::string path = tmp.file("data.csv");
    writeCanonicalCsv(original, path);
    const SpectralDataset loaded = loadCanonicalCsv(path, SpectrumKind::absorbance());
    REQUIRE(loaded.size() == 3);
    CHECK(loaded.sampleIds() == original.sampleIds());
    CHECK(std::memcmp(loaded.values().data().data(), original.values().data().data(),
                      original.values().data().size() * sizeof(double)) == 0);
    CHECK(loaded.labels() == original.labels());
}

TEST_CASE("canonical csv rejects malformed headers precisely") {
    TempDir tmp;
    Rng rng(191);
    const SpectralDataset original = smallStandardDataset(rng, 1, SpectrumKind::absorbance());
    const std::string good = tmp.file("good.csv");
    writeCanonicalCsv(original, good);
    std::string content = readFile(good);

    // header wavelength tampering: 1150.5 -> 1150.25
    const std::string bad1 = tmp.file("bad1.csv");
    {
        std::string tampered = content;
        const auto pos = tampered.find(",1150.5,");
        REQUIRE(pos != std::string::npos);
        tampered.replace(pos, 8, ",1150.25,");
        std::ofstream(bad1, std::ios::binary) << tampered;
    }
    CHECK_THROWS_WITH_AS(loadCanonicalCsv(bad1, SpectrumKind::absorbance()),
                         doctest::Contains("1150.25"), Error);

    const std::string bad2 = tmp.file("bad2.csv");
    {
        std::string tampered = content;
        tampered.replace(0, std::strlen("sample_id"), "sampleXid");
        std::ofstream(bad2, std::ios::binary) << tampered;
    }
    try {
        loadCanonicalCsv(bad2, SpectrumKind::absorbance());
        FAIL("expected header mismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HeaderMismatch);
    }

    // negative carbonate label
    const std::string bad3 = tmp.file("bad3.csv");
    {
        std::string tampered = content;
        const auto newline = tampered.find('\n');
        const auto comma = tampered.find(',', newline + 1);
        tampered.insert(comma + 1, "-");
        std::ofstream(bad3, std::ios::binary) << tampered;
    }
    try {
        loadCanonicalCsv(bad3, SpectrumKind::absorbance());
        FAIL("expected negative content error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeContent);
    }

    CHECK_THROWS_AS(loadCanonicalCsv(tmp.file("missing.csv"), SpectrumKind::absorbance()), Error);
}

TEST_CASE("kssl adapter: flat 10 percent reflectance becomes absorbance 1 on the grid") {
    TempDir tmp;
    const std::string path = tmp.file("kssl.csv");
    {
        std::ofstream out(path);
        out << "sample_id,carbonate";
        for (int nm = 350; nm <= 2500; nm += 2) out << ',' << nm;
        out << "\nk1,4.2";
        for (int nm = 350; nm <= 2500; nm += 2) out << ",10.0";
        out << "\n";
    }
    AdapterOptions options;
    options.reflectanceUnit = ReflectanceUnit::Percent;
    const AdaptResult result = adaptKssl(path, options);
    CHECK(result.dataset.size() == 1);
    CHECK(result.dataset.kind() == SpectrumKind::absorbance());
    CHECK(result.dataset.labels()[0] == 4.2);
    for (std::size_t j = 0; j < result.dataset.grid().nPoints; ++j) {
        CHECK(result.dataset.row(0)[j] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("kssl adapter requires the reflectance unit flag and screens bad rows") {
    TempDir tmp;
    const std::string path = tmp.file("kssl.csv");
    {
        std::ofstream out(path);
        out << "sample_id,carbonate";
        for (int nm = 1100; nm <= 2550; nm += 2) out << ',' << nm;
        out << "\nk1,1.0";
        for (int nm = 1100; nm <= 2550; nm += 2) out << ",50.0";
        out << "\nk2,1.0";
        for (int nm = 1100; nm <= 2550; nm += 2) out << (nm == 1500 ? ",120.0" : ",50.0");
        out << "\n";
    }
    AdapterOptions options;
    CHECK_THROWS_AS(adaptKssl(path, options), Error);

    options.reflectanceUnit = ReflectanceUnit::Percent;
    const AdaptResult result = adaptKssl(path, options);
    CHECK(result.dataset.size() == 1);
    REQUIRE(result.rejected.size() == 1);
    CHECK(result.rejected[0].sampleId == "k2");
    CHECK(result.rejected[0].reason == RejectionReason::AboveTheoretical);
}

TEST_CASE("kssl adapter accepts fractional reflectance with the flag") {
    TempDir tmp;
    const std::string path = tmp.file("kssl.csv");
    {
        std::ofstream out(path);
        out << "sample_id,carbonate";
        for (int nm = 1100; nm <= 2550; nm += 1) out << ',' << nm;
        out << "\nk1,2.0";
        for (int nm = 1100; nm <= 2550; nm += 1) out << ",0.1";
        out << "\n";
    }
    AdapterOptions options;
    options.reflectanceUnit = ReflectanceUnit::Fraction;
    const AdaptResult result = adaptKssl(path, options);
    CHECK(result.dataset.row(0)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lucas adapter: labels convert g/kg to g/100g and ramps resample exactly") {
    TempDir tmp;
    const std::string path = tmp.file("lucas.csv");
    {
        std::ofstream out(path);
        out << "sample_id,carbonate";
        for (int nm = 1100; nm <= 2550; nm += 2) out << ',' << nm;
        out << "\nl1,85.6";
        for (int nm = 1100; nm <= 2550; nm += 2) out << ',' << (0.001 * nm - 0.5);
        out << "\n";
    }
    const AdaptResult result = adaptLucas(path, AdapterOptions{});
    CHECK(result.dataset.labels()[0] == doctest::Approx(8.56).epsilon(1e-12));
    const WavelengthGrid& grid = result.dataset.grid();
    for (std::size_t j = 0; j < grid.nPoints; j += 101) {
        const double nm = grid.wavelengthAt(j);
        CHECK(result.dataset.row(0)[j] == doctest::Approx(0.001 * nm - 0.5).epsilon(1e-12));
    }
}

TEST_CASE("lucas adapter rejects grids that do not cover the canonical range") {
    TempDir tmp;
    const std::string path = tmp.file("lucas.csv");
    {
        std::ofstream out(path);
        out << "sample_id,carbonate,1200,1300\nl1,1.0,0.5,0.6\n";
    }
    CHECK_THROWS_AS(adaptLucas(path, AdapterOptions{}), Error);
}

TEST_CASE("merge concatenates, tags provenance and reports the label distance") {
    Rng rng(193);
    const SpectralDataset a = smallStandardDataset(rng, 3, SpectrumKind::absorbance());
    SpectralDataset b = [&] {
        const WavelengthGrid& grid = WavelengthGrid::standard();
        Matrix values(2, grid.nPoints, 0.5);
        std::vector<double> labels = {1.0, 2.0};
        return SpectralDataset(grid, SpectrumKind::absorbance(), Source::Lucas, std::move(values),
                               std::move(labels), {"x0", "x1"});
    }();
    const MergeResult merged = merge(a, b);
    CHECK(merged.dataset.size() == 5);
    CHECK(merged.dataset.source() == Source::Merged);
    CHECK(merged.dataset.sampleIds()[0] == "sample_0");
    CHECK(merged.dataset.sampleIds()[3] == "x0");
    CHECK(merged.dataset.sampleSources()[0] == Source::Local);
    CHECK(merged.dataset.sampleSources()[3] == Source::Lucas);
    CHECK(merged.labelDistance == wasserstein(a.labels(), b.labels(), 1));

    // identical label sets give zero diagnostic
    const MergeResult same = [&] {
        const WavelengthGrid& grid = WavelengthGrid::standard();
        Matrix values(3, grid.nPoints, 0.25);
        std::vector<std::string> ids = {"y0", "y1", "y2"};
        SpectralDataset c(grid, SpectrumKind::absorbance(), Source::Kssl, std::move(values),
                          a.labels(), std::move(ids));
        return merge(a, c);
    }();
    CHECK(same.labelDistance == 0.0);

    CHECK_THROWS_AS(merge(a, a), Error); // duplicate ids
}

TEST_CASE("bundled reference table matches its spot checks") {
    const auto& rows = table1Rows();
    REQUIRE(rows.size() == 19);
    CHECK(rows[2].sampleId == std::string("S03"));
    CHECK(rows[2].experimental == 8.56);
    CHECK(rows[2].predicted == 8.80);
    CHECK(rows[2].group == SampleGroup::Sam1);
    CHECK(rows[18].sampleId == std::string("S19"));
    CHECK(rows[18].experimental == 0.04);
    CHECK(rows[18].predicted == 0.51);
    CHECK(rows[18].group == SampleGroup::Sam2);
    double maxExp = 0.0;
    std::string maxId;
    for (const Table1Row& row : rows) {
        if (row.experimental > maxExp) {
            maxExp = row.experimental;
            maxId = row.sampleId;
        }
    }
    CHECK(maxExp == 18.14);
    CHECK(maxId == "S10");
}

TEST_CASE("plsr model container round-trips to bit-identical predictions") {
    Rng rng(197);
    const SpectralDataset data = smallStandardDataset(rng, 30, SpectrumKind::absorbance());

    TrainedModel model;
    model.kind = ModelKind::Plsr;
    model.pipeline.steps = {PipelineStep::savgol({13, 2, 2})};
    const SpectralDataset prepared = model.pipeline.apply(data);
    model.plsr = plsrFit(prepared.values(), prepared.labels(), 5);

    TempDir tmp;
    const std::string path = tmp.file("model.cspc");
    saveModel(model, path);
    const TrainedModel loaded = loadModel(path);
    CHECK(loaded.kind == ModelKind::Plsr);
    CHECK(loaded.pipeline == model.pipeline);

    const SpectralDataset probe = smallStandardDataset(rng, 10, SpectrumKind::absorbance());
    const std::vector<double> before = model.predict(probe);
    const std::vector<double> after = loaded.predict(probe);
    CHECK(before == after);
}

TEST_CASE("cubist and lssvm containers keep their pls feature map") {
    Rng rng(199);
    const SpectralDataset data = smallStandardDataset(rng, 40, SpectrumKind::absorbance());
    TrainedModel model;
    model.kind = ModelKind::Cubist;
    model.pipeline.steps = {PipelineStep::minmax()};
    const SpectralDataset prepared = model.pipeline.apply(data);
    model.plsr = plsrFit(prepared.values(), prepared.labels(), 4);
    model.cubist = cubistFit(plsrTransform(model.plsr, prepared.values()), prepared.labels(), {});

    TempDir tmp;
    const std::string path = tmp.file("cubist.cspc");
    saveModel(model, path);
    const TrainedModel loaded = loadModel(path);
    CHECK(loaded.predict(data) == model.predict(data));

    TrainedModel svm;
    svm.kind = ModelKind::Lssvm;
    svm.pipeline = model.pipeline;
    svm.plsr = model.plsr;
    svm.lssvm = lssvmFit(plsrTransform(model.plsr, prepared.values()), prepared.labels(), 42.0);
    const std::string svmPath = tmp.file("svm.cspc");
    saveModel(svm, svmPath);
    CHECK(loadModel(svmPath).predict(data) == svm.predict(data));
}

TEST_CASE("mlp and cnn containers round-trip bit-identically") {
    Rng rng(211);
    TempDir tmp;
    const SpectralDataset data = smallStandardDataset(rng, 6, SpectrumKind::absorbance());

    TrainedModel mlpModel;
    mlpModel.kind = ModelKind::Mlp;
    mlpModel.pipeline.steps = {PipelineStep::savgol({13, 2, 2})};
    MlpConfig mlpConfig;
    mlpConfig.hidden = {12, 6};
    mlpModel.mlp = MlpModel(WavelengthGrid::standard().nPoints, mlpConfig);
    const std::string mlpPath = tmp.file("mlp.cspc");
    saveModel(mlpModel, mlpPath);
    CHECK(loadModel(mlpPath).predict(data) == mlpModel.predict(data));

    TrainedModel cnnModel;
    cnnModel.kind = ModelKind::Cnn;
    cnnModel.pipeline.steps = {PipelineStep::savgol({13, 2, 2})};
    CnnConfig cnnConfig;
    cnnConfig.convChannels = {4, 8};
    cnnConfig.denseUnits = 6;
    cnnConfig.inputH = 61;
    cnnConfig.inputW = 122;
    cnnModel.cnn = CnnModel(cnnConfig);
    const std::string cnnPath = tmp.file("cnn.cspc");
    saveModel(cnnModel, cnnPath);
    CHECK(loadModel(cnnPath).predict(data) == cnnModel.predict(data));
}

TEST_CASE("model container rejects corruption and bad versions") {
    Rng rng(223);
    const SpectralDataset data = smallStandardDataset(rng, 12, SpectrumKind::absorbance());
    TrainedModel model;
    model.kind = ModelKind::Plsr;
    model.plsr = plsrFit(data.values(), data.labels(), 2);

    TempDir tmp;
    const std::string path = tmp.file("model.cspc");
    saveModel(model, path);

    std::string bytes = readFile(path);

    // flip one payload byte -> CRC mismatch
    {
        std::string corrupt = bytes;
        corrupt[bytes.size() / 2] = static_cast<char>(corrupt[bytes.size() / 2] ^ 0x40);
        const std::string corruptPath = tmp.file("corrupt.cspc");
        std::ofstream(corruptPath, std::ios::binary) << corrupt;
        try {
            loadModel(corruptPath);
            FAIL("expected CRC mismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::CrcMismatch);
        }
    }

    // version 999 -> UnsupportedVersion
    {
        std::string future = bytes;
        future[4] = static_cast<char>(999 & 0xFF);
        future[5] = static_cast<char>((999 >> 8) & 0xFF);
        const std::string futurePath = tmp.file("future.cspc");
        std::ofstream(futurePath, std::ios::binary) << future;
        try {
            loadModel(futurePath);
            FAIL("expected unsupported version");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnsupportedVersion);
        }
    }
}

TEST_CASE("rejection log is tab separated") {
    TempDir tmp;
    RejectionLog log = {{"s1", 4, RejectionReason::NonFinite},
                        {"s2", 0, RejectionReason::NonPositive}};
    const std::string path = tmp.file("rejects.log");
    writeRejectionLog(log, path);
    CHECK(readFile(path) == "s1\tNonFinite\ns2\tNonPositiveReflectance\n");
}
