// carbospec: NIR soil carbonate prediction toolkit.
//
// Exit codes: 0 success, 2 validation/user error, 3 I/O failure, 4 numerical
// divergence.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "carbospec/dataset.hpp"
#include "carbospec/errors.hpp"
#include "carbospec/io/adapters.hpp"
#include "carbospec/io/canonical_csv.hpp"
#include "carbospec/io/merge.hpp"
#include "carbospec/io/model_container.hpp"
#include "carbospec/io/reference_data.hpp"
#include "carbospec/kernels.hpp"
#include "carbospec/metrics.hpp"
#include "carbospec/neural/saliency.hpp"
#include "carbospec/neural/train.hpp"
#include "carbospec/parallel.hpp"
#include "carbospec/plot/svg.hpp"
#include "carbospec/preprocess.hpp"

namespace {

using namespace carbospec;

int exitCodeFor(const Error& e) {
    switch (e.category()) {
        case ErrorCategory::Validation: return 2;
        case ErrorCategory::Io: return 3;
        case ErrorCategory::Numeric: return 4;
    }
    return 2;
}

void writeFileAtomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoFailure, "cannot open '" + tmp + "' for writing");
        }
        out << content;
        if (!out) {
            throw Error(ErrorCode::IoFailure, "write failed for '" + tmp + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::IoFailure, "rename to '" + path + "' failed: " + ec.message());
    }
}

SpectrumKind parseKindFlag(const std::string& kind) {
    if (kind == "reflectance") return SpectrumKind::reflectancePct();
    if (kind == "absorbance") return SpectrumKind::absorbance();
    if (kind.rfind("derivative", 0) == 0) {
        // accepts derivative1 / derivative2
        return SpectrumKind::derivative(std::stoi(kind.substr(10)));
    }
    throw Error(ErrorCode::InvalidParams, "unknown spectrum kind '" + kind + "'");
}

std::string formatG17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---------------------------------------------------------------- ingest ---

struct IngestArgs {
    std::string format;
    std::string input;
    std::string output;
    std::string kind = "absorbance";
    std::string reflectanceUnit;
    std::string idColumn = "sample_id";
    std::string carbonateColumn = "carbonate";
    std::string rejectLog;
};

int runIngest(const IngestArgs& args) {
    SpectralDataset dataset;
    RejectionLog rejected;
    if (args.format == "kssl" || args.format == "lucas") {
        AdapterOptions options;
        options.idColumn = args.idColumn;
        options.carbonateColumn = args.carbonateColumn;
        if (!args.reflectanceUnit.empty()) {
            options.reflectanceUnit = args.reflectanceUnit == "fraction" ? ReflectanceUnit::Fraction
                                                                         : ReflectanceUnit::Percent;
        }
        AdaptResult result = args.format == "kssl" ? adaptKssl(args.input, options)
                                                   : adaptLucas(args.input, options);
        dataset = std::move(result.dataset);
        rejected = std::move(result.rejected);
    } else if (args.format == "canonical") {
        dataset = loadCanonicalCsv(args.input, parseKindFlag(args.kind));
        if (dataset.kind() == SpectrumKind::reflectancePct()) {
            ScreenResult screened = screen(dataset);
            dataset = std::move(screened.dataset);
            rejected = std::move(screened.rejected);
        }
    } else {
        throw Error(ErrorCode::InvalidParams, "unknown ingest format '" + args.format + "'");
    }

    writeCanonicalCsv(dataset, args.output);
    const std::string logPath = args.rejectLog.empty() ? args.output + ".rejects" : args.rejectLog;
    writeRejectionLog(rejected, logPath);
    std::cout << "samples=" << dataset.size() << "\nrejected=" << rejected.size()
              << "\nkind=" << dataset.kind().name() << "\noutput=" << args.output << "\n";
    return 0;
}

// ----------------------------------------------------------------- stats ---

struct StatsArgs {
    std::string fileA;
    std::string fileB;
    std::string kind = "absorbance";
    int order = 1;
    bool json = false;
};

int runStats(const StatsArgs& args) {
    const SpectralDataset a = loadCanonicalCsv(args.fileA, parseKindFlag(args.kind));
    const SpectralDataset b = loadCanonicalCsv(args.fileB, parseKindFlag(args.kind));
    const double distance = wasserstein(a.labels(), b.labels(), args.order);
    const QuartileSummary qa = quartileSummary(a.labels());
    const QuartileSummary qb = quartileSummary(b.labels());
    if (args.json) {
        nlohmann::json doc;
        doc["wasserstein"] = distance;
        doc["p"] = args.order;
        doc["a"] = {{"n", a.size()}, {"q1", qa.q1}, {"q2", qa.q2}, {"q3", qa.q3}, {"iq", qa.iq}};
        doc["b"] = {{"n", b.size()}, {"q1", qb.q1}, {"q2", qb.q2}, {"q3", qb.q3}, {"iq", qb.iq}};
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << "wasserstein=" << formatG17(distance) << "\np=" << args.order << "\n"
                  << "a.n=" << a.size() << " a.q1=" << qa.q1 << " a.q2=" << qa.q2
                  << " a.q3=" << qa.q3 << " a.iq=" << qa.iq << "\n"
                  << "b.n=" << b.size() << " b.q1=" << qb.q1 << " b.q2=" << qb.q2
                  << " b.q3=" << qb.q3 << " b.iq=" << qb.iq << "\n";
    }
    return 0;
}

// ----------------------------------------------------------------- train ---

struct TrainArgs {
    std::string model;
    std::string data;
    std::string kind = "absorbance";
    std::string output;
    std::string metricsLog;
    std::uint64_t seed = 42;
    double split = 0.8;
    bool noShuffle = false;
    std::size_t epochs = 100;
    std::size_t batch = 64;
    double lr = 1e-3;
    double decay = 0.97;
    double l1 = 1e-5;
    double l2 = 1e-5;
    double gamma = 100.0;
    std::size_t components = 29;
    std::size_t minLeaf = 10;
    bool smoothing = false;
    int sgDeriv = 2;
    bool noMinmax = false;
    int threads = 0;
};

PreprocessPipeline buildPipeline(const TrainArgs& args, SpectrumKind inputKind) {
    PreprocessPipeline pipeline;
    if (inputKind == SpectrumKind::reflectancePct()) {
        pipeline.steps.push_back(PipelineStep::absorbance());
    }
    if (!args.noMinmax) {
        pipeline.steps.push_back(PipelineStep::minmax());
    }
    if (args.sgDeriv == 1) {
        pipeline.steps.push_back(PipelineStep::savgol({11, 2, 1}));
    } else if (args.sgDeriv == 2) {
        pipeline.steps.push_back(PipelineStep::savgol({13, 2, 2}));
    } else if (args.sgDeriv != 0) {
        throw Error(ErrorCode::InvalidParams, "--sg must be 0, 1 or 2");
    }
    return pipeline;
}

// Splits a prepared dataset the same way the neural trainer does, fits the
// linear-family model on the training part and reports validation metrics.
struct LinearFitReport {
    std::optional<EvaluationReport> validation;
    std::size_t nTrain = 0;
    std::size_t nVal = 0;
};

template <typename FitFn, typename PredictFn>
LinearFitReport fitLinearWithSplit(const SpectralDataset& prepared, const TrainArgs& args,
                                   const FitFn& fit, const PredictFn& predictVal) {
    const std::size_t n = prepared.size();
    Rng rng(args.seed);
    std::vector<std::size_t> indices(n);
    for (std::size_t i = 0; i < n; ++i) indices[i] = i;
    if (!args.noShuffle) rng.shuffle(indices);
    std::size_t nTrain = static_cast<std::size_t>(std::llround(args.split * static_cast<double>(n)));
    if (nTrain < 1) nTrain = 1;
    if (nTrain > n) nTrain = n;

    const std::size_t d = prepared.grid().nPoints;
    Matrix trainX(nTrain, d);
    std::vector<double> trainY(nTrain);
    for (std::size_t i = 0; i < nTrain; ++i) {
        std::memcpy(trainX.row(i), prepared.row(indices[i]), d * sizeof(double));
        trainY[i] = prepared.labels()[indices[i]];
    }
    fit(trainX, trainY);

    LinearFitReport report;
    report.nTrain = nTrain;
    report.nVal = n - nTrain;
    if (report.nVal > 0) {
        Matrix valX(report.nVal, d);
        std::vector<double> valY(report.nVal);
        for (std::size_t i = 0; i < report.nVal; ++i) {
            std::memcpy(valX.row(i), prepared.row(indices[nTrain + i]), d * sizeof(double));
            valY[i] = prepared.labels()[indices[nTrain + i]];
        }
        const std::vector<double> pred = predictVal(valX);
        report.validation = evaluate(valY, pred);
    }
    return report;
}

int runTrain(const TrainArgs& args) {
    if (args.threads > 0) setThreadCount(args.threads);

    const SpectrumKind inputKind = parseKindFlag(args.kind);
    const SpectralDataset raw = loadCanonicalCsv(args.data, inputKind);
    TrainedModel trained;
    trained.kind = parseModelKind(args.model);
    trained.pipeline = buildPipeline(args, inputKind);
    const SpectralDataset prepared = trained.pipeline.apply(raw);

    std::ostringstream metrics;
    std::ostringstream summary;
    summary << "model=" << modelKindName(trained.kind) << "\nsamples=" << prepared.size() << "\n";

    if (trained.kind == ModelKind::Mlp || trained.kind == ModelKind::Cnn) {
        TrainConfig trainConfig;
        trainConfig.seed = args.seed;
        trainConfig.trainFraction = args.split;
        trainConfig.shuffle = !args.noShuffle;
        trainConfig.epochs = args.epochs;
        trainConfig.batchSize = args.batch;
        trainConfig.lr0 = args.lr;
        trainConfig.lrDecay = args.decay;
        if (trained.kind == ModelKind::Mlp) {
            MlpConfig config;
            config.seed = args.seed;
            config.l1 = args.l1;
            config.l2 = args.l2;
            MlpTrainResult result = trainMlp(prepared, config, trainConfig);
            trained.mlp = std::move(result.model);
            metrics << result.log.toText();
            summary << "train_n=" << result.trainIndices.size()
                    << "\nval_n=" << result.valIndices.size() << "\nbest_epoch="
                    << result.log.bestEpoch << "\n";
            if (!result.valIndices.empty()) {
                summary << "best_val_rmse=" << formatG17(result.log.bestValRmse) << "\n";
            }
        } else {
            CnnConfig config;
            config.seed = args.seed;
            CnnTrainResult result = trainCnn(prepared, config, trainConfig);
            trained.cnn = std::move(result.model);
            metrics << result.log.toText();
            summary << "train_n=" << result.trainIndices.size()
                    << "\nval_n=" << result.valIndices.size() << "\nbest_epoch="
                    << result.log.bestEpoch << "\n";
            if (!result.valIndices.empty()) {
                summary << "best_val_rmse=" << formatG17(result.log.bestValRmse) << "\n";
            }
        }
    } else {
        LinearFitReport report;
        if (trained.kind == ModelKind::Plsr) {
            report = fitLinearWithSplit(
                prepared, args,
                [&](const Matrix& x, const std::vector<double>& y) {
                    trained.plsr = plsrFit(x, y, args.components);
                },
                [&](const Matrix& x) { return plsrPredict(trained.plsr, x); });
        } else if (trained.kind == ModelKind::Cubist) {
            report = fitLinearWithSplit(
                prepared, args,
                [&](const Matrix& x, const std::vector<double>& y) {
                    trained.plsr = plsrFit(x, y, args.components);
                    CubistConfig config;
                    config.minLeaf = args.minLeaf;
                    config.smoothing = args.smoothing;
                    trained.cubist = cubistFit(plsrTransform(trained.plsr, x), y, config);
                },
                [&](const Matrix& x) {
                    return cubistPredict(trained.cubist, plsrTransform(trained.plsr, x));
                });
        } else {
            report = fitLinearWithSplit(
                prepared, args,
                [&](const Matrix& x, const std::vector<double>& y) {
                    trained.plsr = plsrFit(x, y, args.components);
                    trained.lssvm = lssvmFit(plsrTransform(trained.plsr, x), y, args.gamma);
                },
                [&](const Matrix& x) {
                    return lssvmPredict(trained.lssvm, plsrTransform(trained.plsr, x));
                });
        }
        for (const std::string& warning : trained.plsr.warnings) {
            std::cerr << "warning: " << warning << "\n";
        }
        summary << "train_n=" << report.nTrain << "\nval_n=" << report.nVal << "\n";
        if (report.validation.has_value()) {
            metrics << report.validation->toKeyValueText();
            summary << "val_rmse=" << formatG17(report.validation->rmse)
                    << "\nval_r2=" << formatG17(report.validation->r2) << "\n";
        }
    }

    saveModel(trained, args.output);
    summary << "output=" << args.output << "\n";
    if (!args.metricsLog.empty()) {
        writeFileAtomic(args.metricsLog, metrics.str());
        summary << "metrics_log=" << args.metricsLog << "\n";
    }
    std::cout << summary.str();
    return 0;
}

// -------------------------------------------------------------- evaluate ---

struct EvaluateArgs {
    std::string pairs;
    std::string pairsCsv;
    std::string model;
    std::string data;
    std::string kind = "absorbance";
    bool json = false;
    bool sampleStd = false;
    bool checkRow = false;
    double rmseValue = 0.0;
    double obsStd = 0.0;
    double iq = 0.0;
};

std::pair<std::vector<double>, std::vector<double>> loadPairsCsv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    std::vector<double> obs;
    std::vector<double> pred;
    std::string line;
    std::size_t rowIndex = 0;
    while (std::getline(in, line)) {
        ++rowIndex;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string first, second;
        if (!std::getline(row, first, ',') || !std::getline(row, second, ',')) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(rowIndex) + ": need obs,pred");
        }
        if (rowIndex == 1 && (first == "obs" || first == "observed")) continue; // header
        try {
            obs.push_back(std::stod(first));
            pred.push_back(std::stod(second));
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "row " + std::to_string(rowIndex) + ": bad number");
        }
    }
    return {std::move(obs), std::move(pred)};
}

int runEvaluate(const EvaluateArgs& args) {
    if (args.checkRow) {
        if (!(args.rmseValue > 0.0)) {
            throw Error(ErrorCode::InvalidParams, "--check-row needs --rmse > 0");
        }
        std::cout << "rpd=" << formatG17(args.obsStd / args.rmseValue) << "\n"
                  << "rpiq=" << formatG17(args.iq / args.rmseValue) << "\n";
        return 0;
    }

    std::vector<double> obs;
    std::vector<double> pred;
    if (args.pairs == "table1") {
        for (const Table1Row& row : table1Rows()) {
            obs.push_back(row.experimental);
            pred.push_back(row.predicted);
        }
    } else if (!args.pairs.empty()) {
        throw Error(ErrorCode::InvalidParams, "unknown bundled pair set '" + args.pairs + "'");
    } else if (!args.pairsCsv.empty()) {
        std::tie(obs, pred) = loadPairsCsv(args.pairsCsv);
    } else if (!args.model.empty() && !args.data.empty()) {
        const TrainedModel model = loadModel(args.model);
        const SpectralDataset dataset = loadCanonicalCsv(args.data, parseKindFlag(args.kind));
        obs = dataset.labels();
        pred = model.predict(dataset);
    } else {
        throw Error(ErrorCode::InvalidParams,
                    "choose --pairs table1, --pairs-csv FILE, or --model M --data D");
    }

    EvaluateOptions options;
    options.sampleStd = args.sampleStd;
    const EvaluationReport report = evaluate(obs, pred, options);
    std::cout << (args.json ? report.toJson() + "\n" : report.toKeyValueText());
    return 0;
}

// --------------------------------------------------------------- predict ---

struct PredictArgs {
    std::string model;
    std::string data;
    std::string kind = "absorbance";
    std::string output;
};

int runPredict(const PredictArgs& args) {
    const TrainedModel model = loadModel(args.model);
    const SpectralDataset dataset = loadCanonicalCsv(args.data, parseKindFlag(args.kind));
    const std::vector<double> predictions = model.predict(dataset);
    std::ostringstream out;
    out << "sample_id,predicted_g100g\n";
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        out << dataset.sampleIds()[i] << ',' << formatG17(predictions[i]) << '\n';
    }
    writeFileAtomic(args.output, out.str());
    std::cout << "predictions=" << predictions.size() << "\noutput=" << args.output << "\n";
    return 0;
}

// -------------------------------------------------------------- saliency ---

struct SaliencyArgs {
    std::string model;
    std::string data;
    std::string kind = "absorbance";
    std::string output;
    std::string peaksCsv;
    std::string sampleId;
};

std::vector<double> meanSpectrum(const SpectralDataset& dataset) {
    std::vector<double> mean(dataset.grid().nPoints, 0.0);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const double* row = dataset.row(i);
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += row[j];
    }
    for (double& v : mean) v /= static_cast<double>(dataset.size());
    return mean;
}

int runSaliency(const SaliencyArgs& args) {
    const TrainedModel model = loadModel(args.model);
    const SpectralDataset raw = loadCanonicalCsv(args.data, parseKindFlag(args.kind));
    const SpectralDataset prepared = model.pipeline.apply(raw);

    if (model.kind != ModelKind::Mlp && model.kind != ModelKind::Cnn) {
        // Gradient saliency needs a differentiable model; print the linear
        // coefficient magnitudes instead.
        std::cout << "# coefficient-magnitude report (gradient saliency unsupported for "
                  << modelKindName(model.kind) << ")\n";
        if (model.kind == ModelKind::Plsr) {
            std::vector<std::pair<double, double>> byMagnitude;
            for (std::size_t j = 0; j < model.plsr.beta.size(); ++j) {
                byMagnitude.emplace_back(std::fabs(model.plsr.beta[j]),
                                         prepared.grid().wavelengthAt(j));
            }
            std::sort(byMagnitude.rbegin(), byMagnitude.rend());
            std::cout << "wavelength_nm,abs_coefficient\n";
            for (std::size_t i = 0; i < std::min<std::size_t>(20, byMagnitude.size()); ++i) {
                std::cout << byMagnitude[i].second << ',' << formatG17(byMagnitude[i].first) << '\n';
            }
        } else if (model.kind == ModelKind::Lssvm) {
            std::cout << "pls_score_index,abs_weight\n";
            for (std::size_t j = 0; j < model.lssvm.weights.size(); ++j) {
                std::cout << j << ',' << formatG17(std::fabs(model.lssvm.weights[j])) << '\n';
            }
        } else {
            std::cout << "rule,pls_score_index,abs_coefficient\n";
            for (std::size_t r = 0; r < model.cubist.rules.size(); ++r) {
                for (std::size_t j = 0; j < model.cubist.rules[r].coefficients.size(); ++j) {
                    std::cout << r << ',' << j << ','
                              << formatG17(std::fabs(model.cubist.rules[r].coefficients[j])) << '\n';
                }
            }
        }
        throw Error(ErrorCode::UnsupportedModel,
                    "gradient saliency is only defined for mlp/cnn models");
    }

    std::vector<double> spectrum;
    SaliencyMap map;
    if (!args.sampleId.empty()) {
        std::size_t index = prepared.size();
        for (std::size_t i = 0; i < prepared.size(); ++i) {
            if (prepared.sampleIds()[i] == args.sampleId) {
                index = i;
                break;
            }
        }
        if (index == prepared.size()) {
            throw Error(ErrorCode::InvalidParams, "sample id '" + args.sampleId + "' not found");
        }
        spectrum.assign(prepared.row(index), prepared.row(index) + prepared.grid().nPoints);
        map = model.kind == ModelKind::Mlp
                  ? mlpSaliency(model.mlp, spectrum.data(), prepared.grid())
                  : cnnSaliency(model.cnn, spectrum.data(), prepared.grid().nPoints, prepared.grid());
    } else {
        spectrum = meanSpectrum(prepared);
        map = model.kind == ModelKind::Mlp ? mlpMeanSaliency(model.mlp, prepared)
                                           : cnnMeanSaliency(model.cnn, prepared);
    }

    SvgOptions options;
    options.title = "saliency";
    writeFileAtomic(args.output, saliencySvg(map.wavelengthsNm, spectrum, map, options));
    if (!args.peaksCsv.empty()) {
        std::ostringstream peaks;
        peaks << "wavelength_nm,magnitude\n";
        for (const SaliencyPeak& peak : map.peaks) {
            peaks << formatG17(peak.wavelengthNm) << ',' << formatG17(peak.magnitude) << '\n';
        }
        writeFileAtomic(args.peaksCsv, peaks.str());
    }
    std::cout << "peaks=" << map.peaks.size() << "\noutput=" << args.output << "\n";
    return 0;
}

// ------------------------------------------------------------------ plot ---

struct PlotArgs {
    std::string data;
    std::string kind = "absorbance";
    std::string output;
    std::string sampleId;
    bool noMarkers = false;
};

int runPlot(const PlotArgs& args) {
    const SpectralDataset dataset = loadCanonicalCsv(args.data, parseKindFlag(args.kind));
    std::size_t index = 0;
    if (!args.sampleId.empty()) {
        index = dataset.size();
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            if (dataset.sampleIds()[i] == args.sampleId) {
                index = i;
                break;
            }
        }
        if (index == dataset.size()) {
            throw Error(ErrorCode::InvalidParams, "sample id '" + args.sampleId + "' not found");
        }
    }
    std::vector<double> wavelengths(dataset.grid().nPoints);
    for (std::size_t j = 0; j < wavelengths.size(); ++j) {
        wavelengths[j] = dataset.grid().wavelengthAt(j);
    }
    const std::vector<double> values(dataset.row(index),
                                     dataset.row(index) + dataset.grid().nPoints);
    SvgOptions options;
    options.title = dataset.sampleIds()[index];
    writeFileAtomic(args.output, spectrumSvg(wavelengths, values, !args.noMarkers, options));
    std::cout << "sample=" << dataset.sampleIds()[index] << "\noutput=" << args.output << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"carbospec: NIR soil carbonate prediction toolkit"};
    app.require_subcommand(1);

    std::string kernelBackend = "auto";
    app.add_option("--kernels", kernelBackend, "Kernel backend: auto, scalar or avx2");

    IngestArgs ingestArgs;
    CLI::App* ingest = app.add_subcommand("ingest", "Convert a source export to canonical CSV");
    ingest->add_option("--format", ingestArgs.format, "Input format: canonical, kssl or lucas")
        ->required();
    ingest->add_option("input", ingestArgs.input, "Input CSV")->required();
    ingest->add_option("-o,--output", ingestArgs.output, "Output canonical CSV")->required();
    ingest->add_option("--kind", ingestArgs.kind, "Spectrum kind of canonical input");
    ingest->add_option("--reflectance-unit", ingestArgs.reflectanceUnit,
                       "KSSL reflectance unit: percent or fraction");
    ingest->add_option("--id-col", ingestArgs.idColumn, "Sample id column name");
    ingest->add_option("--label-col", ingestArgs.carbonateColumn, "Carbonate column name");
    ingest->add_option("--reject-log", ingestArgs.rejectLog, "Rejection log path");

    StatsArgs statsArgs;
    CLI::App* stats = app.add_subcommand("stats", "Compare two datasets' label distributions");
    stats->add_option("a", statsArgs.fileA, "First canonical CSV")->required();
    stats->add_option("b", statsArgs.fileB, "Second canonical CSV")->required();
    stats->add_option("--kind", statsArgs.kind, "Spectrum kind of the inputs");
    stats->add_option("-p,--order", statsArgs.order, "Wasserstein order p");
    stats->add_flag("--json", statsArgs.json, "Emit JSON");

    TrainArgs trainArgs;
    CLI::App* train = app.add_subcommand("train", "Fit a model and write a model container");
    train->add_option("--model", trainArgs.model, "plsr, cubist, lssvm, mlp or cnn")->required();
    train->add_option("--data", trainArgs.data, "Canonical CSV")->required();
    train->add_option("--kind", trainArgs.kind, "Spectrum kind of the input data");
    train->add_option("-o,--output", trainArgs.output, "Model file path")->required();
    train->add_option("--metrics-log", trainArgs.metricsLog, "Metrics log path");
    train->add_option("--seed", trainArgs.seed, "RNG seed");
    train->add_option("--split", trainArgs.split, "Train fraction in (0, 1]");
    train->add_flag("--no-shuffle", trainArgs.noShuffle, "Keep sample order for the split");
    train->add_option("--epochs", trainArgs.epochs, "Training epochs (neural)");
    train->add_option("--batch", trainArgs.batch, "Batch size (neural)");
    train->add_option("--lr", trainArgs.lr, "Initial learning rate (neural)");
    train->add_option("--decay", trainArgs.decay, "Per-epoch learning-rate decay (neural)");
    train->add_option("--l1", trainArgs.l1, "L1 coefficient on the last hidden layer (mlp)");
    train->add_option("--l2", trainArgs.l2, "L2 coefficient on the last hidden layer (mlp)");
    train->add_option("--gamma", trainArgs.gamma, "LS-SVM regularization gamma");
    train->add_option("--components", trainArgs.components, "PLS component count");
    train->add_option("--min-leaf", trainArgs.minLeaf, "Cubist minimum leaf size");
    train->add_flag("--smoothing", trainArgs.smoothing, "Enable Cubist prediction smoothing");
    train->add_option("--sg", trainArgs.sgDeriv, "Savitzky-Golay derivative order: 0, 1 or 2");
    train->add_flag("--no-minmax", trainArgs.noMinmax, "Skip 0-1 normalization");
    train->add_option("--threads", trainArgs.threads, "Worker thread count");

    EvaluateArgs evalArgs;
    CLI::App* evalCmd = app.add_subcommand("evaluate", "Compute R2/RMSE/RPD/RPIQ");
    evalCmd->add_option("--pairs", evalArgs.pairs, "Bundled pair set (table1)");
    evalCmd->add_option("--pairs-csv", evalArgs.pairsCsv, "CSV of obs,pred pairs");
    evalCmd->add_option("--model", evalArgs.model, "Model file");
    evalCmd->add_option("--data", evalArgs.data, "Canonical CSV");
    evalCmd->add_option("--kind", evalArgs.kind, "Spectrum kind of the input data");
    evalCmd->add_flag("--json", evalArgs.json, "Emit JSON");
    evalCmd->add_flag("--sample-std", evalArgs.sampleStd, "Use the n-1 standard deviation");
    evalCmd->add_flag("--check-row", evalArgs.checkRow, "Print RPD/RPIQ from --rmse/--obs-std/--iq");
    evalCmd->add_option("--rmse", evalArgs.rmseValue, "RMSE for --check-row");
    evalCmd->add_option("--obs-std", evalArgs.obsStd, "Observed std for --check-row");
    evalCmd->add_option("--iq", evalArgs.iq, "Interquartile range for --check-row");

    PredictArgs predictArgs;
    CLI::App* predict = app.add_subcommand("predict", "Apply a stored model to a dataset");
    predict->add_option("--model", predictArgs.model, "Model file")->required();
    predict->add_option("--data", predictArgs.data, "Canonical CSV")->required();
    predict->add_option("--kind", predictArgs.kind, "Spectrum kind of the input data");
    predict->add_option("-o,--output", predictArgs.output, "Predictions CSV")->required();

    SaliencyArgs saliencyArgs;
    CLI::App* saliency = app.add_subcommand("saliency", "Gradient saliency map as SVG");
    saliency->add_option("--model", saliencyArgs.model, "Model file")->required();
    saliency->add_option("--data", saliencyArgs.data, "Canonical CSV")->required();
    saliency->add_option("--kind", saliencyArgs.kind, "Spectrum kind of the input data");
    saliency->add_option("-o,--output", saliencyArgs.output, "Output SVG")->required();
    saliency->add_option("--peaks-csv", saliencyArgs.peaksCsv, "Peak table CSV path");
    saliency->add_option("--sample", saliencyArgs.sampleId, "Single sample id (default: dataset mean)");

    PlotArgs plotArgs;
    CLI::App* plot = app.add_subcommand("plot", "Spectrum plot as SVG");
    plot->add_option("--data", plotArgs.data, "Canonical CSV")->required();
    plot->add_option("--kind", plotArgs.kind, "Spectrum kind of the input data");
    plot->add_option("-o,--output", plotArgs.output, "Output SVG")->required();
    plot->add_option("--sample", plotArgs.sampleId, "Sample id (default: first row)");
    plot->add_flag("--no-markers", plotArgs.noMarkers, "Skip carbonate band markers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        forceKernelBackend(kernelBackend.c_str());
        if (ingest->parsed()) return runIngest(ingestArgs);
        if (stats->parsed()) return runStats(statsArgs);
        if (train->parsed()) return runTrain(trainArgs);
        if (evalCmd->parsed()) return runEvaluate(evalArgs);
        if (predict->parsed()) return runPredict(predictArgs);
        if (saliency->parsed()) return runSaliency(saliencyArgs);
        if (plot->parsed()) return runPlot(plotArgs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exitCodeFor(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
