#include "carbospec/io/model_container.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "carbospec/errors.hpp"
#include "carbospec/io/crc32.hpp"
#include "carbospec/neural/spectrogram.hpp"

namespace carbospec {
namespace {

struct NamedArray {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;

    std::uint64_t count() const {
        std::uint64_t c = 1;
        for (std::uint64_t d : dims) c *= d;
        return c;
    }
};

using ArrayMap = std::map<std::string, NamedArray>;

void putU32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

void putU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int shift = 0; shift < 64; shift += 8) {
        out.push_back(static_cast<std::uint8_t>(v >> shift));
    }
}

void putF64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof(bits));
    putU64(out, bits);
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::size_t offset() const { return offset_; }
    std::size_t remaining() const { return size_ - offset_; }

    const std::uint8_t* take(std::size_t n) {
        if (remaining() < n) {
            throw Error(ErrorCode::ParseError, "model container truncated");
        }
        const std::uint8_t* p = data_ + offset_;
        offset_ += n;
        return p;
    }

    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
               static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
    }

    std::uint64_t u64() {
        const std::uint8_t* p = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = v << 8 | p[i];
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }

private:
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t offset_ = 0;
};

void appendArray(std::vector<std::uint8_t>& out, const std::string& name, const NamedArray& array) {
    putU32(out, static_cast<std::uint32_t>(name.size()));
    out.insert(out.end(), name.begin(), name.end());
    out.push_back(0x01); // dtype f64
    out.push_back(static_cast<std::uint8_t>(array.dims.size()));
    for (std::uint64_t d : array.dims) putU64(out, d);
    for (double v : array.data) putF64(out, v);
}

NamedArray scalarArray(double v) { return {{1}, {v}}; }

NamedArray vectorArray(const std::vector<double>& v) {
    return {{static_cast<std::uint64_t>(v.size())}, v};
}

NamedArray matrixArray(const Matrix& m) {
    return {{static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())}, m.data()};
}

NamedArray tensorArray(const Tensor& t) {
    NamedArray a;
    for (std::size_t d : t.shape) a.dims.push_back(d);
    a.data = t.data;
    return a;
}

const NamedArray& need(const ArrayMap& arrays, const std::string& name) {
    const auto it = arrays.find(name);
    if (it == arrays.end()) {
        throw Error(ErrorCode::KindMismatch, "model payload is missing array '" + name + "'");
    }
    return it->second;
}

double needScalar(const ArrayMap& arrays, const std::string& name) {
    const NamedArray& a = need(arrays, name);
    if (a.data.size() != 1) {
        throw Error(ErrorCode::ParseError, "array '" + name + "' is not a scalar");
    }
    return a.data[0];
}

Matrix needMatrix(const ArrayMap& arrays, const std::string& name) {
    const NamedArray& a = need(arrays, name);
    if (a.dims.size() != 2) {
        throw Error(ErrorCode::ParseError, "array '" + name + "' is not rank 2");
    }
    Matrix m(static_cast<std::size_t>(a.dims[0]), static_cast<std::size_t>(a.dims[1]));
    m.data() = a.data;
    return m;
}

void packPlsr(ArrayMap& arrays, const PlsrModel& m) {
    arrays["pls/n_components"] = scalarArray(static_cast<double>(m.nComponents));
    arrays["pls/requested_components"] = scalarArray(static_cast<double>(m.requestedComponents));
    arrays["pls/weights"] = matrixArray(m.weights);
    arrays["pls/loadings"] = matrixArray(m.loadings);
    arrays["pls/y_loadings"] = vectorArray(m.yLoadings);
    arrays["pls/x_mean"] = vectorArray(m.xMean);
    arrays["pls/y_mean"] = scalarArray(m.yMean);
    arrays["pls/beta"] = vectorArray(m.beta);
}

PlsrModel unpackPlsr(const ArrayMap& arrays) {
    PlsrModel m;
    m.nComponents = static_cast<std::size_t>(needScalar(arrays, "pls/n_components"));
    m.requestedComponents = static_cast<std::size_t>(needScalar(arrays, "pls/requested_components"));
    m.weights = needMatrix(arrays, "pls/weights");
    m.loadings = needMatrix(arrays, "pls/loadings");
    m.yLoadings = need(arrays, "pls/y_loadings").data;
    m.xMean = need(arrays, "pls/x_mean").data;
    m.yMean = needScalar(arrays, "pls/y_mean");
    m.beta = need(arrays, "pls/beta").data;
    return m;
}

void packCubist(ArrayMap& arrays, const CubistModel& m) {
    arrays["cubist/n_features"] = scalarArray(static_cast<double>(m.nFeatures));
    arrays["cubist/min_leaf"] = scalarArray(static_cast<double>(m.config.minLeaf));
    arrays["cubist/smoothing"] = scalarArray(m.config.smoothing ? 1.0 : 0.0);
    arrays["cubist/smoothing_k"] = scalarArray(m.config.smoothingK);
    const std::size_t width = 6 + m.nFeatures;
    Matrix nodes(m.nodes.size(), width);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        const CubistNode& node = m.nodes[i];
        nodes.at(i, 0) = static_cast<double>(node.splitFeature);
        nodes.at(i, 1) = node.threshold;
        nodes.at(i, 2) = static_cast<double>(node.left);
        nodes.at(i, 3) = static_cast<double>(node.right);
        nodes.at(i, 4) = static_cast<double>(node.nSamples);
        nodes.at(i, 5) = node.intercept;
        for (std::size_t j = 0; j < m.nFeatures; ++j) nodes.at(i, 6 + j) = node.coefficients[j];
    }
    arrays["cubist/nodes"] = matrixArray(nodes);
}

CubistModel unpackCubist(const ArrayMap& arrays) {
    CubistModel m;
    m.nFeatures = static_cast<std::size_t>(needScalar(arrays, "cubist/n_features"));
    m.config.minLeaf = static_cast<std::size_t>(needScalar(arrays, "cubist/min_leaf"));
    m.config.smoothing = needScalar(arrays, "cubist/smoothing") != 0.0;
    m.config.smoothingK = needScalar(arrays, "cubist/smoothing_k");
    const Matrix nodes = needMatrix(arrays, "cubist/nodes");
    if (nodes.cols() != 6 + m.nFeatures) {
        throw Error(ErrorCode::ParseError, "cubist node table width mismatch");
    }
    m.nodes.resize(nodes.rows());
    for (std::size_t i = 0; i < nodes.rows(); ++i) {
        CubistNode& node = m.nodes[i];
        node.splitFeature = static_cast<int>(nodes.at(i, 0));
        node.threshold = nodes.at(i, 1);
        node.left = static_cast<int>(nodes.at(i, 2));
        node.right = static_cast<int>(nodes.at(i, 3));
        node.nSamples = static_cast<std::size_t>(nodes.at(i, 4));
        node.intercept = nodes.at(i, 5);
        node.coefficients.resize(m.nFeatures);
        for (std::size_t j = 0; j < m.nFeatures; ++j) node.coefficients[j] = nodes.at(i, 6 + j);
    }
    // Rebuild the rule list from the stored tree.
    struct Walker {
        const std::vector<CubistNode>& nodes;
        std::vector<CubistRule>& rules;
        std::vector<CubistCondition> path;
        void walk(int id) {
            const CubistNode& node = nodes[id];
            if (node.splitFeature < 0) {
                rules.push_back({path, node.coefficients, node.intercept, node.nSamples});
                return;
            }
            path.push_back({static_cast<std::size_t>(node.splitFeature), false, node.threshold});
            walk(node.left);
            path.back().greaterThan = true;
            walk(node.right);
            path.pop_back();
        }
    };
    Walker walker{m.nodes, m.rules, {}};
    if (!m.nodes.empty()) walker.walk(0);
    return m;
}

void packLssvm(ArrayMap& arrays, const LssvmModel& m) {
    arrays["lssvm/alphas"] = vectorArray(m.alphas);
    arrays["lssvm/bias"] = scalarArray(m.bias);
    arrays["lssvm/gamma"] = scalarArray(m.gamma);
    arrays["lssvm/support"] = matrixArray(m.supportInputs);
    arrays["lssvm/scaler_min"] = vectorArray(m.scalerMin);
    arrays["lssvm/scaler_max"] = vectorArray(m.scalerMax);
    arrays["lssvm/weights"] = vectorArray(m.weights);
}

LssvmModel unpackLssvm(const ArrayMap& arrays) {
    LssvmModel m;
    m.alphas = need(arrays, "lssvm/alphas").data;
    m.bias = needScalar(arrays, "lssvm/bias");
    m.gamma = needScalar(arrays, "lssvm/gamma");
    m.supportInputs = needMatrix(arrays, "lssvm/support");
    m.scalerMin = need(arrays, "lssvm/scaler_min").data;
    m.scalerMax = need(arrays, "lssvm/scaler_max").data;
    m.weights = need(arrays, "lssvm/weights").data;
    return m;
}

void packMlp(ArrayMap& arrays, const MlpModel& m) {
    std::vector<double> hidden;
    for (std::size_t h : m.config().hidden) hidden.push_back(static_cast<double>(h));
    arrays["mlp/hidden"] = vectorArray(hidden);
    arrays["mlp/l1"] = scalarArray(m.config().l1);
    arrays["mlp/l2"] = scalarArray(m.config().l2);
    arrays["mlp/seed"] = scalarArray(static_cast<double>(m.config().seed));
    arrays["mlp/input_dim"] = scalarArray(static_cast<double>(m.inputDim()));
    for (std::size_t i = 0; i < m.layers().size(); ++i) {
        arrays["mlp/w" + std::to_string(i)] = tensorArray(m.layers()[i].w);
        arrays["mlp/b" + std::to_string(i)] = tensorArray(m.layers()[i].b);
    }
}

MlpModel unpackMlp(const ArrayMap& arrays) {
    MlpConfig config;
    config.hidden.clear();
    for (double h : need(arrays, "mlp/hidden").data) {
        config.hidden.push_back(static_cast<std::size_t>(h));
    }
    config.l1 = needScalar(arrays, "mlp/l1");
    config.l2 = needScalar(arrays, "mlp/l2");
    config.seed = static_cast<std::uint64_t>(needScalar(arrays, "mlp/seed"));
    MlpModel model(static_cast<std::size_t>(needScalar(arrays, "mlp/input_dim")), config);
    for (std::size_t i = 0; i < model.layers().size(); ++i) {
        const NamedArray& w = need(arrays, "mlp/w" + std::to_string(i));
        const NamedArray& b = need(arrays, "mlp/b" + std::to_string(i));
        if (w.data.size() != model.layers()[i].w.data.size() ||
            b.data.size() != model.layers()[i].b.data.size()) {
            throw Error(ErrorCode::ParseError, "mlp layer " + std::to_string(i) + " shape mismatch");
        }
        model.layers()[i].w.data = w.data;
        model.layers()[i].b.data = b.data;
    }
    return model;
}

void packCnn(ArrayMap& arrays, const CnnModel& m) {
    std::vector<double> channels;
    for (std::size_t c : m.config().convChannels) channels.push_back(static_cast<double>(c));
    arrays["cnn/channels"] = vectorArray(channels);
    arrays["cnn/dense_units"] = scalarArray(static_cast<double>(m.config().denseUnits));
    arrays["cnn/input_h"] = scalarArray(static_cast<double>(m.config().inputH));
    arrays["cnn/input_w"] = scalarArray(static_cast<double>(m.config().inputW));
    arrays["cnn/seed"] = scalarArray(static_cast<double>(m.config().seed));
    arrays["cnn/spectrogram_recipe"] = scalarArray(static_cast<double>(kSpectrogramRecipeVersion));
    for (std::size_t i = 0; i < m.convs().size(); ++i) {
        arrays["cnn/conv" + std::to_string(i) + "_w"] = tensorArray(m.convs()[i].w);
        arrays["cnn/conv" + std::to_string(i) + "_b"] = tensorArray(m.convs()[i].b);
    }
    arrays["cnn/dense_w"] = tensorArray(m.dense().w);
    arrays["cnn/dense_b"] = tensorArray(m.dense().b);
    arrays["cnn/head_w"] = tensorArray(m.head().w);
    arrays["cnn/head_b"] = tensorArray(m.head().b);
}

CnnModel unpackCnn(const ArrayMap& arrays) {
    const double recipe = needScalar(arrays, "cnn/spectrogram_recipe");
    if (recipe != static_cast<double>(kSpectrogramRecipeVersion)) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "spectrogram recipe version " + std::to_string(recipe) + " is not supported");
    }
    CnnConfig config;
    config.convChannels.clear();
    for (double c : need(arrays, "cnn/channels").data) {
        config.convChannels.push_back(static_cast<std::size_t>(c));
    }
    config.denseUnits = static_cast<std::size_t>(needScalar(arrays, "cnn/dense_units"));
    config.inputH = static_cast<std::size_t>(needScalar(arrays, "cnn/input_h"));
    config.inputW = static_cast<std::size_t>(needScalar(arrays, "cnn/input_w"));
    config.seed = static_cast<std::uint64_t>(needScalar(arrays, "cnn/seed"));
    CnnModel model(config);
    const auto assign = [&](Tensor& t, const std::string& name) {
        const NamedArray& a = need(arrays, name);
        if (a.data.size() != t.data.size()) {
            throw Error(ErrorCode::ParseError, "cnn array '" + name + "' shape mismatch");
        }
        t.data = a.data;
    };
    for (std::size_t i = 0; i < model.convs().size(); ++i) {
        assign(model.convs()[i].w, "cnn/conv" + std::to_string(i) + "_w");
        assign(model.convs()[i].b, "cnn/conv" + std::to_string(i) + "_b");
    }
    assign(model.dense().w, "cnn/dense_w");
    assign(model.dense().b, "cnn/dense_b");
    assign(model.head().w, "cnn/head_w");
    assign(model.head().b, "cnn/head_b");
    return model;
}

} // namespace

const char* modelKindName(ModelKind kind) {
    switch (kind) {
        case ModelKind::Plsr: return "plsr";
        case ModelKind::Cubist: return "cubist";
        case ModelKind::Lssvm: return "lssvm";
        case ModelKind::Mlp: return "mlp";
        case ModelKind::Cnn: return "cnn";
    }
    return "unknown";
}

ModelKind parseModelKind(const std::string& name) {
    if (name == "plsr") return ModelKind::Plsr;
    if (name == "cubist") return ModelKind::Cubist;
    if (name == "lssvm" || name == "svm") return ModelKind::Lssvm;
    if (name == "mlp") return ModelKind::Mlp;
    if (name == "cnn") return ModelKind::Cnn;
    throw Error(ErrorCode::InvalidParams, "unknown model kind '" + name + "'");
}

std::vector<double> TrainedModel::predict(const SpectralDataset& dataset) const {
    const SpectralDataset prepared = pipeline.apply(dataset);
    switch (kind) {
        case ModelKind::Plsr:
            return plsrPredict(plsr, prepared.values());
        case ModelKind::Cubist:
            return cubistPredict(cubist, plsrTransform(plsr, prepared.values()));
        case ModelKind::Lssvm:
            return lssvmPredict(lssvm, plsrTransform(plsr, prepared.values()));
        case ModelKind::Mlp:
            return mlp.predict(prepared.values());
        case ModelKind::Cnn: {
            std::vector<double> out(prepared.size());
            for (std::size_t i = 0; i < prepared.size(); ++i) {
                const SpectrogramImage image =
                    renderSpectrogram(prepared.row(i), prepared.grid().nPoints, cnn.config().inputH,
                                      cnn.config().inputW);
                out[i] = cnn.predictOne(image.pixels.data());
            }
            return out;
        }
    }
    throw Error(ErrorCode::UnsupportedModel, "unknown model kind tag");
}

void saveModel(const TrainedModel& model, const std::string& path) {
    ArrayMap arrays;
    switch (model.kind) {
        case ModelKind::Plsr:
            packPlsr(arrays, model.plsr);
            break;
        case ModelKind::Cubist:
            packPlsr(arrays, model.plsr);
            packCubist(arrays, model.cubist);
            break;
        case ModelKind::Lssvm:
            packPlsr(arrays, model.plsr);
            packLssvm(arrays, model.lssvm);
            break;
        case ModelKind::Mlp:
            packMlp(arrays, model.mlp);
            break;
        case ModelKind::Cnn:
            packCnn(arrays, model.cnn);
            break;
    }

    std::vector<std::uint8_t> buffer;
    buffer.push_back('C');
    buffer.push_back('S');
    buffer.push_back('P');
    buffer.push_back('C');
    putU32(buffer, kModelFormatVersion);
    buffer.push_back(static_cast<std::uint8_t>(model.kind));
    const std::string pipelineJson = model.pipeline.toJson();
    putU32(buffer, static_cast<std::uint32_t>(pipelineJson.size()));
    buffer.insert(buffer.end(), pipelineJson.begin(), pipelineJson.end());
    for (const auto& [name, array] : arrays) {
        appendArray(buffer, name, array);
    }
    putU32(buffer, crc32(buffer.data(), buffer.size()));

    // Write to a temp file and rename so readers never see a partial file.
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoFailure, "cannot open '" + tmp + "' for writing");
        }
        out.write(reinterpret_cast<const char*>(buffer.data()),
                  static_cast<std::streamsize>(buffer.size()));
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

TrainedModel loadModel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    std::vector<std::uint8_t> buffer((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    if (buffer.size() < 17) {
        throw Error(ErrorCode::ParseError, "model container too small");
    }

    Reader reader(buffer.data(), buffer.size());
    const std::uint8_t* magic = reader.take(4);
    if (std::memcmp(magic, "CSPC", 4) != 0) {
        throw Error(ErrorCode::ParseError, "bad magic; not a model container");
    }
    const std::uint32_t version = reader.u32();
    if (version != kModelFormatVersion) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "format version " + std::to_string(version) + " is not supported");
    }

    const std::uint32_t storedCrc =
        static_cast<std::uint32_t>(buffer[buffer.size() - 4]) |
        static_cast<std::uint32_t>(buffer[buffer.size() - 3]) << 8 |
        static_cast<std::uint32_t>(buffer[buffer.size() - 2]) << 16 |
        static_cast<std::uint32_t>(buffer[buffer.size() - 1]) << 24;
    const std::uint32_t actualCrc = crc32(buffer.data(), buffer.size() - 4);
    if (storedCrc != actualCrc) {
        throw Error(ErrorCode::CrcMismatch, "model container checksum mismatch");
    }

    const std::uint8_t kindByte = reader.take(1)[0];
    if (kindByte < 1 || kindByte > 5) {
        throw Error(ErrorCode::ParseError, "unknown model kind tag " + std::to_string(kindByte));
    }

    TrainedModel model;
    model.kind = static_cast<ModelKind>(kindByte);
    const std::uint32_t pipelineLen = reader.u32();
    const std::uint8_t* pipelineBytes = reader.take(pipelineLen);
    model.pipeline = PreprocessPipeline::fromJson(
        std::string(reinterpret_cast<const char*>(pipelineBytes), pipelineLen));

    ArrayMap arrays;
    const std::size_t payloadEnd = buffer.size() - 4;
    while (reader.offset() < payloadEnd) {
        const std::uint32_t nameLen = reader.u32();
        const std::uint8_t* nameBytes = reader.take(nameLen);
        std::string name(reinterpret_cast<const char*>(nameBytes), nameLen);
        const std::uint8_t dtype = reader.take(1)[0];
        if (dtype != 0x01) {
            throw Error(ErrorCode::ParseError, "array '" + name + "' has unsupported dtype");
        }
        const std::uint8_t rank = reader.take(1)[0];
        NamedArray array;
        for (std::uint8_t r = 0; r < rank; ++r) array.dims.push_back(reader.u64());
        const std::uint64_t count = array.count();
        array.data.resize(count);
        for (std::uint64_t i = 0; i < count; ++i) array.data[i] = reader.f64();
        arrays.emplace(std::move(name), std::move(array));
    }
    if (reader.offset() != payloadEnd) {
        throw Error(ErrorCode::ParseError, "model container payload overruns the checksum");
    }

    switch (model.kind) {
        case ModelKind::Plsr:
            model.plsr = unpackPlsr(arrays);
            break;
        case ModelKind::Cubist:
            model.plsr = unpackPlsr(arrays);
            model.cubist = unpackCubist(arrays);
            break;
        case ModelKind::Lssvm:
            model.plsr = unpackPlsr(arrays);
            model.lssvm = unpackLssvm(arrays);
            break;
        case ModelKind::Mlp:
            model.mlp = unpackMlp(arrays);
            break;
        case ModelKind::Cnn:
            model.cnn = unpackCnn(arrays);
            break;
    }
    return model;
}

} // namespace carbospec
