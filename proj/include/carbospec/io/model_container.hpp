#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carbospec/cubist.hpp"
#include "carbospec/dataset.hpp"
#include "carbospec/lssvm.hpp"
#include "carbospec/neural/cnn.hpp"
#include "carbospec/neural/mlp.hpp"
#include "carbospec/plsr.hpp"
#include "carbospec/preprocess.hpp"

namespace carbospec {

enum class ModelKind : std::uint8_t {
    Plsr = 1,
    Cubist = 2,
    Lssvm = 3,
    Mlp = 4,
    Cnn = 5,
};

const char* modelKindName(ModelKind kind);
ModelKind parseModelKind(const std::string& name);

// A fitted model plus the preprocessing it was trained under. Cubist and
// LS-SVM also carry the PLS feature extractor that turns spectra into the
// score features they consume.
struct TrainedModel {
    ModelKind kind = ModelKind::Plsr;
    PreprocessPipeline pipeline;

    PlsrModel plsr;
    CubistModel cubist;
    LssvmModel lssvm;
    MlpModel mlp;
    CnnModel cnn;

    // Applies the stored pipeline, then the model. One prediction per sample,
    // in g/100g.
    std::vector<double> predict(const SpectralDataset& dataset) const;
};

// Container layout (all integers little-endian):
//   magic "CSPC" | u32 format_version | u8 model_kind |
//   u32 pipeline_len, pipeline JSON (UTF-8) |
//   arrays until 4 bytes before EOF, each:
//     u32 name_len, name | u8 dtype (0x01 = f64) | u8 rank | u64 dims[rank] |
//     f64 data[prod(dims)]
//   u32 CRC-32 of every preceding byte.
inline constexpr std::uint32_t kModelFormatVersion = 1;

void saveModel(const TrainedModel& model, const std::string& path);
TrainedModel loadModel(const std::string& path);

} // namespace carbospec
