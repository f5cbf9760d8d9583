#pragma once

#include <stdexcept>
#include <string>

namespace carbospec {

// Stable error codes surfaced through exceptions; the CLI maps categories
// to process exit codes (validation -> 2, io -> 3, numeric -> 4).
enum class ErrorCode {
    // core
    NonPositiveReflectance,
    ReflectanceAboveLimit,
    EmptyAfterScreening,
    NegativeContent,
    // preprocess
    ConstantSpectrum,
    WindowTooLarge,
    InvalidParams,
    // metrics
    EmptyInput,
    ZeroVariance,
    LengthMismatch,
    ZeroRmse,
    InvalidCrystallineIndex,
    // models
    DegenerateComponent,
    WidthMismatch,
    TooFewSamples,
    SingularSystem,
    ShapeMismatch,
    NonFiniteActivation,
    NonFiniteLoss,
    DivergedTraining,
    UnsupportedModel,
    // io
    HeaderMismatch,
    ParseError,
    GridMismatch,
    MissingColumns,
    UnitFlagRequired,
    KindMismatch,
    DuplicateSampleId,
    CrcMismatch,
    UnsupportedVersion,
    IoFailure,
};

enum class ErrorCategory { Validation, Io, Numeric };

const char* errorCodeName(ErrorCode code);
ErrorCategory errorCategory(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(errorCodeName(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }
    ErrorCategory category() const { return errorCategory(code_); }

private:
    ErrorCode code_;
};

} // namespace carbospec
