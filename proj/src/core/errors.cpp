#include "carbospec/errors.hpp"

namespace carbospec {

const char* errorCodeName(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveReflectance: return "NonPositiveReflectance";
        case ErrorCode::ReflectanceAboveLimit: return "ReflectanceAboveLimit";
        case ErrorCode::EmptyAfterScreening: return "EmptyAfterScreening";
        case ErrorCode::NegativeContent: return "NegativeContent";
        case ErrorCode::ConstantSpectrum: return "ConstantSpectrum";
        case ErrorCode::WindowTooLarge: return "WindowTooLarge";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroRmse: return "ZeroRmse";
        case ErrorCode::InvalidCrystallineIndex: return "InvalidCrystallineIndex";
        case ErrorCode::DegenerateComponent: return "DegenerateComponent";
        case ErrorCode::WidthMismatch: return "WidthMismatch";
        case ErrorCode::TooFewSamples: return "TooFewSamples";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NonFiniteActivation: return "NonFiniteActivation";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::DivergedTraining: return "DivergedTraining";
        case ErrorCode::UnsupportedModel: return "UnsupportedModel";
        case ErrorCode::HeaderMismatch: return "HeaderMismatch";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::MissingColumns: return "MissingColumns";
        case ErrorCode::UnitFlagRequired: return "UnitFlagRequired";
        case ErrorCode::KindMismatch: return "KindMismatch";
        case ErrorCode::DuplicateSampleId: return "DuplicateSampleId";
        case ErrorCode::CrcMismatch: return "CrcMismatch";
        case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

ErrorCategory errorCategory(ErrorCode code) {
    switch (code) {
        case ErrorCode::HeaderMismatch:
        case ErrorCode::ParseError:
        case ErrorCode::CrcMismatch:
        case ErrorCode::UnsupportedVersion:
        case ErrorCode::IoFailure:
            return ErrorCategory::Io;
        case ErrorCode::NonFiniteActivation:
        case ErrorCode::NonFiniteLoss:
        case ErrorCode::DivergedTraining:
            return ErrorCategory::Numeric;
        default:
            return ErrorCategory::Validation;
    }
}

} // namespace carbospec
