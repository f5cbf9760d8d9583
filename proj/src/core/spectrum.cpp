#include "carbospec/spectrum.hpp"

#include <cmath>

#include "carbospec/errors.hpp"

namespace carbospec {

const WavelengthGrid& WavelengthGrid::standard() {
    static const WavelengthGrid grid{};
    return grid;
}

std::string SpectrumKind::name() const {
    switch (tag) {
        case Tag::ReflectancePct: return "reflectance_pct";
        case Tag::Absorbance: return "absorbance";
        case Tag::Derivative: return "derivative_" + std::to_string(derivOrder);
    }
    return "unknown";
}

SpectrumKind SpectrumKind::parse(const std::string& name) {
    if (name == "reflectance_pct") return reflectancePct();
    if (name == "absorbance") return absorbance();
    if (name.rfind("derivative_", 0) == 0) {
        return derivative(std::stoi(name.substr(11)));
    }
    throw Error(ErrorCode::ParseError, "unknown spectrum kind '" + name + "'");
}

Spectrum toAbsorbance(const Spectrum& reflectance) {
    if (reflectance.kind != SpectrumKind::reflectancePct()) {
        throw Error(ErrorCode::KindMismatch,
                    "absorbance transform expects percent reflectance, got " + reflectance.kind.name());
    }
    Spectrum out;
    out.kind = SpectrumKind::absorbance();
    out.sampleId = reflectance.sampleId;
    out.values.resize(reflectance.values.size());
    for (std::size_t i = 0; i < reflectance.values.size(); ++i) {
        const double r = reflectance.values[i];
        if (!(r > 0.0)) {
            throw Error(ErrorCode::NonPositiveReflectance,
                        "sample '" + reflectance.sampleId + "' value " + std::to_string(r) +
                            " at index " + std::to_string(i) + " (screen the sample out)");
        }
        if (r > 100.0) {
            throw Error(ErrorCode::ReflectanceAboveLimit,
                        "sample '" + reflectance.sampleId + "' value " + std::to_string(r) +
                            " at index " + std::to_string(i) + " exceeds 100 percent");
        }
        out.values[i] = std::log10(100.0 / r);
    }
    return out;
}

Spectrum toReflectance(const Spectrum& absorbance) {
    if (absorbance.kind != SpectrumKind::absorbance()) {
        throw Error(ErrorCode::KindMismatch, "expected absorbance, got " + absorbance.kind.name());
    }
    Spectrum out;
    out.kind = SpectrumKind::reflectancePct();
    out.sampleId = absorbance.sampleId;
    out.values.resize(absorbance.values.size());
    for (std::size_t i = 0; i < absorbance.values.size(); ++i) {
        out.values[i] = 100.0 * std::pow(10.0, -absorbance.values[i]);
    }
    return out;
}

double carbonateGPerKgToG100g(double gPerKg) {
    if (!(gPerKg >= 0.0)) {
        throw Error(ErrorCode::NegativeContent,
                    "carbonate content must be non-negative, got " + std::to_string(gPerKg));
    }
    return gPerKg / 10.0;
}

} // namespace carbospec
