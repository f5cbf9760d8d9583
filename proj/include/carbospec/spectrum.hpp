#pragma once

#include <string>
#include <vector>

#include "carbospec/grid.hpp"

namespace carbospec {

// What the stored values mean. Reflectance is kept in percent (0, 100];
// absorbance is log10(100/R); derivatives carry their order and are in
// physical units (per nm^order).
struct SpectrumKind {
    enum class Tag { ReflectancePct, Absorbance, Derivative };

    Tag tag = Tag::ReflectancePct;
    int derivOrder = 0; // meaningful for Derivative only

    static SpectrumKind reflectancePct() { return {Tag::ReflectancePct, 0}; }
    static SpectrumKind absorbance() { return {Tag::Absorbance, 0}; }
    static SpectrumKind derivative(int order) { return {Tag::Derivative, order}; }

    bool operator==(const SpectrumKind& other) const = default;

    std::string name() const;
    static SpectrumKind parse(const std::string& name);
};

struct Spectrum {
    std::vector<double> values;
    SpectrumKind kind;
    std::string sampleId;
};

// A = log10(1/(R/100)); R = 100 percent maps to A = 0. Values <= 0 signal a
// sample that should have been screened out; they are rejected, not clamped.
Spectrum toAbsorbance(const Spectrum& reflectance);

// Inverse of toAbsorbance: R = 100 * 10^(-A).
Spectrum toReflectance(const Spectrum& absorbance);

// LUCAS reports CaCO3 in g/kg; everything downstream uses g/100g.
double carbonateGPerKgToG100g(double gPerKg);

} // namespace carbospec
