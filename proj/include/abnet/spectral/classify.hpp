#pragma once

#include <abnet/conserved/conserved.hpp>
#include <abnet/core/errors.hpp>
#include <abnet/spectral/criticality.hpp>

#include <optional>
#include <string_view>

namespace abnet {

enum class RegimeTag { Subcritical, Supercritical, CriticalConserved, CriticalStabilizing };

struct Regime {
    RegimeTag tag = RegimeTag::Subcritical;
    double rho = 0.0;
    double tolerance = 1e-9;
};

inline std::string_view regime_name(RegimeTag tag) {
    switch (tag) {
        case RegimeTag::Subcritical: return "subcritical";
        case RegimeTag::Supercritical: return "supercritical";
        case RegimeTag::CriticalConserved: return "critical_conserved";
        case RegimeTag::CriticalStabilizing: return "critical_stabilizing";
    }
    return "unknown";
}

/// ρ < −eps, ρ > eps, or the critical band split by conserved-quantity detection.
inline Regime classify(const SpectralReport& report, const std::optional<DetectionResult>& detection,
                       double eps = 1e-9) {
    Regime regime{RegimeTag::Subcritical, report.rho, eps};
    if (report.rho < -eps) return regime;
    if (report.rho > eps) {
        regime.tag = RegimeTag::Supercritical;
        return regime;
    }
    if (!detection) throw MissingDetection("classify: rho is within the critical band but no detection result was given");
    regime.tag = found(*detection) ? RegimeTag::CriticalConserved : RegimeTag::CriticalStabilizing;
    return regime;
}

}  // namespace abnet
