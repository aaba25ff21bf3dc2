#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "crowdstop/core.hpp"

namespace crowdstop {

// Reputation-dependent exponentiation: a worker of class q arriving in
// round t gets weight lambda[q] * gamma[q]^e(t). With cadence 1 the
// exponent is t-1; with cadence m it steps by m every m rounds, i.e.
// e(t) = m * floor((t-1)/m). Arrays are indexed by class_rank().
struct WeightScheme {
    std::array<double, 3> lambda{1.0, 1.0, 1.0};
    std::array<double, 3> gamma{1.0, 1.0, 1.0};
    int cadence = 1;
};

inline void validate(const WeightScheme& s) {
    for (double v : s.lambda) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("WeightScheme: lambda must be finite and > 0");
        }
    }
    for (double v : s.gamma) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("WeightScheme: gamma must be finite and > 0");
        }
    }
    if (s.cadence < 1) {
        throw std::invalid_argument("WeightScheme: cadence must be >= 1");
    }
}

// True when the scheme assigns weight exactly 1 to every (class, round),
// i.e. it reproduces the unweighted rule bit for bit.
inline bool is_unit(const WeightScheme& s) noexcept {
    for (double v : s.lambda) {
        if (v != 1.0) return false;
    }
    for (double v : s.gamma) {
        if (v != 1.0) return false;
    }
    return true;
}

inline double weight_for(const WeightScheme& s, QualityClass q, int t) {
    if (t < 1) {
        throw std::invalid_argument("weight_for: t must be >= 1");
    }
    const std::size_t i = class_rank(q);
    const int exponent = s.cadence * ((t - 1) / s.cadence);
    return s.lambda[i] * std::pow(s.gamma[i], exponent);
}

enum class SchemePreset { V1, V2, V3, V4, V5, V6 };

// V1/V2 are time-invariant (multipliers 1); V3-V6 grow good workers and/or
// shrink bad workers as the run gets longer. Each uses per-round updates.
inline WeightScheme preset(SchemePreset p) {
    switch (p) {
    case SchemePreset::V1: return {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 1};
    case SchemePreset::V2: return {{1.2, 1.0, 0.8}, {1.0, 1.0, 1.0}, 1};
    case SchemePreset::V3: return {{1.0, 1.0, 1.0}, {1.05, 1.0, 0.95}, 1};
    case SchemePreset::V4: return {{1.0, 1.0, 1.0}, {1.1, 1.0, 0.9}, 1};
    case SchemePreset::V5: return {{1.0, 1.0, 1.0}, {1.1, 1.0, 1.0}, 1};
    case SchemePreset::V6: return {{1.0, 1.0, 1.0}, {1.0, 1.0, 0.9}, 1};
    }
    throw std::invalid_argument("preset: unknown scheme preset");
}

inline std::optional<SchemePreset> preset_from_name(std::string_view name) noexcept {
    if (name == "V1") return SchemePreset::V1;
    if (name == "V2") return SchemePreset::V2;
    if (name == "V3") return SchemePreset::V3;
    if (name == "V4") return SchemePreset::V4;
    if (name == "V5") return SchemePreset::V5;
    if (name == "V6") return SchemePreset::V6;
    return std::nullopt;
}

}  // namespace crowdstop
