#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/dataset.hpp"
#include "cohortkm/matrix.hpp"

namespace cohortkm {

enum class NumericFeature { Cet4, Gpa };

std::string_view feature_name(NumericFeature feature);
/// Throws UnknownFeature for anything other than "cet4" / "gpa".
NumericFeature feature_from_name(std::string_view name);

struct FeatureRange {
    double min = 0.0;
    double max = 1.0;
};

/// Min-max parameters for the two continuous features.
struct ScalerParams {
    FeatureRange cet4;
    FeatureRange gpa;

    const FeatureRange& range(NumericFeature f) const { return f == NumericFeature::Cet4 ? cet4 : gpa; }
    FeatureRange& range(NumericFeature f) { return f == NumericFeature::Cet4 ? cet4 : gpa; }

    /// Throws DegenerateFeature unless max > min for both features.
    void check() const;
};

/// Observed dataset min/max. Throws DegenerateFeature when a feature is constant
/// (which includes cohorts of fewer than two records).
ScalerParams fit_scaler(std::span<const StudentRecord> records);

struct ScaledValue {
    double value = 0.0;
    bool clamped = false;
};

/// (x − min)/(max − min), clamped to [0,1]; `clamped` flags out-of-range input.
ScaledValue apply_scaler(const ScalerParams& params, double x, NumericFeature feature);

/// Inverse of the affine map (no clamping).
double invert_scaler(const ScalerParams& params, double normalized, NumericFeature feature);

inline int encode_personality(Personality p) { return p == Personality::Extrovert ? 1 : 0; }
inline int encode_leader(bool leader) { return leader ? 1 : 0; }

inline constexpr std::array<std::string_view, 4> kFeatureColumns = {
    "cet4_norm", "gpa_norm", "personality_enc", "leader_enc"};

struct ClampWarning {
    std::uint64_t serial = 0;
    NumericFeature feature = NumericFeature::Cet4;
    double raw = 0.0;
};

/// n×4 matrix with rows [cet4', gpa', personality, leader] in record order.
struct FeatureMatrix {
    Matrix data;
    std::vector<std::uint64_t> row_serials;
    std::vector<ClampWarning> warnings;

    std::size_t rows() const noexcept { return data.rows(); }
    static constexpr std::size_t cols() noexcept { return kFeatureColumns.size(); }
};

FeatureMatrix build_matrix(std::span<const StudentRecord> records, const ScalerParams& params);

nlohmann::json to_json(const ScalerParams& params);
/// Accepts {"cet4": {"min", "max"}, "gpa": {"min", "max"}}; validates via check().
ScalerParams scaler_from_json(const nlohmann::json& j);

/// Parses "cet4=320:623,gpa=1.69:4.29". Features not mentioned keep the values in `base`.
ScalerParams parse_scaler_override(std::string_view text, ScalerParams base);

}  // namespace cohortkm
