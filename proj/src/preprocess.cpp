#include "cohortkm/preprocess.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "cohortkm/error.hpp"

namespace cohortkm {

std::string_view feature_name(NumericFeature feature) {
    return feature == NumericFeature::Cet4 ? "cet4" : "gpa";
}

NumericFeature feature_from_name(std::string_view name) {
    if (name == "cet4") return NumericFeature::Cet4;
    if (name == "gpa") return NumericFeature::Gpa;
    throw UnknownFeature(std::string(name));
}

void ScalerParams::check() const {
    for (auto f : {NumericFeature::Cet4, NumericFeature::Gpa}) {
        const auto& r = range(f);
        if (!(r.max > r.min))
            throw DegenerateFeature(std::string(feature_name(f)) + ": max must exceed min");
    }
}

ScalerParams fit_scaler(std::span<const StudentRecord> records) {
    if (records.empty()) throw DegenerateFeature("cet4: no records");
    ScalerParams p{{records[0].cet4, records[0].cet4}, {records[0].gpa, records[0].gpa}};
    for (const auto& r : records) {
        p.cet4.min = std::min(p.cet4.min, r.cet4);
        p.cet4.max = std::max(p.cet4.max, r.cet4);
        p.gpa.min = std::min(p.gpa.min, r.gpa);
        p.gpa.max = std::max(p.gpa.max, r.gpa);
    }
    if (p.cet4.min == p.cet4.max) throw DegenerateFeature("cet4: all values equal");
    if (p.gpa.min == p.gpa.max) throw DegenerateFeature("gpa: all values equal");
    return p;
}

ScaledValue apply_scaler(const ScalerParams& params, double x, NumericFeature feature) {
    const auto& r = params.range(feature);
    const double v = (x - r.min) / (r.max - r.min);
    if (v < 0.0) return {0.0, true};
    if (v > 1.0) return {1.0, true};
    return {v, false};
}

double invert_scaler(const ScalerParams& params, double normalized, NumericFeature feature) {
    const auto& r = params.range(feature);
    return r.min + normalized * (r.max - r.min);
}

FeatureMatrix build_matrix(std::span<const StudentRecord> records, const ScalerParams& params) {
    params.check();
    FeatureMatrix m;
    m.data = Matrix(records.size(), FeatureMatrix::cols());
    m.row_serials.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        const auto cet = apply_scaler(params, rec.cet4, NumericFeature::Cet4);
        const auto gpa = apply_scaler(params, rec.gpa, NumericFeature::Gpa);
        if (cet.clamped) m.warnings.push_back({rec.serial, NumericFeature::Cet4, rec.cet4});
        if (gpa.clamped) m.warnings.push_back({rec.serial, NumericFeature::Gpa, rec.gpa});
        m.data(i, 0) = cet.value;
        m.data(i, 1) = gpa.value;
        m.data(i, 2) = encode_personality(rec.personality);
        m.data(i, 3) = encode_leader(rec.student_leader);
        m.row_serials.push_back(rec.serial);
    }
    return m;
}

nlohmann::json to_json(const ScalerParams& p) {
    return {{"cet4", {{"min", p.cet4.min}, {"max", p.cet4.max}}},
            {"gpa", {{"min", p.gpa.min}, {"max", p.gpa.max}}}};
}

ScalerParams scaler_from_json(const nlohmann::json& j) {
    ScalerParams p;
    try {
        for (auto f : {NumericFeature::Cet4, NumericFeature::Gpa}) {
            const auto& node = j.at(std::string(feature_name(f)));
            p.range(f) = {node.at("min").get<double>(), node.at("max").get<double>()};
        }
    } catch (const nlohmann::json::exception& e) {
        throw DegenerateFeature(std::string("scaler JSON: ") + e.what());
    }
    p.check();
    return p;
}

namespace {

double parse_double(std::string_view token, std::string_view context) {
    double v = 0.0;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    if (token.empty() || ec != std::errc{} || ptr != end)
        throw DegenerateFeature("bad number '" + std::string(token) + "' in " + std::string(context));
    return v;
}

}  // namespace

ScalerParams parse_scaler_override(std::string_view text, ScalerParams base) {
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);

        const auto eq = item.find('=');
        const auto colon = item.find(':');
        if (eq == std::string_view::npos || colon == std::string_view::npos || colon < eq)
            throw DegenerateFeature("override item '" + std::string(item) + "' is not name=min:max");
        auto& r = base.range(feature_from_name(item.substr(0, eq)));
        r.min = parse_double(item.substr(eq + 1, colon - eq - 1), item);
        r.max = parse_double(item.substr(colon + 1), item);
    }
    base.check();
    return base;
}

}  // namespace cohortkm
