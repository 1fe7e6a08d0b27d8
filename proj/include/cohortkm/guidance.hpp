#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/dataset.hpp"
#include "cohortkm/metrics.hpp"
#include "cohortkm/preprocess.hpp"

namespace cohortkm {

struct ClusterProfile {
    std::size_t cluster_id = 0;
    std::size_t size = 0;
    double mean_cet4 = 0.0;
    double mean_gpa = 0.0;
    double extrovert_fraction = 0.0;
    double leader_fraction = 0.0;
    /// Mode of the observed jobs; ties go to the earlier Job enumerator.
    std::optional<Job> dominant_job;
};

/// One profile per cluster id in [0, k). Throws EmptyCluster if any is empty
/// and LengthMismatch if labels and records disagree.
std::vector<ClusterProfile> profile_clusters(std::span<const StudentRecord> records,
                                             std::span<const std::size_t> labels, std::size_t k);

/// Axis order: CET, GPA, Extrovert, Leader. Each value in [0, 1].
struct RadarVector {
    std::array<double, 4> axes{};
};

inline constexpr std::array<std::string_view, 4> kRadarAxes = {"CET", "GPA", "Extrovert", "Leader"};

RadarVector radar_vector(const ClusterProfile& profile, const ScalerParams& params);

/// Threshold rule on a cluster profile. Thresholds are strict; majority
/// conditions compare a fraction with 0.5 (> 0.5 when true, < 0.5 when false).
struct GuidanceRule {
    std::string id;
    Job job = Job::Other;
    std::optional<double> min_gpa;
    std::optional<double> min_cet;
    std::optional<bool> requires_extrovert_majority;
    std::optional<bool> requires_leader_majority;
    int priority = 0;

    bool has_condition() const noexcept {
        return min_gpa || min_cet || requires_extrovert_majority || requires_leader_majority;
    }
    bool matches(const ClusterProfile& profile) const;
};

class GuidanceRuleSet {
public:
    /// Sorts by priority. Throws InvalidRules on duplicate priorities or a rule
    /// without conditions.
    explicit GuidanceRuleSet(std::vector<GuidanceRule> rules);

    const std::vector<GuidanceRule>& rules() const noexcept { return rules_; }
    static constexpr Job fallback() noexcept { return Job::Other; }

private:
    std::vector<GuidanceRule> rules_;
};

/// Technical, Management, Product, Sales (in that priority order), fallback Other.
GuidanceRuleSet default_rules();

nlohmann::json to_json(const GuidanceRuleSet& rules);
/// Throws InvalidRules on schema errors.
GuidanceRuleSet rules_from_json(const nlohmann::json& j);

struct Recommendation {
    Job job = Job::Other;
    /// Id of the matched rule; empty when the fallback applied.
    std::optional<std::string> rule_id;
};

Recommendation recommend(const ClusterProfile& profile, const GuidanceRuleSet& rules);

/// Single-student mode: the record is treated as a one-member profile. Advisory
/// only, the thresholds describe clusters rather than individuals.
Recommendation recommend_record(const StudentRecord& record, const GuidanceRuleSet& rules);

struct ClusterAssignment {
    std::size_t cluster_id = 0;
    Recommendation recommendation;
};

struct GuidanceMapping {
    std::vector<ClusterAssignment> assignments;  // parallel to the profiles
    /// "DuplicateAssignment(<job>): clusters a, b, ..." per shared job.
    std::vector<std::string> warnings;

    Job job_for(std::size_t cluster_id) const;
};

GuidanceMapping map_clusters_to_jobs(std::span<const ClusterProfile> profiles,
                                     const GuidanceRuleSet& rules);

/// Static rationale per job.
std::string_view rationale(Job job);

struct Report {
    nlohmann::json json;
    std::string text;
};

Report render_report(std::span<const ClusterProfile> profiles, const GuidanceMapping& mapping,
                     const ScalerParams& params, const MetricBundle& metrics);

}  // namespace cohortkm
