#include "cohortkm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "cohortkm/error.hpp"

namespace cohortkm {

std::vector<ClusterProfile> profile_clusters(std::span<const StudentRecord> records,
                                             std::span<const std::size_t> labels, std::size_t k) {
    if (records.size() != labels.size())
        throw LengthMismatch(std::to_string(records.size()) + " records vs " +
                             std::to_string(labels.size()) + " labels");

    struct Acc {
        std::size_t size = 0;
        double cet = 0.0, gpa = 0.0, extrovert = 0.0, leader = 0.0;
        std::array<std::size_t, kAllJobs.size()> jobs{};
    };
    std::vector<Acc> acc(k);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (labels[i] >= k)
            throw LengthMismatch("label " + std::to_string(labels[i]) + " outside [0, " +
                                 std::to_string(k) + ")");
        auto& a = acc[labels[i]];
        const auto& r = records[i];
        ++a.size;
        a.cet += r.cet4;
        a.gpa += r.gpa;
        a.extrovert += r.personality == Personality::Extrovert ? 1.0 : 0.0;
        a.leader += r.student_leader ? 1.0 : 0.0;
        if (r.job) ++a.jobs[static_cast<std::size_t>(*r.job)];
    }

    std::vector<ClusterProfile> profiles;
    profiles.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto& a = acc[c];
        if (a.size == 0) throw EmptyCluster("cluster " + std::to_string(c) + " has no members");
        const double n = static_cast<double>(a.size);
        ClusterProfile p{c, a.size, a.cet / n, a.gpa / n, a.extrovert / n, a.leader / n, std::nullopt};
        std::size_t best = 0;
        for (std::size_t j = 0; j < kAllJobs.size(); ++j)
            if (a.jobs[j] > best) {
                best = a.jobs[j];
                p.dominant_job = kAllJobs[j];
            }
        profiles.push_back(p);
    }
    return profiles;
}

RadarVector radar_vector(const ClusterProfile& profile, const ScalerParams& params) {
    return {{apply_scaler(params, profile.mean_cet4, NumericFeature::Cet4).value,
             apply_scaler(params, profile.mean_gpa, NumericFeature::Gpa).value,
             std::clamp(profile.extrovert_fraction, 0.0, 1.0),
             std::clamp(profile.leader_fraction, 0.0, 1.0)}};
}

namespace {

bool majority_holds(std::optional<bool> required, double fraction) {
    if (!required) return true;
    return *required ? fraction > 0.5 : fraction < 0.5;
}

}  // namespace

bool GuidanceRule::matches(const ClusterProfile& p) const {
    if (min_gpa && !(p.mean_gpa > *min_gpa)) return false;
    if (min_cet && !(p.mean_cet4 > *min_cet)) return false;
    return majority_holds(requires_extrovert_majority, p.extrovert_fraction) &&
           majority_holds(requires_leader_majority, p.leader_fraction);
}

GuidanceRuleSet::GuidanceRuleSet(std::vector<GuidanceRule> rules) : rules_(std::move(rules)) {
    std::set<int> priorities;
    for (const auto& r : rules_) {
        if (!r.has_condition()) throw InvalidRules("rule '" + r.id + "' has no condition");
        if (!priorities.insert(r.priority).second)
            throw InvalidRules("duplicate priority " + std::to_string(r.priority));
    }
    std::sort(rules_.begin(), rules_.end(),
              [](const GuidanceRule& a, const GuidanceRule& b) { return a.priority < b.priority; });
}

GuidanceRuleSet default_rules() {
    return GuidanceRuleSet({
        {"technical", Job::Technical, 3.7, 460.0, false, false, 1},
        {"management", Job::Management, 3.5, 450.0, true, true, 2},
        {"product", Job::Product, 3.5, 400.0, true, true, 3},
        {"sales", Job::Sales, std::nullopt, 400.0, true, std::nullopt, 4},
    });
}

nlohmann::json to_json(const GuidanceRuleSet& set) {
    auto rules = nlohmann::json::array();
    for (const auto& r : set.rules()) {
        nlohmann::json j = {{"id", r.id}, {"job", job_name(r.job)}, {"priority", r.priority}};
        if (r.min_gpa) j["min_gpa"] = *r.min_gpa;
        if (r.min_cet) j["min_cet"] = *r.min_cet;
        if (r.requires_extrovert_majority) j["requires_extrovert_majority"] = *r.requires_extrovert_majority;
        if (r.requires_leader_majority) j["requires_leader_majority"] = *r.requires_leader_majority;
        rules.push_back(std::move(j));
    }
    return {{"rules", rules}, {"fallback", job_name(GuidanceRuleSet::fallback())}};
}

GuidanceRuleSet rules_from_json(const nlohmann::json& j) {
    std::vector<GuidanceRule> rules;
    try {
        for (const auto& node : j.at("rules")) {
            GuidanceRule r;
            r.id = node.at("id").get<std::string>();
            const auto name = node.at("job").get<std::string>();
            const auto job = job_from_name(name);
            if (!job) throw InvalidRules("rule '" + r.id + "': unknown job '" + name + "'");
            r.job = *job;
            r.priority = node.at("priority").get<int>();
            if (node.contains("min_gpa")) r.min_gpa = node["min_gpa"].get<double>();
            if (node.contains("min_cet")) r.min_cet = node["min_cet"].get<double>();
            if (node.contains("requires_extrovert_majority"))
                r.requires_extrovert_majority = node["requires_extrovert_majority"].get<bool>();
            if (node.contains("requires_leader_majority"))
                r.requires_leader_majority = node["requires_leader_majority"].get<bool>();
            rules.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidRules(std::string("rule set JSON: ") + e.what());
    }
    return GuidanceRuleSet(std::move(rules));
}

Recommendation recommend(const ClusterProfile& profile, const GuidanceRuleSet& rules) {
    for (const auto& rule : rules.rules())
        if (rule.matches(profile)) return {rule.job, rule.id};
    return {GuidanceRuleSet::fallback(), std::nullopt};
}

Recommendation recommend_record(const StudentRecord& record, const GuidanceRuleSet& rules) {
    const ClusterProfile single{0,
                                1,
                                record.cet4,
                                record.gpa,
                                record.personality == Personality::Extrovert ? 1.0 : 0.0,
                                record.student_leader ? 1.0 : 0.0,
                                record.job};
    return recommend(single, rules);
}

Job GuidanceMapping::job_for(std::size_t cluster_id) const {
    for (const auto& a : assignments)
        if (a.cluster_id == cluster_id) return a.recommendation.job;
    return GuidanceRuleSet::fallback();
}

GuidanceMapping map_clusters_to_jobs(std::span<const ClusterProfile> profiles,
                                     const GuidanceRuleSet& rules) {
    GuidanceMapping mapping;
    std::map<Job, std::vector<std::size_t>> by_job;
    for (const auto& p : profiles) {
        const auto rec = recommend(p, rules);
        mapping.assignments.push_back({p.cluster_id, rec});
        by_job[rec.job].push_back(p.cluster_id);
    }
    for (const auto& [job, clusters] : by_job) {
        if (clusters.size() < 2) continue;
        std::string w = "DuplicateAssignment(" + std::string(job_name(job)) + "): clusters";
        for (std::size_t i = 0; i < clusters.size(); ++i)
            w += (i == 0 ? " " : ", ") + std::to_string(clusters[i]);
        mapping.warnings.push_back(std::move(w));
    }
    return mapping;
}

std::string_view rationale(Job job) {
    switch (job) {
        case Job::Technical:
            return "High GPA and CET-4 in a mostly introverted group without leader roles.";
        case Job::Management:
            return "High GPA and CET-4 with an extroverted majority that has held leader roles.";
        case Job::Product:
            return "GPA above the product cut with moderate CET-4; mostly extroverted former leaders.";
        case Job::Sales:
            return "Mostly extroverted with CET-4 above the sales cut; GPA not considered.";
        case Job::Other:
            break;
    }
    return "No cluster-level rule matched; review students individually.";
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

Report render_report(std::span<const ClusterProfile> profiles, const GuidanceMapping& mapping,
                     const ScalerParams& params, const MetricBundle& metrics) {
    Report report;
    auto clusters = nlohmann::json::array();
    std::string text = "Cluster guidance report\n=======================\n";

    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto& p = profiles[i];
        const auto radar = radar_vector(p, params);
        Recommendation rec;
        for (const auto& a : mapping.assignments)
            if (a.cluster_id == p.cluster_id) rec = a.recommendation;

        nlohmann::json block = {
            {"cluster", p.cluster_id},
            {"size", p.size},
            {"mean_cet4", p.mean_cet4},
            {"mean_gpa", p.mean_gpa},
            {"extrovert_fraction", p.extrovert_fraction},
            {"leader_fraction", p.leader_fraction},
            {"radar", radar.axes},
            {"recommended_job", job_name(rec.job)},
            {"rule", rec.rule_id ? nlohmann::json(*rec.rule_id) : nlohmann::json(nullptr)},
            {"rationale", rationale(rec.job)},
        };
        if (p.dominant_job) block["dominant_job"] = job_name(*p.dominant_job);
        clusters.push_back(std::move(block));

        text += "\nCluster " + std::to_string(p.cluster_id) + " (" + std::to_string(p.size) +
                " students)\n";
        text += "  mean CET-4 " + fixed(p.mean_cet4, 2) + ", mean GPA " + fixed(p.mean_gpa, 3) +
                ", extrovert " + fixed(p.extrovert_fraction, 3) + ", leader " +
                fixed(p.leader_fraction, 3) + "\n";
        text += "  radar [";
        for (std::size_t a = 0; a < radar.axes.size(); ++a)
            text += (a ? ", " : "") + std::string(kRadarAxes[a]) + " " + fixed(radar.axes[a], 3);
        text += "]\n";
        if (p.dominant_job) text += "  most common observed post: " + std::string(job_name(*p.dominant_job)) + "\n";
        text += "  recommended post: " + std::string(job_name(rec.job)) +
                (rec.rule_id ? " (rule " + *rec.rule_id + ")" : " (fallback)") + "\n";
        text += "  " + std::string(rationale(rec.job)) + "\n";
    }
    report.json["clusters"] = clusters;
    report.json["warnings"] = mapping.warnings;
    if (!mapping.warnings.empty()) {
        text += "\nWarnings\n";
        for (const auto& w : mapping.warnings) text += "  " + w + "\n";
    }

    if (!metrics.empty()) {
        report.json["metrics"] = to_json(metrics);
        text += "\nMetrics\n";
        if (metrics.silhouette) text += "  silhouette (mean): " + fixed(metrics.silhouette->overall_mean, 4) + "\n";
        if (metrics.calinski_harabasz)
            text += "  Calinski-Harabasz: " +
                    (std::isinf(*metrics.calinski_harabasz) ? std::string("inf")
                                                            : fixed(*metrics.calinski_harabasz, 4)) +
                    "\n";
        if (metrics.ari) text += "  adjusted Rand index: " + fixed(*metrics.ari, 4) + "\n";
        if (metrics.homogeneity) text += "  homogeneity: " + fixed(*metrics.homogeneity, 4) + "\n";
    }
    report.text = std::move(text);
    return report;
}

}  // namespace cohortkm
