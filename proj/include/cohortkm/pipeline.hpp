#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cohortkm/dataset.hpp"
#include "cohortkm/error.hpp"
#include "cohortkm/guidance.hpp"
#include "cohortkm/kmeans.hpp"
#include "cohortkm/metrics.hpp"
#include "cohortkm/pca.hpp"
#include "cohortkm/preprocess.hpp"

namespace cohortkm {

/// A library error tagged with the pipeline stage that raised it.
class StageError : public Error {
public:
    StageError(std::string stage, const Error& inner)
        : Error(inner.kind(), "stage '" + stage + "': " + inner.what()),
          stage_(std::move(stage)),
          inner_(inner.what()) {}

    const std::string& stage() const noexcept { return stage_; }
    /// The wrapped error's message ("Kind: detail").
    const std::string& inner_message() const noexcept { return inner_; }

private:
    std::string stage_;
    std::string inner_;
};

struct EmitFlags {
    bool json = true;
    bool svg = true;
    bool text = true;
};

/// Parses "json,svg,text" (any subset).
EmitFlags parse_emit(std::string_view text);

enum class SilhouetteSpace { Features, Pca };

struct SyntheticSource {
    std::string preset;  // "cohort", "archetypes" or "custom"
    std::vector<SyntheticSpec> components;

    /// "cohort": one default spec with n rows; "archetypes": archetype_components(n).
    static SyntheticSource from_preset(std::string_view preset, std::size_t n);
};

struct RunConfig {
    std::optional<std::filesystem::path> input;
    std::optional<SyntheticSource> synthetic;
    ValidationBounds bounds;
    /// "cet4=320:623,gpa=..." applied over the fitted scaler.
    std::optional<std::string> scaler_override;
    KMeansConfig kmeans;
    /// Fixed k; the elbow knee is used when absent.
    std::optional<std::size_t> k;
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::optional<std::filesystem::path> rules_path;
    std::optional<std::filesystem::path> assignments_path;
    std::filesystem::path out_dir = "out";
    std::string run_id = "cohort";
    std::size_t bins = kDefaultBinCount;
    EmitFlags emit;
    SilhouetteSpace silhouette_space = SilhouetteSpace::Features;
    std::uint64_t seed = 0;

    /// Throws InvalidConfig (exactly one cohort source, valid k range, ...).
    void check() const;
};

/// Reads keys mirroring the CLI flags (input, synthetic, k, k_range, seed, init,
/// restarts, bins, rules, scaler_override, emit, out, run_id, bounds, ...).
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});

/// Sub-seeds for each random stream, derived from the master seed.
struct SeedPlan {
    std::uint64_t master = 0;
    std::uint64_t synth = 0;
    std::uint64_t elbow = 0;
    std::uint64_t kmeans = 0;

    static SeedPlan from(std::uint64_t master);
    nlohmann::json to_json() const;
};

struct LoadedCohort {
    std::vector<StudentRecord> records;  // accepted rows
    std::vector<Rejection> rejections;
};

LoadedCohort load_cohort(const RunConfig& cfg);

struct SummarizeOutcome {
    CohortSummary summary;
    std::vector<Rejection> rejections;
    std::vector<std::filesystem::path> written;
};

struct ElbowOutcome {
    ElbowCurve curve;
    std::size_t knee = 0;
    std::vector<std::filesystem::path> written;
};

struct RunOutcome {
    std::size_t k = 0;
    bool k_from_knee = false;
    ClusteringResult clustering;
    std::vector<ClusterProfile> profiles;
    GuidanceMapping mapping;
    MetricBundle metrics;
    std::vector<std::filesystem::path> written;
};

struct MetricsOutcome {
    MetricBundle metrics;
    std::vector<std::filesystem::path> written;
};

SummarizeOutcome cmd_summarize(const RunConfig& cfg);
ElbowOutcome cmd_elbow(const RunConfig& cfg);
RunOutcome cmd_run(const RunConfig& cfg);
/// Writes the cohort (input or synthetic) as CSV; returns the file path.
std::filesystem::path cmd_synth(const RunConfig& cfg);
/// Recomputes metrics from cfg.assignments_path against the cohort's features.
MetricsOutcome cmd_metrics(const RunConfig& cfg);

struct AssignmentRow {
    std::uint64_t serial = 0;
    std::size_t cluster = 0;
    std::optional<Job> recommended_job;
};

std::string assignments_csv(std::span<const AssignmentRow> rows);
/// Throws MalformedRow.
std::vector<AssignmentRow> parse_assignments(std::string_view csv_text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace cohortkm
