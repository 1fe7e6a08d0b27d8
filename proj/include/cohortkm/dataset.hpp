#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace cohortkm {

enum class Personality { Introvert, Extrovert };

/// Declaration order is the tie-break order for modes.
enum class Job { Sales, Management, Technical, Product, Other };

inline constexpr std::array<Job, 5> kAllJobs = {Job::Sales, Job::Management, Job::Technical,
                                                Job::Product, Job::Other};

/// CSV token ("sales post", ..., "other").
std::string_view job_token(Job job);
/// Short identifier for JSON/report output ("sales", "management", ...).
std::string_view job_name(Job job);
std::optional<Job> job_from_token(std::string_view token);
std::optional<Job> job_from_name(std::string_view name);

struct StudentRecord {
    std::uint64_t serial = 0;
    double cet4 = 0.0;
    double gpa = 0.0;
    Personality personality = Personality::Introvert;
    bool student_leader = false;
    /// Observed post; empty when the cohort carries no ground truth for this row.
    std::optional<Job> job;

    friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

inline constexpr std::string_view kCsvHeader =
    "serial_number,cet4,gpa,personality,student_leader,job";

/// Parses the cohort CSV. LF and CRLF line endings are accepted, blank lines
/// are skipped, and an empty job field yields a record without ground truth.
/// Throws MalformedRow, UnknownCategory or DuplicateSerial.
std::vector<StudentRecord> parse_records(std::string_view csv_text);

/// Inverse of parse_records: header plus one LF-terminated row per record.
std::string serialize_records(std::span<const StudentRecord> records);

struct ValidationBounds {
    double cet4_min = 300.0;
    double cet4_max = 710.0;
    double gpa_min = 0.0;
    double gpa_max = 5.0;

    /// Throws InvalidBounds unless min < max for both features.
    void check() const;
};

struct Rejection {
    std::uint64_t serial = 0;
    std::string reason;  // "OutOfRange(cet4)" or "OutOfRange(gpa)"
};

struct ValidationResult {
    std::vector<StudentRecord> accepted;
    std::vector<Rejection> rejections;
};

ValidationResult validate_cohort(std::span<const StudentRecord> records,
                                 const ValidationBounds& bounds = {});

nlohmann::json rejection_report_json(std::span<const Rejection> rejections);

struct HistogramBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
};

/// Equal-width bins over [min, max]; the last bin is closed on the right so the
/// maximum is counted. When every value is equal the bins span value ± 0.5.
std::vector<HistogramBin> equal_width_histogram(std::span<const double> values,
                                                std::size_t bin_count);

/// Linear-interpolation percentile on ascending data: h = p·(n−1).
double percentile_sorted(std::span<const double> sorted, double p);

struct FeatureSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<HistogramBin> histogram;
};

FeatureSummary summarize_values(std::span<const double> values, std::size_t bin_count);

struct CohortSummary {
    FeatureSummary cet4;
    FeatureSummary gpa;
};

inline constexpr std::size_t kDefaultBinCount = 20;

/// Throws EmptyCohort on empty input.
CohortSummary summarize(std::span<const StudentRecord> records,
                        std::size_t bin_count = kDefaultBinCount);

nlohmann::json to_json(const FeatureSummary& summary);
nlohmann::json to_json(const CohortSummary& summary);

struct SyntheticSpec {
    std::size_t n = 3000;
    double cet4_mean = 505.18;
    double cet4_sd = 55.0;
    double gpa_mean = 2.99;
    double gpa_sd = 0.42;
    double extrovert_prob = 0.8;
    double leader_prob = 0.4;
    /// Probability per Job, indexed in kAllJobs order.
    std::array<double, 5> job_mix = {0.2, 0.15, 0.2, 0.4, 0.05};
    ValidationBounds clamp = {320.0, 623.0, 1.69, 4.29};

    /// Throws InvalidSpec when a probability, sd, or the job mix is invalid.
    void check() const;
};

/// Draws spec.n records; CET-4 rounded to whole points, GPA to 0.01, both
/// clipped to the clamp bounds. Deterministic for (spec, seed).
std::vector<StudentRecord> generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

/// Concatenates draws from several specs (component i seeded from derive_seed(seed, i));
/// serials run 1..N across the whole cohort.
std::vector<StudentRecord> generate_mixture(std::span<const SyntheticSpec> components,
                                            std::uint64_t seed);

/// Four tight components shaped like the technical, management, product and
/// sales cluster profiles; `n` is split evenly (remainder to the first ones).
std::vector<SyntheticSpec> archetype_components(std::size_t n);

nlohmann::json to_json(const SyntheticSpec& spec);
SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j);

}  // namespace cohortkm
