#include "cohortkm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "cohortkm/error.hpp"
#include "cohortkm/random.hpp"

namespace cohortkm {

namespace {

constexpr std::array<std::string_view, 5> kJobTokens = {"sales post", "management post",
                                                         "technical post", "product post", "other"};
constexpr std::array<std::string_view, 5> kJobNames = {"sales", "management", "technical",
                                                        "product", "other"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
    if (token.empty()) return false;
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

std::string format_number(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

std::string at_line(std::size_t line_no) { return "line " + std::to_string(line_no); }

}  // namespace

std::string_view job_token(Job job) { return kJobTokens[static_cast<std::size_t>(job)]; }
std::string_view job_name(Job job) { return kJobNames[static_cast<std::size_t>(job)]; }

std::optional<Job> job_from_token(std::string_view token) {
    for (std::size_t i = 0; i < kJobTokens.size(); ++i)
        if (kJobTokens[i] == token) return kAllJobs[i];
    return std::nullopt;
}

std::optional<Job> job_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kJobNames.size(); ++i)
        if (kJobNames[i] == name) return kAllJobs[i];
    return std::nullopt;
}

std::vector<StudentRecord> parse_records(std::string_view csv_text) {
    if (csv_text.starts_with("\xEF\xBB\xBF")) csv_text.remove_prefix(3);

    std::vector<StudentRecord> records;
    std::unordered_set<std::uint64_t> seen;
    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    while (pos < csv_text.size()) {
        auto eol = csv_text.find('\n', pos);
        if (eol == std::string_view::npos) eol = csv_text.size();
        std::string_view line = csv_text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (!header_seen) {
            if (line != kCsvHeader)
                throw MalformedRow(at_line(line_no) + ": expected header '" +
                                   std::string(kCsvHeader) + "'");
            header_seen = true;
            continue;
        }
        if (trim(line).empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != 6)
            throw MalformedRow(at_line(line_no) + ": expected 6 fields, got " +
                               std::to_string(fields.size()));

        StudentRecord rec;
        if (!parse_number(fields[0], rec.serial) || rec.serial == 0)
            throw MalformedRow(at_line(line_no) + ": bad serial_number '" +
                               std::string(fields[0]) + "'");
        if (!parse_number(fields[1], rec.cet4) || !std::isfinite(rec.cet4))
            throw MalformedRow(at_line(line_no) + ": bad cet4 '" + std::string(fields[1]) + "'");
        if (!parse_number(fields[2], rec.gpa) || !std::isfinite(rec.gpa))
            throw MalformedRow(at_line(line_no) + ": bad gpa '" + std::string(fields[2]) + "'");

        if (fields[3] == "i")
            rec.personality = Personality::Introvert;
        else if (fields[3] == "e")
            rec.personality = Personality::Extrovert;
        else
            throw UnknownCategory(at_line(line_no) + ", field personality: '" +
                                  std::string(fields[3]) + "'");

        if (fields[4] == "1")
            rec.student_leader = true;
        else if (fields[4] == "0")
            rec.student_leader = false;
        else
            throw UnknownCategory(at_line(line_no) + ", field student_leader: '" +
                                  std::string(fields[4]) + "'");

        if (!fields[5].empty()) {
            rec.job = job_from_token(fields[5]);
            if (!rec.job)
                throw UnknownCategory(at_line(line_no) + ", field job: '" +
                                      std::string(fields[5]) + "'");
        }

        if (!seen.insert(rec.serial).second)
            throw DuplicateSerial("serial " + std::to_string(rec.serial));
        records.push_back(rec);
    }
    if (!header_seen) throw MalformedRow(at_line(1) + ": missing header");
    return records;
}

std::string serialize_records(std::span<const StudentRecord> records) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.serial);
        out += ',';
        out += format_number(r.cet4);
        out += ',';
        out += format_number(r.gpa);
        out += r.personality == Personality::Extrovert ? ",e," : ",i,";
        out += r.student_leader ? "1," : "0,";
        if (r.job) out += job_token(*r.job);
        out += '\n';
    }
    return out;
}

void ValidationBounds::check() const {
    if (!(cet4_min < cet4_max)) throw InvalidBounds("cet4_min must be < cet4_max");
    if (!(gpa_min < gpa_max)) throw InvalidBounds("gpa_min must be < gpa_max");
}

ValidationResult validate_cohort(std::span<const StudentRecord> records,
                                 const ValidationBounds& bounds) {
    bounds.check();
    ValidationResult result;
    for (const auto& r : records) {
        if (r.cet4 < bounds.cet4_min || r.cet4 > bounds.cet4_max)
            result.rejections.push_back({r.serial, "OutOfRange(cet4)"});
        else if (r.gpa < bounds.gpa_min || r.gpa > bounds.gpa_max)
            result.rejections.push_back({r.serial, "OutOfRange(gpa)"});
        else
            result.accepted.push_back(r);
    }
    return result;
}

nlohmann::json rejection_report_json(std::span<const Rejection> rejections) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rejections) arr.push_back({{"serial", r.serial}, {"reason", r.reason}});
    return arr;
}

std::vector<HistogramBin> equal_width_histogram(std::span<const double> values,
                                                std::size_t bin_count) {
    if (values.empty() || bin_count == 0) return {};
    auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
    double lo = *min_it;
    double hi = *max_it;
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bin_count);

    std::vector<HistogramBin> bins(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        bins[b].lower = lo + width * static_cast<double>(b);
        bins[b].upper = b + 1 == bin_count ? hi : lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        b = std::min(b, bin_count - 1);
        // Guard against rounding putting an edge value one bin off.
        while (b > 0 && v < bins[b].lower) --b;
        while (b + 1 < bin_count && v >= bins[b + 1].lower) ++b;
        ++bins[b].count;
    }
    return bins;
}

double percentile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptyCohort("percentile of empty data");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

FeatureSummary summarize_values(std::span<const double> values, std::size_t bin_count) {
    if (values.empty()) throw EmptyCohort("no values to summarize");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    FeatureSummary s;
    s.count = sorted.size();
    s.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(s.count);
    s.median = percentile_sorted(sorted, 0.5);
    s.p25 = percentile_sorted(sorted, 0.25);
    s.p75 = percentile_sorted(sorted, 0.75);
    s.min = sorted.front();
    s.max = sorted.back();
    s.histogram = equal_width_histogram(values, bin_count);
    return s;
}

CohortSummary summarize(std::span<const StudentRecord> records, std::size_t bin_count) {
    if (records.empty()) throw EmptyCohort("cohort has no records");
    if (bin_count == 0) throw InvalidSpec("bin_count must be positive");
    std::vector<double> cet4;
    std::vector<double> gpa;
    cet4.reserve(records.size());
    gpa.reserve(records.size());
    for (const auto& r : records) {
        cet4.push_back(r.cet4);
        gpa.push_back(r.gpa);
    }
    return {summarize_values(cet4, bin_count), summarize_values(gpa, bin_count)};
}

nlohmann::json to_json(const FeatureSummary& s) {
    auto bins = nlohmann::json::array();
    for (const auto& b : s.histogram)
        bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
    return {{"count", s.count}, {"mean", s.mean},   {"median", s.median},
            {"p25", s.p25},     {"p75", s.p75},     {"min", s.min},
            {"max", s.max},     {"histogram", bins}};
}

nlohmann::json to_json(const CohortSummary& s) {
    return {{"cet4", to_json(s.cet4)}, {"gpa", to_json(s.gpa)}};
}

void SyntheticSpec::check() const {
    const auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(extrovert_prob)) throw InvalidSpec("extrovert_prob outside [0,1]");
    if (!is_prob(leader_prob)) throw InvalidSpec("leader_prob outside [0,1]");
    if (!(cet4_sd >= 0.0) || !(gpa_sd >= 0.0)) throw InvalidSpec("standard deviations must be >= 0");
    if (!std::isfinite(cet4_mean) || !std::isfinite(gpa_mean)) throw InvalidSpec("non-finite mean");
    double total = 0.0;
    for (double p : job_mix) {
        if (!is_prob(p)) throw InvalidSpec("job_mix entry outside [0,1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidSpec("job_mix must sum to 1");
    try {
        clamp.check();
    } catch (const InvalidBounds& e) {
        throw InvalidSpec(std::string("clamp bounds: ") + e.what());
    }
}

namespace {

void append_draws(const SyntheticSpec& spec, std::uint64_t seed, std::uint64_t first_serial,
                  std::vector<StudentRecord>& out) {
    Rng rng(seed);
    for (std::size_t i = 0; i < spec.n; ++i) {
        StudentRecord r;
        r.serial = first_serial + i;
        r.cet4 = std::clamp(std::round(rng.normal(spec.cet4_mean, spec.cet4_sd)),
                            spec.clamp.cet4_min, spec.clamp.cet4_max);
        r.gpa = std::clamp(std::round(rng.normal(spec.gpa_mean, spec.gpa_sd) * 100.0) / 100.0,
                           spec.clamp.gpa_min, spec.clamp.gpa_max);
        r.personality = rng.bernoulli(spec.extrovert_prob) ? Personality::Extrovert
                                                           : Personality::Introvert;
        r.student_leader = rng.bernoulli(spec.leader_prob);

        const double u = rng.uniform();
        double cumulative = 0.0;
        r.job = Job::Other;
        for (std::size_t j = 0; j < kAllJobs.size(); ++j) {
            cumulative += spec.job_mix[j];
            if (u < cumulative && spec.job_mix[j] > 0.0) {
                r.job = kAllJobs[j];
                break;
            }
        }
        // u can land in the rounding gap above the cumulative sum.
        if (u >= cumulative) {
            for (std::size_t j = kAllJobs.size(); j-- > 0;)
                if (spec.job_mix[j] > 0.0) {
                    r.job = kAllJobs[j];
                    break;
                }
        }
        out.push_back(r);
    }
}

}  // namespace

std::vector<StudentRecord> generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.check();
    std::vector<StudentRecord> out;
    out.reserve(spec.n);
    append_draws(spec, seed, 1, out);
    return out;
}

std::vector<StudentRecord> generate_mixture(std::span<const SyntheticSpec> components,
                                            std::uint64_t seed) {
    std::vector<StudentRecord> out;
    for (std::size_t i = 0; i < components.size(); ++i) {
        components[i].check();
        append_draws(components[i], derive_seed(seed, i), out.size() + 1, out);
    }
    return out;
}

std::vector<SyntheticSpec> archetype_components(std::size_t n) {
    // {cet4 mean, gpa mean, extrovert prob, leader prob, job}
    struct Shape {
        double cet4, gpa, extrovert, leader;
        Job job;
    };
    constexpr std::array<Shape, 4> shapes = {{
        {500.0, 4.00, 0.0, 0.0, Job::Technical},
        {540.0, 4.40, 1.0, 1.0, Job::Management},
        {420.0, 3.60, 1.0, 1.0, Job::Product},
        {450.0, 2.60, 1.0, 0.0, Job::Sales},
    }};
    std::vector<SyntheticSpec> components;
    for (std::size_t i = 0; i < shapes.size(); ++i) {
        SyntheticSpec s;
        s.n = n / shapes.size() + (i < n % shapes.size() ? 1 : 0);
        s.cet4_mean = shapes[i].cet4;
        s.cet4_sd = 6.0;
        s.gpa_mean = shapes[i].gpa;
        s.gpa_sd = 0.04;
        s.extrovert_prob = shapes[i].extrovert;
        s.leader_prob = shapes[i].leader;
        s.job_mix = {};
        s.job_mix[static_cast<std::size_t>(shapes[i].job)] = 1.0;
        s.clamp = {300.0, 710.0, 0.0, 5.0};
        components.push_back(s);
    }
    return components;
}

nlohmann::json to_json(const SyntheticSpec& s) {
    nlohmann::json mix;
    for (std::size_t j = 0; j < kAllJobs.size(); ++j) mix[std::string(job_name(kAllJobs[j]))] = s.job_mix[j];
    return {{"n", s.n},
            {"cet4_mean", s.cet4_mean},
            {"cet4_sd", s.cet4_sd},
            {"gpa_mean", s.gpa_mean},
            {"gpa_sd", s.gpa_sd},
            {"extrovert_prob", s.extrovert_prob},
            {"leader_prob", s.leader_prob},
            {"job_mix", mix},
            {"clamp",
             {{"cet4_min", s.clamp.cet4_min},
              {"cet4_max", s.clamp.cet4_max},
              {"gpa_min", s.clamp.gpa_min},
              {"gpa_max", s.clamp.gpa_max}}}};
}

SyntheticSpec synthetic_spec_from_json(const nlohmann::json& j) {
    SyntheticSpec s;
    try {
        s.n = j.value("n", s.n);
        s.cet4_mean = j.value("cet4_mean", s.cet4_mean);
        s.cet4_sd = j.value("cet4_sd", s.cet4_sd);
        s.gpa_mean = j.value("gpa_mean", s.gpa_mean);
        s.gpa_sd = j.value("gpa_sd", s.gpa_sd);
        s.extrovert_prob = j.value("extrovert_prob", s.extrovert_prob);
        s.leader_prob = j.value("leader_prob", s.leader_prob);
        if (j.contains("job_mix")) {
            s.job_mix = {};
            for (const auto& [key, value] : j.at("job_mix").items()) {
                const auto job = job_from_name(key);
                if (!job) throw InvalidSpec("unknown job in job_mix: " + key);
                s.job_mix[static_cast<std::size_t>(*job)] = value.get<double>();
            }
        }
        if (j.contains("clamp")) {
            const auto& c = j.at("clamp");
            s.clamp.cet4_min = c.value("cet4_min", s.clamp.cet4_min);
            s.clamp.cet4_max = c.value("cet4_max", s.clamp.cet4_max);
            s.clamp.gpa_min = c.value("gpa_min", s.clamp.gpa_min);
            s.clamp.gpa_max = c.value("gpa_max", s.clamp.gpa_max);
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidSpec(std::string("synthetic spec: ") + e.what());
    }
    s.check();
    return s;
}

}  // namespace cohortkm
