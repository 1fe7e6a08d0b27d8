#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cohortkm/dataset.hpp"
#include "cohortkm/error.hpp"
#include "cohortkm/pipeline.hpp"
#include "oracles.hpp"

using namespace cohortkm;

namespace {

std::string with_header(const std::string& rows) { return std::string(kCsvHeader) + "\n" + rows; }

template <typename E, typename F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const E& e) {
        return e.what();
    }
    FAIL("expected exception not thrown");
    return {};
}

std::vector<StudentRecord> fixture() { return parse_records(read_file(COHORTKM_FIXTURE)); }

}  // namespace

TEST_CASE("parse_records reads the sample cohort") {
    const auto recs = parse_records(with_header("1,409,4.51,e,1,sales post\n4,472,4.07,i,0,technical post\n"));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0] == StudentRecord{1, 409, 4.51, Personality::Extrovert, true, Job::Sales});
    CHECK(recs[1] == StudentRecord{4, 472, 4.07, Personality::Introvert, false, Job::Technical});
}

TEST_CASE("parse_records edge cases") {
    CHECK(parse_records(with_header("")).empty());
    CHECK(parse_records(std::string(kCsvHeader)).empty());

    SUBCASE("CRLF line endings") {
        const auto recs = parse_records(std::string(kCsvHeader) + "\r\n2,538,3.06,e,0,product post\r\n");
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].job == Job::Product);
    }
    SUBCASE("empty job field means no ground truth") {
        const auto recs = parse_records(with_header("7,500,3.1,i,0,\n"));
        REQUIRE(recs.size() == 1);
        CHECK_FALSE(recs[0].job.has_value());
    }
    SUBCASE("wrong header") {
        CHECK_THROWS_AS(parse_records("serial,cet4,gpa,personality,student_leader,job\n"), MalformedRow);
    }
    SUBCASE("wrong field count names the line") {
        const auto msg = error_message<MalformedRow>([] { parse_records(with_header("1,409,4.51,e,1\n")); });
        CHECK(msg.find("line 2") != std::string::npos);
    }
    SUBCASE("unparseable number") {
        CHECK_THROWS_AS(parse_records(with_header("1,4o9,4.51,e,1,sales post\n")), MalformedRow);
        CHECK_THROWS_AS(parse_records(with_header("0,409,4.51,e,1,sales post\n")), MalformedRow);
    }
    SUBCASE("unknown categories name line and field") {
        auto msg = error_message<UnknownCategory>([] { parse_records(with_header("1,409,4.51,x,1,sales post\n")); });
        CHECK(msg.find("line 2") != std::string::npos);
        CHECK(msg.find("personality") != std::string::npos);
        msg = error_message<UnknownCategory>(
            [] { parse_records(with_header("1,409,4.51,e,1,sales post\n2,400,3,e,1,chef\n")); });
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("job") != std::string::npos);
        CHECK_THROWS_AS(parse_records(with_header("1,409,4.51,e,2,sales post\n")), UnknownCategory);
    }
    SUBCASE("duplicate serial") {
        const auto msg = error_message<DuplicateSerial>(
            [] { parse_records(with_header("5,409,4.51,e,1,sales post\n5,410,4.5,e,1,other\n")); });
        CHECK(msg.find("5") != std::string::npos);
    }
}

TEST_CASE("serialize then parse is the identity") {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        SyntheticSpec spec;
        spec.n = 40;
        auto recs = generate_synthetic(spec, rng.next_u64());
        // Arbitrary doubles too, not only the rounded synthetic grid.
        for (auto& r : recs) r.gpa = 1.0 + 3.0 * rng.uniform();
        if (trial % 2) recs[3].job.reset();
        CHECK(parse_records(serialize_records(recs)) == recs);
    }
}

TEST_CASE("validate_cohort") {
    const auto recs = fixture();
    const auto result = validate_cohort(recs);
    CHECK(result.accepted.size() == 50);
    CHECK(result.rejections.empty());

    std::vector<StudentRecord> bad = {{1, 299, 3.0, Personality::Introvert, false, Job::Other},
                                      {2, 400, 5.5, Personality::Introvert, false, Job::Other},
                                      {3, 400, 3.0, Personality::Introvert, false, Job::Other}};
    const auto r2 = validate_cohort(bad);
    REQUIRE(r2.rejections.size() == 2);
    CHECK(r2.rejections[0].serial == 1);
    CHECK(r2.rejections[0].reason == "OutOfRange(cet4)");
    CHECK(r2.rejections[1].reason == "OutOfRange(gpa)");
    CHECK(r2.accepted.size() == 1);
    CHECK(rejection_report_json(r2.rejections).dump() ==
          R"j([{"reason":"OutOfRange(cet4)","serial":1},{"reason":"OutOfRange(gpa)","serial":2}])j");

    CHECK(validate_cohort(std::vector<StudentRecord>{}).accepted.empty());
    CHECK_THROWS_AS(validate_cohort(recs, ValidationBounds{500, 400, 0, 5}), InvalidBounds);
}

TEST_CASE("percentiles use linear interpolation") {
    const std::vector<double> v = {1, 2, 3, 4};
    const auto s = summarize_values(v, 4);
    CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(s.median == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(s.p25 == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(s.p75 == doctest::Approx(3.25).epsilon(1e-15));

    const std::vector<double> one = {7.25};
    const auto s1 = summarize_values(one, 3);
    CHECK(s1.mean == 7.25);
    CHECK(s1.median == 7.25);
    CHECK(s1.p25 == 7.25);
    CHECK(s1.p75 == 7.25);
}

TEST_CASE("summarize on the sample cohort matches frozen reference values") {
    // Reference values computed independently with numpy (mean, percentile(linear)).
    const auto s = summarize(fixture());
    CHECK(s.cet4.count == 50);
    CHECK(s.cet4.min == 324);
    CHECK(s.cet4.max == 548);
    CHECK(s.cet4.mean == doctest::Approx(466.7).epsilon(1e-12));
    CHECK(s.cet4.median == doctest::Approx(474.0).epsilon(1e-12));
    CHECK(s.cet4.p25 == doctest::Approx(422.5).epsilon(1e-12));
    CHECK(s.cet4.p75 == doctest::Approx(517.75).epsilon(1e-12));
    CHECK(s.gpa.min == 2.30);
    CHECK(s.gpa.max == 4.70);
    CHECK(s.gpa.mean == doctest::Approx(3.6476).epsilon(1e-12));
    CHECK(s.gpa.median == doctest::Approx(3.745).epsilon(1e-12));
    CHECK(s.gpa.p25 == doctest::Approx(3.0975).epsilon(1e-12));
    CHECK(s.gpa.p75 == doctest::Approx(4.1975).epsilon(1e-12));
    CHECK(s.cet4.histogram.size() == kDefaultBinCount);
    CHECK_THROWS_AS(summarize(std::vector<StudentRecord>{}), EmptyCohort);
}

TEST_CASE("summary properties on random data") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> v(1 + rng.below(200));
        for (auto& x : v) x = rng.normal(10.0, 50.0);
        const auto s = summarize_values(v, 1 + rng.below(30));
        double sum = 0.0;
        for (double x : v) sum += x;
        CHECK(std::abs(s.mean - sum / static_cast<double>(v.size())) <= 1e-9 * std::max(1.0, std::abs(s.mean)));
        CHECK(s.p25 <= s.median);
        CHECK(s.median <= s.p75);
        std::size_t total = 0;
        for (const auto& b : s.histogram) total += b.count;
        CHECK(total == v.size());

        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        double prev = -std::numeric_limits<double>::infinity();
        for (double p = 0.0; p <= 1.0; p += 0.05) {
            const double q = percentile_sorted(sorted, p);
            CHECK(q >= prev);
            prev = q;
            CHECK(q == doctest::Approx(oracle::percentile(v, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("histogram binning") {
    const std::vector<double> same = {3, 3, 3, 3};
    auto h = equal_width_histogram(same, 5);
    CHECK(std::count_if(h.begin(), h.end(), [](const HistogramBin& b) { return b.count > 0; }) == 1);

    const std::vector<double> grid = {0, 1, 2, 3, 4};
    h = equal_width_histogram(grid, 5);
    for (const auto& b : h) CHECK(b.count == 1);
    CHECK(h.back().upper == 4.0);
}

TEST_CASE("generate_synthetic") {
    SyntheticSpec spec;
    spec.n = 0;
    CHECK(generate_synthetic(spec, 1).empty());

    spec.n = 200;
    CHECK(generate_synthetic(spec, 42) == generate_synthetic(spec, 42));
    CHECK(generate_synthetic(spec, 42) != generate_synthetic(spec, 43));

    SUBCASE("invalid specs") {
        auto bad = spec;
        bad.extrovert_prob = 1.5;
        CHECK_THROWS_AS(generate_synthetic(bad, 1), InvalidSpec);
        bad = spec;
        bad.job_mix = {0.5, 0.5, 0.5, 0.0, 0.0};
        CHECK_THROWS_AS(generate_synthetic(bad, 1), InvalidSpec);
        bad = spec;
        bad.cet4_sd = -1.0;
        CHECK_THROWS_AS(generate_synthetic(bad, 1), InvalidSpec);
    }
    SUBCASE("law of large numbers on the CET-4 mean") {
        SyntheticSpec big;
        big.n = 3000;
        big.cet4_mean = 505.18;
        big.cet4_sd = 55.0;
        big.clamp = {200.0, 800.0, 0.0, 5.0};
        const auto s = summarize(generate_synthetic(big, 2024));
        CHECK(std::abs(s.cet4.mean - 505.18) <= 3.0);
    }
    SUBCASE("output passes validation with the clamp bounds") {
        Rng rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            SyntheticSpec s;
            s.n = 300;
            s.cet4_sd = 150.0;
            s.gpa_sd = 2.0;
            const auto recs = generate_synthetic(s, rng.next_u64());
            CHECK(validate_cohort(recs, s.clamp).rejections.empty());
        }
    }
    SUBCASE("mixture serials are contiguous") {
        const auto recs = generate_mixture(archetype_components(103), 9);
        REQUIRE(recs.size() == 103);
        for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].serial == i + 1);
    }
    SUBCASE("spec JSON round trip") {
        SyntheticSpec s;
        s.n = 17;
        s.job_mix = {0.1, 0.2, 0.3, 0.4, 0.0};
        const auto back = synthetic_spec_from_json(to_json(s));
        CHECK(back.n == 17);
        CHECK(back.job_mix == s.job_mix);
        CHECK(back.clamp.gpa_max == s.clamp.gpa_max);
    }
}
