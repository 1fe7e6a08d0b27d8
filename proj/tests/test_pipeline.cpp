#include <doctest.h>

#include <cstdlib>
#include <regex>

#include "cohortkm/pipeline.hpp"
#include "support.hpp"

using namespace cohortkm;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const fs::path& out) {
    RunConfig cfg;
    cfg.input = COHORTKM_FIXTURE;
    cfg.out_dir = out;
    cfg.seed = 7;
    return cfg;
}

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t pos = 0; (pos = text.find(needle, pos)) != std::string::npos; pos += needle.size()) ++n;
    return n;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + COHORTKM_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_emit") {
    const auto e = parse_emit("json,text");
    CHECK(e.json);
    CHECK(e.text);
    CHECK_FALSE(e.svg);
    CHECK_THROWS_AS(parse_emit("json,pdf"), InvalidConfig);
}

TEST_CASE("SeedPlan derives distinct deterministic streams") {
    const auto a = SeedPlan::from(7);
    const auto b = SeedPlan::from(7);
    CHECK(a.kmeans == b.kmeans);
    CHECK(a.synth != a.elbow);
    CHECK(a.elbow != a.kmeans);
    CHECK(SeedPlan::from(8).kmeans != a.kmeans);
    CHECK(a.to_json()["master"] == 7);
}

TEST_CASE("config validation") {
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.check(), InvalidConfig);
    cfg.input = "x.csv";
    cfg.synthetic = SyntheticSource::from_preset("cohort", 10);
    CHECK_THROWS_AS(cfg.check(), InvalidConfig);
    CHECK_THROWS_AS(SyntheticSource::from_preset("nope", 10), InvalidConfig);
}

TEST_CASE("config_from_json") {
    const auto j = nlohmann::json::parse(R"({
        "input": "cohort.csv", "k": 3, "k_range": [2, 6], "seed": 11,
        "init": "random", "restarts": 4, "bins": 12, "emit": "json",
        "out": "results", "run_id": "spring", "silhouette_space": "pca"
    })");
    const auto cfg = config_from_json(j);
    CHECK(*cfg.input == "cohort.csv");
    CHECK(*cfg.k == 3);
    CHECK(cfg.k_min == 2);
    CHECK(cfg.k_max == 6);
    CHECK(cfg.seed == 11);
    CHECK(cfg.kmeans.init == InitMethod::RandomPoints);
    CHECK(cfg.kmeans.restarts == 4);
    CHECK(cfg.bins == 12);
    CHECK_FALSE(cfg.emit.svg);
    CHECK(cfg.out_dir == "results");
    CHECK(cfg.run_id == "spring");
    CHECK(cfg.silhouette_space == SilhouetteSpace::Pca);

    const auto over = config_from_json(nlohmann::json::parse(R"({"seed": 99, "k": 5})"), cfg);
    CHECK(over.seed == 99);
    CHECK(*over.k == 5);
    CHECK(over.run_id == "spring");

    CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"init":"magic"})")), InvalidConfig);
}

TEST_CASE("assignments CSV round trip") {
    const std::vector<AssignmentRow> rows = {{1, 0, Job::Sales}, {5, 3, std::nullopt}};
    const auto text = assignments_csv(rows);
    CHECK(text.rfind("serial,cluster,recommended_job\n", 0) == 0);
    const auto back = parse_assignments(text);
    REQUIRE(back.size() == 2);
    CHECK(back[0].recommended_job == Job::Sales);
    CHECK(back[1].cluster == 3);
    CHECK_FALSE(back[1].recommended_job.has_value());
    CHECK_THROWS_AS(parse_assignments("serial,cluster,recommended_job\nx,1,sales\n"), MalformedRow);
}

TEST_CASE("cmd_summarize") {
    const auto dir = support::scratch_dir("summ");
    auto cfg = fixture_config(dir);
    const auto out = cmd_summarize(cfg);
    CHECK(out.summary.cet4.count == 50);
    CHECK(out.rejections.empty());
    CHECK(fs::exists(dir / "cohort_summary.json"));
    CHECK(count(read_file(dir / "cohort_cet4_hist.svg"), "class=\"bar\"") == 20);

    cfg.bins = 10;
    cmd_summarize(cfg);
    CHECK(count(read_file(dir / "cohort_gpa_hist.svg"), "class=\"bar\"") == 10);

    cfg.input = dir / "missing.csv";
    try {
        cmd_summarize(cfg);
        FAIL("expected an error");
    } catch (const StageError& e) {
        CHECK(std::string(e.what()).find("missing.csv") != std::string::npos);
        CHECK(e.kind() == "IoError");
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_elbow") {
    const auto dir = support::scratch_dir("elbow");
    RunConfig cfg;
    cfg.synthetic = SyntheticSource::from_preset("archetypes", 400);
    cfg.out_dir = dir;
    cfg.seed = 3;
    const auto first = cmd_elbow(cfg);
    CHECK(first.knee == 4);
    CHECK(first.curve.points.size() == 10);
    const auto csv = read_file(dir / "cohort_elbow.csv");
    CHECK(csv.rfind("k,sse\n", 0) == 0);

    const auto second = cmd_elbow(cfg);
    CHECK(read_file(dir / "cohort_elbow.csv") == csv);
    CHECK(second.knee == first.knee);

    cfg.k_min = 2;
    cfg.k_max = 2;
    CHECK_THROWS(cmd_elbow(cfg));
    fs::remove_all(dir);
}

TEST_CASE("cmd_run on the published cohort") {
    const auto dir = support::scratch_dir("run");
    auto cfg = fixture_config(dir / "a");
    cfg.k = 4;
    const auto out = cmd_run(cfg);
    CHECK(out.k == 4);
    CHECK_FALSE(out.k_from_knee);
    CHECK(out.clustering.labels.size() == 50);

    const auto rows = parse_assignments(read_file(dir / "a" / "cohort_assignments.csv"));
    CHECK(rows.size() == 50);
    for (std::size_t c = 0; c < 4; ++c) CHECK(fs::exists(dir / "a" / ("cohort_radar_" + std::to_string(c) + ".svg")));
    CHECK(fs::exists(dir / "a" / "cohort_scatter.svg"));
    CHECK_FALSE(fs::exists(dir / "a" / "cohort_radar_4.svg"));

    const auto j = nlohmann::json::parse(read_file(dir / "a" / "cohort_metrics.json"));
    CHECK(j.contains("ari"));
    CHECK(j.contains("homogeneity"));
    CHECK(j["silhouette_mean"].get<double>() > -1.0);

    SUBCASE("same seed gives identical artifacts") {
        auto again = fixture_config(dir / "b");
        again.k = 4;
        cmd_run(again);
        CHECK(support::snapshot(dir / "a") == support::snapshot(dir / "b"));
    }
    SUBCASE("external metrics need ground truth") {
        auto recs = parse_records(read_file(COHORTKM_FIXTURE));
        for (auto& r : recs) r.job.reset();
        write_file(dir / "nojob.csv", serialize_records(recs));
        auto blind = fixture_config(dir / "c");
        blind.input = dir / "nojob.csv";
        blind.k = 4;
        const auto res = cmd_run(blind);
        CHECK_FALSE(res.metrics.ari.has_value());
        const auto m = nlohmann::json::parse(read_file(dir / "c" / "cohort_metrics.json"));
        CHECK_FALSE(m.contains("ari"));
        CHECK(m.contains("silhouette_mean"));
    }
    SUBCASE("knee selection writes the elbow curve") {
        auto auto_k = fixture_config(dir / "d");
        const auto res = cmd_run(auto_k);
        CHECK(res.k_from_knee);
        CHECK(fs::exists(dir / "d" / "cohort_elbow.csv"));
    }
    SUBCASE("emit filter") {
        auto only_text = fixture_config(dir / "e");
        only_text.k = 4;
        only_text.emit = parse_emit("text");
        cmd_run(only_text);
        CHECK(fs::exists(dir / "e" / "cohort_report.txt"));
        CHECK(fs::exists(dir / "e" / "cohort_assignments.csv"));
        CHECK_FALSE(fs::exists(dir / "e" / "cohort_scatter.svg"));
        CHECK_FALSE(fs::exists(dir / "e" / "cohort_metrics.json"));
    }
    fs::remove_all(dir);
}

TEST_CASE("cmd_synth and cmd_metrics") {
    const auto dir = support::scratch_dir("synth");
    RunConfig cfg;
    cfg.synthetic = SyntheticSource::from_preset("cohort", 200);
    cfg.out_dir = dir;
    cfg.seed = 5;
    const auto path = cmd_synth(cfg);
    const auto recs = parse_records(read_file(path));
    CHECK(recs.size() == 200);
    for (const auto& r : recs) {
        CHECK(r.cet4 >= 320);
        CHECK(r.cet4 <= 623);
    }
    CHECK(read_file(cmd_synth(cfg)) == read_file(path));

    auto run = fixture_config(dir / "run");
    run.k = 3;
    const auto res = cmd_run(run);
    auto check = fixture_config(dir / "m");
    check.assignments_path = dir / "run" / "cohort_assignments.csv";
    const auto m = cmd_metrics(check);
    CHECK(m.metrics.silhouette->overall_mean == doctest::Approx(res.metrics.silhouette->overall_mean).epsilon(1e-12));
    CHECK(*m.metrics.ari == doctest::Approx(*res.metrics.ari).epsilon(1e-12));
    CHECK(fs::exists(dir / "m" / "cohort_metrics.json"));

    check.assignments_path.reset();
    CHECK_THROWS_AS(cmd_metrics(check), InvalidConfig);
    fs::remove_all(dir);
}

TEST_CASE("command-line front end") {
    const auto dir = support::scratch_dir("cli");
    const std::string out = " --out \"" + dir.string() + "\"";
    CHECK(run_cli(std::string("run --input \"") + COHORTKM_FIXTURE + "\" --k 4 --seed 7" + out) == 0);
    CHECK(fs::exists(dir / "cohort_assignments.csv"));
    CHECK(run_cli("run --input \"" + (dir / "absent.csv").string() + "\"" + out) == 1);
    CHECK(run_cli("bogus") != 0);
    CHECK(run_cli("summarize --synthetic cohort --n 100 --bins 5 --run-id syn" + out) == 0);
    CHECK(count(read_file(dir / "syn_cet4_hist.svg"), "class=\"bar\"") == 5);

    write_file(dir / "cfg.json", std::string(R"({"input": ")") + COHORTKM_FIXTURE +
                                    R"(", "k": 2, "run_id": "fromcfg", "seed": 1})");
    CHECK(run_cli("run --config \"" + (dir / "cfg.json").string() + "\" --k 3" + out) == 0);
    const auto rows = parse_assignments(read_file(dir / "fromcfg_assignments.csv"));
    std::size_t max_cluster = 0;
    for (const auto& r : rows) max_cluster = std::max(max_cluster, r.cluster);
    CHECK(max_cluster == 2);
    fs::remove_all(dir);
}
