// cohortkm command-line front end: summarize, elbow, run, synth, metrics.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cohortkm/pipeline.hpp"

namespace {

using namespace cohortkm;

struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> input;
    std::optional<std::string> synthetic;
    std::optional<std::size_t> n;
    std::optional<std::string> out;
    std::optional<std::string> run_id;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::string> k_range;
    std::optional<std::string> init;
    std::optional<std::size_t> restarts;
    std::optional<std::size_t> bins;
    std::optional<std::string> rules;
    std::optional<std::string> scaler_override;
    std::optional<std::string> bounds;
    std::optional<std::string> emit;
    std::optional<std::string> assignments;
    std::optional<std::string> silhouette_space;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file; explicit flags override it");
    cmd->add_option("--input", f.input, "cohort CSV file");
    cmd->add_option("--synthetic", f.synthetic, "synthetic cohort preset instead of --input")
        ->check(CLI::IsMember({"cohort", "archetypes"}));
    cmd->add_option("--n", f.n, "synthetic cohort size (default 3000)");
    cmd->add_option("--out", f.out, "output directory (default ./out)");
    cmd->add_option("--run-id", f.run_id, "artifact file prefix (default 'cohort')");
    cmd->add_option("--seed", f.seed, "master random seed");
    cmd->add_option("--bounds", f.bounds, "validation bounds, e.g. cet4=300:710,gpa=0:5");
    cmd->add_option("--scaler-override", f.scaler_override, "fixed min-max ranges, e.g. cet4=320:623");
    cmd->add_option("--emit", f.emit, "artifact kinds to write: json,svg,text");
}

void add_clustering(CLI::App* cmd, Flags& f) {
    cmd->add_option("--k", f.k, "cluster count (default: elbow knee)");
    cmd->add_option("--k-range", f.k_range, "elbow scan range MIN:MAX (default 1:10)");
    cmd->add_option("--init", f.init, "centroid initialisation")->check(CLI::IsMember({"random", "plusplus"}));
    cmd->add_option("--restarts", f.restarts, "independent restarts per k (default 10)");
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
    const auto sep = text.find_first_of(":,-");
    if (sep == std::string::npos) throw InvalidConfig("--k-range must look like MIN:MAX");
    try {
        return {std::stoul(text.substr(0, sep)), std::stoul(text.substr(sep + 1))};
    } catch (const std::exception&) {
        throw InvalidConfig("--k-range must look like MIN:MAX, got '" + text + "'");
    }
}

ValidationBounds parse_bounds(const std::string& text, ValidationBounds base) {
    // Same syntax as the scaler override, then reinterpreted as bounds.
    ScalerParams p{{base.cet4_min, base.cet4_max}, {base.gpa_min, base.gpa_max}};
    try {
        p = parse_scaler_override(text, p);
    } catch (const Error& e) {
        throw InvalidConfig(std::string("--bounds: ") + e.what());
    }
    return {p.cet4.min, p.cet4.max, p.gpa.min, p.gpa.max};
}

RunConfig resolve(const Flags& f) {
    RunConfig cfg;
    if (f.config) cfg = config_from_json(nlohmann::json::parse(read_file(*f.config)));
    nlohmann::json overrides = nlohmann::json::object();
    if (f.input) {
        overrides["input"] = *f.input;
        cfg.synthetic.reset();
    }
    if (f.synthetic) {
        overrides["synthetic"] = *f.synthetic;
        cfg.input.reset();
    } else if (f.n && cfg.synthetic && cfg.synthetic->preset != "custom") {
        overrides["synthetic"] = cfg.synthetic->preset;
    }
    if (f.n) overrides["n"] = *f.n;
    if (f.out) overrides["out"] = *f.out;
    if (f.run_id) overrides["run_id"] = *f.run_id;
    if (f.seed) overrides["seed"] = *f.seed;
    if (f.k) overrides["k"] = *f.k;
    if (f.init) overrides["init"] = *f.init;
    if (f.restarts) overrides["restarts"] = *f.restarts;
    if (f.bins) overrides["bins"] = *f.bins;
    if (f.rules) overrides["rules"] = *f.rules;
    if (f.scaler_override) overrides["scaler_override"] = *f.scaler_override;
    if (f.emit) overrides["emit"] = *f.emit;
    if (f.assignments) overrides["assignments"] = *f.assignments;
    if (f.silhouette_space) overrides["silhouette_space"] = *f.silhouette_space;
    cfg = config_from_json(overrides, std::move(cfg));
    if (f.k_range) std::tie(cfg.k_min, cfg.k_max) = parse_range(*f.k_range);
    if (f.bounds) cfg.bounds = parse_bounds(*f.bounds, cfg.bounds);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cohortkm: cluster student cohorts and map clusters to career guidance"};
    app.require_subcommand(1);
    Flags f;

    auto* summarize_cmd = app.add_subcommand("summarize", "cohort statistics and histograms");
    add_common(summarize_cmd, f);
    summarize_cmd->add_option("--bins", f.bins, "histogram bin count (default 20)");

    auto* elbow_cmd = app.add_subcommand("elbow", "SSE curve over a k range and its knee");
    add_common(elbow_cmd, f);
    add_clustering(elbow_cmd, f);

    auto* run_cmd = app.add_subcommand("run", "full pipeline: cluster, evaluate, recommend, plot");
    add_common(run_cmd, f);
    add_clustering(run_cmd, f);
    run_cmd->add_option("--rules", f.rules, "guidance rule set JSON");
    run_cmd->add_option("--silhouette-space", f.silhouette_space, "features or pca")
        ->check(CLI::IsMember({"features", "pca"}));

    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic cohort CSV");
    add_common(synth_cmd, f);

    auto* metrics_cmd = app.add_subcommand("metrics", "recompute metrics from an assignments CSV");
    add_common(metrics_cmd, f);
    metrics_cmd->add_option("--assignments", f.assignments, "assignments CSV (serial,cluster[,job])")->required();
    metrics_cmd->add_option("--silhouette-space", f.silhouette_space, "features or pca")
        ->check(CLI::IsMember({"features", "pca"}));

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve(f);
        if (summarize_cmd->parsed()) {
            const auto out = cmd_summarize(cfg);
            std::cout << "summarized " << out.summary.cet4.count << " records (" << out.rejections.size()
                      << " rejected)\n";
            for (const auto& p : out.written) std::cout << "  wrote " << p.string() << "\n";
        } else if (elbow_cmd->parsed()) {
            const auto out = cmd_elbow(cfg);
            for (const auto& pt : out.curve.points) std::cout << "k=" << pt.k << " sse=" << pt.sse << "\n";
            for (const auto& w : out.curve.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "knee: k=" << out.knee << "\n";
        } else if (run_cmd->parsed()) {
            const auto out = cmd_run(cfg);
            std::cout << "k=" << out.k << (out.k_from_knee ? " (knee)" : "") << " sse=" << out.clustering.sse
                      << "\n";
            for (const auto& a : out.mapping.assignments)
                std::cout << "  cluster " << a.cluster_id << " -> " << job_name(a.recommendation.job) << "\n";
            for (const auto& w : out.mapping.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "wrote " << out.written.size() << " files to " << cfg.out_dir.string() << "\n";
        } else if (synth_cmd->parsed()) {
            std::cout << "wrote " << cmd_synth(cfg).string() << "\n";
        } else if (metrics_cmd->parsed()) {
            const auto out = cmd_metrics(cfg);
            std::cout << to_json(out.metrics).dump(2) << "\n";
        }
    } catch (const StageError& e) {
        std::cerr << "error in stage " << e.stage() << ": " << e.inner_message() << "\n";
        return EXIT_FAILURE;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return EXIT_FAILURE;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: invalid JSON: " << e.what() << "\n";
        return EXIT_FAILURE;
    }
    return EXIT_SUCCESS;
}
