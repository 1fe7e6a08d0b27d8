#include "cohortkm/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "cohortkm/random.hpp"
#include "cohortkm/viz.hpp"

namespace cohortkm {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
    return std::move(buf).str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

EmitFlags parse_emit(std::string_view text) {
    EmitFlags flags{false, false, false};
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (item == "json")
            flags.json = true;
        else if (item == "svg")
            flags.svg = true;
        else if (item == "text")
            flags.text = true;
        else if (!item.empty())
            throw InvalidConfig("unknown emit target '" + std::string(item) + "'");
    }
    return flags;
}

SyntheticSource SyntheticSource::from_preset(std::string_view preset, std::size_t n) {
    SyntheticSource src;
    src.preset = std::string(preset);
    if (preset == "cohort") {
        SyntheticSpec spec;
        spec.n = n;
        src.components.push_back(spec);
    } else if (preset == "archetypes") {
        src.components = archetype_components(n);
    } else {
        throw InvalidConfig("unknown synthetic preset '" + std::string(preset) + "'");
    }
    return src;
}

void RunConfig::check() const {
    if (input.has_value() == synthetic.has_value())
        throw InvalidConfig("exactly one of input path or synthetic cohort must be given");
    if (k_min < 1 || k_min > k_max) throw InvalidConfig("k range must satisfy 1 <= k_min <= k_max");
    if (k && *k < 1) throw InvalidConfig("k must be >= 1");
    if (bins < 1) throw InvalidConfig("bins must be >= 1");
    if (run_id.empty() || run_id.find('/') != std::string::npos)
        throw InvalidConfig("run_id must be a non-empty file name component");
    bounds.check();
    kmeans.check();
}

RunConfig config_from_json(const nlohmann::json& j, RunConfig cfg) {
    try {
        if (j.contains("input")) cfg.input = j["input"].get<std::string>();
        if (j.contains("synthetic")) {
            const auto& s = j["synthetic"];
            if (s.is_string()) {
                cfg.synthetic = SyntheticSource::from_preset(s.get<std::string>(), j.value("n", std::size_t{3000}));
            } else if (s.contains("preset")) {
                cfg.synthetic = SyntheticSource::from_preset(s["preset"].get<std::string>(),
                                                             s.value("n", std::size_t{3000}));
            } else {
                SyntheticSource src;
                src.preset = "custom";
                if (s.contains("components"))
                    for (const auto& c : s["components"]) src.components.push_back(synthetic_spec_from_json(c));
                else
                    src.components.push_back(synthetic_spec_from_json(s));
                cfg.synthetic = std::move(src);
            }
        }
        if (j.contains("bounds")) {
            const auto& b = j["bounds"];
            cfg.bounds.cet4_min = b.value("cet4_min", cfg.bounds.cet4_min);
            cfg.bounds.cet4_max = b.value("cet4_max", cfg.bounds.cet4_max);
            cfg.bounds.gpa_min = b.value("gpa_min", cfg.bounds.gpa_min);
            cfg.bounds.gpa_max = b.value("gpa_max", cfg.bounds.gpa_max);
        }
        if (j.contains("scaler_override")) cfg.scaler_override = j["scaler_override"].get<std::string>();
        if (j.contains("k")) cfg.k = j["k"].get<std::size_t>();
        if (j.contains("k_range")) {
            const auto range = j["k_range"].get<std::vector<std::size_t>>();
            if (range.size() != 2) throw InvalidConfig("k_range must have two entries");
            cfg.k_min = range[0];
            cfg.k_max = range[1];
        }
        if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("init")) {
            const auto init = j["init"].get<std::string>();
            if (init == "random")
                cfg.kmeans.init = InitMethod::RandomPoints;
            else if (init == "plusplus")
                cfg.kmeans.init = InitMethod::PlusPlus;
            else
                throw InvalidConfig("unknown init '" + init + "'");
        }
        if (j.contains("restarts")) cfg.kmeans.restarts = j["restarts"].get<std::size_t>();
        if (j.contains("max_iter")) cfg.kmeans.max_iter = j["max_iter"].get<std::size_t>();
        if (j.contains("tol")) cfg.kmeans.tol = j["tol"].get<double>();
        if (j.contains("bins")) cfg.bins = j["bins"].get<std::size_t>();
        if (j.contains("rules")) cfg.rules_path = j["rules"].get<std::string>();
        if (j.contains("assignments")) cfg.assignments_path = j["assignments"].get<std::string>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("run_id")) cfg.run_id = j["run_id"].get<std::string>();
        if (j.contains("emit")) cfg.emit = parse_emit(j["emit"].get<std::string>());
        if (j.contains("silhouette_space")) {
            const auto space = j["silhouette_space"].get<std::string>();
            if (space == "features")
                cfg.silhouette_space = SilhouetteSpace::Features;
            else if (space == "pca")
                cfg.silhouette_space = SilhouetteSpace::Pca;
            else
                throw InvalidConfig("unknown silhouette_space '" + space + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidConfig(std::string("config JSON: ") + e.what());
    }
    return cfg;
}

SeedPlan SeedPlan::from(std::uint64_t master) {
    return {master, derive_seed(master, "synth"), derive_seed(master, "elbow"),
            derive_seed(master, "kmeans")};
}

nlohmann::json SeedPlan::to_json() const {
    return {{"master", master},
            {"synth", synth},
            {"elbow", elbow},
            {"kmeans", kmeans},
            {"scheme",
             "stream seed = splitmix64(master ^ splitmix64(fnv1a64(stream) + 0x632BE59BD9B4E019)); "
             "restart r and elbow k re-derive from their stream seed with the integer r or k"}};
}

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const Error& e) {
        throw StageError(name, e);
    }
}

std::filesystem::path artifact(const RunConfig& cfg, std::string_view figure, std::string_view ext) {
    return cfg.out_dir / (cfg.run_id + "_" + std::string(figure) + "." + std::string(ext));
}

void emit(std::vector<std::filesystem::path>& written, const std::filesystem::path& path,
          std::string_view content) {
    write_file(path, content);
    written.push_back(path);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::optional<std::vector<std::size_t>> truth_labels(std::span<const StudentRecord> records) {
    std::vector<std::size_t> truth;
    truth.reserve(records.size());
    for (const auto& r : records) {
        if (!r.job) return std::nullopt;
        truth.push_back(static_cast<std::size_t>(*r.job));
    }
    return truth;
}

struct Prepared {
    ScalerParams scaler;
    FeatureMatrix features;
};

Prepared prepare(const RunConfig& cfg, std::span<const StudentRecord> records) {
    return stage("preprocess", [&] {
        ScalerParams scaler = fit_scaler(records);
        if (cfg.scaler_override) scaler = parse_scaler_override(*cfg.scaler_override, scaler);
        auto features = build_matrix(records, scaler);
        return Prepared{scaler, std::move(features)};
    });
}

nlohmann::json clamp_warnings_json(const FeatureMatrix& m) {
    auto arr = nlohmann::json::array();
    for (const auto& w : m.warnings)
        arr.push_back({{"serial", w.serial}, {"feature", feature_name(w.feature)}, {"value", w.raw}});
    return arr;
}

KMeansConfig seeded(const RunConfig& cfg, std::uint64_t seed) {
    KMeansConfig k = cfg.kmeans;
    k.seed = seed;
    return k;
}

MetricBundle compute_metrics(const RunConfig& cfg, const FeatureMatrix& features,
                             std::span<const StudentRecord> records,
                             std::span<const std::size_t> labels) {
    return stage("metrics", [&] {
        MetricBundle bundle;
        const auto truth = truth_labels(records);
        std::size_t distinct = 0;
        {
            std::vector<std::size_t> sorted(labels.begin(), labels.end());
            std::sort(sorted.begin(), sorted.end());
            distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
        }
        // Internal indices are undefined for k = 1 (and CH for k = n); skip them there.
        if (distinct >= 2) {
            if (cfg.silhouette_space == SilhouetteSpace::Pca) {
                const auto model = fit_pca(features.data);
                bundle.silhouette = silhouette(project(features.data, model, 2), labels);
            } else {
                bundle.silhouette = silhouette(features.data, labels);
            }
            if (distinct + 1 <= features.rows()) bundle.calinski_harabasz = calinski_harabasz(features.data, labels);
        }
        if (truth) {
            LabelPair pair(*truth, std::vector<std::size_t>(labels.begin(), labels.end()));
            bundle.ari = adjusted_rand_index(pair);
            bundle.homogeneity = homogeneity(pair);
        }
        return bundle;
    });
}

}  // namespace

LoadedCohort load_cohort(const RunConfig& cfg) {
    return stage("dataset", [&] {
        cfg.check();
        std::vector<StudentRecord> raw;
        if (cfg.input) {
            raw = parse_records(read_file(*cfg.input));
        } else {
            raw = generate_mixture(cfg.synthetic->components, SeedPlan::from(cfg.seed).synth);
        }
        auto validated = validate_cohort(raw, cfg.bounds);
        return LoadedCohort{std::move(validated.accepted), std::move(validated.rejections)};
    });
}

SummarizeOutcome cmd_summarize(const RunConfig& cfg) {
    auto cohort = load_cohort(cfg);
    SummarizeOutcome out;
    out.rejections = cohort.rejections;
    out.summary = stage("summarize", [&] { return summarize(cohort.records, cfg.bins); });

    if (cfg.emit.json) {
        nlohmann::json j = to_json(out.summary);
        j["count"] = cohort.records.size();
        j["bins"] = cfg.bins;
        emit(out.written, artifact(cfg, "summary", "json"), dump(j));
        emit(out.written, artifact(cfg, "rejections", "json"), dump(rejection_report_json(cohort.rejections)));
    }
    if (cfg.emit.svg) {
        stage("viz", [&] {
            std::vector<double> cet4, gpa;
            for (const auto& r : cohort.records) {
                cet4.push_back(r.cet4);
                gpa.push_back(r.gpa);
            }
            emit(out.written, artifact(cfg, "cet4_hist", "svg"),
                 render_histogram(cet4, cfg.bins, "Histogram of CET-4 scores"));
            emit(out.written, artifact(cfg, "gpa_hist", "svg"), render_histogram(gpa, cfg.bins, "Histogram of GPA"));
        });
    }
    if (cfg.emit.text) {
        std::ostringstream t;
        t.precision(6);
        for (const auto& [name, s] : {std::pair{"CET-4", &out.summary.cet4}, std::pair{"GPA", &out.summary.gpa}})
            t << name << ": n=" << s->count << " mean=" << s->mean << " median=" << s->median << " p25=" << s->p25
              << " p75=" << s->p75 << " min=" << s->min << " max=" << s->max << "\n";
        t << "rejected: " << cohort.rejections.size() << "\n";
        emit(out.written, artifact(cfg, "summary", "txt"), t.str());
    }
    return out;
}

ElbowOutcome cmd_elbow(const RunConfig& cfg) {
    const auto cohort = load_cohort(cfg);
    const auto prepared = prepare(cfg, cohort.records);
    ElbowOutcome out;
    out.curve = stage("kmeans", [&] {
        return elbow_scan(prepared.features.data, cfg.k_min, cfg.k_max, seeded(cfg, SeedPlan::from(cfg.seed).elbow));
    });
    out.knee = stage("kmeans", [&] { return detect_knee(out.curve); });

    emit(out.written, artifact(cfg, "elbow", "csv"), elbow_csv(out.curve));
    if (cfg.emit.json) {
        auto j = to_json(out.curve);
        j["knee"] = out.knee;
        emit(out.written, artifact(cfg, "elbow", "json"), dump(j));
    }
    if (cfg.emit.text)
        emit(out.written, artifact(cfg, "elbow", "txt"), "detected k = " + std::to_string(out.knee) + "\n");
    return out;
}

RunOutcome cmd_run(const RunConfig& cfg) {
    const auto cohort = load_cohort(cfg);
    const auto seeds = SeedPlan::from(cfg.seed);
    const auto prepared = prepare(cfg, cohort.records);
    const auto& matrix = prepared.features.data;

    RunOutcome out;
    std::optional<ElbowCurve> curve;
    if (cfg.k) {
        out.k = *cfg.k;
    } else {
        curve = stage("kmeans", [&] {
            return elbow_scan(matrix, cfg.k_min, std::min(cfg.k_max, matrix.rows()), seeded(cfg, seeds.elbow));
        });
        out.k = stage("kmeans", [&] { return detect_knee(*curve); });
        out.k_from_knee = true;
    }

    out.clustering = stage("kmeans", [&] {
        auto kcfg = seeded(cfg, seeds.kmeans);
        kcfg.k = out.k;
        return lloyd(matrix, kcfg);
    });
    const auto& labels = out.clustering.labels;

    const auto pca_model = stage("pca", [&] { return fit_pca(matrix); });
    const auto z = stage("pca", [&] { return project(matrix, pca_model, std::min<std::size_t>(2, matrix.cols())); });

    out.metrics = compute_metrics(cfg, prepared.features, cohort.records, labels);

    const auto rules = stage("guidance", [&] {
        return cfg.rules_path ? rules_from_json(nlohmann::json::parse(read_file(*cfg.rules_path)))
                              : default_rules();
    });
    out.profiles = stage("guidance", [&] { return profile_clusters(cohort.records, labels, out.k); });
    out.mapping = stage("guidance", [&] { return map_clusters_to_jobs(out.profiles, rules); });
    const auto report = stage("guidance", [&] {
        return render_report(out.profiles, out.mapping, prepared.scaler, out.metrics);
    });

    std::vector<AssignmentRow> rows;
    for (std::size_t i = 0; i < cohort.records.size(); ++i)
        rows.push_back({cohort.records[i].serial, labels[i], out.mapping.job_for(labels[i])});
    emit(out.written, artifact(cfg, "assignments", "csv"), assignments_csv(rows));

    if (cfg.emit.json) {
        emit(out.written, artifact(cfg, "metrics", "json"), dump(to_json(out.metrics)));
        emit(out.written, artifact(cfg, "report", "json"), dump(report.json));
        emit(out.written, artifact(cfg, "clustering", "json"), dump(to_json(out.clustering)));
        emit(out.written, artifact(cfg, "pca", "json"), dump(to_json(pca_model)));
        emit(out.written, artifact(cfg, "scaler", "json"), dump(to_json(prepared.scaler)));
        emit(out.written, artifact(cfg, "rejections", "json"), dump(rejection_report_json(cohort.rejections)));
        if (curve) {
            auto j = to_json(*curve);
            j["knee"] = out.k;
            emit(out.written, artifact(cfg, "elbow", "json"), dump(j));
        }
        nlohmann::json meta = {
            {"run_id", cfg.run_id},
            {"seeds", seeds.to_json()},
            {"k", out.k},
            {"k_source", out.k_from_knee ? "knee" : "fixed"},
            {"k_range", {cfg.k_min, cfg.k_max}},
            {"init", init_name(cfg.kmeans.init)},
            {"restarts", cfg.kmeans.restarts},
            {"max_iter", cfg.kmeans.max_iter},
            {"tol", cfg.kmeans.tol},
            {"pca_centered", pca_model.centered},
            {"silhouette_space", cfg.silhouette_space == SilhouetteSpace::Pca ? "pca" : "features"},
            {"records", cohort.records.size()},
            {"rejected", cohort.rejections.size()},
            {"scaler_clamps", clamp_warnings_json(prepared.features)},
            {"source", cfg.input ? nlohmann::json(cfg.input->filename().string())
                                 : nlohmann::json(cfg.synthetic->preset)},
        };
        emit(out.written, artifact(cfg, "meta", "json"), dump(meta));
    }
    if (curve) emit(out.written, artifact(cfg, "elbow", "csv"), elbow_csv(*curve));
    if (cfg.emit.text) emit(out.written, artifact(cfg, "report", "txt"), report.text);
    if (cfg.emit.svg) {
        stage("viz", [&] {
            const auto hulls = cluster_hulls(z, labels, out.k);
            emit(out.written, artifact(cfg, "scatter", "svg"),
                 render_scatter(z, labels, hulls, "K-means clusters on the first two principal components"));
            for (const auto& p : out.profiles)
                emit(out.written, artifact(cfg, "radar_" + std::to_string(p.cluster_id), "svg"),
                     render_radar(radar_vector(p, prepared.scaler),
                                  "Cluster " + std::to_string(p.cluster_id) + " (" +
                                      std::string(job_name(out.mapping.job_for(p.cluster_id))) + ")"));
        });
    }
    return out;
}

std::filesystem::path cmd_synth(const RunConfig& cfg) {
    const auto cohort = load_cohort(cfg);
    const auto path = artifact(cfg, "cohort", "csv");
    write_file(path, serialize_records(cohort.records));
    return path;
}

MetricsOutcome cmd_metrics(const RunConfig& cfg) {
    if (!cfg.assignments_path) throw InvalidConfig("metrics needs an assignments file");
    const auto cohort = load_cohort(cfg);
    const auto rows = stage("metrics", [&] { return parse_assignments(read_file(*cfg.assignments_path)); });

    std::map<std::uint64_t, std::size_t> cluster_of;
    for (const auto& r : rows) cluster_of[r.serial] = r.cluster;
    std::vector<StudentRecord> matched;
    std::vector<std::size_t> labels;
    for (const auto& rec : cohort.records) {
        const auto it = cluster_of.find(rec.serial);
        if (it == cluster_of.end()) continue;
        matched.push_back(rec);
        labels.push_back(it->second);
    }
    if (matched.size() != rows.size())
        throw StageError("metrics", LengthMismatch(std::to_string(rows.size()) + " assignments but only " +
                                                   std::to_string(matched.size()) + " match cohort serials"));

    const auto prepared = prepare(cfg, matched);
    MetricsOutcome out;
    out.metrics = compute_metrics(cfg, prepared.features, matched, labels);
    emit(out.written, artifact(cfg, "metrics", "json"), dump(to_json(out.metrics)));
    return out;
}

std::string assignments_csv(std::span<const AssignmentRow> rows) {
    std::string out = "serial,cluster,recommended_job\n";
    for (const auto& r : rows) {
        out += std::to_string(r.serial) + "," + std::to_string(r.cluster) + ",";
        if (r.recommended_job) out += job_name(*r.recommended_job);
        out += "\n";
    }
    return out;
}

std::vector<AssignmentRow> parse_assignments(std::string_view text) {
    std::vector<AssignmentRow> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        auto line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line_no == 1) {
            if (!line.starts_with("serial,cluster"))
                throw MalformedRow("line 1: expected header 'serial,cluster[,recommended_job]'");
            continue;
        }
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2 || fields.size() > 3)
            throw MalformedRow("line " + std::to_string(line_no) + ": expected 2 or 3 fields");

        AssignmentRow row;
        const auto parse_uint = [&](std::string_view f, auto& v) {
            const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || p != f.data() + f.size())
                throw MalformedRow("line " + std::to_string(line_no) + ": bad integer '" + std::string(f) + "'");
        };
        parse_uint(fields[0], row.serial);
        parse_uint(fields[1], row.cluster);
        if (fields.size() == 3 && !fields[2].empty()) {
            row.recommended_job = job_from_name(fields[2]);
            if (!row.recommended_job)
                throw MalformedRow("line " + std::to_string(line_no) + ": unknown job '" + std::string(fields[2]) + "'");
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace cohortkm
