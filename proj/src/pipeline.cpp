#include "qrouter/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <set>

namespace qrouter::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

ExtractorParams extractor_params(const RunConfig& config) {
    ExtractorParams p;
    p.weights = config.weights;
    p.hysteresis = config.hysteresis;
    p.budget = config.budget;
    p.theta_shot = config.theta_shot;
    return p;
}

ExtractorOutput run_extractor(const FrameSequence& seq, const ExtractorParams& params) {
    ExtractorOutput out;
    auto extracted = features::extract_features_with_histograms(seq, params.features);
    out.features = std::move(extracted.matrix);
    out.histograms = std::move(extracted.histograms);
    out.probs = extractor::logistic_score(extractor::robust_normalize(out.features), params.weights);
    out.clips = clips::hysteresis_clips(out.probs, params.hysteresis);
    out.selected = selection::diversified_selection(out.probs, out.histograms, out.features, params.budget,
                                                    params.theta_shot);
    return out;
}

json localization_summary(const LocalizationRun& run, std::size_t frame_count, const fs::path& base) {
    auto rel = [&](const fs::path& p) { return p.lexically_relative(base).generic_string(); };
    json detected = json::array();
    for (const auto& c : run.extracted.clips) detected.push_back({c.start, c.end});
    json flagged = json::array();
    for (const auto& [t, label] : run.labels) {
        if (label != clients::ArtifactLabel::None) flagged.push_back({{"frame", t}, {"label", clients::to_string(label)}});
    }
    json clips_out = json::array();
    for (const auto& r : run.output.results) {
        clips_out.push_back({{"start", r.clip.start},
                             {"end", r.clip.end},
                             {"category", clients::to_string(r.label)},
                             {"severity", r.severity},
                             {"pair", {r.pair_first, r.pair_second}},
                             {"heatmap", rel(r.heatmap_path)},
                             {"overlay", rel(r.overlay_path)}});
    }
    return json{{"frame_count", frame_count},
                {"clips_detected", detected},
                {"selected_frames", run.extracted.selected},
                {"flagged_frames", flagged},
                {"clips", clips_out},
                {"warnings", run.output.warnings}};
}

LocalizationRun run_localization(const FrameSequence& seq, const ExtractorParams& params,
                                 const clients::FrameClassifier& classifier,
                                 const localization::FlowEstimator& flow,
                                 const localization::PerceptualMetric& metric, double alpha, const fs::path& out_dir) {
    ensure_writable_dir(out_dir);
    LocalizationRun run;
    run.extracted = run_extractor(seq, params);
    run.labels = localization::vlm_filter(run.extracted.selected, seq, classifier);
    run.retained = localization::restrict_clips(run.extracted.clips, run.labels);
    run.output = localization::localize(seq, run.retained, run.labels, flow, metric, {alpha}, out_dir);
    run.summary = localization_summary(run, seq.size(), out_dir);

    std::ofstream out(out_dir / "summary.json", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / "summary.json").string());
    out << run.summary.dump(2) << "\n";
    return run;
}

routing::VideoMeta read_video_meta(const fs::path& video_dir) {
    routing::VideoMeta meta;
    meta.video_ref = video_dir.lexically_normal().filename().string();
    if (meta.video_ref.empty()) meta.video_ref = video_dir.lexically_normal().parent_path().filename().string();
    if (meta.video_ref.empty()) meta.video_ref = video_dir.string();
    const fs::path path = video_dir / "meta.json";
    if (!fs::exists(path)) return meta;
    std::ifstream in(path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw Error("malformed " + path.string() + ": " + e.what());
    }
    auto opt = [&](const char* key) -> std::optional<std::string> {
        if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
        if (!doc[key].is_string()) throw Error(std::string("meta.json field '") + key + "' must be a string");
        return doc[key].get<std::string>();
    };
    meta.video_type = opt("video_type");
    meta.description = opt("description");
    meta.text_prompt = opt("text_prompt");
    return meta;
}

void ensure_writable_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    const fs::path probe = dir / ".qrouter_write_probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!out) throw IoError("output directory is not writable: " + dir.string());
    }
    fs::remove(probe, ec);
}

Pipeline::Pipeline(RunConfig config) : config_(std::move(config)) { validate(config_); }

clients::Endpoint Pipeline::endpoint(const std::string& url) const {
    return {url, config_.timeout, config_.bearer_token};
}

namespace {

class UnconfiguredExpert final : public clients::ExpertClient {
public:
    explicit UnconfiguredExpert(std::string name) : name_(std::move(name)) {}
    clients::ExpertResponse score(const clients::ExpertRequest&) const override {
        throw clients::ClientError(clients::ClientErrorKind::Transport, "no endpoint configured for " + name_);
    }

private:
    std::string name_;
};

}  // namespace

std::unique_ptr<clients::ExpertClient> Pipeline::expert_client(const std::string& name) const {
    const routing::ModelCard& card = config_.pool.at(name);
    auto it = config_.experts.find(name);
    if (config_.mock) {
        std::optional<double> fixed;
        if (it != config_.experts.end()) fixed = it->second.mock_score;
        return std::make_unique<clients::MockExpert>(name, config_.seed, fixed,
                                                     card.role == routing::ScoringRole::ExplanationOnly);
    }
    if (it == config_.experts.end() || it->second.endpoint.empty()) return std::make_unique<UnconfiguredExpert>(name);
    return std::make_unique<clients::HttpExpertClient>(endpoint(it->second.endpoint));
}

std::unique_ptr<clients::FrameClassifier> Pipeline::frame_classifier() const {
    if (config_.mock) {
        return std::make_unique<clients::MockFrameClassifier>(config_.mock_vlm_response, config_.mock_vlm_responses);
    }
    if (config_.vlm_endpoint.empty()) throw ConfigError("vlm.endpoint is required outside mock mode");
    return std::make_unique<clients::HttpFrameClassifier>(endpoint(config_.vlm_endpoint));
}

std::unique_ptr<routing::VideoClassifier> Pipeline::video_classifier() const {
    if (!config_.mock && !config_.classify_endpoint.empty()) {
        return std::make_unique<clients::HttpVideoClassifier>(endpoint(config_.classify_endpoint));
    }
    return std::make_unique<routing::StubVideoClassifier>(config_.default_video_type);
}

std::unique_ptr<localization::PerceptualMetric> Pipeline::perceptual_metric() const {
    if (!config_.mock && !config_.metric_endpoint.empty()) {
        return std::make_unique<localization::RemotePerceptualMetric>(endpoint(config_.metric_endpoint));
    }
    return std::make_unique<localization::ProxyPerceptualMetric>();
}

namespace {

struct ExpertOutcome {
    std::string name;
    std::optional<clients::ExpertResponse> response;
    std::string error;
};

std::vector<ExpertOutcome> call_experts(const Pipeline& p, const std::vector<std::string>& names,
                                        const clients::ExpertRequest& request) {
    std::vector<std::future<ExpertOutcome>> pending;
    for (const auto& name : names) {
        pending.push_back(std::async(std::launch::async, [&p, name, request] {
            ExpertOutcome o{name, std::nullopt, ""};
            try {
                o.response = p.expert_client(name)->score(request);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
            return o;
        }));
    }
    std::vector<ExpertOutcome> out;
    for (auto& f : pending) out.push_back(f.get());
    return out;
}

constexpr double kIssueFactorThreshold = 0.5;

}  // namespace

fusion::QualityReport Pipeline::assess(const fs::path& video_dir, const fs::path& out_dir) const {
    const FrameSequence seq = load_frame_dir(video_dir);
    const routing::VideoMeta meta = read_video_meta(video_dir);
    const routing::VideoType vtype = routing::classify_video(meta, *video_classifier());
    const routing::WeightVector base = routing::baseline_weights(vtype, config_.pool, config_.priors);

    clients::ExpertRequest request{meta.video_ref, vtype, meta.text_prompt};
    fusion::ReportContext ctx;
    ctx.video_type = vtype;

    routing::RoutingPlan plan;
    std::vector<double> scores;

    if (config_.tier == 0) {
        plan = routing::tier0_route(base, config_.pool, vtype);
        const auto outcome = call_experts(*this, plan.chosen_experts, request).front();
        if (!outcome.response) throw Error("expert " + outcome.name + " failed: " + outcome.error);
        scores.push_back(outcome.response->score);
    } else {
        std::vector<std::string> names;
        for (const auto& e : base) names.push_back(e.name);
        std::vector<std::string> explainers;
        for (const auto& card : config_.pool.cards()) {
            if (card.role == routing::ScoringRole::ExplanationOnly) explainers.push_back(card.name);
        }
        std::vector<std::string> all = names;
        all.insert(all.end(), explainers.begin(), explainers.end());
        const auto outcomes = call_experts(*this, all, request);

        std::map<std::string, double> score_of;
        std::set<std::string> issues;
        for (const auto& o : outcomes) {
            if (!o.response) {
                ctx.expert_failures.push_back(o.name + ": " + o.error);
                continue;
            }
            const bool explainer = std::find(explainers.begin(), explainers.end(), o.name) != explainers.end();
            if (explainer) {
                for (const auto& [factor, value] : o.response->factors) {
                    ctx.factors[o.name][factor] = value;
                    if (value >= kIssueFactorThreshold) issues.insert(factor);
                }
            } else {
                score_of[o.name] = o.response->score;
            }
        }
        routing::WeightVector live;
        for (const auto& e : base) {
            if (score_of.count(e.name)) live.push_back(e);
        }
        if (live.empty()) throw Error("all experts failed; no fusable score");
        const auto adjusted = routing::adjust_weights(live, score_of, config_.pool, vtype, issues);
        plan = routing::weighted_plan(config_.tier, adjusted, config_.pool, vtype);
        for (const auto& name : plan.chosen_experts) scores.push_back(score_of.at(name));
        ctx.detected_issues.assign(issues.begin(), issues.end());

        if (config_.tier == 2) {
            const auto classifier = frame_classifier();
            const auto metric = perceptual_metric();
            const localization::BlockMatchingFlow flow;
            const fs::path loc_dir = out_dir / "localization";
            const auto run = run_localization(seq, extractor_params(config_), *classifier, flow, *metric,
                                              config_.alpha, loc_dir);
            ctx.localization = localization_summary(run, seq.size(), out_dir);
            ctx.keyframes = run.extracted.selected;
        }
    }

    for (const auto& name : plan.chosen_experts) {
        const auto& card = config_.pool.at(name);
        ctx.specialty.push_back(routing::to_string(card.match(vtype)));
        ctx.expert_notes.push_back(card.notes);
    }
    return fusion::build_report(plan, scores, ctx);
}

fusion::QualityReport Pipeline::score(const fs::path& video_dir, const fs::path& out_dir) const {
    ensure_writable_dir(out_dir);
    fusion::QualityReport report = assess(video_dir, out_dir);
    std::ofstream out(out_dir / "report.json", std::ios::trunc);
    if (!out) throw IoError("cannot write " + (out_dir / "report.json").string());
    out << dump_report(report);
    return report;
}

LocalizationRun Pipeline::localize(const fs::path& video_dir, const fs::path& out_dir) const {
    ensure_writable_dir(out_dir);
    const FrameSequence seq = load_frame_dir(video_dir);
    const auto classifier = frame_classifier();
    const auto metric = perceptual_metric();
    const localization::BlockMatchingFlow flow;
    return run_localization(seq, extractor_params(config_), *classifier, flow, *metric, config_.alpha, out_dir);
}

eval::EvalResult Pipeline::evaluate(const fs::path& manifest, const fs::path& out_dir) const {
    const auto rows = eval::read_manifest(manifest);
    ensure_writable_dir(out_dir);
    eval::Predictor predictor;
    if (config_.predictor == "identity") {
        predictor = [](const eval::ManifestRow& row) { return row.mos; };
    } else {
        predictor = [&](const eval::ManifestRow& row) {
            // tier-2 artifacts land in a per-video directory
            const fs::path video_out = out_dir / "videos" / row.video_dir.lexically_normal().filename();
            return static_cast<double>(assess(row.video_dir, video_out).final_score);
        };
    }
    const eval::EvalResult result = eval::evaluate_manifest(rows, predictor);

    const json doc{{"plcc", result.plcc},
                   {"srcc", result.srcc},
                   {"n", result.n},
                   {"skipped", result.skipped},
                   {"warnings", result.warnings}};
    std::ofstream js(out_dir / "eval.json", std::ios::trunc);
    js << doc.dump(2) << "\n";
    std::ofstream txt(out_dir / "eval.txt", std::ios::trunc);
    txt << eval::format_table(result);
    if (!js || !txt) throw IoError("cannot write evaluation results to " + out_dir.string());
    return result;
}

std::string dump_report(const fusion::QualityReport& report) { return fusion::to_json(report).dump(2) + "\n"; }

}  // namespace qrouter::pipeline
