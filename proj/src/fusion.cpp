#include "qrouter/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace qrouter::fusion {

using nlohmann::json;

namespace {

// Tolerates rounding in weight sums such as 3 * (1/6).
constexpr double kCumulativeSlack = 1e-12;

void check_lengths(std::span<const double> scores, std::span<const double> weights) {
    if (scores.empty()) throw Error("fusion: empty score list");
    if (scores.size() != weights.size()) throw Error("fusion: scores and weights differ in length");
}

}  // namespace

const char* to_string(FusionMethod method) {
    return method == FusionMethod::WeightedMedian ? "weighted_median" : "weighted_mean";
}

FusionMethod choose_method(std::span<const double> scores) {
    if (scores.empty()) throw Error("choose_method: empty score list");
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
    return (*mx - *mn) > kRangeGate ? FusionMethod::WeightedMedian : FusionMethod::WeightedMean;
}

double weighted_mean(std::span<const double> scores, std::span<const double> weights) {
    check_lengths(scores, weights);
    double acc = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) acc += weights[i] * scores[i];
    return acc;
}

double weighted_median(std::span<const double> scores, std::span<const double> weights) {
    check_lengths(scores, weights);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double cumulative = 0.0;
    for (std::size_t i : order) {
        cumulative += weights[i];
        if (cumulative >= 0.5 - kCumulativeSlack) return scores[i];
    }
    return scores[order.back()];
}

double fuse(FusionMethod method, std::span<const double> scores, std::span<const double> weights) {
    return method == FusionMethod::WeightedMedian ? weighted_median(scores, weights) : weighted_mean(scores, weights);
}

int final_score(double fused) {
    if (!std::isfinite(fused)) throw Error("final_score: non-finite fused score");
    return static_cast<int>(std::clamp(std::round(fused), 0.0, 100.0));
}

double confidence(std::span<const double> scores, std::span<const double> weights) {
    check_lengths(scores, weights);
    const double mean = weighted_mean(scores, weights);
    double var = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) var += weights[i] * (scores[i] - mean) * (scores[i] - mean);
    const double sd = std::sqrt(std::max(var, 0.0));
    return std::clamp(1.0 - std::min(1.0, sd / 50.0), 0.0, 1.0);
}

std::string truncate_summary(const std::string& text, std::size_t limit) {
    if (text.size() <= limit) return text;
    const std::string ellipsis = "...";
    std::string head = text.substr(0, limit - ellipsis.size());
    const auto cut = head.find_last_of(' ');
    if (cut != std::string::npos && cut > 0) head.resize(cut);
    while (!head.empty() && (head.back() == ' ' || head.back() == ',' || head.back() == ';')) head.pop_back();
    return head + ellipsis;
}

namespace {

std::string method_phrase(const std::string& method) {
    if (method == "single-expert") return "single expert";
    if (method == "weighted_median") return "weighted median";
    return "weighted mean";
}

}  // namespace

QualityReport build_report(const routing::RoutingPlan& plan, std::span<const double> scores,
                           const ReportContext& ctx) {
    if (plan.chosen_experts.empty()) throw Error("build_report: routing plan has no experts");
    if (plan.chosen_experts.size() != scores.size() || plan.weights.size() != scores.size()) {
        throw Error("build_report: plan and scores are inconsistent");
    }

    std::string method;
    double fused;
    if (plan.tier == 0) {
        method = "single-expert";
        fused = scores[0];
    } else {
        const FusionMethod m = choose_method(scores);
        method = to_string(m);
        fused = fuse(m, scores, plan.weights);
    }
    const auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());

    QualityReport r;
    r.final_score = final_score(fused);
    r.chosen_experts = plan.chosen_experts;
    r.confidence = confidence(scores, plan.weights);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        PerModel pm;
        pm.name = plan.chosen_experts[i];
        pm.score = scores[i];
        pm.weight = plan.weights[i];
        pm.specialty_match = i < ctx.specialty.size() ? ctx.specialty[i] : "";
        pm.notes = i < ctx.expert_notes.size() ? ctx.expert_notes[i] : "";
        r.per_model.push_back(std::move(pm));
    }

    std::vector<std::string> issues = ctx.detected_issues;
    std::size_t flagged_clips = 0;
    if (ctx.localization && ctx.localization->contains("clips")) {
        for (const auto& clip : (*ctx.localization)["clips"]) {
            ++flagged_clips;
            const std::string cat = clip.value("category", "none");
            if (cat != "none" && std::find(issues.begin(), issues.end(), cat) == issues.end()) issues.push_back(cat);
        }
    }

    r.evidence = json{{"keyframes", ctx.keyframes},
                      {"detected_issues", issues},
                      {"factors", ctx.factors},
                      {"localization", ctx.localization ? *ctx.localization : json(nullptr)}};

    json reasons = json::object();
    for (std::size_t i = 0; i < plan.chosen_experts.size(); ++i) {
        reasons[plan.chosen_experts[i]] = i < plan.reasons.size() ? plan.reasons[i] : "";
    }
    std::vector<std::string> actions;
    if (*mx - *mn > kRangeGate) actions.push_back("review expert disagreement before trusting the score");
    if (plan.tier < 2 && r.final_score < 50) actions.push_back("run tier 2 artifact localization");
    if (flagged_clips > 0) actions.push_back("inspect heatmaps of flagged clips");
    if (!ctx.expert_failures.empty()) actions.push_back("check failed expert endpoints");
    if (actions.empty()) actions.push_back("none");

    r.diagnostics = json{{"tier", plan.tier},
                         {"video_type", routing::to_string(ctx.video_type)},
                         {"score_range", *mx - *mn},
                         {"fusion_method", method},
                         {"fused_raw", fused},
                         {"routing_reasons", reasons},
                         {"expert_failures", ctx.expert_failures},
                         {"suggested_next_actions", actions}};

    std::ostringstream summary;
    summary << "Score " << r.final_score << "/100 from " << scores.size() << (scores.size() == 1 ? " expert" : " experts")
            << " via " << method_phrase(method) << "; ";
    if (issues.empty()) {
        summary << "no major issues detected.";
    } else {
        summary << "top issue: " << issues.front();
        if (flagged_clips > 0) summary << " in " << flagged_clips << (flagged_clips == 1 ? " clip" : " clips");
        summary << ".";
    }
    r.summary_en = truncate_summary(summary.str());

    validate_report(to_json(r));
    return r;
}

json to_json(const QualityReport& r) {
    json per_model = json::array();
    for (const auto& pm : r.per_model) {
        per_model.push_back({{"name", pm.name},
                             {"score", pm.score},
                             {"weight", pm.weight},
                             {"specialty_match", pm.specialty_match},
                             {"notes", pm.notes}});
    }
    return json{{"final_score", r.final_score},   {"summary_en", r.summary_en}, {"chosen_experts", r.chosen_experts},
                {"per_model", per_model},         {"evidence", r.evidence},     {"diagnostics", r.diagnostics},
                {"confidence", r.confidence}};
}

QualityReport report_from_json(const json& doc) {
    validate_report(doc);
    QualityReport r;
    r.final_score = doc["final_score"].get<int>();
    r.summary_en = doc["summary_en"].get<std::string>();
    r.chosen_experts = doc["chosen_experts"].get<std::vector<std::string>>();
    for (const auto& pm : doc["per_model"]) {
        r.per_model.push_back({pm.at("name").get<std::string>(), pm.at("score").get<double>(), pm.at("weight").get<double>(),
                               pm.at("specialty_match").get<std::string>(), pm.at("notes").get<std::string>()});
    }
    r.evidence = doc["evidence"];
    r.diagnostics = doc["diagnostics"];
    r.confidence = doc["confidence"].get<double>();
    return r;
}

void validate_report(const json& doc) {
    if (!doc.is_object()) throw Error("report must be a JSON object");
    std::set<std::string> expected(std::begin(kReportFields), std::end(kReportFields));
    for (const auto& [k, v] : doc.items()) {
        if (!expected.count(k)) throw Error("report has unexpected field '" + k + "'");
    }
    for (const auto& k : expected) {
        if (!doc.contains(k)) throw Error("report is missing field '" + k + "'");
    }
    if (!doc["final_score"].is_number_integer()) throw Error("final_score must be an integer");
    const auto fs = doc["final_score"].get<long long>();
    if (fs < 0 || fs > 100) throw Error("final_score outside [0, 100]");
    if (!doc["summary_en"].is_string() || doc["summary_en"].get<std::string>().size() > kSummaryLimit) {
        throw Error("summary_en must be a string of at most 120 characters");
    }
    if (!doc["chosen_experts"].is_array()) throw Error("chosen_experts must be an array");
    if (!doc["per_model"].is_array()) throw Error("per_model must be an array");
    for (const auto& pm : doc["per_model"]) {
        for (const char* key : {"name", "score", "weight", "specialty_match", "notes"}) {
            if (!pm.contains(key)) throw Error(std::string("per_model entry lacks '") + key + "'");
        }
    }
    if (!doc["evidence"].is_object()) throw Error("evidence must be an object");
    if (!doc["diagnostics"].is_object()) throw Error("diagnostics must be an object");
    if (!doc["confidence"].is_number()) throw Error("confidence must be a number");
    const double c = doc["confidence"].get<double>();
    if (!(c >= 0.0 && c <= 1.0)) throw Error("confidence outside [0, 1]");
}

}  // namespace qrouter::fusion
