#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrouter/routing.hpp"

namespace qrouter::fusion {

enum class FusionMethod { WeightedMean, WeightedMedian };

const char* to_string(FusionMethod method);

inline constexpr double kRangeGate = 20.0;
inline constexpr std::size_t kSummaryLimit = 120;

// Strict: range > 20 selects the weighted median.
FusionMethod choose_method(std::span<const double> scores);

double weighted_mean(std::span<const double> scores, std::span<const double> weights);

// First score (ascending, stable) whose cumulative weight reaches 0.5.
double weighted_median(std::span<const double> scores, std::span<const double> weights);

double fuse(FusionMethod method, std::span<const double> scores, std::span<const double> weights);

// Round half away from zero, clamp to [0, 100].
int final_score(double fused);

// 1 - min(1, weighted std / 50).
double confidence(std::span<const double> scores, std::span<const double> weights);

struct PerModel {
    std::string name;
    double score = 0;
    double weight = 0;
    std::string specialty_match;
    std::string notes;
};

struct QualityReport {
    int final_score = 0;
    std::string summary_en;
    std::vector<std::string> chosen_experts;
    std::vector<PerModel> per_model;
    nlohmann::json evidence = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    double confidence = 0;
};

inline constexpr const char* kReportFields[] = {"final_score", "summary_en", "chosen_experts", "per_model",
                                                "evidence",    "diagnostics", "confidence"};

// Everything build_report needs besides the routing plan and scores.
struct ReportContext {
    routing::VideoType video_type = routing::VideoType::UGC;
    std::vector<std::string> detected_issues;
    std::vector<std::size_t> keyframes;
    nlohmann::json factors = nlohmann::json::object();
    std::optional<nlohmann::json> localization;
    std::vector<std::string> expert_failures;
    std::vector<std::string> expert_notes;  // parallel to plan.chosen_experts
    std::vector<std::string> specialty;     // parallel to plan.chosen_experts
};

// Word-boundary truncation with a trailing "..." when text exceeds the limit.
std::string truncate_summary(const std::string& text, std::size_t limit = kSummaryLimit);

QualityReport build_report(const routing::RoutingPlan& plan, std::span<const double> scores,
                           const ReportContext& context);

nlohmann::json to_json(const QualityReport& report);
QualityReport report_from_json(const nlohmann::json& doc);

// Throws when the document is missing a field, has an extra one, or violates a range.
void validate_report(const nlohmann::json& doc);

}  // namespace qrouter::fusion
