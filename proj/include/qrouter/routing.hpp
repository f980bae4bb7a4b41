#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qrouter/media.hpp"

namespace qrouter::routing {

enum class VideoType { UGC, ShortForm, Gaming, AiGenerated };

const char* to_string(VideoType type);

// Accepts ugc, short-form/social, gaming, cg, aigc and common spellings (case-insensitive).
// CG content maps to Gaming.
VideoType parse_video_type(const std::string& text);

enum class MatchGrade { Full, Partial, None };

const char* to_string(MatchGrade grade);
MatchGrade parse_match_grade(const std::string& text);

// {1, 0.5, 0}
double specialty_value(MatchGrade grade);

enum class ScoringRole { Scorer, ExplanationOnly };

struct ModelCard {
    std::string name;
    std::map<VideoType, MatchGrade> specialties;
    double confidence_prior = 0.5;
    ScoringRole role = ScoringRole::Scorer;
    std::set<std::string> insensitive_to;  // issue classes this expert does not react to
    std::string notes;

    MatchGrade match(VideoType type) const;
};

// Registration-ordered set of model cards with unique names.
class ExpertPool {
public:
    void add(ModelCard card);
    const std::vector<ModelCard>& cards() const { return cards_; }
    const ModelCard* find(const std::string& name) const;
    const ModelCard& at(const std::string& name) const;
    bool empty() const { return cards_.empty(); }
    std::size_t size() const { return cards_.size(); }

private:
    std::vector<ModelCard> cards_;
};

// COVER, DOVER, UVQ, MaxVQA (explanation only), ModularBVQA, T2VQA.
ExpertPool default_pool();

using PriorRow = std::vector<std::pair<std::string, double>>;

struct BaselinePriors {
    std::map<VideoType, PriorRow> rows;
};

// Default prior table. Names are kept as listed; aliases resolve at lookup.
BaselinePriors default_priors();

// Resolves table aliases such as "Modular" and "COVER-Technical".
std::string canonical_expert_name(const std::string& name);

struct ExpertWeight {
    std::string name;
    double weight = 0;
};

using WeightVector = std::vector<ExpertWeight>;

// Priors restricted to registered scorers (registration order), renormalized to sum 1.
WeightVector baseline_weights(VideoType type, const ExpertPool& pool, const BaselinePriors& priors);

inline constexpr double kDefaultTrim = 0.2;
inline constexpr double kAgreementScale = 25.0;

double trimmed_mean(std::span<const double> scores, double trim_fraction = kDefaultTrim);

struct AdjustmentTerms {
    double specialty_match = 0;
    double agreement_boost = 0;
    double confidence_prior = 0;
    double oob_penalty = 0;

    double multiplier() const {
        return 1.0 + 0.5 * specialty_match + 0.3 * agreement_boost + 0.2 * confidence_prior - 0.3 * oob_penalty;
    }
};

double agreement_boost(double score, double reference);

// base_i * multiplier_i, renormalized.
WeightVector apply_adjustments(const WeightVector& base, std::span<const AdjustmentTerms> terms);

struct AdjustedWeights {
    WeightVector weights;
    std::vector<AdjustmentTerms> terms;
    double reference_score = 0;  // trimmed mean
};

AdjustedWeights adjust_weights(const WeightVector& base, const std::map<std::string, double>& scores,
                               const ExpertPool& pool, VideoType type,
                               const std::set<std::string>& detected_issues, double trim_fraction = kDefaultTrim);

struct RoutingPlan {
    int tier = 0;
    std::vector<std::string> chosen_experts;
    std::vector<double> weights;
    std::vector<std::string> reasons;
};

RoutingPlan tier0_route(const WeightVector& base, const ExpertPool& pool, VideoType type);

RoutingPlan weighted_plan(int tier, const AdjustedWeights& adjusted, const ExpertPool& pool, VideoType type);

struct VideoMeta {
    std::string video_ref;
    std::optional<std::string> video_type;
    std::optional<std::string> description;
    std::optional<std::string> text_prompt;
};

class VideoClassifier {
public:
    virtual ~VideoClassifier() = default;
    virtual VideoType classify(const VideoMeta& meta) const = 0;
};

// Maps meta.video_type directly; uses the fallback when the field is absent.
class StubVideoClassifier final : public VideoClassifier {
public:
    explicit StubVideoClassifier(VideoType fallback = VideoType::UGC) : fallback_(fallback) {}
    VideoType classify(const VideoMeta& meta) const override;

private:
    VideoType fallback_;
};

VideoType classify_video(const VideoMeta& meta, const VideoClassifier& classifier);

}  // namespace qrouter::routing
