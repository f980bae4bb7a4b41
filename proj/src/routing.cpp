#include "qrouter/routing.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace qrouter::routing {

namespace {

std::string lower_trim(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return s;
}

std::string fmt2(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

}  // namespace

const char* to_string(VideoType type) {
    switch (type) {
        case VideoType::UGC: return "ugc";
        case VideoType::ShortForm: return "short-form";
        case VideoType::Gaming: return "gaming";
        case VideoType::AiGenerated: return "aigc";
    }
    return "?";
}

VideoType parse_video_type(const std::string& text) {
    const std::string s = lower_trim(text);
    if (s == "ugc" || s == "usergeneratedcontent" || s == "user-generated") return VideoType::UGC;
    if (s == "short-form" || s == "shortform" || s == "short-form/social" || s == "social") return VideoType::ShortForm;
    if (s == "gaming" || s == "cg" || s == "computergraphics") return VideoType::Gaming;
    if (s == "aigc" || s == "ai-generated" || s == "aigenerated" || s == "ai") return VideoType::AiGenerated;
    throw Error("unmappable video type: '" + text + "'");
}

const char* to_string(MatchGrade grade) {
    switch (grade) {
        case MatchGrade::Full: return "full";
        case MatchGrade::Partial: return "partial";
        case MatchGrade::None: return "none";
    }
    return "?";
}

MatchGrade parse_match_grade(const std::string& text) {
    const std::string s = lower_trim(text);
    if (s == "full") return MatchGrade::Full;
    if (s == "partial") return MatchGrade::Partial;
    if (s == "none") return MatchGrade::None;
    throw Error("unknown match grade: '" + text + "'");
}

double specialty_value(MatchGrade grade) {
    switch (grade) {
        case MatchGrade::Full: return 1.0;
        case MatchGrade::Partial: return 0.5;
        case MatchGrade::None: return 0.0;
    }
    return 0.0;
}

MatchGrade ModelCard::match(VideoType type) const {
    auto it = specialties.find(type);
    return it == specialties.end() ? MatchGrade::None : it->second;
}

void ExpertPool::add(ModelCard card) {
    if (card.name.empty()) throw Error("model card needs a name");
    if (find(card.name)) throw Error("duplicate expert name: " + card.name);
    if (!(card.confidence_prior >= 0.0 && card.confidence_prior <= 1.0)) {
        throw Error("confidence_prior must lie in [0, 1] for " + card.name);
    }
    cards_.push_back(std::move(card));
}

const ModelCard* ExpertPool::find(const std::string& name) const {
    for (const auto& c : cards_) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

const ModelCard& ExpertPool::at(const std::string& name) const {
    const ModelCard* c = find(name);
    if (!c) throw Error("unknown expert: " + name);
    return *c;
}

ExpertPool default_pool() {
    using enum VideoType;
    using enum MatchGrade;
    ExpertPool pool;
    pool.add({"COVER",
              {{UGC, Full}, {ShortForm, Full}, {Gaming, Full}, {AiGenerated, Partial}},
              0.5, ScoringRole::Scorer, {},
              "technical, aesthetic and semantic branches; compression and composition"});
    pool.add({"DOVER",
              {{UGC, Full}, {ShortForm, Partial}, {Gaming, Partial}},
              0.5, ScoringRole::Scorer, {},
              "consistency reference overlapping COVER"});
    pool.add({"UVQ",
              {{UGC, Full}, {ShortForm, Full}, {Gaming, Partial}, {AiGenerated, Partial}},
              0.5, ScoringRole::Scorer, {},
              "robust baseline when the domain is unclear"});
    pool.add({"MaxVQA",
              {{UGC, Full}, {ShortForm, Partial}, {Gaming, Partial}, {AiGenerated, Partial}},
              0.5, ScoringRole::ExplanationOnly, {},
              "explanation factors and weight hints only"});
    pool.add({"ModularBVQA",
              {{UGC, Partial}, {ShortForm, Partial}, {Gaming, Partial}, {AiGenerated, Partial}},
              0.5, ScoringRole::Scorer, {"noise", "shake", "exposure"},
              "lightweight fallback; modest sensitivity to capture distortions"});
    pool.add({"T2VQA",
              {{AiGenerated, Full}},
              0.5, ScoringRole::Scorer, {},
              "text-to-video alignment for generated content"});
    return pool;
}

BaselinePriors default_priors() {
    using enum VideoType;
    BaselinePriors p;
    p.rows[UGC] = {{"UVQ", 0.25}, {"COVER", 0.25}, {"ModularBVQA", 0.15}, {"RQ-VQA", 0.10}, {"MaxVQA", 0.15}};
    p.rows[ShortForm] = {{"RQ-VQA", 0.30}, {"COVER", 0.30}, {"UVQ", 0.20}, {"Modular", 0.10}, {"MaxVQA", 0.10}};
    p.rows[Gaming] = {{"COVER-Technical", 0.35}, {"UVQ", 0.25}, {"Modular", 0.20}, {"MaxVQA", 0.10}, {"RQ-VQA", 0.05}};
    p.rows[AiGenerated] = {{"T2VQA", 0.35}, {"COVER", 0.20}, {"UVQ", 0.15},
                           {"MaxVQA", 0.15}, {"Modular", 0.10}, {"RQ-VQA", 0.05}};
    return p;
}

std::string canonical_expert_name(const std::string& name) {
    if (name == "Modular") return "ModularBVQA";
    if (name == "COVER-Technical") return "COVER";
    if (name == "DOVER++") return "DOVER";
    return name;
}

WeightVector baseline_weights(VideoType type, const ExpertPool& pool, const BaselinePriors& priors) {
    if (pool.empty()) throw Error("baseline_weights: empty expert pool");
    std::map<std::string, double> prior_of;
    if (auto it = priors.rows.find(type); it != priors.rows.end()) {
        for (const auto& [name, w] : it->second) {
            if (w < 0) throw Error("negative prior for " + name);
            prior_of[canonical_expert_name(name)] += w;
        }
    }
    WeightVector out;
    double total = 0.0;
    for (const auto& card : pool.cards()) {
        if (card.role != ScoringRole::Scorer) continue;
        auto it = prior_of.find(card.name);
        if (it == prior_of.end() || it->second <= 0.0) continue;
        out.push_back({card.name, it->second});
        total += it->second;
    }
    if (out.empty() || total <= 0.0) {
        throw Error(std::string("no scorer expert has a prior for video type ") + to_string(type));
    }
    for (auto& e : out) e.weight /= total;
    return out;
}

double trimmed_mean(std::span<const double> scores, double trim_fraction) {
    if (scores.empty()) throw Error("trimmed_mean of empty list");
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) throw Error("trim fraction must lie in [0, 0.5)");
    std::vector<double> s(scores.begin(), scores.end());
    std::sort(s.begin(), s.end());
    const auto drop = static_cast<std::size_t>(std::floor(trim_fraction * static_cast<double>(s.size())));
    double sum = 0.0;
    for (std::size_t i = drop; i < s.size() - drop; ++i) sum += s[i];
    return sum / static_cast<double>(s.size() - 2 * drop);
}

double agreement_boost(double score, double reference) {
    return std::max(0.0, 1.0 - std::abs(score - reference) / kAgreementScale);
}

WeightVector apply_adjustments(const WeightVector& base, std::span<const AdjustmentTerms> terms) {
    if (base.size() != terms.size()) throw Error("apply_adjustments: size mismatch");
    WeightVector out = base;
    double total = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].weight < 0) throw Error("negative base weight for " + out[i].name);
        out[i].weight *= terms[i].multiplier();
        total += out[i].weight;
    }
    if (total <= 0.0) throw Error("apply_adjustments: all adjusted weights are zero");
    for (auto& e : out) e.weight /= total;
    return out;
}

AdjustedWeights adjust_weights(const WeightVector& base, const std::map<std::string, double>& scores,
                               const ExpertPool& pool, VideoType type,
                               const std::set<std::string>& detected_issues, double trim_fraction) {
    std::vector<double> values;
    for (const auto& e : base) {
        auto it = scores.find(e.name);
        if (it == scores.end()) throw Error("missing score for weighted expert " + e.name);
        values.push_back(it->second);
    }
    AdjustedWeights out;
    out.reference_score = trimmed_mean(values, trim_fraction);
    for (std::size_t i = 0; i < base.size(); ++i) {
        const ModelCard& card = pool.at(base[i].name);
        AdjustmentTerms t;
        const MatchGrade grade = card.match(type);
        t.specialty_match = specialty_value(grade);
        t.agreement_boost = agreement_boost(values[i], out.reference_score);
        t.confidence_prior = card.confidence_prior;
        const bool insensitive = std::any_of(detected_issues.begin(), detected_issues.end(),
                                             [&](const std::string& issue) { return card.insensitive_to.count(issue) > 0; });
        t.oob_penalty = (grade == MatchGrade::None || insensitive) ? 1.0 : 0.0;
        out.terms.push_back(t);
    }
    out.weights = apply_adjustments(base, out.terms);
    return out;
}

RoutingPlan tier0_route(const WeightVector& base, const ExpertPool& pool, VideoType type) {
    if (base.empty() || pool.empty()) throw Error("tier0_route: empty expert pool");
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const ModelCard& card = pool.at(base[i].name);
        const double v = base[i].weight * (1.0 + 0.5 * specialty_value(card.match(type)) + 0.2 * card.confidence_prior);
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    const ModelCard& card = pool.at(base[best].name);
    RoutingPlan plan;
    plan.tier = 0;
    plan.chosen_experts = {card.name};
    plan.weights = {1.0};
    plan.reasons = {"single expert for " + std::string(to_string(type)) + ": prior " + fmt2(base[best].weight) +
                    ", " + to_string(card.match(type)) + " specialty match"};
    return plan;
}

RoutingPlan weighted_plan(int tier, const AdjustedWeights& adjusted, const ExpertPool& pool, VideoType type) {
    RoutingPlan plan;
    plan.tier = tier;
    for (std::size_t i = 0; i < adjusted.weights.size(); ++i) {
        const auto& e = adjusted.weights[i];
        const auto& t = adjusted.terms[i];
        plan.chosen_experts.push_back(e.name);
        plan.weights.push_back(e.weight);
        std::string reason = std::string(to_string(pool.at(e.name).match(type))) + " match for " + to_string(type) +
                             "; agreement " + fmt2(t.agreement_boost);
        if (t.oob_penalty > 0) reason += "; out-of-band penalty";
        plan.reasons.push_back(std::move(reason));
    }
    return plan;
}

VideoType StubVideoClassifier::classify(const VideoMeta& meta) const {
    if (meta.video_type) return parse_video_type(*meta.video_type);
    return fallback_;
}

VideoType classify_video(const VideoMeta& meta, const VideoClassifier& classifier) {
    return classifier.classify(meta);
}

}  // namespace qrouter::routing
