#include "qrouter/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

namespace qrouter {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) throw ConfigError("unknown config key '" + where + "." + k + "'");
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
    }
}

routing::ModelCard card_from_json(const json& j) {
    check_keys(j, {"name", "role", "confidence_prior", "specialties", "insensitive_to", "notes"}, "cards[]");
    routing::ModelCard card;
    card.name = get<std::string>(j, "name", "cards[]");
    if (j.contains("role")) {
        const auto role = get<std::string>(j, "role", "cards[]");
        if (role == "scorer") {
            card.role = routing::ScoringRole::Scorer;
        } else if (role == "explanation") {
            card.role = routing::ScoringRole::ExplanationOnly;
        } else {
            throw ConfigError("card role must be 'scorer' or 'explanation'");
        }
    }
    if (j.contains("confidence_prior")) card.confidence_prior = get<double>(j, "confidence_prior", "cards[]");
    if (j.contains("specialties")) {
        for (const auto& [type, grade] : j["specialties"].items()) {
            card.specialties[routing::parse_video_type(type)] = routing::parse_match_grade(grade.get<std::string>());
        }
    }
    if (j.contains("insensitive_to")) {
        for (const auto& issue : j["insensitive_to"]) card.insensitive_to.insert(issue.get<std::string>());
    }
    if (j.contains("notes")) card.notes = get<std::string>(j, "notes", "cards[]");
    return card;
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.tier < 0 || c.tier > 2) throw ConfigError("tier must be 0, 1 or 2");
    try {
        clips::validate(c.hysteresis);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!(c.theta_shot > 0.0)) throw ConfigError("theta_shot must be > 0");
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    if (c.timeout.count() <= 0) throw ConfigError("timeout must be positive");
    for (double w : c.weights.w) {
        if (!std::isfinite(w)) throw ConfigError("scoring weights must be finite");
    }
    if (!std::isfinite(c.weights.b)) throw ConfigError("scoring bias must be finite");
    if (c.pool.empty()) throw ConfigError("expert pool is empty");
    for (const auto& [name, s] : c.experts) {
        if (!c.pool.find(name)) throw ConfigError("settings given for unregistered expert '" + name + "'");
        if (s.mock_score && !(*s.mock_score >= 0.0 && *s.mock_score <= 100.0)) {
            throw ConfigError("mock_score for '" + name + "' must lie in [0, 100]");
        }
    }
    if (c.predictor != "pipeline" && c.predictor != "identity") throw ConfigError("predictor must be 'pipeline' or 'identity'");
}

RunConfig config_from_json(const json& doc) {
    RunConfig c;
    try {
        check_keys(doc,
                   {"tier", "mock", "seed", "timeout_s", "bearer_token", "default_video_type", "experts", "cards", "priors",
                    "vlm", "metric", "scoring", "thresholds", "budgets", "alpha", "out", "predictor"},
                   "config");
        if (doc.contains("tier")) c.tier = get<int>(doc, "tier", "config");
        if (doc.contains("mock")) c.mock = get<bool>(doc, "mock", "config");
        if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed", "config");
        if (doc.contains("timeout_s")) {
            c.timeout = std::chrono::milliseconds(static_cast<long long>(std::llround(get<double>(doc, "timeout_s", "config") * 1000.0)));
        }
        if (doc.contains("bearer_token")) c.bearer_token = get<std::string>(doc, "bearer_token", "config");
        if (doc.contains("default_video_type")) {
            c.default_video_type = routing::parse_video_type(get<std::string>(doc, "default_video_type", "config"));
        }
        if (doc.contains("cards")) {
            routing::ExpertPool pool;
            for (const auto& card : doc["cards"]) pool.add(card_from_json(card));
            c.pool = std::move(pool);
        }
        if (doc.contains("priors")) {
            routing::BaselinePriors priors;
            for (const auto& [type, row] : doc["priors"].items()) {
                routing::PriorRow r;
                for (const auto& [name, w] : row.items()) r.emplace_back(name, w.get<double>());
                priors.rows[routing::parse_video_type(type)] = std::move(r);
            }
            c.priors = std::move(priors);
        }
        if (doc.contains("experts")) {
            for (const auto& [name, e] : doc["experts"].items()) {
                check_keys(e, {"endpoint", "mock_score"}, "experts." + name);
                ExpertSettings s;
                if (e.contains("endpoint")) s.endpoint = get<std::string>(e, "endpoint", "experts." + name);
                if (e.contains("mock_score")) s.mock_score = get<double>(e, "mock_score", "experts." + name);
                c.experts[name] = s;
            }
        }
        if (doc.contains("vlm")) {
            const auto& v = doc["vlm"];
            check_keys(v, {"endpoint", "classify_endpoint", "mock_response", "mock_responses"}, "vlm");
            if (v.contains("endpoint")) c.vlm_endpoint = get<std::string>(v, "endpoint", "vlm");
            if (v.contains("classify_endpoint")) c.classify_endpoint = get<std::string>(v, "classify_endpoint", "vlm");
            if (v.contains("mock_response")) c.mock_vlm_response = get<std::string>(v, "mock_response", "vlm");
            if (v.contains("mock_responses")) {
                for (const auto& [idx, text] : v["mock_responses"].items()) {
                    c.mock_vlm_responses[std::stoul(idx)] = text.get<std::string>();
                }
            }
        }
        if (doc.contains("metric")) {
            check_keys(doc["metric"], {"endpoint"}, "metric");
            if (doc["metric"].contains("endpoint")) c.metric_endpoint = get<std::string>(doc["metric"], "endpoint", "metric");
        }
        if (doc.contains("scoring")) {
            const auto& s = doc["scoring"];
            check_keys(s, {"weights", "bias"}, "scoring");
            if (s.contains("weights")) {
                const auto w = get<std::vector<double>>(s, "weights", "scoring");
                if (w.size() != features::kFeatureCount) throw ConfigError("scoring.weights must have 7 entries");
                std::copy(w.begin(), w.end(), c.weights.w.begin());
            }
            if (s.contains("bias")) c.weights.b = get<double>(s, "bias", "scoring");
        }
        if (doc.contains("thresholds")) {
            const auto& t = doc["thresholds"];
            check_keys(t, {"tau_high", "tau_low", "l_min", "padding", "theta_shot"}, "thresholds");
            if (t.contains("tau_high")) c.hysteresis.tau_high = get<double>(t, "tau_high", "thresholds");
            if (t.contains("tau_low")) c.hysteresis.tau_low = get<double>(t, "tau_low", "thresholds");
            if (t.contains("l_min")) c.hysteresis.l_min = get<std::size_t>(t, "l_min", "thresholds");
            if (t.contains("padding")) c.hysteresis.padding = get<std::size_t>(t, "padding", "thresholds");
            if (t.contains("theta_shot")) c.theta_shot = get<double>(t, "theta_shot", "thresholds");
        }
        if (doc.contains("budgets")) {
            const auto& b = doc["budgets"];
            check_keys(b, {"k_top", "k_fps"}, "budgets");
            if (b.contains("k_top")) c.budget.k_top = get<std::size_t>(b, "k_top", "budgets");
            if (b.contains("k_fps")) c.budget.k_fps = get<std::size_t>(b, "k_fps", "budgets");
        }
        if (doc.contains("alpha")) c.alpha = get<double>(doc, "alpha", "config");
        if (doc.contains("out")) c.out_dir = get<std::string>(doc, "out", "config");
        if (doc.contains("predictor")) c.predictor = get<std::string>(doc, "predictor", "config");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

std::string expert_env_var(const std::string& expert_name) {
    std::string out = "QROUTER_EXPERT_";
    for (char ch : expert_name) {
        const auto c = static_cast<unsigned char>(ch);
        out.push_back(std::isalnum(c) ? static_cast<char>(std::toupper(c)) : '_');
    }
    return out + "_ENDPOINT";
}

void apply_env_overrides(RunConfig& c, const EnvLookup& env) {
    for (const auto& card : c.pool.cards()) {
        if (auto v = env(expert_env_var(card.name)); v && !v->empty()) c.experts[card.name].endpoint = *v;
    }
    if (auto v = env("QROUTER_VLM_ENDPOINT"); v && !v->empty()) c.vlm_endpoint = *v;
    if (auto v = env("QROUTER_CLASSIFY_ENDPOINT"); v && !v->empty()) c.classify_endpoint = *v;
    if (auto v = env("QROUTER_METRIC_ENDPOINT"); v && !v->empty()) c.metric_endpoint = *v;
}

void apply_process_env(RunConfig& c) {
    apply_env_overrides(c, [](const std::string& name) -> std::optional<std::string> {
        const char* v = std::getenv(name.c_str());
        if (!v) return std::nullopt;
        return std::string(v);
    });
}

}  // namespace qrouter
