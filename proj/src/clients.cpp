#include "qrouter/clients.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace qrouter::clients {

using nlohmann::json;

const char* to_string(ClientErrorKind kind) {
    switch (kind) {
        case ClientErrorKind::Timeout: return "timeout";
        case ClientErrorKind::Protocol: return "protocol";
        case ClientErrorKind::OutOfRange: return "out-of-range";
        case ClientErrorKind::Transport: return "transport";
    }
    return "?";
}

std::string encode_request(const ExpertRequest& request) {
    if (request.video_ref.empty()) throw ClientError(ClientErrorKind::Protocol, "video_ref must be nonempty");
    json doc{{"video_ref", request.video_ref}};
    if (request.video_type_hint) doc["video_type_hint"] = routing::to_string(*request.video_type_hint);
    if (request.text_prompt) doc["text_prompt"] = *request.text_prompt;
    return doc.dump();
}

ExpertResponse decode_response(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw ClientError(ClientErrorKind::Protocol, std::string("malformed response body: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("score") || !doc["score"].is_number()) {
        throw ClientError(ClientErrorKind::Protocol, "response lacks a numeric 'score'");
    }
    ExpertResponse r;
    r.score = doc["score"].get<double>();
    if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 100.0) {
        throw ClientError(ClientErrorKind::OutOfRange, "score " + doc["score"].dump() + " outside [0, 100]");
    }
    if (doc.contains("factors")) {
        if (!doc["factors"].is_object()) throw ClientError(ClientErrorKind::Protocol, "'factors' must be an object");
        for (const auto& [k, v] : doc["factors"].items()) {
            if (!v.is_number()) throw ClientError(ClientErrorKind::Protocol, "factor '" + k + "' is not numeric");
            r.factors[k] = v.get<double>();
        }
    }
    return r;
}

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme = url.find("://");
    if (url.empty() || scheme == std::string::npos) {
        throw ClientError(ClientErrorKind::Transport, "invalid endpoint url '" + url + "'");
    }
    const auto slash = url.find('/', scheme + 3);
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

}  // namespace

std::string post_json(const Endpoint& endpoint, const std::string& body) {
    const ParsedUrl url = split_url(endpoint.url);
    httplib::Client cli(url.origin);
    if (!cli.is_valid()) throw ClientError(ClientErrorKind::Transport, "unsupported endpoint '" + endpoint.url + "'");
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - secs);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    if (!endpoint.bearer_token.empty()) cli.set_bearer_token_auth(endpoint.bearer_token);

    const auto started = std::chrono::steady_clock::now();
    auto res = cli.Post(url.path, body, "application/json");
    if (!res) {
        const auto err = res.error();
        const auto elapsed = std::chrono::steady_clock::now() - started;
        if (err == httplib::Error::ConnectionTimeout ||
            (err == httplib::Error::Read && elapsed >= endpoint.timeout * 9 / 10)) {
            throw ClientError(ClientErrorKind::Timeout, endpoint.url + " did not answer in time");
        }
        throw ClientError(ClientErrorKind::Transport, endpoint.url + ": " + httplib::to_string(err));
    }
    if (res->status < 200 || res->status >= 300) {
        throw ClientError(ClientErrorKind::Protocol, endpoint.url + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

ExpertResponse HttpExpertClient::score(const ExpertRequest& request) const {
    return decode_response(post_json(endpoint_, encode_request(request)));
}

ExpertResponse score_video(const Endpoint& endpoint, const ExpertRequest& request) {
    return HttpExpertClient(endpoint).score(request);
}

std::uint64_t stable_hash(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

// Uniform in [0, 1) from the top 53 bits.
double unit_from_hash(std::uint64_t h) {
    // FNV leaves low-entropy high bits on short inputs; mix before taking them.
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    h *= 0xc4ceb9fe1a85ec53ull;
    h ^= h >> 33;
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

ExpertResponse MockExpert::score(const ExpertRequest& request) const {
    if (request.video_ref.empty()) throw ClientError(ClientErrorKind::Protocol, "video_ref must be nonempty");
    const std::string key = name_ + '\0' + request.video_ref + '\0' + std::to_string(seed_);
    ExpertResponse r;
    r.score = fixed_score_ ? *fixed_score_ : 100.0 * unit_from_hash(stable_hash(key));
    if (!std::isfinite(r.score) || r.score < 0.0 || r.score > 100.0) {
        throw ClientError(ClientErrorKind::OutOfRange, "mock score outside [0, 100]");
    }
    if (emit_factors_) {
        for (const char* factor : {"banding", "blur", "noise", "blockiness", "exposure"}) {
            r.factors[factor] = unit_from_hash(stable_hash(key + '\0' + factor));
        }
    }
    return r;
}

std::unique_ptr<ExpertClient> mock_expert(const std::string& name, std::uint64_t seed) {
    return std::make_unique<MockExpert>(name, seed);
}

const char* to_string(ArtifactLabel label) {
    switch (label) {
        case ArtifactLabel::Hallucination: return "hallucination";
        case ArtifactLabel::ImageArtifact: return "image_artifact";
        case ArtifactLabel::AiInconsistency: return "ai_inconsistency";
        case ArtifactLabel::None: return "none";
    }
    return "?";
}

ArtifactLabel parse_label(const std::string& text) {
    auto b = text.find_first_not_of(" \t\r\n");
    auto e = text.find_last_not_of(" \t\r\n");
    std::string s = b == std::string::npos ? "" : text.substr(b, e - b + 1);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "1") return ArtifactLabel::Hallucination;
    if (s == "2") return ArtifactLabel::ImageArtifact;
    if (s == "3") return ArtifactLabel::AiInconsistency;
    if (s == "no") return ArtifactLabel::None;
    throw ClientError(ClientErrorKind::Protocol, "unexpected frame label response '" + text + "'");
}

const char* const kFrameFilterPrompt =
    "Inspect this frame for quality problems and answer with one token.\n"
    "1 = visual hallucination (implausible or misplaced objects or people)\n"
    "2 = image artifact (compression, blur, pixelation, distortion, unnatural texture)\n"
    "3 = AI-generation inconsistency (impossible lighting or shadows, malformed anatomy)\n"
    "no = none of the above\n"
    "Reply with exactly one of: 1, 2, 3, no.";

std::string base64_encode(const std::string& bytes) { return httplib::detail::base64_encode(bytes); }

namespace {

std::string response_text(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw ClientError(ClientErrorKind::Protocol, std::string("malformed response body: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("text") || !doc["text"].is_string()) {
        throw ClientError(ClientErrorKind::Protocol, "response lacks a string 'text'");
    }
    return doc["text"].get<std::string>();
}

}  // namespace

ArtifactLabel HttpFrameClassifier::classify(std::size_t frame_index, const Frame& frame) const {
    json doc{{"frame_index", frame_index}, {"prompt", kFrameFilterPrompt}, {"image_ppm_base64", base64_encode(encode_ppm(frame))}};
    return parse_label(response_text(post_json(endpoint_, doc.dump())));
}

ArtifactLabel classify_frame(const Endpoint& endpoint, std::size_t frame_index, const Frame& frame) {
    return HttpFrameClassifier(endpoint).classify(frame_index, frame);
}

ArtifactLabel MockFrameClassifier::classify(std::size_t frame_index, const Frame&) const {
    auto it = responses_.find(frame_index);
    return parse_label(it == responses_.end() ? default_response_ : it->second);
}

routing::VideoType HttpVideoClassifier::classify(const routing::VideoMeta& meta) const {
    json doc{{"video_ref", meta.video_ref},
             {"task", "classify the video as one of: UGC, AIGC, CG"}};
    if (meta.description) doc["description"] = *meta.description;
    if (meta.text_prompt) doc["text_prompt"] = *meta.text_prompt;
    if (meta.video_type) doc["video_type"] = *meta.video_type;
    const std::string text = response_text(post_json(endpoint_, doc.dump()));
    try {
        return routing::parse_video_type(text);
    } catch (const Error& e) {
        throw ClientError(ClientErrorKind::Protocol, e.what());
    }
}

}  // namespace qrouter::clients
