#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "qrouter/media.hpp"
#include "qrouter/routing.hpp"

namespace qrouter::clients {

enum class ClientErrorKind { Timeout, Protocol, OutOfRange, Transport };

const char* to_string(ClientErrorKind kind);

class ClientError : public std::runtime_error {
public:
    ClientError(ClientErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

    ClientErrorKind kind() const { return kind_; }
    const std::string& detail() const { return detail_; }

private:
    ClientErrorKind kind_;
    std::string detail_;
};

struct ExpertRequest {
    std::string video_ref;
    std::optional<routing::VideoType> video_type_hint;
    std::optional<std::string> text_prompt;
};

struct ExpertResponse {
    double score = 0;  // [0, 100]
    std::map<std::string, double> factors;
};

inline constexpr std::chrono::milliseconds kDefaultTimeout{30000};

// Wire encoding for expert calls.
std::string encode_request(const ExpertRequest& request);
ExpertResponse decode_response(const std::string& body);

class ExpertClient {
public:
    virtual ~ExpertClient() = default;
    virtual ExpertResponse score(const ExpertRequest& request) const = 0;
};

struct Endpoint {
    std::string url;  // http://host:port/path
    std::chrono::milliseconds timeout = kDefaultTimeout;
    std::string bearer_token;
};

// POSTs a JSON document to the endpoint and returns the parsed JSON response body.
std::string post_json(const Endpoint& endpoint, const std::string& body);

class HttpExpertClient final : public ExpertClient {
public:
    explicit HttpExpertClient(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
    ExpertResponse score(const ExpertRequest& request) const override;

private:
    Endpoint endpoint_;
};

ExpertResponse score_video(const Endpoint& endpoint, const ExpertRequest& request);

// FNV-1a 64-bit.
std::uint64_t stable_hash(const std::string& bytes);

// Deterministic offline expert: score = hash(name, video_ref, seed) mapped into [0, 100].
class MockExpert final : public ExpertClient {
public:
    MockExpert(std::string name, std::uint64_t seed, std::optional<double> fixed_score = std::nullopt,
               bool emit_factors = false)
        : name_(std::move(name)), seed_(seed), fixed_score_(fixed_score), emit_factors_(emit_factors) {}

    ExpertResponse score(const ExpertRequest& request) const override;

private:
    std::string name_;
    std::uint64_t seed_;
    std::optional<double> fixed_score_;
    bool emit_factors_;
};

std::unique_ptr<ExpertClient> mock_expert(const std::string& name, std::uint64_t seed);

// Closed response set of the frame filter.
enum class ArtifactLabel { Hallucination, ImageArtifact, AiInconsistency, None };

const char* to_string(ArtifactLabel label);

// "1" / "2" / "3" / "no", trimmed and case-insensitive; anything else is a Protocol error.
ArtifactLabel parse_label(const std::string& text);

// Instruction sent along with every frame.
extern const char* const kFrameFilterPrompt;

class FrameClassifier {
public:
    virtual ~FrameClassifier() = default;
    virtual ArtifactLabel classify(std::size_t frame_index, const Frame& frame) const = 0;
};

std::string base64_encode(const std::string& bytes);

class HttpFrameClassifier final : public FrameClassifier {
public:
    explicit HttpFrameClassifier(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
    ArtifactLabel classify(std::size_t frame_index, const Frame& frame) const override;

private:
    Endpoint endpoint_;
};

ArtifactLabel classify_frame(const Endpoint& endpoint, std::size_t frame_index, const Frame& frame);

// Returns scripted raw responses per frame index (default for the rest) and parses them.
class MockFrameClassifier final : public FrameClassifier {
public:
    explicit MockFrameClassifier(std::string default_response = "2",
                                 std::map<std::size_t, std::string> responses = {})
        : default_response_(std::move(default_response)), responses_(std::move(responses)) {}

    ArtifactLabel classify(std::size_t frame_index, const Frame& frame) const override;

private:
    std::string default_response_;
    std::map<std::size_t, std::string> responses_;
};

// Sends the metadata document and parses {"text": "..."} as a video type.
class HttpVideoClassifier final : public routing::VideoClassifier {
public:
    explicit HttpVideoClassifier(Endpoint endpoint) : endpoint_(std::move(endpoint)) {}
    routing::VideoType classify(const routing::VideoMeta& meta) const override;

private:
    Endpoint endpoint_;
};

}  // namespace qrouter::clients
