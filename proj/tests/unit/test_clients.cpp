#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "qrouter/clients.hpp"

using namespace qrouter;
using namespace qrouter::clients;
using namespace std::chrono_literals;

namespace {

// Local JSON endpoint running on a background thread.
class StubServer {
public:
    explicit StubServer(httplib::Server::Handler handler) {
        server_.Post("/score", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    Endpoint endpoint(std::chrono::milliseconds timeout = 2000ms) const {
        return {"http://127.0.0.1:" + std::to_string(port_) + "/score", timeout, ""};
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

ClientErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ClientError& e) {
        return e.kind();
    }
    FAIL("no ClientError thrown");
    return ClientErrorKind::Transport;
}

}  // namespace

TEST_CASE("request and response encoding") {
    const auto body = nlohmann::json::parse(encode_request({"vid1", routing::VideoType::AiGenerated, "a cat"}));
    CHECK(body["video_ref"] == "vid1");
    CHECK(body["video_type_hint"] == "aigc");
    CHECK(body["text_prompt"] == "a cat");
    CHECK_FALSE(nlohmann::json::parse(encode_request({"v", std::nullopt, std::nullopt})).contains("text_prompt"));
    CHECK(kind_of([] { encode_request({"", std::nullopt, std::nullopt}); }) == ClientErrorKind::Protocol);

    const auto r = decode_response(R"({"score": 64.5, "factors": {"blur": 0.25}})");
    CHECK(r.score == 64.5);
    CHECK(r.factors.at("blur") == 0.25);
    CHECK(kind_of([] { decode_response(R"({"score": 150})"); }) == ClientErrorKind::OutOfRange);
    CHECK(kind_of([] { decode_response(R"({"score": -1})"); }) == ClientErrorKind::OutOfRange);
    CHECK(kind_of([] { decode_response(R"({"value": 1})"); }) == ClientErrorKind::Protocol);
    CHECK(kind_of([] { decode_response("not json"); }) == ClientErrorKind::Protocol);
    CHECK(kind_of([] { decode_response(R"({"score": 5, "factors": {"blur": "high"}})"); }) == ClientErrorKind::Protocol);
}

TEST_CASE("http expert round trip with bearer token") {
    std::string seen_auth, seen_ref;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen_auth = req.get_header_value("Authorization");
        seen_ref = nlohmann::json::parse(req.body)["video_ref"];
        res.set_content(R"({"score": 71.25})", "application/json");
    });
    auto ep = server.endpoint();
    ep.bearer_token = "secret";
    const auto r = score_video(ep, {"clip-7", std::nullopt, std::nullopt});
    CHECK(r.score == 71.25);
    CHECK(seen_auth == "Bearer secret");
    CHECK(seen_ref == "clip-7");
}

TEST_CASE("http expert error mapping") {
    SUBCASE("out of range") {
        StubServer server([](const httplib::Request&, httplib::Response& res) { res.set_content(R"({"score": 150})", "application/json"); });
        CHECK(kind_of([&] { score_video(server.endpoint(), {"v", {}, {}}); }) == ClientErrorKind::OutOfRange);
    }
    SUBCASE("non-2xx status") {
        StubServer server([](const httplib::Request&, httplib::Response& res) {
            res.status = 500;
            res.set_content("boom", "text/plain");
        });
        CHECK(kind_of([&] { score_video(server.endpoint(), {"v", {}, {}}); }) == ClientErrorKind::Protocol);
    }
    SUBCASE("malformed body") {
        StubServer server([](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
        CHECK(kind_of([&] { score_video(server.endpoint(), {"v", {}, {}}); }) == ClientErrorKind::Protocol);
    }
    SUBCASE("timeout") {
        StubServer server([](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(1500ms);
            res.set_content(R"({"score": 1})", "application/json");
        });
        const auto start = std::chrono::steady_clock::now();
        CHECK(kind_of([&] { score_video(server.endpoint(300ms), {"v", {}, {}}); }) == ClientErrorKind::Timeout);
        CHECK(std::chrono::steady_clock::now() - start < 1400ms);
    }
    SUBCASE("unreachable") {
        const Endpoint ep{"http://127.0.0.1:1/score", 1000ms, ""};
        CHECK(kind_of([&] { score_video(ep, {"v", {}, {}}); }) == ClientErrorKind::Transport);
    }
    SUBCASE("bad url") {
        CHECK(kind_of([] { score_video({"not a url", 1000ms, ""}, {"v", {}, {}}); }) == ClientErrorKind::Transport);
    }
}

TEST_CASE("mock expert determinism") {
    const MockExpert a("COVER", 7);
    const ExpertRequest req{"vid1", std::nullopt, std::nullopt};
    const double s = a.score(req).score;
    CHECK(s >= 0.0);
    CHECK(s < 100.0);
    CHECK(a.score(req).score == s);
    CHECK(MockExpert("COVER", 7).score(req).score == s);

    int differing = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) differing += MockExpert("COVER", seed).score(req).score != s;
    CHECK(differing >= 18);
    CHECK(MockExpert("UVQ", 7).score(req).score != s);

    CHECK(MockExpert("COVER", 7, 42.0).score(req).score == 42.0);
    CHECK(kind_of([] { MockExpert("X", 1, 150.0).score({"v", {}, {}}); }) == ClientErrorKind::OutOfRange);

    const auto factors = MockExpert("MaxVQA", 7, std::nullopt, true).score(req).factors;
    CHECK(factors.size() == 5);
    for (const auto& [k, v] : factors) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("stable hash is FNV-1a") {
    CHECK(stable_hash("") == 14695981039346656037ull);
    CHECK(stable_hash("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("frame label parsing") {
    CHECK(parse_label("1") == ArtifactLabel::Hallucination);
    CHECK(parse_label("2") == ArtifactLabel::ImageArtifact);
    CHECK(parse_label("3") == ArtifactLabel::AiInconsistency);
    CHECK(parse_label("no") == ArtifactLabel::None);
    CHECK(parse_label("NO") == ArtifactLabel::None);
    CHECK(parse_label("  3\n") == ArtifactLabel::AiInconsistency);
    CHECK(kind_of([] { parse_label("2."); }) == ClientErrorKind::Protocol);
    CHECK(kind_of([] { parse_label("maybe"); }) == ClientErrorKind::Protocol);
    CHECK(kind_of([] { parse_label(""); }) == ClientErrorKind::Protocol);
}

TEST_CASE("base64") {
    CHECK(base64_encode("") == "");
    CHECK(base64_encode("f") == "Zg==");
    CHECK(base64_encode("fo") == "Zm8=");
    CHECK(base64_encode("foo") == "Zm9v");
    CHECK(base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("http frame classifier sends the frame and parses the label") {
    nlohmann::json seen;
    StubServer server([&](const httplib::Request& req, httplib::Response& res) {
        seen = nlohmann::json::parse(req.body);
        res.set_content(R"({"text": " 1 "})", "application/json");
    });
    const Frame f = test::grey_frame(2, 1, 10);
    CHECK(classify_frame(server.endpoint(), 12, f) == ArtifactLabel::Hallucination);
    CHECK(seen["frame_index"] == 12);
    CHECK(seen["prompt"] == kFrameFilterPrompt);
    CHECK(seen["image_ppm_base64"] == base64_encode(encode_ppm(f)));
}

TEST_CASE("mock frame classifier") {
    const MockFrameClassifier mock("no", {{3, "3"}, {4, "garbage"}});
    const Frame f = test::grey_frame(1, 1, 0);
    CHECK(mock.classify(1, f) == ArtifactLabel::None);
    CHECK(mock.classify(3, f) == ArtifactLabel::AiInconsistency);
    CHECK(kind_of([&] { mock.classify(4, f); }) == ClientErrorKind::Protocol);
}

TEST_CASE("http video classifier") {
    StubServer server([](const httplib::Request&, httplib::Response& res) { res.set_content(R"({"text": "CG"})", "application/json"); });
    CHECK(HttpVideoClassifier(server.endpoint()).classify({"v", {}, {}, {}}) == routing::VideoType::Gaming);
    StubServer odd([](const httplib::Request&, httplib::Response& res) { res.set_content(R"({"text": "opera"})", "application/json"); });
    CHECK(kind_of([&] { HttpVideoClassifier(odd.endpoint()).classify({"v", {}, {}, {}}); }) == ClientErrorKind::Protocol);
}
