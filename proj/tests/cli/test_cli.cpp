#include <doctest.h>

#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include <json.hpp>

#include "fixtures.hpp"

using qrouter::test::TempDir;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const TempDir& dir, const std::string& args, const char* exe = QROUTER_CLI_PATH) {
    const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + exe + "\" " + args + " >\"" + out.string() + "\" 2>\"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("help and usage") {
    TempDir dir;
    CHECK(run(dir, "--help").code == 0);
    CHECK(run(dir, "").code == 1);
    CHECK(run(dir, "dance").code == 1);
    CHECK(run(dir, "score --video x").code == 1);
}

TEST_CASE("score writes a report and is reproducible") {
    TempDir dir;
    REQUIRE(run(dir, "--out " + q(dir / "v") + " --frames 16", QROUTER_SYNTH_PATH).code == 0);
    write(dir / "c.json", "{}");
    const auto a = run(dir, "score --video " + q(dir / "v") + " --config " + q(dir / "c.json") +
                                " --mock --seed 7 --tier 1 --out " + q(dir / "a"));
    REQUIRE(a.code == 0);
    CHECK_FALSE(a.out.empty());
    const auto b = run(dir, "score --video " + q(dir / "v") + " --config " + q(dir / "c.json") +
                                " --mock --seed 7 --tier 1 --out " + q(dir / "b"));
    REQUIRE(b.code == 0);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    const auto doc = nlohmann::json::parse(slurp(dir / "a" / "report.json"));
    CHECK(doc.size() == 7);
}

TEST_CASE("configuration errors exit with 1") {
    TempDir dir;
    REQUIRE(run(dir, "--out " + q(dir / "v") + " --frames 4 --constant", QROUTER_SYNTH_PATH).code == 0);
    write(dir / "bad.json", R"({"tier": 7})");
    auto r = run(dir, "score --video " + q(dir / "v") + " --config " + q(dir / "bad.json") + " --out " + q(dir / "o"));
    CHECK(r.code == 1);
    CHECK(r.err.find("config") != std::string::npos);
    r = run(dir, "score --video " + q(dir / "v") + " --config " + q(dir / "absent.json") + " --out " + q(dir / "o"));
    CHECK(r.code == 1);
    write(dir / "c.json", "{}");
    CHECK(run(dir, "score --video " + q(dir / "v") + " --config " + q(dir / "c.json") + " --tier 5 --out " +
                       q(dir / "o")).code == 1);
}

TEST_CASE("pipeline errors exit with 2") {
    TempDir dir;
    write(dir / "c.json", R"({"mock": true})");
    const auto r =
        run(dir, "score --video " + q(dir / "nowhere") + " --config " + q(dir / "c.json") + " --out " + q(dir / "o"));
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}

TEST_CASE("localize reports clips") {
    TempDir dir;
    REQUIRE(run(dir, "--out " + q(dir / "v") + " --burst-start 28 --burst-length 10", QROUTER_SYNTH_PATH).code == 0);
    write(dir / "c.json", R"({"mock": true})");
    const auto r = run(dir, "localize --video " + q(dir / "v") + " --config " + q(dir / "c.json") + " --out " + q(dir / "o"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("clip(s) localized") != std::string::npos);
    const auto summary = nlohmann::json::parse(slurp(dir / "o" / "summary.json"));
    CHECK_FALSE(summary["clips"].empty());
}

TEST_CASE("eval emits json and a table") {
    TempDir dir;
    write(dir / "m.csv", "video_dir,mos\na,10\nb,30\nc,20\n");
    write(dir / "c.json", R"({"predictor": "identity"})");
    const auto r = run(dir, "eval --manifest " + q(dir / "m.csv") + " --config " + q(dir / "c.json") + " --out " + q(dir / "o"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("PLCC    1.0000") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir / "o" / "eval.json"));
    CHECK(doc["n"] == 3);
    CHECK(fs::exists(dir / "o" / "eval.txt"));

    const auto missing =
        run(dir, "eval --manifest " + q(dir / "none.csv") + " --config " + q(dir / "c.json") + " --out " + q(dir / "o2"));
    CHECK(missing.code != 0);
    CHECK_FALSE(missing.err.empty());
}
