#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "pmkit/cli.hpp"
#include "pmkit/log_io.hpp"

using namespace pmkit;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("pmkit-cli-" + tag + "-" + std::to_string(std::rand()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

const std::string kConfig = std::string(PMKIT_DATA_DIR) + "/covas_desk.config";

// One simulated desk log shared by the tests below.
const std::string& desk_log() {
    static TempDir dir("shared");
    static const std::string path = [] {
        const std::string p = dir / "desk.xes";
        REQUIRE(run({"simulate", "--config", kConfig, "--out", p}).code == 0);
        return p;
    }();
    return path;
}

}  // namespace

TEST_CASE("cli: simulate then stats, replay and waves") {
    const std::string log = desk_log();
    auto stats = run({"stats", log});
    CHECK(stats.code == 0);
    CHECK(stats.out.find("cases                 216\n") == 0);

    auto replay = run({"replay", "--model", "covas", log});
    CHECK(replay.code == 0);
    CHECK(replay.out.find("log fitness 1.000\n") == 0);

    auto waves = run({"waves", "--split", "2020-07-01", log});
    CHECK(waves.code == 0);
    CHECK(waves.out.find("wave 1: 133 cases") != std::string::npos);
    CHECK(waves.out.find("wave 2: 63 cases") != std::string::npos);

    auto occ = run({"occupancy", log});
    CHECK(occ.out.find("peak 39 at 2020-04-13") != std::string::npos);
}

TEST_CASE("cli: --json output parses on every subcommand") {
    const std::string log = desk_log();
    TempDir dir("json");
    const std::vector<std::vector<std::string>> commands = {
        {"stats", log},
        {"variants", "--top", "3", log},
        {"dfg", log},
        {"replay", log},
        {"dotted-chart", log},
        {"occupancy", "--daily", log},
        {"waves", log},
        {"simulate", "--config", kConfig, "--out", dir / "s.csv"},
        {"convert", log, "--out", dir / "c.csv"},
    };
    for (auto args : commands) {
        args.insert(args.begin(), "--json");
        CAPTURE(args[1]);
        auto r = run(args);
        REQUIRE(r.code == 0);
        CHECK(nlohmann::json::parse(r.out).is_structured());
    }
    auto stats = nlohmann::json::parse(run({"--json", "stats", log}).out);
    CHECK(stats["cases"] == 216);
    auto replay = nlohmann::json::parse(run({"replay", log, "--json"}).out);
    CHECK(replay["fitness"] == 1.0);
}

TEST_CASE("cli: exit codes") {
    TempDir dir("codes");
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);
    CHECK(run({"stats"}).code == 1);
    CHECK(run({"dfg", desk_log(), "--min-edge", "abc"}).code == 1);
    CHECK(run({"waves", desk_log(), "--split", "July"}).code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"stats", "--help"}).code == 0);

    write_text_file(dir / "broken.xes", "<log><trace>\n<event>\n");
    auto broken = run({"stats", dir / "broken.xes"});
    CHECK(broken.code == 2);
    CHECK(broken.err.find(dir / "broken.xes") != std::string::npos);

    write_text_file(dir / "bad.csv", "case_id,activity,timestamp\na,b,yesterday\n");
    CHECK(run({"stats", dir / "bad.csv"}).code == 2);
    CHECK(run({"stats", dir / "missing.xes"}).code == 2);

    write_text_file(dir / "bad.config", "config_version = 1\nwhatever = 3\n");
    auto cfg = run({"simulate", "--config", dir / "bad.config", "--out", dir / "x.xes"});
    CHECK(cfg.code == 2);
    CHECK(cfg.err.find("config line 2") != std::string::npos);
    CHECK(run({"replay", "--model", dir / "missing.pnml", desk_log()}).code == 2);
}

TEST_CASE("cli: output directory from the environment") {
    TempDir dir("env");
    ::setenv(cli::kOutputDirEnv, dir.path.c_str(), 1);
    auto r = run({"simulate", "--config", kConfig, "--out", "rel/log.csv"});
    ::unsetenv(cli::kOutputDirEnv);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir.path / "rel" / "log.csv"));
}

TEST_CASE("cli: identical inputs give identical bytes") {
    TempDir a("det-a"), b("det-b");
    for (const TempDir* d : {&a, &b}) {
        REQUIRE(run({"simulate", "--config", kConfig, "--noise", "--out", *d / "log.xes"}).code == 0);
        REQUIRE(run({"dfg", *d / "log.xes", "--out", *d / "g.dot"}).code == 0);
        REQUIRE(run({"dotted-chart", *d / "log.xes", "--out", *d / "c.svg"}).code == 0);
        REQUIRE(run({"replay", *d / "log.xes", "--out", *d / "r.csv"}).code == 0);
    }
    for (const char* f : {"log.xes", "g.dot", "c.svg", "r.csv"}) {
        CAPTURE(f);
        CHECK(read_text_file(a / f) == read_text_file(b / f));
    }
    auto noisy = run({"replay", a / "log.xes"});
    CHECK(noisy.out.find("log fitness 0.9") == 0);
}

TEST_CASE("cli: convert round trip") {
    TempDir dir("convert");
    REQUIRE(run({"convert", desk_log(), "--out", dir / "log.csv"}).code == 0);
    REQUIRE(run({"convert", dir / "log.csv", "--types", "case:complete=bool", "--types", "case:ards=bool", "--out",
                 dir / "back.xes"})
                .code == 0);
    CHECK(run({"stats", dir / "back.xes"}).out == run({"stats", desk_log()}).out);
    CHECK(run({"waves", dir / "log.csv", "--types", "case:complete=bool"}).out == run({"waves", desk_log()}).out);
}
