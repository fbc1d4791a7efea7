#include <doctest.h>

#include "fixtures.hpp"
#include "mycosim/cli.hpp"
#include "mycosim/manifest.hpp"
#include "mycosim/scenario.hpp"
#include "mycosim/synthetic.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace mycosim;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli_dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

void write_y_scenario(const fs::path& dir) {
    put(dir / "y.net", format_network(fixtures::y_junction()));
    put(dir / "y.json", R"({"format": "myceliumsim/scenario/v1", "network": "y.net",
        "injections": [{"node": 0, "time_s": 0}, {"node": 1, "time_s": 0}],
        "config": {"rule": "annihilate", "window_s": 1.0}})");
}

/// Every manifest beside `output` lists the output and verifies.
void check_manifest(const fs::path& output) {
    CAPTURE(output.string());
    const fs::path mpath = output.string() + ".manifest";
    REQUIRE(fs::exists(mpath));
    const auto m = load_manifest(mpath);
    REQUIRE(m.outputs.size() == 1);
    CHECK(m.outputs[0].path == output.string());
    CHECK(verify_manifest(m).empty());
    CHECK(m.tool_version == tool_version());
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    auto r = run({});
    CHECK(r.code == 2);
    CHECK(r.err.find("Usage") != std::string::npos);
    r = run({"frobnicate"});
    CHECK(r.code == 2);
    CHECK(r.err.find("unknown subcommand") != std::string::npos);
    CHECK(run({"capacity", "--tips", "1:2"}).code == 2);
    CHECK(run({"enumerate", "--scenario", "x.json", "--inputs", "a", "--output", "2"}).code == 2);
    CHECK(run({"capacity", "--bogus"}).code == 2);
}

TEST_CASE("domain and file errors exit 1") {
    const auto dir = fixtures::scratch("cli_errors");
    auto r = run({"simulate", "--scenario", (dir / "missing.json").string(), "--out", (dir / "a.csv").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("error:") != std::string::npos);
    CHECK(run({"capacity", "--tips", "1:2", "--per-mm3", "0:1", "--volume-m3", "1"}).code == 1);
    CHECK(run({"capacity", "--tips", "1-2", "--per-mm3", "1:1", "--volume-m3", "1"}).code == 1);
    CHECK(run({"synth", "--preset", "nope", "--out", (dir / "r.csv").string()}).code == 1);
}

TEST_CASE("capacity prints the reference range") {
    const auto r = run({"capacity", "--tips", "10:20", "--per-mm3", "1.5:3", "--volume-m3", "1"});
    CHECK(r.code == 0);
    CHECK(r.out == "min 3333333333 (3.33e9)\nmax 13333333333 (1.33e10)\n");
}

TEST_CASE("enumerate the Y junction") {
    const auto dir = fixtures::scratch("cli_enum");
    write_y_scenario(dir);
    const auto scen = (dir / "y.json").string();
    auto r = run({"enumerate", "--scenario", scen, "--inputs", "0,1", "--output", "2", "--oracle"});
    CHECK(r.code == 0);
    CHECK(r.out == "table 0110\nclass XOR\noracle agrees\n");
    r = run({"enumerate", "--scenario", scen, "--inputs", "0,1", "--output", "2", "--rule", "priority-pass"});
    CHECK(r.code == 0);
    CHECK(r.out == "table 0111\nclass OR\n");
    CHECK(run({"enumerate", "--scenario", scen, "--inputs", "0,1", "--output", "2", "--rule", "bounce"}).code == 2);
}

TEST_CASE("every artifact gets a verifying manifest") {
    ::setenv("SOURCE_DATE_EPOCH", "1767225600", 1);
    const auto dir = fixtures::scratch("cli_manifest");
    put(dir / "field.txt", format_substrate(fixtures::uniform_field(40, 0.8)));
    write_y_scenario(dir);

    CHECK(run({"--seed", "3", "grow", "--field", (dir / "field.txt").string(), "--out", (dir / "g.net").string()})
              .code == 0);
    check_manifest(dir / "g.net");
    CHECK(load_manifest(dir / "g.net.manifest").seeds == std::vector<std::uint64_t>{3});
    CHECK(load_manifest(dir / "g.net.manifest").inputs.size() == 1);

    CHECK(run({"simulate", "--scenario", (dir / "y.json").string(), "--out", (dir / "arr.csv").string()}).code == 0);
    check_manifest(dir / "arr.csv");
    CHECK(load_manifest(dir / "arr.csv.manifest").inputs.size() == 2);

    CHECK(run({"enumerate", "--scenario", (dir / "y.json").string(), "--inputs", "0,1", "--output", "2", "--logs",
               (dir / "logs").string(), "--out", (dir / "table.txt").string()})
              .code == 0);
    check_manifest(dir / "table.txt");
    for (int v = 0; v < 4; ++v) check_manifest(dir / "logs" / ("vector_" + std::to_string(v) + ".csv"));

    CHECK(run({"synth", "--preset", "v9", "--seed", "4", "--out", (dir / "rec.csv").string(), "--truth",
               (dir / "truth.csv").string()})
              .code == 0);
    check_manifest(dir / "rec.csv");
    check_manifest(dir / "truth.csv");

    put(dir / "stim.csv", "time_s,kind,duration_s\n600,thermal-short,5\n");
    CHECK(run({"analyze", "--in", (dir / "rec.csv").string(), "--stim", (dir / "stim.csv").string(), "--out",
               (dir / "an").string()})
              .code == 0);
    for (const char* f : {"spikes.csv", "stats.txt", "trains.txt", "latency.csv"}) check_manifest(dir / "an" / f);
    CHECK(slurp(dir / "an" / "spikes.csv") != "");

    CHECK(run({"capacity", "--tips", "10:20", "--per-mm3", "1.5:3", "--volume-m3", "1", "--out",
               (dir / "cap.txt").string()})
              .code == 0);
    check_manifest(dir / "cap.txt");
    ::unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("scripted pipeline is byte-identical across runs") {
    ::setenv("SOURCE_DATE_EPOCH", "1767225600", 1);
    std::vector<std::string> digests[2];
    for (int pass = 0; pass < 2; ++pass) {
        const auto dir = fixtures::scratch("cli_pipeline_" + std::to_string(pass));
        put(dir / "field.txt", format_substrate(fixtures::uniform_field(40, 0.8)));
        put(dir / "growth.json", R"({"max_steps": 20, "fruiting_tips": 3})");
        REQUIRE(run({"--seed", "11", "grow", "--field", (dir / "field.txt").string(), "--params",
                     (dir / "growth.json").string(), "--out", (dir / "g.net").string(), "--quiet"})
                    .code == 0);
        const auto net = load_network(dir / "g.net");
        std::vector<NodeId> ports;
        for (const auto& n : net.nodes()) {
            if (n.kind == NodeKind::fruit_body) ports.push_back(n.id);
        }
        REQUIRE(ports.size() >= 3);
        put(dir / "s.json", std::string(R"({"format": "myceliumsim/scenario/v1", "network": "g.net",
            "injections": [{"node": )") + std::to_string(ports[0]) + R"(, "time_s": 0}],
            "config": {"rule": "annihilate", "window_s": 1.0}})");
        REQUIRE(run({"simulate", "--scenario", (dir / "s.json").string(), "--out", (dir / "arr.csv").string(),
                     "--quiet"})
                    .code == 0);
        REQUIRE(run({"enumerate", "--scenario", (dir / "s.json").string(), "--inputs",
                     std::to_string(ports[0]) + "," + std::to_string(ports[1]), "--output",
                     std::to_string(ports[2]), "--out", (dir / "table.txt").string(), "--quiet"})
                    .code == 0);
        CHECK(slurp(dir / "table.txt").rfind("table ", 0) == 0);
        for (const char* f : {"g.net", "arr.csv", "table.txt"}) digests[pass].push_back(sha256_file(dir / f));
    }
    CHECK(digests[0] == digests[1]);
    ::unsetenv("SOURCE_DATE_EPOCH");
}
