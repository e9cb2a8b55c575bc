/*
 * Copyright 2026 The zsynth Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "support.hpp"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace zsynth;
using namespace zsynth::test;

namespace {

namespace fs = std::filesystem;

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("zsynth_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result cli(const std::string& args) {
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string(ZSYNTH_CLI) + " " + args + " 2>" + err.string();
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = ::pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

std::string in_corpus(const std::string& name) { return corpus(name); }

std::string write_file(const std::string& name, const std::string& text) {
    const auto p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

// Identity controller of a plant document: same automaton, pi = id.
std::string identity_document(const std::string& plant_path) {
    json j = load_json_file(plant_path);
    j.erase("conditions");
    j["kind"] = "controller";
    json pi = json::object();
    for (auto& [p, states] : j["states"].items()) {
        json m = json::object();
        for (const auto& s : states) m[s.get<std::string>()] = s;
        pi[p] = m;
    }
    j["pi"] = pi;
    return dump_canonical(j);
}

}  // namespace

TEST_CASE("validate and graph") {
    auto ok = cli("validate " + in_corpus("example2.json"));
    CHECK(ok.code == 0);
    CHECK(ok.out == "ok\n");

    auto bad = cli("validate " + write_file("bad.json", R"({"kind": "plant", "processes": ["p"]})"));
    CHECK(bad.code == 2);
    CHECK(bad.err.find("/") != std::string::npos);

    auto g = cli("graph " + in_corpus("cas.json"));
    CHECK(g.code == 0);
    CHECK(g.out.find("edges: t1-x t2-x") != std::string::npos);
    CHECK(g.out.find("acyclic: yes") != std::string::npos);

    CHECK(cli("graph " + (scratch() / "missing.json").string()).code == 2);
    CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("synth then verify Example 2") {
    auto s = cli("synth " + in_corpus("example2.json"));
    REQUIRE(s.code == 0);
    const std::string path = write_file("ex2_synth.json", s.out);
    auto v = cli("verify " + in_corpus("example2.json") + " " + path);
    CHECK(v.code == 0);
    CHECK(v.out == "CORRECT\n");

    auto again = cli("synth " + in_corpus("example2.json"));
    CHECK(again.out == s.out);

    auto o = cli("synth " + in_corpus("example2.json") + " -o " + (scratch() / "ex2_o.json").string());
    CHECK(o.code == 0);
    CHECK(slurp(scratch() / "ex2_o.json") == s.out);
}

TEST_CASE("verify verdicts, traces and explain") {
    auto good = cli("verify " + in_corpus("example2.json") + " " + in_corpus("example2_controller.json"));
    CHECK(good.code == 0);
    CHECK(good.out == "CORRECT\n");

    const std::string id = write_file("identity.json", identity_document(in_corpus("example2.json")));
    const std::string trace = (scratch() / "trace.json").string();
    auto badv = cli("verify " + in_corpus("example2.json") + " " + id + " --trace " + trace);
    CHECK(badv.code == 1);
    CHECK(badv.out.rfind("INCORRECT\n", 0) == 0);

    auto e = cli("explain " + trace);
    CHECK(e.code == 0);
    CHECK(e.out.find("VIOLATION") != std::string::npos);
    CHECK(badv.out == "INCORRECT\n" + e.out);

    CHECK(cli("verify " + in_corpus("example2.json") + " " + id + " --max-states 3").code == 3);
}

TEST_CASE("simulate") {
    auto run = cli("simulate " + in_corpus("example2.json") + " a b c");
    CHECK(run.code == 0);
    CHECK(run.out.rfind("0 (p0,(q0,m0),r0)\n", 0) == 0);
    auto blocked = cli("simulate " + in_corpus("example2.json") + " -c " + in_corpus("example2_controller.json") +
                       " a b d");
    CHECK(blocked.code == 1);
    CHECK(blocked.out.find("blocked at step 3") != std::string::npos);
    CHECK(cli("simulate " + in_corpus("example2.json") + " nosuchaction").code == 2);
}

TEST_CASE("transforms") {
    for (const char* pass : {"localize", "aware", "shorten"}) {
        auto t = cli(std::string("transform ") + pass + " " + in_corpus("example2.json"));
        CHECK_MESSAGE(t.code == 0, pass);
        auto v = cli("validate " + write_file(std::string(pass) + ".json", t.out));
        CHECK_MESSAGE(v.code == 0, pass);
    }
    auto aware = cli("transform aware " + in_corpus("example2.json") + " --leaf r");
    REQUIRE(aware.code == 0);
    auto sh = cli("transform shorten " + write_file("aware.json", aware.out) + " --leaf r");
    REQUIRE(sh.code == 0);
    auto red = cli("transform reduce " + write_file("short.json", sh.out) + " --leaf r --parent q");
    CHECK(red.code == 0);
    CHECK(cli("validate " + write_file("red.json", red.out)).code == 0);
    CHECK(cli("transform reduce " + write_file("short.json", sh.out) + " --leaf r --max-states 4").code == 3);
    CHECK(cli("transform aware " + in_corpus("example2.json") + " --leaf nobody").code == 2);
    CHECK(cli("transform nonsense " + in_corpus("example2.json")).code == 2);
}

TEST_CASE("gen and trace") {
    auto a = cli("gen --seed 7 --processes 3");
    auto b = cli("gen --seed 7 --processes 3");
    auto c = cli("gen --seed 8 --processes 3");
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out != c.out);
    CHECK(cli("validate " + write_file("gen.json", a.out)).code == 0);

    auto t = cli("trace " + in_corpus("example2.json"));
    CHECK(t.code == 0);
    auto j = parse_json_text(t.out);
    CHECK(j["kind"] == "pipeline_trace");
    CHECK(j["realizable"] == true);
    CHECK(j["bounds_hold"] == true);
}
