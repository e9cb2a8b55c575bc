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

// zsynth command line tool. Talks to the library through the C API only.
// Exit codes: 0 ok, 1 negative answer, 2 error, 3 size limit.

#include "zsynth/zsynth.h"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct PlantDeleter {
    void operator()(zs_plant* p) const { zs_plant_free(p); }
};
struct ControllerDeleter {
    void operator()(zs_controller* c) const { zs_controller_free(c); }
};
using PlantPtr = std::unique_ptr<zs_plant, PlantDeleter>;
using ControllerPtr = std::unique_ptr<zs_controller, ControllerDeleter>;

// Carries a status out of a subcommand after its message was printed.
struct Exit {
    int code;
};

int exit_code(zs_status st) {
    switch (st) {
        case ZS_OK: return 0;
        case ZS_NO: return 1;
        case ZS_E_SIZE_LIMIT: return 3;
        default: return 2;
    }
}

void check(zs_status st, const std::string& context) {
    if (st == ZS_OK || st == ZS_NO) return;
    std::cerr << "error: " << context << ": " << zs_last_error() << "\n";
    throw Exit{exit_code(st)};
}

std::string take(char* s) {
    std::string out = s ? s : "";
    zs_string_free(s);
    return out;
}

PlantPtr read_plant(const std::string& path) {
    zs_plant* p = nullptr;
    check(zs_plant_read(path.c_str(), &p), path);
    return PlantPtr(p);
}

ControllerPtr read_controller(const zs_plant* plant, const std::string& path) {
    zs_controller* c = nullptr;
    check(zs_controller_read(plant, path.c_str(), &c), path);
    return ControllerPtr(c);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "error: " << path << ": cannot open\n";
        throw Exit{2};
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) {
        std::cerr << "error: " << path << ": cannot write\n";
        throw Exit{2};
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Controller synthesis for acyclic Zielonka automata"};
    app.require_subcommand(1);
    app.set_version_flag("--version", zs_version());

    std::string plant_path, controller_path, out_path, trace_path, pass, leaf, parent;
    std::vector<std::string> word;
    std::size_t max_states = 0;
    std::uint64_t seed = 0;
    zs_gen_params gen{2, 3, 4, 2, 1, 1};
    bool shared_controllable = false, forest = false;

    auto* validate = app.add_subcommand("validate", "Check a plant document");
    validate->add_option("plant", plant_path)->required();

    auto* graph = app.add_subcommand("graph", "Print the communication graph");
    graph->add_option("plant", plant_path)->required();

    auto* synth = app.add_subcommand("synth", "Synthesize a controller");
    synth->add_option("plant", plant_path)->required();
    synth->add_option("-o,--output", out_path, "Write the controller here");
    synth->add_option("--max-states", max_states, "Abort past this many states");

    auto* verify = app.add_subcommand("verify", "Check a controller against a plant");
    verify->add_option("plant", plant_path)->required();
    verify->add_option("controller", controller_path)->required();
    verify->add_option("--trace", trace_path, "Write the verdict document here");
    verify->add_option("--max-states", max_states, "Abort past this many global states");

    auto* simulate = app.add_subcommand("simulate", "Run a word on a plant or controller");
    simulate->add_option("plant", plant_path)->required();
    simulate->add_option("word", word, "Action names");
    simulate->add_option("-c,--controller", controller_path);

    auto* transform = app.add_subcommand("transform", "Apply one plant transformation");
    transform->add_option("pass", pass)->required()->check(CLI::IsMember({"localize", "aware", "shorten", "reduce"}));
    transform->add_option("plant", plant_path)->required();
    transform->add_option("--leaf", leaf, "Process to eliminate");
    transform->add_option("--parent", parent, "Its neighbour");
    transform->add_option("-o,--output", out_path);
    transform->add_option("--max-states", max_states, "Abort past this many local states");

    auto* explain = app.add_subcommand("explain", "Narrate a verdict document");
    explain->add_option("trace", trace_path)->required();

    auto* trace = app.add_subcommand("trace", "Report every pass of the synthesis pipeline");
    trace->add_option("plant", plant_path)->required();
    trace->add_option("--max-states", max_states);

    auto* gen_cmd = app.add_subcommand("gen", "Generate a random plant");
    gen_cmd->add_option("--seed", seed)->required();
    gen_cmd->add_option("--processes", gen.processes)->capture_default_str();
    gen_cmd->add_option("--states", gen.states)->capture_default_str();
    gen_cmd->add_option("--actions", gen.actions)->capture_default_str();
    gen_cmd->add_option("--max-rank", gen.max_rank)->capture_default_str();
    gen_cmd->add_flag("--controllable-communication", shared_controllable);
    gen_cmd->add_flag("--forest", forest);
    gen_cmd->add_option("-o,--output", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*validate) {
            auto p = read_plant(plant_path);
            char* report = nullptr;
            zs_status st = zs_plant_validate(p.get(), &report);
            check(st, plant_path);
            std::cout << take(report);
            return exit_code(st);
        }
        if (*graph) {
            auto p = read_plant(plant_path);
            char* report = nullptr;
            zs_status st = zs_plant_graph(p.get(), &report);
            check(st, plant_path);
            std::cout << take(report);
            return exit_code(st);
        }
        if (*synth) {
            auto p = read_plant(plant_path);
            zs_controller* c = nullptr;
            zs_status st = zs_synthesize(p.get(), max_states, &c);
            check(st, "synth");
            if (st == ZS_NO) {
                std::cout << "UNREALIZABLE\n";
                return 1;
            }
            ControllerPtr owned(c);
            char* text = nullptr;
            check(zs_controller_json(c, &text), "synth");
            emit(take(text), out_path);
            return 0;
        }
        if (*verify) {
            auto p = read_plant(plant_path);
            auto c = read_controller(p.get(), controller_path);
            char* doc = nullptr;
            zs_status st = zs_verify(p.get(), c.get(), max_states, &doc);
            check(st, "verify");
            std::string trace_doc = take(doc);
            if (!trace_path.empty()) emit(trace_doc, trace_path);
            if (st == ZS_OK) {
                std::cout << "CORRECT\n";
            } else {
                char* story = nullptr;
                check(zs_explain(trace_doc.c_str(), &story), "verify");
                std::cout << "INCORRECT\n" << take(story);
            }
            return exit_code(st);
        }
        if (*simulate) {
            auto p = read_plant(plant_path);
            ControllerPtr c;
            if (!controller_path.empty()) c = read_controller(p.get(), controller_path);
            std::string w;
            for (const auto& x : word) w += x + " ";
            char* listing = nullptr;
            zs_status st = zs_simulate(p.get(), c.get(), w.c_str(), &listing);
            check(st, "simulate");
            std::cout << take(listing);
            return exit_code(st);
        }
        if (*transform) {
            auto p = read_plant(plant_path);
            zs_plant* out = nullptr;
            check(zs_transform(p.get(), pass.c_str(), leaf.empty() ? nullptr : leaf.c_str(),
                               parent.empty() ? nullptr : parent.c_str(), max_states, &out),
                  "transform " + pass);
            PlantPtr owned(out);
            char* text = nullptr;
            check(zs_plant_json(out, &text), "transform");
            emit(take(text), out_path);
            return 0;
        }
        if (*explain) {
            const std::string doc = read_text(trace_path);
            char* story = nullptr;
            zs_status st = zs_explain(doc.c_str(), &story);
            check(st, trace_path);
            std::cout << take(story);
            return 0;
        }
        if (*trace) {
            auto p = read_plant(plant_path);
            char* report = nullptr;
            check(zs_trace(p.get(), max_states, &report), "trace");
            std::cout << take(report);
            return 0;
        }
        if (*gen_cmd) {
            gen.local_controllable = shared_controllable ? 0 : 1;
            gen.connected = forest ? 0 : 1;
            zs_plant* out = nullptr;
            check(zs_generate(seed, &gen, &out), "gen");
            PlantPtr owned(out);
            char* text = nullptr;
            check(zs_plant_json(out, &text), "gen");
            emit(take(text), out_path);
            return 0;
        }
    } catch (const Exit& e) {
        return e.code;
    }
    return 2;
}
