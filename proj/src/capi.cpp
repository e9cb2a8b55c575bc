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

#include "zsynth/zsynth.h"

#include "zsynth/core.hpp"
#include "zsynth/gen.hpp"
#include "zsynth/io.hpp"
#include "zsynth/synth.hpp"
#include "zsynth/transforms.hpp"
#include "zsynth/verify.hpp"

#include <cstdlib>
#include <cstring>
#include <sstream>

struct zs_plant {
    zsynth::Plant plant;
};

struct zs_controller {
    zsynth::Plant plant;
    zsynth::Controller controller;
};

namespace {

using namespace zsynth;

thread_local std::string last_error;

template <class F>
zs_status guarded(F&& f) {
    last_error.clear();
    try {
        return f();
    } catch (const SizeLimitError& e) {
        last_error = e.what();
        return ZS_E_SIZE_LIMIT;
    } catch (const InputError& e) {
        last_error = e.what();
        return ZS_E_INPUT;
    } catch (const json::exception& e) {
        last_error = e.what();
        return ZS_E_INPUT;
    } catch (const StructuralError& e) {
        last_error = e.what();
        return ZS_E_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ZS_E_INTERNAL;
    }
}

zs_status bad_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    return ZS_E_INPUT;
}

char* copy_out(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string global_name(const Automaton& a, const GlobalState& g) {
    std::vector<std::string> parts;
    for (int p = 0; p < a.num_processes(); ++p) parts.push_back(a.states[p][g[p]]);
    return tuple_name(parts);
}

std::vector<int> parse_word(const Alphabet& alpha, const std::string& text) {
    std::vector<int> w;
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ' ')) {
        std::istringstream parts(tok);
        std::string name;
        while (std::getline(parts, name, ',')) {
            if (name.empty()) continue;
            auto a = alpha.find_action(name);
            if (!a) throw InputError("unknown action '" + name + "'");
            w.push_back(*a);
        }
    }
    return w;
}

int process_arg(const Alphabet& alpha, const char* name, const char* flag) {
    auto p = alpha.find_process(name);
    if (!p) throw InputError(std::string(flag) + ": unknown process '" + name + "'");
    return *p;
}

void check_size(const Plant& p, std::size_t max_states) {
    if (max_states && p.automaton.total_local_states() > max_states)
        throw SizeLimitError("result has " + std::to_string(p.automaton.total_local_states()) +
                             " local states, limit is " + std::to_string(max_states));
}

}  // namespace

extern "C" {

const char* zs_version(void) { return "0.1.0"; }

const char* zs_last_error(void) { return last_error.c_str(); }

void zs_string_free(char* s) { std::free(s); }

zs_status zs_plant_read(const char* path, zs_plant** out) {
    if (!path || !out) return bad_argument("path/out");
    return guarded([&] {
        auto p = plant_from_json(load_json_file(path));
        *out = new zs_plant{std::move(p)};
        return ZS_OK;
    });
}

zs_status zs_plant_parse(const char* text, zs_plant** out) {
    if (!text || !out) return bad_argument("text/out");
    return guarded([&] {
        auto p = plant_from_json(parse_json_text(text));
        *out = new zs_plant{std::move(p)};
        return ZS_OK;
    });
}

void zs_plant_free(zs_plant* p) { delete p; }

zs_status zs_plant_json(const zs_plant* p, char** out) {
    if (!p || !out) return bad_argument("plant/out");
    return guarded([&] {
        *out = copy_out(dump_canonical(plant_to_json(p->plant)));
        return ZS_OK;
    });
}

zs_status zs_plant_validate(const zs_plant* p, char** report) {
    if (!p || !report) return bad_argument("plant/report");
    return guarded([&] {
        auto diags = validate(p->plant);
        std::string text;
        for (const auto& d : diags)
            text += std::string(d.is_error() ? "error" : "warning") + " " + d.code + ": " + d.message + "\n";
        if (diags.empty()) text = "ok\n";
        *report = copy_out(text);
        return has_errors(diags) ? ZS_NO : ZS_OK;
    });
}

zs_status zs_plant_graph(const zs_plant* p, char** report) {
    if (!p || !report) return bad_argument("plant/report");
    return guarded([&] {
        const auto& alpha = p->plant.alphabet();
        auto g = communication_graph(alpha);
        std::string text = "processes:";
        for (const auto& n : alpha.processes) text += " " + n;
        text += "\nedges:";
        for (const auto& [a, b] : g.edges) text += " " + alpha.processes[a] + "-" + alpha.processes[b];
        const bool acyclic = is_acyclic(g);
        text += std::string("\nacyclic: ") + (acyclic ? "yes" : "no") + "\n";
        if (acyclic) {
            for (const auto& t : root_and_order(g)) {
                text += "tree root " + alpha.processes[t.root] + ":";
                for (const auto& s : t.order) text += " " + alpha.processes[s.leaf] + "->" + alpha.processes[s.parent];
                text += "\n";
            }
        }
        *report = copy_out(text);
        return acyclic ? ZS_OK : ZS_NO;
    });
}

zs_status zs_generate(uint64_t seed, const zs_gen_params* params, zs_plant** out) {
    if (!params || !out) return bad_argument("params/out");
    return guarded([&] {
        GenParams gp;
        gp.processes = params->processes;
        gp.states = params->states;
        gp.actions = params->actions;
        gp.max_rank = params->max_rank;
        gp.local_controllable = params->local_controllable != 0;
        gp.connected = params->connected != 0;
        if (gp.processes < 1 || gp.states < 1 || gp.actions < 1 || gp.max_rank < 0)
            throw InputError("generator parameters must be positive");
        *out = new zs_plant{random_plant(gp, seed)};
        return ZS_OK;
    });
}

zs_status zs_transform(const zs_plant* p, const char* pass, const char* leaf, const char* parent, size_t max_states,
                       zs_plant** out) {
    if (!p || !pass || !out) return bad_argument("plant/pass/out");
    return guarded([&] {
        const Plant& plant = p->plant;
        const auto& alpha = plant.alphabet();
        const std::string name = pass;
        if (name == "localize") {
            auto loc = localize_controllable(plant);
            check_size(loc.plant, max_states);
            *out = new zs_plant{std::move(loc.plant)};
            return ZS_OK;
        }
        if (name != "aware" && name != "shorten" && name != "reduce")
            throw InputError("unknown transform '" + name + "'");

        int r = kNone, q = kNone;
        auto trees = root_and_order(communication_graph(alpha));
        if (leaf) {
            r = process_arg(alpha, leaf, "--leaf");
            for (const auto& t : trees)
                if (t.parent[r] != kNone) q = t.parent[r];
        } else {
            for (const auto& t : trees)
                if (!t.order.empty()) {
                    r = t.order.front().leaf;
                    q = t.order.front().parent;
                    break;
                }
            if (r == kNone) throw InputError("no process to eliminate");
        }
        if (parent) q = process_arg(alpha, parent, "--parent");

        Plant result;
        if (name == "aware") {
            result = make_r_aware(plant, r).plant;
        } else if (name == "shorten") {
            result = shorten(plant, r, max_states).plant;
        } else {
            if (q == kNone) throw InputError("--leaf has no parent");
            auto red = reduce(plant, q, r, max_states);
            result = compile_red_condition(red, max_states).plant;
        }
        check_size(result, max_states);
        *out = new zs_plant{std::move(result)};
        return ZS_OK;
    });
}

zs_status zs_controller_read(const zs_plant* plant, const char* path, zs_controller** out) {
    if (!plant || !path || !out) return bad_argument("plant/path/out");
    return guarded([&] {
        auto c = controller_from_json(load_json_file(path), plant->plant.automaton);
        *out = new zs_controller{plant->plant, std::move(c)};
        return ZS_OK;
    });
}

zs_status zs_controller_parse(const zs_plant* plant, const char* text, zs_controller** out) {
    if (!plant || !text || !out) return bad_argument("plant/text/out");
    return guarded([&] {
        auto c = controller_from_json(parse_json_text(text), plant->plant.automaton);
        *out = new zs_controller{plant->plant, std::move(c)};
        return ZS_OK;
    });
}

void zs_controller_free(zs_controller* c) { delete c; }

zs_status zs_controller_json(const zs_controller* c, char** out) {
    if (!c || !out) return bad_argument("controller/out");
    return guarded([&] {
        *out = copy_out(dump_canonical(controller_to_json(c->controller, c->plant.automaton)));
        return ZS_OK;
    });
}

zs_status zs_synthesize(const zs_plant* p, size_t max_states, zs_controller** out) {
    if (!p || !out) return bad_argument("plant/out");
    return guarded([&] {
        SynthOptions opts;
        opts.max_states = max_states;
        auto c = synthesize(p->plant, opts);
        if (!c) return ZS_NO;
        *out = new zs_controller{p->plant, std::move(*c)};
        return ZS_OK;
    });
}

zs_status zs_verify(const zs_plant* p, const zs_controller* c, size_t max_states, char** trace) {
    if (!p || !c) return bad_argument("plant/controller");
    return guarded([&] {
        auto v = verify(p->plant, c->controller, max_states);
        if (trace) *trace = copy_out(dump_canonical(trace_to_json(p->plant, c->controller, v)));
        return v.correct() ? ZS_OK : ZS_NO;
    });
}

zs_status zs_explain(const char* trace_text, char** narrative) {
    if (!trace_text || !narrative) return bad_argument("trace/narrative");
    return guarded([&] {
        auto doc = trace_from_json(parse_json_text(trace_text));
        *narrative = copy_out(explain(doc.plant, doc.controller, doc.verdict));
        return doc.verdict.correct() ? ZS_OK : ZS_NO;
    });
}

zs_status zs_simulate(const zs_plant* p, const zs_controller* c, const char* word, char** listing) {
    if (!p || !word || !listing) return bad_argument("plant/word/listing");
    return guarded([&] {
        const Automaton& a = c ? c->controller.automaton : p->plant.automaton;
        auto w = parse_word(a.alphabet, word);
        auto line = [&](const GlobalState& g) {
            std::string s = global_name(a, g);
            if (c) {
                GlobalState img(g.size());
                for (std::size_t i = 0; i < g.size(); ++i) img[i] = c->controller.pi[i][g[i]];
                s += " ~ " + global_name(p->plant.automaton, img);
            }
            return s + "\n";
        };
        GlobalState g = a.initial;
        std::string text = "0 " + line(g);
        zs_status st = ZS_OK;
        for (std::size_t i = 0; i < w.size(); ++i) {
            auto next = step(a, g, w[i]);
            const std::string& name = a.alphabet.actions[w[i]].name;
            if (!next) {
                text += "blocked at step " + std::to_string(i + 1) + ": '" + name + "' is not enabled\n";
                st = ZS_NO;
                break;
            }
            g = std::move(*next);
            text += std::to_string(i + 1) + " " + name + " " + line(g);
        }
        *listing = copy_out(text);
        return st;
    });
}

zs_status zs_trace(const zs_plant* p, size_t max_states, char** report) {
    if (!p || !report) return bad_argument("plant/report");
    return guarded([&] {
        SynthOptions opts;
        opts.max_states = max_states;
        auto t = pipeline_trace(p->plant, opts);
        *report = copy_out(dump_canonical(trace_report_to_json(t)));
        return ZS_OK;
    });
}

}  // extern "C"
