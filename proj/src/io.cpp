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

#include "zsynth/io.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace zsynth {

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_json_text(ss.str());
    } catch (const InputError& e) {
        throw InputError(path + ": " + e.what());
    }
}

void expect_kind(const json& j, const std::string& kind) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw InputError("/kind: missing document kind");
    if (j["kind"] != kind)
        throw InputError("/kind: expected '" + kind + "', found '" + j["kind"].get<std::string>() + "'");
}

namespace {

const json& member(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) throw InputError(path + "/" + key + ": missing");
    return j.at(key);
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw InputError(path + ": expected a string");
    return j.get<std::string>();
}

const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw InputError(path + ": expected an array");
    return j;
}

int process_index(const Alphabet& alpha, const json& j, const std::string& path) {
    auto p = alpha.find_process(text(j, path));
    if (!p) throw InputError(path + ": unknown process '" + j.get<std::string>() + "'");
    return *p;
}

int state_index(const Automaton& a, int p, const json& j, const std::string& path) {
    auto s = a.find_state(p, text(j, path));
    if (!s) throw InputError(path + ": unknown state '" + j.get<std::string>() + "' of " + a.alphabet.processes[p]);
    return *s;
}

json automaton_fields(const Automaton& a) {
    json j = alphabet_to_json(a.alphabet);
    const auto& alpha = a.alphabet;
    json states = json::object(), initial = json::object();
    for (int p = 0; p < a.num_processes(); ++p) {
        states[alpha.processes[p]] = a.states[p];
        initial[alpha.processes[p]] = a.states[p][a.initial[p]];
    }
    j["states"] = states;
    j["initial"] = initial;
    json trans = json::array();
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.dom(act);
        for (const auto& [f, t] : a.delta(act)) {
            json from = json::array(), to = json::array();
            for (std::size_t i = 0; i < dom.size(); ++i) {
                from.push_back(a.states[dom[i]][f[i]]);
                to.push_back(a.states[dom[i]][t[i]]);
            }
            trans.push_back({{"action", alpha.actions[act].name}, {"from", from}, {"to", to}});
        }
    }
    j["transitions"] = trans;
    return j;
}

// Reads alphabet, states, initial and transitions. Transition tuples follow
// the dom order as written in the document.
Automaton automaton_from_fields(const json& j) {
    Alphabet alpha = alphabet_from_json(j);
    Automaton a(alpha);
    std::vector<std::vector<int>> written_dom;
    for (std::size_t i = 0; i < j["actions"].size(); ++i) {
        std::vector<int> d;
        for (const auto& x : j["actions"][i]["dom"]) d.push_back(*alpha.find_process(x.get<std::string>()));
        written_dom.push_back(d);
    }
    const auto& states = member(j, "states", "");
    for (int p = 0; p < alpha.num_processes(); ++p) {
        std::string path = "/states/" + alpha.processes[p];
        const auto& list = array(member(states, alpha.processes[p], "/states"), path);
        for (std::size_t i = 0; i < list.size(); ++i) a.add_state(p, text(list[i], path + "/" + std::to_string(i)));
    }
    const auto& init = member(j, "initial", "");
    for (int p = 0; p < alpha.num_processes(); ++p)
        a.initial[p] = state_index(a, p, member(init, alpha.processes[p], "/initial"), "/initial/" + alpha.processes[p]);
    const auto& trans = array(member(j, "transitions", ""), "/transitions");
    for (std::size_t i = 0; i < trans.size(); ++i) {
        std::string path = "/transitions/" + std::to_string(i);
        const auto& t = trans[i];
        std::string an = text(member(t, "action", path), path + "/action");
        auto act = alpha.find_action(an);
        if (!act) throw InputError(path + "/action: unknown action '" + an + "'");
        const auto& wd = written_dom[*act];
        const auto& from = array(member(t, "from", path), path + "/from");
        const auto& to = array(member(t, "to", path), path + "/to");
        if (from.size() != wd.size() || to.size() != wd.size())
            throw InputError(path + ": tuple width differs from the action's domain");
        RawTransition raw{*act, {}, {}};
        const auto& dom = alpha.dom(*act);
        for (int p : dom) {
            std::size_t k = std::find(wd.begin(), wd.end(), p) - wd.begin();
            raw.from.push_back(state_index(a, p, from[k], path + "/from/" + std::to_string(k)));
            raw.to.push_back(state_index(a, p, to[k], path + "/to/" + std::to_string(k)));
        }
        a.add_transition(raw);
    }
    return a;
}

}  // namespace

json alphabet_to_json(const Alphabet& alpha) {
    json acts = json::array();
    for (const auto& a : alpha.actions) {
        json dom = json::array();
        for (int p : a.dom) dom.push_back(alpha.processes[p]);
        acts.push_back({{"name", a.name}, {"dom", dom}, {"controllable", a.controllable}});
    }
    return {{"kind", "alphabet"}, {"processes", alpha.processes}, {"actions", acts}};
}

Alphabet alphabet_from_json(const json& j) {
    Alphabet alpha;
    const auto& procs = array(member(j, "processes", ""), "/processes");
    for (std::size_t i = 0; i < procs.size(); ++i) alpha.processes.push_back(text(procs[i], "/processes/" + std::to_string(i)));
    const auto& acts = array(member(j, "actions", ""), "/actions");
    for (std::size_t i = 0; i < acts.size(); ++i) {
        std::string path = "/actions/" + std::to_string(i);
        Action a;
        a.name = text(member(acts[i], "name", path), path + "/name");
        const auto& dom = array(member(acts[i], "dom", path), path + "/dom");
        for (std::size_t k = 0; k < dom.size(); ++k)
            a.dom.push_back(process_index(alpha, dom[k], path + "/dom/" + std::to_string(k)));
        std::sort(a.dom.begin(), a.dom.end());
        if (acts[i].contains("controllable")) {
            if (!acts[i]["controllable"].is_boolean()) throw InputError(path + "/controllable: expected a boolean");
            a.controllable = acts[i]["controllable"].get<bool>();
        }
        alpha.actions.push_back(std::move(a));
    }
    return alpha;
}

json plant_to_json(const Plant& plant) {
    const auto& a = plant.automaton;
    json j = automaton_fields(a);
    j["kind"] = "plant";
    json conds = json::object();
    for (int p = 0; p < a.num_processes(); ++p) {
        json term = json::array(), ranks = json::object();
        for (int s = 0; s < a.num_states(p); ++s) {
            if (plant.conditions[p].terminal[s]) term.push_back(a.states[p][s]);
            ranks[a.states[p][s]] = plant.conditions[p].rank[s];
        }
        conds[a.alphabet.processes[p]] = {{"terminal", term}, {"ranks", ranks}};
    }
    j["conditions"] = conds;
    return j;
}

Plant plant_from_json(const json& j) {
    expect_kind(j, "plant");
    Plant plant;
    plant.automaton = automaton_from_fields(j);
    const auto& a = plant.automaton;
    const auto& conds = member(j, "conditions", "");
    for (int p = 0; p < a.num_processes(); ++p) {
        std::string path = "/conditions/" + a.alphabet.processes[p];
        const auto& c = member(conds, a.alphabet.processes[p], "/conditions");
        LocalCondition lc{std::vector<bool>(a.num_states(p), false), std::vector<int>(a.num_states(p), 0)};
        const auto& term = array(member(c, "terminal", path), path + "/terminal");
        for (std::size_t i = 0; i < term.size(); ++i)
            lc.terminal[state_index(a, p, term[i], path + "/terminal/" + std::to_string(i))] = true;
        if (c.contains("ranks")) {
            const auto& ranks = c["ranks"];
            if (!ranks.is_object()) throw InputError(path + "/ranks: expected an object");
            for (const auto& [name, v] : ranks.items()) {
                if (!v.is_number_integer()) throw InputError(path + "/ranks/" + name + ": expected an integer");
                lc.rank[state_index(a, p, json(name), path + "/ranks/" + name)] = v.get<int>();
            }
        }
        plant.conditions.push_back(std::move(lc));
    }
    return plant;
}

json controller_to_json(const Controller& c, const Automaton& plant) {
    const auto& a = c.automaton;
    json j = automaton_fields(a);
    j["kind"] = "controller";
    json pi = json::object();
    for (int p = 0; p < a.num_processes(); ++p) {
        json m = json::object();
        for (int s = 0; s < a.num_states(p); ++s) m[a.states[p][s]] = plant.states[p][c.pi[p][s]];
        pi[a.alphabet.processes[p]] = m;
    }
    j["pi"] = pi;
    return j;
}

Controller controller_from_json(const json& j, const Automaton& plant) {
    expect_kind(j, "controller");
    Controller c;
    c.automaton = automaton_from_fields(j);
    const auto& a = c.automaton;
    if (!(a.alphabet == plant.alphabet)) throw InputError("/actions: controller alphabet differs from the plant's");
    const auto& pi = member(j, "pi", "");
    for (int p = 0; p < a.num_processes(); ++p) {
        std::string path = "/pi/" + a.alphabet.processes[p];
        const auto& m = member(pi, a.alphabet.processes[p], "/pi");
        std::vector<int> map(a.num_states(p), kNone);
        for (int s = 0; s < a.num_states(p); ++s)
            map[s] = state_index(plant, p, member(m, a.states[p][s], path), path + "/" + a.states[p][s]);
        c.pi.push_back(std::move(map));
    }
    return c;
}

json trace_to_json(const Plant& plant, const Controller& c, const Verdict& v) {
    const auto& alpha = c.automaton.alphabet;
    auto names = [&](const std::vector<int>& w) {
        json out = json::array();
        for (int a : w) out.push_back(alpha.actions[a].name);
        return out;
    };
    json j = {{"kind", "trace"},
              {"verdict", to_string(v.kind)},
              {"plant", plant_to_json(plant)},
              {"controller", controller_to_json(c, plant.automaton)}};
    if (!v.correct()) {
        j["process"] = alpha.processes[v.process];
        j["reason"] = to_string(v.reason);
        j["stem"] = names(v.run.stem);
        j["cycle"] = names(v.run.cycle);
    }
    return j;
}

TraceDocument trace_from_json(const json& j) {
    expect_kind(j, "trace");
    TraceDocument doc;
    doc.plant = plant_from_json(member(j, "plant", ""));
    doc.controller = controller_from_json(member(j, "controller", ""), doc.plant.automaton);
    std::string kind = text(member(j, "verdict", ""), "/verdict");
    auto& v = doc.verdict;
    if (kind == "correct") return doc;
    const auto& alpha = doc.controller.automaton.alphabet;
    if (kind == "dead-state")
        v.kind = Verdict::Kind::DeadState;
    else if (kind == "lasso")
        v.kind = Verdict::Kind::Lasso;
    else
        throw InputError("/verdict: unknown verdict '" + kind + "'");
    v.process = process_index(alpha, member(j, "process", ""), "/process");
    std::string reason = text(member(j, "reason", ""), "/reason");
    if (reason == "odd-parity")
        v.reason = Verdict::Reason::OddParity;
    else if (reason == "not-terminal")
        v.reason = Verdict::Reason::NotTerminal;
    else
        throw InputError("/reason: unknown reason '" + reason + "'");
    auto word = [&](const std::string& key) {
        std::vector<int> w;
        const auto& arr = array(member(j, key, ""), "/" + key);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string n = text(arr[i], "/" + key + "/" + std::to_string(i));
            auto a = alpha.find_action(n);
            if (!a) throw InputError("/" + key + "/" + std::to_string(i) + ": unknown action '" + n + "'");
            w.push_back(*a);
        }
        return w;
    };
    auto stem = word("stem");
    auto cycle = word("cycle");
    try {
        if (v.kind == Verdict::Kind::Lasso) {
            v.run = run_lasso(doc.controller.automaton, stem, cycle);
        } else {
            auto r = run(doc.controller.automaton, stem);
            if (!r) throw StructuralError("word does not label a run");
            v.run = *r;
        }
    } catch (const StructuralError& e) {
        throw InputError(std::string("/stem: ") + e.what());
    }
    return doc;
}

}  // namespace zsynth
