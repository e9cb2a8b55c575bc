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

#pragma once

#include "zsynth/core.hpp"
#include "zsynth/gen.hpp"
#include "zsynth/io.hpp"

#include <doctest.h>

#include <random>
#include <string>

namespace zsynth::test {

inline std::string corpus(const std::string& name) { return std::string(ZSYNTH_CORPUS_DIR) + "/" + name; }

inline Plant load_plant(const std::string& name) { return plant_from_json(load_json_file(corpus(name))); }

inline Controller load_controller(const std::string& name, const Plant& plant) {
    return controller_from_json(load_json_file(corpus(name)), plant.automaton);
}

inline int act(const Alphabet& alpha, const std::string& name) {
    auto a = alpha.find_action(name);
    REQUIRE_MESSAGE(a.has_value(), "unknown action " << name);
    return *a;
}

inline int proc(const Alphabet& alpha, const std::string& name) {
    auto p = alpha.find_process(name);
    REQUIRE_MESSAGE(p.has_value(), "unknown process " << name);
    return *p;
}

inline std::vector<int> word(const Alphabet& alpha, std::initializer_list<const char*> names) {
    std::vector<int> w;
    for (const char* n : names) w.push_back(act(alpha, n));
    return w;
}

inline GlobalState global(const Automaton& a, std::initializer_list<const char*> names) {
    GlobalState g;
    int p = 0;
    for (const char* n : names) {
        auto s = a.find_state(p++, n);
        REQUIRE_MESSAGE(s.has_value(), "unknown state " << n);
        g.push_back(*s);
    }
    return g;
}

/// A covering controller obtained by dropping a random subset of the
/// controllable transitions of the plant (pi = id).
inline Controller random_restriction(const Plant& plant, std::mt19937_64& rng, double keep = 0.6) {
    Controller c = identity_controller(plant.automaton);
    std::bernoulli_distribution coin(keep);
    for (int a = 0; a < plant.alphabet().num_actions(); ++a) {
        if (!plant.alphabet().controllable(a)) continue;
        std::vector<LocalPair> drop;
        for (const auto& [f, t] : c.automaton.delta(a))
            if (!coin(rng)) drop.push_back(f);
        for (const auto& f : drop) c.automaton.erase_transition(a, f);
    }
    return c;
}

/// Naive interpreter of a word, letter by letter, directly on delta.
inline std::optional<GlobalState> naive_run(const Automaton& a, const std::vector<int>& w) {
    GlobalState g = a.initial;
    for (int x : w) {
        const auto& dom = a.alphabet.dom(x);
        LocalPair src{g[dom[0]], dom.size() > 1 ? g[dom[1]] : -1};
        const auto& d = a.delta(x);
        auto it = d.find(src);
        if (it == d.end()) return std::nullopt;
        g[dom[0]] = it->second[0];
        if (dom.size() > 1) g[dom[1]] = it->second[1];
    }
    return g;
}

}  // namespace zsynth::test

namespace zsynth::test {

/// Controller C = plant x M where M adds a random total memory automaton on
/// process r (one-state universal elsewhere); pi forgets the memory.
inline Controller with_memory(const Plant& plant, int r, int memory, std::mt19937_64& rng) {
    const auto& a = plant.automaton;
    Automaton m(a.alphabet);
    for (int p = 0; p < a.num_processes(); ++p) {
        int k = p == r ? memory : 1;
        for (int s = 0; s < k; ++s) m.add_state(p, "m" + std::to_string(s));
    }
    for (int x = 0; x < a.alphabet.num_actions(); ++x) {
        const auto& dom = a.alphabet.dom(x);
        int n0 = m.num_states(dom[0]);
        int n1 = dom.size() == 2 ? m.num_states(dom[1]) : 1;
        for (int s = 0; s < n0; ++s)
            for (int t = 0; t < n1; ++t) {
                LocalPair f{s, dom.size() == 2 ? t : kNone};
                LocalPair g{static_cast<int>(rng() % n0), dom.size() == 2 ? static_cast<int>(rng() % n1) : kNone};
                m.add_transition(x, f, g);
            }
    }
    Controller c;
    c.automaton = product(a, m);
    for (int p = 0; p < a.num_processes(); ++p) {
        std::vector<int> pi;
        for (int s = 0; s < a.num_states(p); ++s)
            for (int k = 0; k < m.num_states(p); ++k) pi.push_back(s);
        c.pi.push_back(pi);
    }
    return pruned(c, a);
}

}  // namespace zsynth::test

namespace zsynth::test {

inline Plant plant_text(const std::string& text) { return plant_from_json(parse_json_text(text)); }

/// Random 2-process plant q = p0, r = p1 with local controllable actions.
inline Plant random_pair(std::mt19937_64& rng, int states = 3, int actions = 4, int max_rank = 2) {
    GenParams gp;
    gp.processes = 2;
    gp.states = states;
    gp.actions = actions;
    gp.max_rank = max_rank;
    return random_plant(gp, rng);
}

}  // namespace zsynth::test
