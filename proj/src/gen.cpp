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

#include "zsynth/gen.hpp"

namespace zsynth {

Plant random_plant(const GenParams& gp, std::mt19937_64& rng) {
    if (gp.processes < 1 || gp.states < 1 || gp.actions < 0) throw InputError("random_plant: bad parameters");
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

    Alphabet alpha;
    for (int p = 0; p < gp.processes; ++p) alpha.processes.push_back("p" + std::to_string(p));
    std::vector<std::pair<int, int>> edges;
    for (int p = 1; p < gp.processes; ++p)
        if (gp.connected || chance(0.7)) edges.push_back({uniform(0, p - 1), p});
    for (int i = 0; i < gp.actions; ++i) {
        Action a;
        a.name = "a" + std::to_string(i);
        if (!edges.empty() && chance(0.5)) {
            auto e = edges[uniform(0, static_cast<int>(edges.size()) - 1)];
            a.dom = {e.first, e.second};
        } else {
            a.dom = {uniform(0, gp.processes - 1)};
        }
        a.controllable = (!gp.local_controllable || a.dom.size() == 1) && chance(gp.controllable);
        alpha.actions.push_back(std::move(a));
    }

    Plant plant;
    plant.automaton = Automaton(alpha);
    auto& aut = plant.automaton;
    for (int p = 0; p < gp.processes; ++p) {
        for (int s = 0; s < gp.states; ++s) aut.add_state(p, "s" + std::to_string(s));
        aut.initial[p] = 0;
    }
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.dom(act);
        if (dom.size() == 1) {
            for (int s = 0; s < gp.states; ++s)
                if (chance(gp.density)) aut.add_transition(act, {s, kNone}, {uniform(0, gp.states - 1), kNone});
        } else {
            for (int s = 0; s < gp.states; ++s)
                for (int t = 0; t < gp.states; ++t)
                    if (chance(gp.density / 2))
                        aut.add_transition(act, {s, t}, {uniform(0, gp.states - 1), uniform(0, gp.states - 1)});
        }
    }
    for (int p = 0; p < gp.processes; ++p) {
        LocalCondition c;
        for (int s = 0; s < gp.states; ++s) {
            c.terminal.push_back(chance(gp.terminal));
            c.rank.push_back(uniform(0, gp.max_rank));
        }
        plant.conditions.push_back(std::move(c));
    }
    return pruned(plant);
}

Plant random_plant(const GenParams& gp, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_plant(gp, rng);
}

}  // namespace zsynth
