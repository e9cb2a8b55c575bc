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

#include "zsynth/transforms.hpp"

#include <functional>
#include <set>

using namespace zsynth;
using namespace zsynth::test;

namespace {

const char* kChoice = R"({
  "kind": "plant", "processes": ["p"],
  "actions": [{"name": "c", "dom": ["p"], "controllable": true},
              {"name": "d", "dom": ["p"], "controllable": true},
              {"name": "u", "dom": ["p"], "controllable": false}],
  "states": {"p": ["s", "t", "v"]},
  "initial": {"p": "s"},
  "transitions": [{"action": "c", "from": ["s"], "to": ["t"]},
                  {"action": "d", "from": ["s"], "to": ["v"]},
                  {"action": "u", "from": ["s"], "to": ["s"]}],
  "conditions": {"p": {"terminal": ["t"], "ranks": {"s": 0, "t": 0, "v": 1}}}
})";

// q talks to r via b; r walks x -a-> y -a-> z with ranks 1, 2.
const char* kPath = R"({
  "kind": "plant", "processes": ["q", "r"],
  "actions": [{"name": "b", "dom": ["q", "r"], "controllable": false},
              {"name": "a", "dom": ["r"], "controllable": false}],
  "states": {"q": ["q0"], "r": ["x", "y", "z"]},
  "initial": {"q": "q0", "r": "x"},
  "transitions": [{"action": "a", "from": ["x"], "to": ["y"]},
                  {"action": "a", "from": ["y"], "to": ["z"]},
                  {"action": "b", "from": ["q0", "z"], "to": ["q0", "x"]}],
  "conditions": {"q": {"terminal": ["q0"]}, "r": {"terminal": ["z"], "ranks": {"x": 0, "y": 1, "z": 2}}}
})";

std::set<std::pair<int, int>> edges_of(const Alphabet& alpha) {
    auto g = communication_graph(alpha);
    return {g.edges.begin(), g.edges.end()};
}

// Naive strategy count: sum over the offered action of the product of the
// counts below every allowed move.
long naive_count(const Plant& plant, int r, int s) {
    const auto& a = plant.automaton;
    std::vector<int> ctrl, unctrl;
    for (int act : a.alphabet.local_actions(r))
        if (a.next(act, {s, kNone})) (a.alphabet.controllable(act) ? ctrl : unctrl).push_back(act);
    long total = 0;
    std::vector<int> options{kNone};
    options.insert(options.end(), ctrl.begin(), ctrl.end());
    for (int o : options) {
        long prod = 1;
        auto allowed = unctrl;
        if (o != kNone) allowed.push_back(o);
        for (int b : allowed) prod *= naive_count(plant, r, (*a.next(b, {s, kNone}))[0]);
        total += prod;
    }
    return total;
}

// End states of all maximal plays of f, by explicit play enumeration.
void play_ends(const Plant& plant, int r, const LocalStrategy& f, int s, std::vector<int>& history,
               std::vector<int>& ends) {
    const auto& a = plant.automaton;
    bool moved = false;
    for (int act : a.alphabet.local_actions(r)) {
        auto t = a.next(act, {s, kNone});
        if (!t) continue;
        if (a.alphabet.controllable(act)) {
            auto o = f.at(history);
            if (!o || *o != act) continue;
        }
        moved = true;
        history.push_back(act);
        play_ends(plant, r, f, (*t)[0], history, ends);
        history.pop_back();
    }
    if (!moved) ends.push_back(s);
}

// Local leaf component of a pair plant made acyclic: the result of shorten.
Shortening short_pair(const Plant& plant) { return shorten(make_r_aware(plant, 1).plant, 1); }

}  // namespace

TEST_CASE("localize_controllable") {
    SUBCASE("powerset of the enabled controllable actions") {
        auto plant = plant_text(kChoice);
        auto loc = localize_controllable(plant);
        const auto& b = loc.plant.automaton;
        CHECK(validate(loc.plant).empty());
        int chs = 0;
        for (int act = 0; act < b.alphabet.num_actions(); ++act) {
            CHECK(b.alphabet.controllable(act) == loc.is_choice_action(act));
            if (loc.is_choice_action(act) && b.next(act, {0, kNone})) ++chs;
        }
        CHECK(chs == 4);
        // t and v have no controllable move: only ch({}) leaves them.
        for (int s : {1, 2}) {
            int n = 0;
            for (int act = loc.num_source_actions; act < b.alphabet.num_actions(); ++act)
                if (b.next(act, {s, kNone})) {
                    ++n;
                    CHECK(loc.choice_set(act).empty());
                }
            CHECK(n == 1);
        }
        // <s,{c}> fires c, not d, and keeps the environment's u.
        const int c = act(b.alphabet, "c"), d = act(b.alphabet, "d"), u = act(b.alphabet, "u");
        auto sc = b.find_state(0, "(s,{c})");
        REQUIRE(sc.has_value());
        CHECK(b.next(c, {*sc, kNone}).has_value());
        CHECK_FALSE(b.next(d, {*sc, kNone}).has_value());
        CHECK(b.next(u, {*sc, kNone}).has_value());
        CHECK_FALSE(b.next(c, {0, kNone}).has_value());
        CHECK(loc.plant.conditions[0].rank[*sc] == 0);
    }
    SUBCASE("controllable communications need both choices") {
        std::mt19937_64 rng(11);
        GenParams gp;
        gp.processes = 3;
        gp.local_controllable = false;
        for (int i = 0; i < 30; ++i) {
            auto plant = random_plant(gp, rng);
            auto loc = localize_controllable(plant);
            CHECK_FALSE(has_errors(validate(loc.plant)));
            CHECK_FALSE(has_controllable_communication(loc.plant.alphabet()));
            const auto& b = loc.plant.automaton;
            for (int act = 0; act < loc.num_source_actions; ++act) {
                if (!plant.alphabet().controllable(act)) continue;
                const auto& dom = b.alphabet.dom(act);
                for (const auto& [f, t] : b.delta(act))
                    for (std::size_t i = 0; i < dom.size(); ++i) {
                        CHECK(loc.is_choice_state(dom[i], f[i]));
                        const auto& set = loc.choice[dom[i]][f[i]];
                        CHECK(std::find(set.begin(), set.end(), act) != set.end());
                    }
            }
            CHECK(plant_to_json(localize_controllable(plant).plant) == plant_to_json(loc.plant));
        }
    }
}

TEST_CASE("make_r_aware") {
    SUBCASE("constant ranks add nothing") {
        auto plant = load_plant("example2.json");
        const int r = proc(plant.alphabet(), "r");
        auto aw = make_r_aware(plant, r);
        for (int m : aw.level) CHECK(m == 0);
        CHECK(aw.plant.automaton.num_states(r) == plant.automaton.num_states(r));
        CHECK(reachable_states(aw.plant.automaton).size() == reachable_states(plant.automaton).size());
    }
    SUBCASE("path through ranks 1 and 2") {
        auto plant = plant_text(kPath);
        auto aw = make_r_aware(plant, 1);
        auto z = aw.plant.automaton.find_state(1, "(z,2)");
        CHECK(z.has_value());
        CHECK(aw.plant.automaton.find_state(1, "(x,0)").has_value());
        CHECK(aw.plant.automaton.find_state(1, "(y,1)").has_value());
    }
    SUBCASE("level equals the largest rank since the last communication") {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 40; ++i) {
            auto plant = random_pair(rng);
            auto aw = make_r_aware(plant, 1);
            const auto& b = aw.plant.automaton;
            const auto& rank = plant.conditions[1].rank;
            for (int walk = 0; walk < 10; ++walk) {
                GlobalState g = b.initial;
                int m = rank[aw.base[g[1]]];
                for (int step = 0; step < 12; ++step) {
                    auto en = enabled_actions(b, g);
                    if (en.empty()) break;
                    int x = en[rng() % en.size()];
                    g = *zsynth::step(b, g, x);
                    if (b.alphabet.involves(x, 1)) {
                        int t = aw.base[g[1]];
                        m = b.alphabet.is_local(x) ? std::max(m, rank[t]) : rank[t];
                    }
                    CHECK(aw.level[g[1]] == m);
                }
            }
        }
    }
    SUBCASE("non-leaf is rejected") {
        GenParams gp;
        gp.processes = 3;
        auto plant = random_plant(gp, 3);
        auto g = communication_graph(plant.alphabet());
        for (int p = 0; p < 3; ++p)
            if (g.neighbours[p].size() > 1) CHECK_THROWS_AS(make_r_aware(plant, p), InputError);
    }
}

TEST_CASE("shorten and r_short_bound") {
    SUBCASE("no local actions: sequences of length one") {
        auto plant = plant_text(R"({"kind": "plant", "processes": ["q", "r"],
          "actions": [{"name": "b", "dom": ["q", "r"], "controllable": false}],
          "states": {"q": ["q0"], "r": ["x", "y"]}, "initial": {"q": "q0", "r": "x"},
          "transitions": [{"action": "b", "from": ["q0", "x"], "to": ["q0", "y"]},
                          {"action": "b", "from": ["q0", "y"], "to": ["q0", "x"]}],
          "conditions": {"q": {"terminal": []}, "r": {"terminal": ["y"]}}})");
        auto sh = shorten(plant, 1);
        CHECK(sh.plant.automaton.num_states(1) == 2);
        CHECK(sh.top == kNone);
        CHECK(sh.bottom == kNone);
        for (const auto& w : sh.seq) CHECK(w.size() == 1);
        CHECK(reachable_states(sh.plant.automaton).size() == reachable_states(plant.automaton).size());
        CHECK(shorten(plant, 1, 2).plant.automaton.num_states(1) == 2);
        CHECK_THROWS_AS(shorten(plant, 1, 1), SizeLimitError);
    }
    SUBCASE("even and odd self-loops") {
        for (int rank : {0, 1}) {
            std::string text = R"({"kind": "plant", "processes": ["r"],
              "actions": [{"name": "b", "dom": ["r"], "controllable": false}],
              "states": {"r": ["s"]}, "initial": {"r": "s"},
              "transitions": [{"action": "b", "from": ["s"], "to": ["s"]}],
              "conditions": {"r": {"terminal": [], "ranks": {"s": )" +
                               std::to_string(rank) + "}}}}";
            auto plant = plant_text(text);
            CHECK_FALSE(r_short_bound(plant.automaton, 0).has_value());
            auto sh = shorten(plant, 0);
            auto t = sh.plant.automaton.next(0, {0, kNone});
            REQUIRE(t.has_value());
            CHECK((*t)[0] == (rank == 0 ? sh.top : sh.bottom));
            CHECK(sh.plant.conditions[0].terminal[(*t)[0]] == (rank == 0));
            CHECK(sh.plant.conditions[0].rank[(*t)[0]] % 2 == rank);
            CHECK(r_short_bound(sh.plant.automaton, 0) == 1);
        }
    }
    SUBCASE("bound on random plants") {
        std::mt19937_64 rng(17);
        for (int i = 0; i < 60; ++i) {
            auto plant = random_pair(rng, 4, 5);
            auto sh = shorten(plant, 1);
            CHECK_FALSE(has_errors(validate(sh.plant)));
            auto bound = r_short_bound(sh.plant.automaton, 1);
            REQUIRE(bound.has_value());
            CHECK(*bound <= plant.automaton.num_states(1));
            for (const auto& w : sh.seq) CHECK(w.size() <= static_cast<std::size_t>(plant.automaton.num_states(1)));
        }
    }
    SUBCASE("DAG components: bound is the longest local path") {
        std::mt19937_64 rng(23);
        for (int i = 0; i < 50; ++i) {
            const int n = 2 + static_cast<int>(rng() % 5);
            Alphabet alpha;
            alpha.processes = {"r"};
            for (int k = 0; k < 3; ++k) alpha.actions.push_back({"a" + std::to_string(k), {0}, false});
            Automaton a(alpha);
            for (int s = 0; s < n; ++s) a.add_state(0, "s" + std::to_string(s));
            a.initial[0] = 0;
            std::vector<std::vector<int>> succ(n);
            for (int s = 0; s < n; ++s)
                for (int k = 0; k < 3; ++k)
                    if (s + 1 < n && rng() % 2) {
                        int t = s + 1 + static_cast<int>(rng() % (n - s - 1));
                        a.add_transition(k, {s, kNone}, {t, kNone});
                        succ[s].push_back(t);
                    }
            std::function<int(int)> longest = [&](int s) {
                int best = 0;
                for (int t : succ[s]) best = std::max(best, 1 + longest(t));
                return best;
            };
            CHECK(r_short_bound(a, 0) == longest(0));
        }
    }
}

TEST_CASE("local strategies") {
    SUBCASE("no enabled actions: one empty strategy") {
        auto plant = plant_text(kChoice);
        auto fs = enumerate_local_strategies(plant, 0, 1);
        REQUIRE(fs.size() == 1);
        CHECK(fs[0].moves.empty());
        CHECK(strategy_guarantees_terminal(plant, 0, fs[0]));
        auto gs = enumerate_local_strategies(plant, 0, 2);
        CHECK_FALSE(strategy_guarantees_terminal(plant, 0, gs[0]));
    }
    SUBCASE("offer or withhold") {
        auto plant = plant_text(R"({"kind": "plant", "processes": ["r"],
          "actions": [{"name": "c", "dom": ["r"], "controllable": true}],
          "states": {"r": ["s", "t"]}, "initial": {"r": "s"},
          "transitions": [{"action": "c", "from": ["s"], "to": ["t"]}],
          "conditions": {"r": {"terminal": ["t"]}}})");
        auto fs = enumerate_local_strategies(plant, 0, 0);
        REQUIRE(fs.size() == 2);
        CHECK(fs[0].moves.empty());
        CHECK(fs[1].at({}) == 0);
        CHECK_FALSE(strategy_guarantees_terminal(plant, 0, fs[0]));
        CHECK(strategy_guarantees_terminal(plant, 0, fs[1]));
    }
    SUBCASE("cycles are rejected") {
        auto plant = plant_text(kChoice);
        CHECK_THROWS_AS(enumerate_local_strategies(plant, 0, 0), InputError);
    }
    SUBCASE("random components against naive recursion") {
        std::mt19937_64 rng(29);
        for (int i = 0; i < 40; ++i) {
            auto sh = short_pair(random_pair(rng, 3, 5));
            const auto& b = sh.plant.automaton;
            for (int s = 0; s < b.num_states(1); ++s) {
                auto fs = enumerate_local_strategies(sh.plant, 1, s);
                CHECK(static_cast<long>(fs.size()) == naive_count(sh.plant, 1, s));
                CHECK(std::set<LocalStrategy>(fs.begin(), fs.end()).size() == fs.size());
                for (const auto& f : fs) {
                    for (const auto& [v, a] : f.moves) {
                        int cur = s;
                        for (std::size_t k = 0; k < v.size(); ++k) {
                            if (b.alphabet.controllable(v[k])) {
                                std::vector<int> pre(v.begin(), v.begin() + k);
                                CHECK(f.at(pre) == v[k]);
                            }
                            auto t = b.next(v[k], {cur, kNone});
                            REQUIRE(t.has_value());
                            cur = (*t)[0];
                        }
                        CHECK(b.next(a, {cur, kNone}).has_value());
                        CHECK(b.alphabet.controllable(a));
                    }
                    std::vector<int> h, ends;
                    play_ends(sh.plant, 1, f, s, h, ends);
                    bool all = true;
                    for (int e : ends) all &= static_cast<bool>(sh.plant.conditions[1].terminal[e]);
                    CHECK(strategy_guarantees_terminal(sh.plant, 1, f) == all);
                }
            }
        }
    }
}

TEST_CASE("reduce") {
    SUBCASE("trivial leaf threads q through the scaffold") {
        auto plant = plant_text(R"({"kind": "plant", "processes": ["q", "r"],
          "actions": [{"name": "c", "dom": ["q"], "controllable": true},
                      {"name": "u", "dom": ["q"], "controllable": false}],
          "states": {"q": ["q0", "q1"], "r": ["r0"]}, "initial": {"q": "q0", "r": "r0"},
          "transitions": [{"action": "c", "from": ["q0"], "to": ["q1"]},
                          {"action": "u", "from": ["q1"], "to": ["q0"]}],
          "conditions": {"q": {"terminal": ["q1"]}, "r": {"terminal": ["r0"]}}})");
        auto red = reduce(plant, 0, 1);
        CHECK(red.plant.automaton.num_processes() == 1);
        CHECK(red.strategies.size() == 1);
        CHECK(validate(red.plant).empty());
        std::set<std::tuple<int, int, int>> seen;
        const auto& b = red.plant.automaton;
        for (int act = 0; act < red.num_source_actions; ++act)
            for (const auto& [f, t] : b.delta(act)) {
                CHECK(red.is_true_state(f[0]));
                seen.insert({red.qstates[f[0]].sq, act, red.qstates[t[0]].sq});
            }
        std::set<std::tuple<int, int, int>> expect{{0, 0, 1}, {1, 1, 0}};
        CHECK(seen == expect);
        // q1 x r0 terminal only in its 4-tuples
        for (int x = 0; x < b.num_states(0); ++x)
            CHECK(red.plant.conditions[0].terminal[x] == (red.is_true_state(x) && red.qstates[x].sq == 1));
    }
    SUBCASE("preconditions") {
        auto plant = plant_text(kChoice);
        CHECK_THROWS_AS(reduce(plant, 0, 0), InputError);
        auto looping = plant_text(kPath);
        CHECK(r_short_bound(looping.automaton, 1) == 2);
        looping.automaton.add_transition(act(looping.alphabet(), "a"), {2, kNone}, {0, kNone});
        CHECK_FALSE(r_short_bound(looping.automaton, 1).has_value());
        CHECK_THROWS_AS(reduce(looping, 0, 1), InputError);
        GenParams gp;
        gp.processes = 2;
        gp.local_controllable = false;
        gp.controllable = 1.0;
        auto ctrl = random_plant(gp, 2);
        if (has_controllable_communication(ctrl.alphabet()))
            CHECK_THROWS_AS(reduce(shorten(ctrl, 1).plant, 0, 1), InputError);
    }
    SUBCASE("structural invariants on random plants") {
        std::mt19937_64 rng(31);
        for (int i = 0; i < 40; ++i) {
            auto plant = random_pair(rng, 3, 4);
            auto sh = short_pair(plant);
            auto red = reduce(sh.plant, 0, 1);
            const auto& b = red.plant.automaton;
            CHECK_FALSE(has_errors(validate(red.plant)));
            CHECK(b.num_states(red.qr) <= static_cast<int>(reduce_size_bound(red)));
            CHECK(edges_of(b.alphabet).empty());
            using Shape = RedQState::Shape;
            for (int act = 0; act < b.alphabet.num_actions(); ++act)
                for (const auto& [f, t] : b.delta(act)) {
                    const int slot = dom_slot(b.alphabet, act, red.qr);
                    const auto& from = red.qstates[f[slot]];
                    const bool ch_f = std::find(red.ch_strategy.begin(), red.ch_strategy.end(), act) !=
                                      red.ch_strategy.end();
                    const bool ch_a = act == red.ch_a0 || (act >= red.num_source_actions && !ch_f);
                    if (from.shape == Shape::Pair) CHECK(ch_f);
                    if (from.shape == Shape::Triple) CHECK(ch_a);
                    if (from.shape == Shape::Quad) CHECK(act < red.num_source_actions);
                    CHECK(b.alphabet.controllable(act) == (act >= red.num_source_actions));
                    if (act < red.num_source_actions && sh.plant.alphabet().is_local_to(act, 1)) {
                        const auto& to = red.qstates[t[slot]];
                        const auto& fs = red.strategies[from.strategy];
                        const auto& gs = red.strategies[to.strategy];
                        CHECK(to.shape == Shape::Quad);
                        CHECK(gs.origin == to.sr);
                        CHECK(gs == fs.residual(act, to.sr));
                        for (const auto& [v, a] : gs.moves) {
                            std::vector<int> w{act};
                            w.insert(w.end(), v.begin(), v.end());
                            CHECK(fs.at(w) == a);
                        }
                    }
                }
            auto again = reduce(sh.plant, 0, 1);
            CHECK(dump_canonical(plant_to_json(again.plant)) == dump_canonical(plant_to_json(red.plant)));
        }
    }
    SUBCASE("communication graph loses the leaf") {
        std::mt19937_64 rng(37);
        GenParams gp;
        gp.processes = 4;
        for (int i = 0; i < 20; ++i) {
            auto plant = random_plant(gp, rng);
            auto tree = root_and_order(communication_graph(plant.alphabet()));
            if (tree[0].order.empty()) continue;
            auto [r, q] = tree[0].order[0];
            auto sh = shorten(make_r_aware(plant, r).plant, r);
            auto red = reduce(sh.plant, q, r);
            std::set<std::pair<int, int>> expect;
            for (auto [x, y] : edges_of(plant.alphabet()))
                if (x != r && y != r) expect.insert({red.source_to_proc[x], red.source_to_proc[y]});
            CHECK(edges_of(red.plant.alphabet()) == expect);
        }
    }
}

TEST_CASE("compile_red_condition") {
    SUBCASE("trivial conditions accept everything") {
        std::mt19937_64 rng(41);
        for (int i = 0; i < 20; ++i) {
            auto plant = random_pair(rng);
            for (auto& c : plant.conditions) {
                c.terminal.assign(c.terminal.size(), true);
                c.rank.assign(c.rank.size(), 0);
            }
            auto red = reduce(short_pair(plant).plant, 0, 1);
            auto comp = compile_red_condition(red);
            for (int v : comp.plant.conditions[0].rank) CHECK(v % 2 == 0);
        }
    }
    SUBCASE("random lassos agree with direct evaluation") {
        std::mt19937_64 rng(43);
        int lassos = 0, rejected = 0;
        for (int i = 0; i < 60; ++i) {
            auto plant = random_pair(rng, 3, 4, 3);
            auto red = reduce(short_pair(plant).plant, 0, 1);
            auto comp = compile_red_condition(red);
            const auto& b = comp.plant.automaton;
            const int q = red.qr;
            std::vector<std::vector<std::pair<int, int>>> succ(b.num_states(q));
            for (int act = 0; act < b.alphabet.num_actions(); ++act)
                for (const auto& [f, t] : b.delta(act)) succ[f[0]].push_back({act, t[0]});
            for (int walk = 0; walk < 20; ++walk) {
                std::vector<int> cs{b.initial[q]}, acts;
                std::map<int, int> pos{{cs[0], 0}};
                int loop = kNone;
                while (true) {
                    const auto& out = succ[cs.back()];
                    if (out.empty()) break;
                    auto [x, t] = out[rng() % out.size()];
                    acts.push_back(x);
                    cs.push_back(t);
                    if (pos.count(t)) {
                        loop = pos[t];
                        break;
                    }
                    pos[t] = static_cast<int>(cs.size()) - 1;
                }
                std::vector<int> base;
                for (int y : cs) base.push_back(comp.base[y]);
                bool compiled;
                if (loop == kNone) {
                    compiled = comp.plant.conditions[q].terminal[cs.back()];
                } else {
                    int m = 0;
                    for (std::size_t k = loop; k + 1 < cs.size(); ++k) m = std::max(m, comp.plant.conditions[q].rank[cs[k]]);
                    compiled = m % 2 == 0;
                    ++lassos;
                }
                const bool direct = red_condition_holds(red, base, acts, loop);
                rejected += !direct;
                CHECK(compiled == direct);
            }
        }
        CHECK(lassos > 100);
        CHECK(rejected > 10);
    }
}
