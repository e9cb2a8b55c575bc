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

#include <algorithm>
#include <set>

using namespace zsynth;
using namespace zsynth::test;

TEST_CASE("example 2 plant validates") {
    auto plant = load_plant("example2_raw.json");
    CHECK(validate(plant).empty());
    auto composed = load_plant("example2.json");
    CHECK(validate(composed).empty());
}

TEST_CASE("validate reports ternary actions and nondeterminism") {
    Alphabet alpha;
    alpha.processes = {"p", "q", "r"};
    alpha.actions = {{"t", {0, 1, 2}, false}, {"a", {0}, false}};
    Plant plant;
    plant.automaton = Automaton(alpha);
    for (int p = 0; p < 3; ++p) plant.automaton.add_state(p, "s0"), plant.automaton.add_state(p, "s1");
    plant.automaton.add_transition(RawTransition{0, {0, 0, 0}, {1, 1, 1}});
    plant.conditions.assign(3, trivial_condition(2));
    auto diags = validate(plant);
    CHECK(std::count_if(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.code == "arity"; }) >= 1);

    Plant det;
    Alphabet a2;
    a2.processes = {"p"};
    a2.actions = {{"a", {0}, false}};
    det.automaton = Automaton(a2);
    det.automaton.add_state(0, "s0");
    det.automaton.add_state(0, "s1");
    det.automaton.add_transition(0, {0, kNone}, {1, kNone});
    det.automaton.add_transition(0, {0, kNone}, {0, kNone});
    det.conditions = {trivial_condition(2)};
    auto d2 = validate(det);
    REQUIRE(d2.size() == 1);
    CHECK(d2[0].code == "nondeterministic");
    CHECK(d2[0].message.find("(s0)") != std::string::npos);
}

TEST_CASE("unreachable states are warnings and pruning removes them") {
    Alphabet alpha;
    alpha.processes = {"p"};
    alpha.actions = {{"a", {0}, false}};
    Plant plant;
    plant.automaton = Automaton(alpha);
    plant.automaton.add_state(0, "s0");
    plant.automaton.add_state(0, "lost");
    plant.conditions = {trivial_condition(2)};
    auto diags = validate(plant);
    REQUIRE(diags.size() == 1);
    CHECK_FALSE(diags[0].is_error());
    CHECK(pruned(plant).automaton.num_states(0) == 1);
}

TEST_CASE("step on example 2") {
    auto plant = load_plant("example2_raw.json");
    const auto& a = plant.automaton;
    auto g = global(a, {"p0", "q0", "r0"});
    auto next = step(a, g, act(a.alphabet, "a"));
    REQUIRE(next);
    CHECK(*next == global(a, {"p1", "q1", "r0"}));
    CHECK_FALSE(step(a, g, act(a.alphabet, "α")));
}

TEST_CASE("step with identity transitions leaves the state unchanged") {
    Alphabet alpha;
    alpha.processes = {"p", "q"};
    alpha.actions = {{"i", {0, 1}, false}};
    Automaton a(alpha);
    for (int p = 0; p < 2; ++p)
        for (int s = 0; s < 2; ++s) a.add_state(p, "s" + std::to_string(s));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) a.add_transition(0, {x, y}, {x, y});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) CHECK(*step(a, {x, y}, 0) == GlobalState{x, y});
}

TEST_CASE("run and projection on example 2") {
    auto plant = load_plant("example2_raw.json");
    const auto& a = plant.automaton;
    auto r = run(a, word(a.alphabet, {"a", "b", "c", "α"}));
    REQUIRE(r);
    CHECK(a.states[1][r->states.back()[1]] == "q3");
    auto empty = run(a, {});
    REQUIRE(empty);
    CHECK(empty->states.size() == 1);
    CHECK(empty->states[0] == a.initial);
    CHECK(project_run(a, *empty, 0).empty());

    auto ab = run(a, word(a.alphabet, {"a", "b"}));
    auto proj = project_run(a, *ab, 0);
    REQUIRE(proj.size() == 1);
    CHECK(a.states[0][proj[0].from] == "p0");
    CHECK(proj[0].action == act(a.alphabet, "a"));
    CHECK(a.states[0][proj[0].to] == "p1");
}

TEST_CASE("run agrees with a naive interpreter on random words") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        GenParams gp;
        gp.processes = 1 + static_cast<int>(rng() % 3);
        gp.density = 0.8;
        auto plant = random_plant(gp, rng);
        const auto& a = plant.automaton;
        std::vector<int> w;
        for (int k = 0; k < 6 && a.alphabet.num_actions() > 0; ++k) w.push_back(static_cast<int>(rng() % a.alphabet.num_actions()));
        auto r = run(a, w);
        auto n = naive_run(a, w);
        REQUIRE(r.has_value() == n.has_value());
        if (r) CHECK(r->states.back() == *n);
    }
}

TEST_CASE("projections interleave back to the word") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
        GenParams gp;
        gp.processes = 3;
        gp.density = 0.9;
        auto plant = random_plant(gp, rng);
        const auto& a = plant.automaton;
        // random walk
        std::vector<int> w;
        GlobalState g = a.initial;
        for (int k = 0; k < 8; ++k) {
            auto en = enabled_actions(a, g);
            if (en.empty()) break;
            int x = en[rng() % en.size()];
            w.push_back(x);
            g = *step(a, g, x);
        }
        auto r = run(a, w);
        REQUIRE(r);
        for (int p = 0; p < a.num_processes(); ++p) {
            auto proj = project_run(a, *r, p);
            std::size_t k = 0;
            for (std::size_t pos = 0; pos < w.size(); ++pos) {
                if (!a.alphabet.involves(w[pos], p)) continue;
                REQUIRE(k < proj.size());
                CHECK(proj[k].action == w[pos]);
                CHECK(proj[k].from == r->states[pos][p]);
                CHECK(proj[k].to == r->states[pos + 1][p]);
                ++k;
            }
            CHECK(k == proj.size());
        }
    }
}

TEST_CASE("diamond property and determinism") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        GenParams gp;
        gp.processes = 3;
        gp.density = 0.9;
        auto plant = random_plant(gp, rng);
        const auto& a = plant.automaton;
        for (const auto& g : reachable_states(a)) {
            for (int x = 0; x < a.alphabet.num_actions(); ++x)
                for (int y = 0; y < a.alphabet.num_actions(); ++y) {
                    bool disjoint = true;
                    for (int p : a.alphabet.dom(x)) disjoint &= !a.alphabet.involves(y, p);
                    if (!disjoint || !a.enabled(x, g) || !a.enabled(y, g)) continue;
                    auto xy = step(a, *step(a, g, x), y);
                    auto yx = step(a, *step(a, g, y), x);
                    REQUIRE(xy);
                    REQUIRE(yx);
                    CHECK(*xy == *yx);
                }
        }
    }
}

namespace {

// Maximality by brute force: insertion points over stem·cycle·cycle.
bool maximal_oracle(const Automaton& a, const Run& r) {
    std::vector<int> w = r.stem;
    for (int k = 0; k < (r.is_lasso() ? 2 : 0); ++k) w.insert(w.end(), r.cycle.begin(), r.cycle.end());
    std::set<int> cycle_procs;
    for (int x : r.cycle)
        for (int p : a.alphabet.dom(x)) cycle_procs.insert(p);
    GlobalState g = a.initial;
    for (std::size_t pos = 0; pos <= w.size(); ++pos) {
        std::set<int> suffix = cycle_procs;
        for (std::size_t i = pos; i < w.size(); ++i)
            for (int p : a.alphabet.dom(w[i])) suffix.insert(p);
        for (int x = 0; x < a.alphabet.num_actions(); ++x) {
            bool disjoint = true;
            for (int p : a.alphabet.dom(x)) disjoint &= !suffix.count(p);
            if (disjoint && a.enabled(x, g)) return false;
        }
        if (pos < w.size()) g = *step(a, g, w[pos]);
    }
    return true;
}

}  // namespace

TEST_CASE("maximality") {
    SUBCASE("finite run in a global deadlock is maximal") {
        auto plant = load_plant("example2_raw.json");
        const auto& a = plant.automaton;
        auto r = run(a, word(a.alphabet, {"a", "b", "c", "α", "d"}));
        CHECK(is_maximal(a, *r));
        CHECK_FALSE(is_maximal(a, *run(a, word(a.alphabet, {"a", "b", "c", "α"}))));
        auto short_run = run(a, word(a.alphabet, {"a", "b"}));
        CHECK_FALSE(is_maximal(a, *short_run));
    }
    SUBCASE("frozen process with an enabled local action") {
        Alphabet alpha;
        alpha.processes = {"q", "r"};
        alpha.actions = {{"loop", {0}, false}, {"go", {1}, false}};
        Automaton a(alpha);
        a.add_state(0, "q0");
        a.add_state(1, "r0");
        a.add_state(1, "r1");
        a.add_transition(0, {0, kNone}, {0, kNone});
        a.add_transition(1, {0, kNone}, {1, kNone});
        auto r = run_lasso(a, {}, {0});
        auto w = maximality_violation(a, r);
        REQUIRE(w);
        CHECK(w->action == 1);
        CHECK(is_maximal(a, run_lasso(a, {1}, {0})));
    }
    SUBCASE("malformed lasso") {
        Alphabet alpha;
        alpha.processes = {"p"};
        alpha.actions = {{"a", {0}, false}};
        Automaton a(alpha);
        a.add_state(0, "s0");
        a.add_state(0, "s1");
        a.add_transition(0, {0, kNone}, {1, kNone});
        CHECK_THROWS_AS(run_lasso(a, {}, {0}), StructuralError);
    }
    SUBCASE("agrees with brute-force insertion search") {
        std::mt19937_64 rng(5);
        int lassos = 0;
        for (int i = 0; i < 400; ++i) {
            GenParams gp;
            gp.processes = 1 + static_cast<int>(rng() % 3);
            gp.density = 0.7;
            auto plant = random_plant(gp, rng);
            const auto& a = plant.automaton;
            std::vector<int> w;
            std::vector<GlobalState> seen{a.initial};
            GlobalState g = a.initial;
            Run r;
            bool done = false;
            for (int k = 0; k < 12 && !done; ++k) {
                auto en = enabled_actions(a, g);
                if (en.empty()) break;
                int x = en[rng() % en.size()];
                w.push_back(x);
                g = *step(a, g, x);
                auto it = std::find(seen.begin(), seen.end(), g);
                if (it != seen.end()) {
                    std::size_t entry = it - seen.begin();
                    r = run_lasso(a, {w.begin(), w.begin() + entry}, {w.begin() + entry, w.end()});
                    done = true;
                    ++lassos;
                }
                seen.push_back(g);
            }
            if (!done) r = *run(a, w);
            CHECK(is_maximal(a, r) == maximal_oracle(a, r));
            if (!r.is_lasso()) CHECK(is_maximal(a, r) == enabled_actions(a, r.states.back()).empty());
        }
        CHECK(lassos > 50);
    }
}

namespace {

// Reachable edges (src, action, dst) of an automaton.
std::set<std::tuple<GlobalState, int, GlobalState>> edges_of(const Automaton& a) {
    std::set<std::tuple<GlobalState, int, GlobalState>> out;
    for (const auto& g : reachable_states(a))
        for (int x = 0; x < a.alphabet.num_actions(); ++x)
            if (auto n = step(a, g, x)) out.insert({g, x, *n});
    return out;
}

}  // namespace

TEST_CASE("product") {
    std::mt19937_64 rng(17);
    SUBCASE("universal one-state automaton is an identity") {
        for (int i = 0; i < 30; ++i) {
            GenParams gp;
            gp.processes = 2;
            auto plant = random_plant(gp, rng);
            const auto& a = plant.automaton;
            Automaton u(a.alphabet);
            for (int p = 0; p < a.num_processes(); ++p) u.add_state(p, "u");
            for (int x = 0; x < a.alphabet.num_actions(); ++x) u.add_transition(x, {0, 0}, {0, 0});
            auto prod = product(a, u);
            auto e1 = edges_of(a), e2 = edges_of(prod);
            CHECK(e1 == e2);  // state (s,u) has index s since |U_p| = 1
        }
    }
    SUBCASE("reachable product matches pairwise simulation") {
        for (int i = 0; i < 50; ++i) {
            GenParams gp;
            gp.processes = 2;
            gp.density = 0.8;
            auto a = random_plant(gp, rng).automaton;
            // second automaton over the same alphabet
            Automaton b(a.alphabet);
            for (int p = 0; p < 2; ++p) {
                b.add_state(p, "x");
                b.add_state(p, "y");
            }
            for (int x = 0; x < a.alphabet.num_actions(); ++x) {
                int w = static_cast<int>(a.alphabet.dom(x).size());
                for (int s = 0; s < 2; ++s)
                    for (int t = 0; t < (w == 2 ? 2 : 1); ++t)
                        if (rng() % 3 != 0)
                            b.add_transition(x, {s, w == 2 ? t : kNone},
                                             {static_cast<int>(rng() % 2), w == 2 ? static_cast<int>(rng() % 2) : kNone});
            }
            auto prod = product(a, b);
            // oracle: BFS over pairs
            std::set<std::pair<GlobalState, GlobalState>> seen{{a.initial, b.initial}};
            std::vector<std::pair<GlobalState, GlobalState>> work{{a.initial, b.initial}};
            std::set<std::tuple<GlobalState, int, GlobalState>> expect;
            auto enc = [&](const GlobalState& ga, const GlobalState& gb) {
                GlobalState g;
                for (int p = 0; p < 2; ++p) g.push_back(ga[p] * b.num_states(p) + gb[p]);
                return g;
            };
            while (!work.empty()) {
                auto [ga, gb] = work.back();
                work.pop_back();
                for (int x = 0; x < a.alphabet.num_actions(); ++x) {
                    auto na = step(a, ga, x);
                    auto nb = step(b, gb, x);
                    if (!na || !nb) continue;
                    expect.insert({enc(ga, gb), x, enc(*na, *nb)});
                    if (seen.insert({*na, *nb}).second) work.push_back({*na, *nb});
                }
            }
            CHECK(edges_of(prod) == expect);
        }
    }
    SUBCASE("alphabet mismatch") {
        auto a = load_plant("example2_raw.json").automaton;
        auto b = load_plant("cas.json").automaton;
        CHECK_THROWS_AS(product(a, b), InputError);
    }
}

TEST_CASE("covering") {
    auto plant = load_plant("example2_raw.json");
    auto c = load_controller("example2_paper_controller.json", plant);
    CHECK(check_covering(plant, c).empty());
    CHECK(check_covering(plant, identity_controller(plant.automaton)).empty());

    auto broken = c;
    const auto& ca = broken.automaton;
    int a = act(ca.alphabet, "a");
    LocalPair src{*ca.find_state(0, "p̄0"), *ca.find_state(1, "q̄1")};
    broken.automaton.erase_transition(a, src);
    auto diags = check_covering(plant, broken);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].code == "refused");
    CHECK(diags[0].message.find("(p̄0,q̄1)") != std::string::npos);

    std::mt19937_64 rng(23);
    for (int i = 0; i < 50; ++i) {
        GenParams gp;
        gp.processes = 1 + static_cast<int>(rng() % 3);
        auto rp = random_plant(gp, rng);
        CHECK(check_covering(rp, identity_controller(rp.automaton)).empty());
    }
}

TEST_CASE("communication graph and elimination order") {
    auto plant = load_plant("example2_raw.json");
    auto g = communication_graph(plant.alphabet());
    CHECK(g.edges == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(is_acyclic(g));
    auto trees = root_and_order(g);
    REQUIRE(trees.size() == 1);
    CHECK(trees[0].root == 0);
    CHECK(trees[0].parent[1] == 0);
    CHECK(trees[0].parent[2] == 1);
    REQUIRE(trees[0].order.size() == 2);
    CHECK(trees[0].order[0].leaf == 2);
    CHECK(trees[0].order[0].parent == 1);
    CHECK(trees[0].order[1].leaf == 1);
    CHECK(trees[0].order[1].parent == 0);

    Alphabet single;
    single.processes = {"p"};
    auto gs = communication_graph(single);
    CHECK(gs.edges.empty());
    CHECK(is_acyclic(gs));

    Alphabet tri;
    tri.processes = {"p", "q", "r"};
    tri.actions = {{"x", {0, 1}, false}, {"y", {1, 2}, false}, {"z", {0, 2}, false}};
    CHECK_FALSE(is_acyclic(communication_graph(tri)));
    CHECK_THROWS_AS(root_and_order(communication_graph(tri)), InputError);

    auto cas = load_plant("cas.json");
    auto cg = communication_graph(cas.alphabet());
    CHECK(cg.neighbours[2] == std::vector<int>{0, 1});
    CHECK(cg.neighbours[0] == std::vector<int>{2});
    CHECK(cg.neighbours[1] == std::vector<int>{2});

    Alphabet forest;
    forest.processes = {"a", "b", "c"};
    forest.actions = {{"x", {0, 2}, false}};
    auto trees2 = root_and_order(communication_graph(forest));
    CHECK(trees2.size() == 2);
}

TEST_CASE("compose_monitor") {
    std::mt19937_64 rng(29);
    SUBCASE("one-state monitor") {
        for (int i = 0; i < 20; ++i) {
            GenParams gp;
            gp.processes = 2;
            auto plant = random_plant(gp, rng);
            ParityMonitor m;
            m.states = {"m"};
            m.delta.resize(1);
            for (int x : plant.alphabet().actions_of(0)) m.delta[0][x] = 0;
            m.rank = {0};
            m.terminal = {true};
            auto out = compose_monitor(plant, 0, m);
            CHECK(edges_of(out.automaton) == edges_of(plant.automaton));
        }
    }
    SUBCASE("random two-state monitors keep the behaviour") {
        for (int i = 0; i < 50; ++i) {
            GenParams gp;
            gp.processes = 2;
            gp.density = 0.8;
            auto plant = random_plant(gp, rng);
            ParityMonitor m;
            m.states = {"m0", "m1"};
            m.delta.resize(2);
            for (int s = 0; s < 2; ++s)
                for (int x : plant.alphabet().actions_of(0)) m.delta[s][x] = static_cast<int>(rng() % 2);
            m.rank = {0, 1};
            m.terminal = {true, false};
            auto out = compose_monitor(plant, 0, m);
            const auto& b = out.automaton;
            const auto& a = plant.automaton;
            // project a composed state back to the plant via its name
            auto project = [&](const GlobalState& g) {
                GlobalState h = g;
                const std::string& name = b.states[0][g[0]];
                std::string inner = name.substr(1, name.rfind(',') - 1);
                h[0] = *a.find_state(0, inner);
                return h;
            };
            for (const auto& g : reachable_states(b)) {
                auto h = project(g);
                for (int x = 0; x < a.alphabet.num_actions(); ++x) {
                    REQUIRE(b.enabled(x, g) == a.enabled(x, h));
                    if (b.enabled(x, g)) CHECK(project(*step(b, g, x)) == *step(a, h, x));
                }
            }
        }
    }
    SUBCASE("partial monitor is rejected") {
        auto plant = load_plant("example2_raw.json");
        ParityMonitor m;
        m.states = {"m"};
        m.delta.resize(1);
        m.rank = {0};
        m.terminal = {true};
        CHECK_THROWS_AS(compose_monitor(plant, 1, m), InputError);
    }
}

TEST_CASE("restrict_to keeps the inner actions") {
    auto cas = load_plant("cas.json");
    auto r = restrict_to(cas, {0});
    CHECK(r.automaton.num_processes() == 1);
    for (const auto& a : r.alphabet().actions) CHECK(a.dom.size() == 1);
    CHECK(r.alphabet().num_actions() == 2);
}
