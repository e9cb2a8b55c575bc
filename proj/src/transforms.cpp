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

#include "zsynth/transforms.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <tuple>

namespace zsynth {

int dom_slot(const Alphabet& alpha, int a, int p) {
    const auto& dom = alpha.dom(a);
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (dom[i] == p) return static_cast<int>(i);
    return kNone;
}

bool has_controllable_communication(const Alphabet& alpha) {
    for (const auto& a : alpha.actions)
        if (a.controllable && a.dom.size() > 1) return true;
    return false;
}

namespace {

// Transitions of actions involving p, grouped by p's source state.
struct OutEdge {
    int action;
    LocalPair from;
    LocalPair to;
};

std::vector<std::vector<OutEdge>> edges_by_source(const Automaton& a, int p) {
    std::vector<std::vector<OutEdge>> out(a.num_states(p));
    for (int act : a.alphabet.actions_of(p)) {
        int slot = dom_slot(a.alphabet, act, p);
        for (const auto& [f, t] : a.delta(act)) out[f[slot]].push_back({act, f, t});
    }
    return out;
}

std::optional<int> local_next(const Automaton& a, int act, int s) {
    auto t = a.next(act, {s, kNone});
    if (!t) return std::nullopt;
    return (*t)[0];
}

void check_leaf(const Alphabet& alpha, int q, int r, const char* who) {
    if (q == r || q < 0 || r < 0 || q >= alpha.num_processes() || r >= alpha.num_processes())
        throw InputError(std::string(who) + ": bad process indices");
    for (int act : alpha.actions_of(r))
        for (int p : alpha.dom(act))
            if (p != q && p != r)
                throw InputError(std::string(who) + ": process '" + alpha.processes[r] +
                                 "' is not a leaf attached to '" + alpha.processes[q] + "'");
}

std::string join_names(const Alphabet& alpha, const std::vector<int>& acts) {
    std::string s = "{";
    for (std::size_t i = 0; i < acts.size(); ++i) {
        if (i) s += ",";
        s += alpha.actions[acts[i]].name;
    }
    return s + "}";
}

}  // namespace

// --- controllable communications ------------------------------------------

std::vector<int> enabled_controllable(const Automaton& a, int p, int s) {
    std::vector<int> out;
    for (int act : a.alphabet.controllable_of(p)) {
        int slot = dom_slot(a.alphabet, act, p);
        for (const auto& [f, t] : a.delta(act))
            if (f[slot] == s) {
                out.push_back(act);
                break;
            }
    }
    return out;
}

Localization localize_controllable(const Plant& plant) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    const int np = a.num_processes();

    Localization loc;
    loc.num_source_actions = alpha.num_actions();
    Alphabet na = alpha;
    for (auto& act : na.actions) act.controllable = false;

    // choices[p][s] lists (A, ch action) in subset order.
    std::vector<std::vector<std::vector<std::pair<std::vector<int>, int>>>> choices(np);
    std::map<std::pair<int, std::vector<int>>, int> ch_index;
    for (int p = 0; p < np; ++p) {
        choices[p].resize(a.num_states(p));
        for (int s = 0; s < a.num_states(p); ++s) {
            auto en = enabled_controllable(a, p, s);
            const std::size_t k = en.size();
            for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
                std::vector<int> set;
                for (std::size_t i = 0; i < k; ++i)
                    if (mask >> i & 1) set.push_back(en[i]);
                auto key = std::make_pair(p, set);
                auto it = ch_index.find(key);
                if (it == ch_index.end()) {
                    std::string name = na.fresh_action_name("ch[" + alpha.processes[p] + "]" + join_names(alpha, set));
                    na.actions.push_back({name, {p}, true});
                    it = ch_index.emplace(key, na.num_actions() - 1).first;
                    loc.ch_sets.push_back(key);
                }
                choices[p][s].push_back({set, it->second});
            }
        }
    }

    Plant out;
    out.automaton = Automaton(na);
    auto& b = out.automaton;
    loc.base.resize(np);
    loc.choice.resize(np);
    // variants[p][s]: s followed by its choice states
    std::vector<std::vector<std::vector<int>>> variants(np);
    for (int p = 0; p < np; ++p) {
        loc.num_source_states.push_back(a.num_states(p));
        for (int s = 0; s < a.num_states(p); ++s) {
            b.add_state(p, a.states[p][s]);
            loc.base[p].push_back(s);
            loc.choice[p].push_back({});
        }
        variants[p].resize(a.num_states(p));
        for (int s = 0; s < a.num_states(p); ++s) {
            variants[p][s].push_back(s);
            for (const auto& [set, ch] : choices[p][s]) {
                int x = b.add_state(p, tuple_name({a.states[p][s], join_names(alpha, set)}));
                loc.base[p].push_back(s);
                loc.choice[p].push_back(set);
                variants[p][s].push_back(x);
                b.add_transition(ch, {s, kNone}, {x, kNone});
            }
        }
        b.initial[p] = a.initial[p];
    }

    auto in_set = [&](int p, int x, int act) {
        const auto& set = loc.choice[p][x];
        return std::binary_search(set.begin(), set.end(), act);
    };
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.dom(act);
        const bool ctrl = alpha.controllable(act);
        for (const auto& [f, t] : a.delta(act)) {
            if (dom.size() == 1) {
                const int p = dom[0];
                for (int x : variants[p][f[0]])
                    if (ctrl ? (x != f[0] && in_set(p, x, act)) : true) b.add_transition(act, {x, kNone}, t);
                continue;
            }
            for (int x : variants[dom[0]][f[0]])
                for (int y : variants[dom[1]][f[1]]) {
                    if (ctrl && !(x != f[0] && y != f[1] && in_set(dom[0], x, act) && in_set(dom[1], y, act)))
                        continue;
                    b.add_transition(act, {x, y}, t);
                }
        }
    }

    out.conditions.resize(np);
    for (int p = 0; p < np; ++p)
        for (int x = 0; x < b.num_states(p); ++x) {
            int s = loc.base[p][x];
            out.conditions[p].terminal.push_back(plant.conditions[p].terminal[s]);
            out.conditions[p].rank.push_back(plant.conditions[p].rank[s]);
        }
    loc.plant = std::move(out);
    return loc;
}

// --- r-awareness -------------------------------------------------------------

Awareness make_r_aware(const Plant& plant, int r) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    if (r < 0 || r >= a.num_processes()) throw InputError("make_r_aware: bad process index");
    int q = kNone;
    for (int act : alpha.actions_of(r))
        for (int p : alpha.dom(act))
            if (p != r) {
                if (q != kNone && q != p)
                    throw InputError("make_r_aware: process '" + alpha.processes[r] + "' is not a leaf");
                q = p;
            }
    const auto& rank = plant.conditions[r].rank;
    auto by_src = edges_by_source(a, r);

    Awareness aw;
    aw.r = r;
    std::map<std::pair<int, int>, int> index;
    std::deque<int> work;
    auto intern = [&](int s, int m) {
        auto [it, fresh] = index.emplace(std::make_pair(s, m), static_cast<int>(aw.base.size()));
        if (fresh) {
            aw.base.push_back(s);
            aw.level.push_back(m);
            work.push_back(it->second);
        }
        return it->second;
    };
    struct Pending {
        int action;
        LocalPair from, to;
    };
    std::vector<Pending> pend;
    intern(a.initial[r], rank[a.initial[r]]);
    while (!work.empty()) {
        int x = work.front();
        work.pop_front();
        const int s = aw.base[x], m = aw.level[x];
        for (const auto& e : by_src[s]) {
            const int slot = dom_slot(alpha, e.action, r);
            const int t = e.to[slot];
            const int y = alpha.is_local(e.action) ? intern(t, std::max(m, rank[t])) : intern(t, rank[t]);
            LocalPair f = e.from, to = e.to;
            f[slot] = x;
            to[slot] = y;
            pend.push_back({e.action, f, to});
        }
    }

    Plant out;
    out.automaton = Automaton(alpha);
    auto& b = out.automaton;
    for (int p = 0; p < a.num_processes(); ++p) {
        if (p == r) continue;
        b.states[p] = a.states[p];
        b.initial[p] = a.initial[p];
    }
    for (std::size_t x = 0; x < aw.base.size(); ++x)
        b.add_state(r, tuple_name({a.states[r][aw.base[x]], std::to_string(aw.level[x])}));
    b.initial[r] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, r))
            for (const auto& [f, t] : a.delta(act)) b.add_transition(act, f, t);
    for (const auto& e : pend) b.add_transition(e.action, e.from, e.to);

    out.conditions = plant.conditions;
    LocalCondition c;
    for (int s : aw.base) {
        c.terminal.push_back(plant.conditions[r].terminal[s]);
        c.rank.push_back(rank[s]);
    }
    out.conditions[r] = std::move(c);
    aw.plant = std::move(out);
    return aw;
}

// --- r-short automata ------------------------------------------------------------

Shortening shorten(const Plant& plant, int r, std::size_t max_states) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    if (r < 0 || r >= a.num_processes()) throw InputError("shorten: bad process index");
    {
        int q = kNone;
        for (int act : alpha.actions_of(r))
            for (int p : alpha.dom(act))
                if (p != r) {
                    if (q != kNone && q != p) throw InputError("shorten: process '" + alpha.processes[r] + "' is not a leaf");
                    q = p;
                }
    }
    const auto& rank = plant.conditions[r].rank;
    auto by_src = edges_by_source(a, r);

    Shortening sh;
    sh.r = r;
    static const std::vector<int> kTop{-1}, kBottom{-2};
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> keys;
    std::deque<int> work;
    auto intern = [&](const std::vector<int>& key) {
        auto [it, fresh] = index.emplace(key, static_cast<int>(keys.size()));
        if (fresh) {
            if (max_states && keys.size() >= max_states)
                throw SizeLimitError("shortened process exceeds " + std::to_string(max_states) + " states");
            keys.push_back(key);
            work.push_back(it->second);
        }
        return it->second;
    };
    struct Pending {
        int action;
        LocalPair from, to;
    };
    std::vector<Pending> pend;
    intern({a.initial[r]});
    while (!work.empty()) {
        int x = work.front();
        work.pop_front();
        const std::vector<int> w = keys[x];
        if (w == kTop || w == kBottom) continue;
        for (const auto& e : by_src[w.back()]) {
            const int slot = dom_slot(alpha, e.action, r);
            const int t = e.to[slot];
            int y;
            if (!alpha.is_local(e.action)) {
                y = intern({t});
            } else {
                auto pos = std::find(w.begin(), w.end(), t);
                if (pos == w.end()) {
                    auto w2 = w;
                    w2.push_back(t);
                    y = intern(w2);
                } else {
                    int top = 0;
                    for (auto it = pos; it != w.end(); ++it) top = std::max(top, rank[*it]);
                    y = intern(top % 2 == 0 ? kTop : kBottom);
                }
            }
            LocalPair f = e.from, to = e.to;
            f[slot] = x;
            to[slot] = y;
            pend.push_back({e.action, f, to});
        }
    }

    int max_rank = 0;
    for (int v : rank) max_rank = std::max(max_rank, v);
    const int odd_rank = max_rank % 2 == 1 ? max_rank : max_rank + 1;

    Plant out;
    out.automaton = Automaton(alpha);
    auto& b = out.automaton;
    for (int p = 0; p < a.num_processes(); ++p) {
        if (p == r) continue;
        b.states[p] = a.states[p];
        b.initial[p] = a.initial[p];
    }
    out.conditions = plant.conditions;
    LocalCondition c;
    for (std::size_t x = 0; x < keys.size(); ++x) {
        const auto& w = keys[x];
        if (w == kTop) {
            sh.top = static_cast<int>(x);
            b.add_state(r, "T");
            c.terminal.push_back(true);
            c.rank.push_back(0);
            sh.seq.push_back({});
        } else if (w == kBottom) {
            sh.bottom = static_cast<int>(x);
            b.add_state(r, "_|_");
            c.terminal.push_back(false);
            c.rank.push_back(odd_rank);
            sh.seq.push_back({});
        } else {
            std::string name;
            for (std::size_t i = 0; i < w.size(); ++i) name += (i ? "." : "") + a.states[r][w[i]];
            b.add_state(r, "[" + name + "]");
            c.terminal.push_back(plant.conditions[r].terminal[w.back()]);
            c.rank.push_back(rank[w.back()]);
            sh.seq.push_back(w);
        }
    }
    b.initial[r] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, r))
            for (const auto& [f, t] : a.delta(act)) b.add_transition(act, f, t);
    for (const auto& e : pend) b.add_transition(e.action, e.from, e.to);
    out.conditions[r] = std::move(c);
    sh.plant = std::move(out);
    return sh;
}

std::optional<int> r_short_bound(const Automaton& a, int r) {
    const auto& alpha = a.alphabet;
    const int n = a.num_states(r);
    std::vector<std::vector<int>> all(n), local(n);
    for (int act : alpha.actions_of(r)) {
        int slot = dom_slot(alpha, act, r);
        for (const auto& [f, t] : a.delta(act)) {
            all[f[slot]].push_back(t[slot]);
            if (alpha.is_local(act)) local[f[0]].push_back(t[0]);
        }
    }
    std::vector<bool> seen(n, false);
    std::vector<int> stack{a.initial[r]};
    seen[a.initial[r]] = true;
    while (!stack.empty()) {
        int s = stack.back();
        stack.pop_back();
        for (int t : all[s])
            if (!seen[t]) {
                seen[t] = true;
                stack.push_back(t);
            }
    }
    // Longest local path by DFS with colours; a grey hit is a cycle.
    std::vector<int> colour(n, 0), longest(n, 0);
    bool cyclic = false;
    std::function<void(int)> visit = [&](int s) {
        colour[s] = 1;
        for (int t : local[s]) {
            if (colour[t] == 1) cyclic = true;
            if (colour[t] == 0) visit(t);
            if (cyclic) return;
            longest[s] = std::max(longest[s], longest[t] + 1);
        }
        colour[s] = 2;
    };
    int bound = 0;
    for (int s = 0; s < n && !cyclic; ++s) {
        if (!seen[s]) continue;
        if (colour[s] == 0) visit(s);
        bound = std::max(bound, longest[s]);
    }
    if (cyclic) return std::nullopt;
    return bound;
}

// --- local r-strategies ------------------------------------------------------------

std::optional<int> LocalStrategy::at(const std::vector<int>& history) const {
    auto it = std::lower_bound(moves.begin(), moves.end(), history,
                               [](const auto& m, const std::vector<int>& h) { return m.first < h; });
    if (it == moves.end() || it->first != history) return std::nullopt;
    return it->second;
}

LocalStrategy LocalStrategy::residual(int b, int target) const {
    LocalStrategy g;
    g.origin = target;
    for (const auto& [v, act] : moves)
        if (!v.empty() && v[0] == b) g.moves.push_back({std::vector<int>(v.begin() + 1, v.end()), act});
    return g;
}

bool strategy_allows(const Alphabet& alpha, const LocalStrategy& f, int b) {
    if (!alpha.controllable(b)) return true;
    auto now = f.at({});
    return now && *now == b;
}

namespace {

using Tree = std::vector<std::pair<std::vector<int>, int>>;

class StrategyEnumerator {
public:
    StrategyEnumerator(const Plant& plant, int r, std::size_t limit)
        : a_(plant.automaton), r_(r), limit_(limit), local_(a_.alphabet.local_actions(r)),
          memo_(a_.num_states(r)), state_(a_.num_states(r), 0) {
        for (int act : local_)
            if (a_.alphabet.controllable(act) && !a_.alphabet.is_local(act))
                throw InputError("enumerate_local_strategies: controllable communication on the leaf");
    }

    const std::vector<Tree>& trees(int s) {
        if (state_[s] == 2) return memo_[s];
        if (state_[s] == 1)
            throw InputError("enumerate_local_strategies: local cycle on '" + a_.alphabet.processes[r_] +
                             "' (plant is not r-short)");
        state_[s] = 1;
        std::vector<int> ctrl, unctrl;
        for (int act : local_)
            if (local_next(a_, act, s)) (a_.alphabet.controllable(act) ? ctrl : unctrl).push_back(act);
        std::vector<Tree> out;
        std::vector<int> options{kNone};
        options.insert(options.end(), ctrl.begin(), ctrl.end());
        for (int choice : options) {
            std::vector<int> allowed = unctrl;
            if (choice != kNone) allowed.push_back(choice);
            std::sort(allowed.begin(), allowed.end());
            std::vector<const std::vector<Tree>*> kids;
            for (int b : allowed) kids.push_back(&trees(*local_next(a_, b, s)));
            // Cartesian product over the allowed children, first child slowest.
            std::vector<std::size_t> pick(allowed.size(), 0);
            bool empty = false;
            for (auto* k : kids) empty |= k->empty();
            if (empty) continue;
            if (limit_) {
                std::size_t count = 1;
                for (auto* k : kids) count = std::min(count * k->size(), limit_ + 1);
                if (out.size() + count > limit_)
                    throw SizeLimitError("local strategy enumeration exceeds " + std::to_string(limit_));
            }
            while (true) {
                Tree t;
                if (choice != kNone) t.push_back({{}, choice});
                for (std::size_t i = 0; i < allowed.size(); ++i)
                    for (const auto& [v, act] : (*kids[i])[pick[i]]) {
                        std::vector<int> w{allowed[i]};
                        w.insert(w.end(), v.begin(), v.end());
                        t.push_back({std::move(w), act});
                    }
                std::sort(t.begin(), t.end());
                out.push_back(std::move(t));
                bool done = true;
                for (std::size_t i = allowed.size(); i-- > 0;) {
                    if (++pick[i] < kids[i]->size()) {
                        done = false;
                        break;
                    }
                    pick[i] = 0;
                }
                if (done) break;
            }
        }
        state_[s] = 2;
        memo_[s] = std::move(out);
        return memo_[s];
    }

private:
    const Automaton& a_;
    int r_;
    std::size_t limit_;
    std::vector<int> local_;
    std::vector<std::vector<Tree>> memo_;
    std::vector<int> state_;
};

}  // namespace

std::vector<LocalStrategy> enumerate_local_strategies(const Plant& plant, int r, int s_r, std::size_t limit) {
    StrategyEnumerator en(plant, r, limit);
    std::vector<LocalStrategy> out;
    for (const auto& t : en.trees(s_r)) out.push_back({s_r, t});
    return out;
}

bool strategy_guarantees_terminal(const Plant& plant, int r, const LocalStrategy& f) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    const auto local = alpha.local_actions(r);
    std::vector<int> history;
    std::function<bool(int, int)> walk = [&](int s, int depth) {
        if (depth > a.num_states(r) + 1) throw InputError("strategy_guarantees_terminal: plant is not r-short");
        auto offered = f.at(history);
        bool moved = false;
        for (int act : local) {
            if (alpha.controllable(act) && (!offered || *offered != act)) continue;
            auto t = local_next(a, act, s);
            if (!t) continue;
            moved = true;
            history.push_back(act);
            bool ok = walk(*t, depth + 1);
            history.pop_back();
            if (!ok) return false;
        }
        return moved || plant.conditions[r].terminal[s];
    };
    return walk(f.origin, 0);
}

// --- leaf elimination ------------------------------------------------------------------

Reduction reduce(const Plant& plant, int q, int r, std::size_t max_states) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    check_leaf(alpha, q, r, "reduce");
    for (int p : {q, r})
        for (int act : alpha.controllable_of(p))
            if (!alpha.is_local(act))
                throw InputError("reduce: controllable communication '" + alpha.actions[act].name + "'");
    if (!r_short_bound(a, r)) throw InputError("reduce: plant is not r-short for '" + alpha.processes[r] + "'");

    Reduction red;
    red.source = plant;
    red.q = q;
    red.r = r;
    red.num_source_actions = alpha.num_actions();
    red.source_to_proc.assign(alpha.num_processes(), kNone);
    Alphabet na;
    for (int p = 0; p < alpha.num_processes(); ++p) {
        if (p == r) continue;
        red.source_to_proc[p] = na.num_processes();
        red.proc_to_source.push_back(p);
        na.processes.push_back(alpha.processes[p]);
    }
    red.qr = red.source_to_proc[q];
    for (int act = 0; act < alpha.num_actions(); ++act) {
        Action x = alpha.actions[act];
        std::set<int> dom;
        for (int p : x.dom) dom.insert(red.source_to_proc[p == r ? q : p]);
        x.dom.assign(dom.begin(), dom.end());
        if (alpha.involves(act, q) || alpha.involves(act, r)) x.controllable = false;
        na.actions.push_back(std::move(x));
    }
    for (int act : alpha.controllable_of(q)) {
        na.actions.push_back({na.fresh_action_name("ch(" + alpha.actions[act].name + ")"), {red.qr}, true});
        red.ch_choice[act] = na.num_actions() - 1;
    }
    na.actions.push_back({na.fresh_action_name("ch(" + alpha.processes[q] + ":a0)"), {red.qr}, true});
    red.ch_a0 = na.num_actions() - 1;

    StrategyEnumerator en(plant, r, max_states);
    auto intern_strategy = [&](const LocalStrategy& f) {
        auto [it, fresh] = red.strategy_index.emplace(f, static_cast<int>(red.strategies.size()));
        if (fresh) {
            red.strategies.push_back(f);
            red.guarantee.push_back(strategy_guarantees_terminal(plant, r, f));
            na.actions.push_back({na.fresh_action_name("ch(" + alpha.processes[r] + ":f" + std::to_string(it->second) + ")"),
                                  {red.qr},
                                  true});
            red.ch_strategy.push_back(na.num_actions() - 1);
        }
        return it->second;
    };

    using Key = std::tuple<int, int, int, int, int>;
    std::map<Key, int> index;
    std::deque<int> work;
    auto intern = [&](RedQState st) {
        Key k{static_cast<int>(st.shape), st.sq, st.action, st.sr, st.strategy};
        auto [it, fresh] = index.emplace(k, static_cast<int>(red.qstates.size()));
        if (fresh) {
            red.qstates.push_back(st);
            work.push_back(it->second);
            if (max_states && red.qstates.size() > max_states)
                throw SizeLimitError("reduced process exceeds " + std::to_string(max_states) + " states");
        }
        return it->second;
    };
    using Shape = RedQState::Shape;
    struct Pending {
        int action;
        LocalPair from, to;
    };
    std::vector<Pending> pend;
    const auto q_edges = edges_by_source(a, q);
    const auto r_local = alpha.local_actions(r);

    intern({Shape::Pair, a.initial[q], kNone, a.initial[r], kNone});
    while (!work.empty()) {
        const int x = work.front();
        work.pop_front();
        const RedQState st = red.qstates[x];
        auto unary = [&](int act, RedQState to) { pend.push_back({act, {x, kNone}, {intern(to), kNone}}); };
        switch (st.shape) {
        case Shape::Pair:
            // (1) choose the r-strategy
            for (const auto& t : en.trees(st.sr)) {
                int f = intern_strategy({st.sr, t});
                unary(red.ch_strategy[f], {Shape::Triple, st.sq, kNone, st.sr, f});
            }
            break;
        case Shape::Triple:
            // (2) choose a controllable q-action; a0 withholds all of them
            for (int act : alpha.controllable_of(q))
                if (local_next(a, act, st.sq)) unary(red.ch_choice.at(act), {Shape::Quad, st.sq, act, st.sr, st.strategy});
            unary(red.ch_a0, {Shape::Quad, st.sq, kNone, st.sr, st.strategy});
            break;
        case Shape::Quad: {
            for (const auto& e : q_edges[st.sq]) {
                const auto& dom = alpha.dom(e.action);
                const int slot = dom_slot(alpha, e.action, q);
                if (dom.size() == 1) {
                    // (3) the chosen action, (4) uncontrollable local q-moves
                    if (alpha.controllable(e.action) && e.action != st.action) continue;
                    unary(e.action, {Shape::Triple, e.to[0], kNone, st.sr, st.strategy});
                } else if (alpha.involves(e.action, r)) {
                    // (6) synchronisation with r restarts the scaffold
                    const int rs = dom_slot(alpha, e.action, r);
                    if (e.from[rs] != st.sr) continue;
                    unary(e.action, {Shape::Pair, e.to[slot], kNone, e.to[rs], kNone});
                } else {
                    // (7) communication with another neighbour
                    LocalPair f = e.from, t = e.to;
                    f[slot] = x;
                    t[slot] = intern({Shape::Triple, e.to[slot], kNone, st.sr, st.strategy});
                    pend.push_back({e.action, f, t});
                }
            }
            // (5) local r-moves allowed by the strategy keep the 4-tuple shape
            const LocalStrategy f = red.strategies[st.strategy];
            for (int act : r_local) {
                if (!strategy_allows(alpha, f, act)) continue;
                auto t = local_next(a, act, st.sr);
                if (!t) continue;
                int g = intern_strategy(f.residual(act, *t));
                unary(act, {Shape::Quad, st.sq, st.action, *t, g});
            }
            break;
        }
        }
    }

    Plant out;
    out.automaton = Automaton(na);
    auto& b = out.automaton;
    for (int p = 0; p < alpha.num_processes(); ++p) {
        if (p == r || p == q) continue;
        b.states[red.source_to_proc[p]] = a.states[p];
        b.initial[red.source_to_proc[p]] = a.initial[p];
    }
    for (const auto& st : red.qstates) {
        std::string f = st.strategy == kNone ? "" : "f" + std::to_string(st.strategy);
        std::string name;
        switch (st.shape) {
        case Shape::Pair: name = "<" + a.states[q][st.sq] + "," + a.states[r][st.sr] + ">"; break;
        case Shape::Triple: name = "<" + a.states[q][st.sq] + "," + a.states[r][st.sr] + "," + f + ">"; break;
        case Shape::Quad:
            name = "<" + a.states[q][st.sq] + "," + (st.action == kNone ? "-" : alpha.actions[st.action].name) + "," +
                   a.states[r][st.sr] + "," + f + ">";
            break;
        }
        b.add_state(red.qr, name);
    }
    b.initial[red.qr] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, q) && !alpha.involves(act, r))
            for (const auto& [f, t] : a.delta(act)) b.add_transition(act, f, t);
    for (const auto& e : pend) b.add_transition(e.action, e.from, e.to);

    for (int p : red.proc_to_source) {
        if (p != q) {
            out.conditions.push_back(plant.conditions[p]);
            continue;
        }
        LocalCondition c;
        for (const auto& st : red.qstates) {
            c.terminal.push_back(st.shape == Shape::Quad && plant.conditions[q].terminal[st.sq] &&
                                 plant.conditions[r].terminal[st.sr]);
            c.rank.push_back(0);
        }
        out.conditions.push_back(std::move(c));
    }
    red.plant = std::move(out);
    return red;
}

std::size_t reduce_size_bound(const Reduction& red) {
    const auto& a = red.source.automaton;
    const std::size_t sq = a.num_states(red.q), sr = a.num_states(red.r);
    const std::size_t sys = a.alphabet.controllable_of(red.q).size();
    return sq * sr * (red.strategies.size() + 1) * (sys + 2);
}

// --- compiled condition ------------------------------------------------------------

namespace {

// Streett pairs (rank == odd, rank > odd) over the two rank streams.
struct StreettPairs {
    std::vector<int> stream;  // 0 = q stream, 1 = r stream
    std::vector<int> odd;

    void add(int s, const std::set<int>& ranks) {
        for (int v : ranks)
            if (v % 2 == 1) {
                stream.push_back(s);
                odd.push_back(v);
            }
    }
    int size() const { return static_cast<int>(odd.size()); }
};

struct Letter {
    int qrank;
    int rrank;
};

Letter letter(const Reduction& red, int x, bool moved) {
    const auto& st = red.qstates[x];
    Letter l{red.source.conditions[red.q].rank[st.sq], 0};
    if (moved)
        l.rrank = 2 + red.source.conditions[red.r].rank[st.sr];
    else if (st.strategy != kNone)
        l.rrank = red.guarantee[st.strategy] ? 0 : 1;
    return l;
}

// Output priority and successor record of an index appearance record.
std::pair<int, std::vector<int>> iar_step(const StreettPairs& pairs, const std::vector<int>& perm, const Letter& l) {
    int gpos = 0, rpos = 0;
    std::vector<int> front, back;
    for (std::size_t pos = 0; pos < perm.size(); ++pos) {
        const int i = perm[pos];
        const int v = pairs.stream[i] == 0 ? l.qrank : l.rrank;
        if (v > pairs.odd[i]) {
            gpos = static_cast<int>(pos) + 1;
            front.push_back(i);
        } else {
            if (v == pairs.odd[i]) rpos = static_cast<int>(pos) + 1;
            back.push_back(i);
        }
    }
    front.insert(front.end(), back.begin(), back.end());
    return {std::max({2 * gpos, 2 * rpos - 1, 0}), front};
}

}  // namespace

CompiledReduction compile_red_condition(const Reduction& red, std::size_t max_states) {
    const auto& ra = red.plant.automaton;
    const auto& alpha = ra.alphabet;
    const int q = red.qr;
    const auto& src_alpha = red.source.automaton.alphabet;

    std::set<int> qranks, rranks{0, 1};
    for (const auto& st : red.qstates) {
        qranks.insert(red.source.conditions[red.q].rank[st.sq]);
        rranks.insert(2 + red.source.conditions[red.r].rank[st.sr]);
    }
    StreettPairs pairs;
    pairs.add(0, qranks);
    pairs.add(1, rranks);

    std::vector<int> identity(pairs.size());
    for (int i = 0; i < pairs.size(); ++i) identity[i] = i;

    std::map<std::vector<int>, int> perm_index;
    std::vector<std::vector<int>> perms;
    auto perm_id = [&](const std::vector<int>& p) {
        auto [it, fresh] = perm_index.emplace(p, static_cast<int>(perms.size()));
        if (fresh) perms.push_back(p);
        return it->second;
    };

    CompiledReduction out;
    using Key = std::tuple<int, bool, int>;
    std::map<Key, int> index;
    std::vector<Key> keys;
    std::vector<int> prio;
    std::deque<int> work;
    auto intern = [&](int x, bool moved, int perm) {
        Key k{x, moved, perm};
        auto [it, fresh] = index.emplace(k, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(k);
            work.push_back(it->second);
            if (max_states && keys.size() > max_states)
                throw SizeLimitError("compiled condition exceeds " + std::to_string(max_states) + " states");
        }
        return it->second;
    };

    auto q_edges = edges_by_source(ra, q);
    struct Pending {
        int action;
        LocalPair from, to;
    };
    std::vector<Pending> pend;
    intern(ra.initial[q], false, perm_id(identity));
    while (!work.empty()) {
        const int y = work.front();
        work.pop_front();
        const auto [x, moved, perm] = keys[y];
        auto [pr, next] = iar_step(pairs, perms[perm], letter(red, x, moved));
        prio.push_back(pr);
        const int np = perm_id(next);
        for (const auto& e : q_edges[x]) {
            const int slot = dom_slot(alpha, e.action, q);
            const bool r_move = e.action < red.num_source_actions && src_alpha.involves(e.action, red.r);
            LocalPair f = e.from, t = e.to;
            f[slot] = y;
            t[slot] = intern(e.to[slot], r_move, np);
            pend.push_back({e.action, f, t});
        }
    }

    Plant p;
    p.automaton = Automaton(alpha);
    auto& b = p.automaton;
    for (int k = 0; k < ra.num_processes(); ++k) {
        if (k == q) continue;
        b.states[k] = ra.states[k];
        b.initial[k] = ra.initial[k];
    }
    p.conditions = red.plant.conditions;
    LocalCondition c;
    for (std::size_t y = 0; y < keys.size(); ++y) {
        const auto& [x, moved, perm] = keys[y];
        std::string order;
        for (int i : perms[perm]) order += std::to_string(i);
        b.add_state(q, ra.states[q][x] + "#" + (moved ? "r" : "-") + order);
        out.base.push_back(x);
        c.terminal.push_back(red.plant.conditions[q].terminal[x]);
        c.rank.push_back(prio[y]);
    }
    b.initial[q] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, q))
            for (const auto& [f, t] : ra.delta(act)) b.add_transition(act, f, t);
    for (const auto& e : pend) b.add_transition(e.action, e.from, e.to);
    p.conditions[q] = std::move(c);
    out.plant = std::move(p);
    return out;
}

bool red_condition_holds(const Reduction& red, const std::vector<int>& states, const std::vector<int>& actions,
                         int loop) {
    if (states.empty() || actions.size() + 1 != states.size())
        throw InputError("red_condition_holds: malformed run");
    if (loop == kNone) return red.plant.conditions[red.qr].terminal[states.back()];
    if (loop < 0 || loop >= static_cast<int>(actions.size()) || states[loop] != states.back())
        throw InputError("red_condition_holds: malformed lasso");
    const auto& src_alpha = red.source.automaton.alphabet;
    const auto& cq = red.source.conditions[red.q];
    const auto& cr = red.source.conditions[red.r];
    int qmax = 0, rmax = -1;
    for (std::size_t i = loop; i < actions.size(); ++i) {
        const auto& st = red.qstates[states[i + 1]];
        qmax = std::max(qmax, cq.rank[st.sq]);
        const int act = actions[i];
        if (act < red.num_source_actions && src_alpha.involves(act, red.r)) rmax = std::max(rmax, cr.rank[st.sr]);
    }
    if (qmax % 2 == 1) return false;
    if (rmax >= 0) return rmax % 2 == 0;
    const auto& st = red.qstates[states.back()];
    return st.strategy != kNone && red.guarantee[st.strategy];
}

}  // namespace zsynth
