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

#include "zsynth/lift.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <tuple>

namespace zsynth {

namespace {

struct Edge {
    int action;
    LocalPair from;
    LocalPair to;
};

std::vector<std::vector<Edge>> out_edges(const Automaton& a, int p) {
    std::vector<std::vector<Edge>> out(a.num_states(p));
    for (int act : a.alphabet.actions_of(p)) {
        const int slot = dom_slot(a.alphabet, act, p);
        for (const auto& [f, t] : a.delta(act)) out[f[slot]].push_back({act, f, t});
    }
    return out;
}

Controller empty_like(const Alphabet& alpha) {
    Controller c;
    c.automaton = Automaton(alpha);
    c.pi.resize(alpha.num_processes());
    return c;
}

// Copies process p of `from` into process p2 of `to`, states and pi.
void copy_process(const Controller& from, int p, Controller& to, int p2) {
    to.automaton.states[p2] = from.automaton.states[p];
    to.automaton.initial[p2] = from.automaton.initial[p];
    to.pi[p2] = from.pi[p];
}

std::string join_actions(const Alphabet& alpha, const std::vector<int>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "." : "") + alpha.actions[w[i]].name;
    return s;
}

}  // namespace

// --- plumbing ----------------------------------------------------------------

Controller coarsen(const Controller& c, const Automaton& coarse_plant, int p, const std::vector<int>& base) {
    Controller out = c;
    for (int& s : out.pi[p]) s = base[s];
    complete_uncontrollable(out, coarse_plant);
    return out;
}

Controller refine(const Controller& c, const Plant& refined, int p, const std::vector<int>& base) {
    const auto& ca = c.automaton;
    const auto& ra = refined.automaton;
    const auto& alpha = ca.alphabet;
    if (base[ra.initial[p]] != c.pi[p][ca.initial[p]]) throw InputError("refine: initial states do not match");

    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> keys;
    std::deque<int> work;
    auto intern = [&](int x, int y) {
        auto [it, fresh] = index.emplace(std::make_pair(x, y), static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back({x, y});
            work.push_back(it->second);
        }
        return it->second;
    };
    auto edges = out_edges(ca, p);
    std::vector<Edge> pend;
    intern(ca.initial[p], ra.initial[p]);
    while (!work.empty()) {
        const int k = work.front();
        work.pop_front();
        const auto [x, y] = keys[k];
        for (const auto& e : edges[x]) {
            const int slot = dom_slot(alpha, e.action, p);
            LocalPair src{kNone, kNone};
            for (std::size_t i = 0; i < alpha.dom(e.action).size(); ++i) {
                const int q = alpha.dom(e.action)[i];
                src[i] = static_cast<int>(i) == slot ? y : c.pi[q][e.from[i]];
            }
            auto t = ra.next(e.action, src);
            if (!t) continue;
            LocalPair f = e.from, to = e.to;
            f[slot] = k;
            to[slot] = intern(e.to[slot], (*t)[slot]);
            pend.push_back({e.action, f, to});
        }
    }

    Controller out = empty_like(alpha);
    for (int q = 0; q < alpha.num_processes(); ++q)
        if (q != p) copy_process(c, q, out, q);
    for (const auto& [x, y] : keys) {
        out.automaton.add_state(p, ca.states[p][x] + "@" + ra.states[p][y]);
        out.pi[p].push_back(y);
    }
    out.automaton.initial[p] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, p))
            for (const auto& [f, t] : ca.delta(act)) out.automaton.add_transition(act, f, t);
    for (const auto& e : pend) out.automaton.add_transition(e.action, e.from, e.to);
    return pruned(out, ra);
}

// --- localization ---------------------------------------------------------------

Controller forward_localize(const Localization& loc, const Controller& c, const Plant& source) {
    const auto& ca = c.automaton;
    const auto& alpha = ca.alphabet;
    const auto& la = loc.plant.automaton;
    const int np = alpha.num_processes();

    std::map<std::pair<int, std::vector<int>>, int> ch_action;
    for (std::size_t i = 0; i < loc.ch_sets.size(); ++i)
        ch_action[loc.ch_sets[i]] = loc.num_source_actions + static_cast<int>(i);
    std::map<std::tuple<int, int, std::vector<int>>, int> choice_state;
    for (int p = 0; p < np; ++p)
        for (int x = 0; x < la.num_states(p); ++x)
            if (loc.is_choice_state(p, x)) choice_state[{p, loc.base[p][x], loc.choice[p][x]}] = x;

    Controller out = empty_like(la.alphabet);
    std::vector<std::vector<std::vector<int>>> enabled(np);
    std::vector<int> offset(np);
    for (int p = 0; p < np; ++p) {
        const int n = ca.num_states(p);
        offset[p] = n;
        out.automaton.states[p] = ca.states[p];
        out.automaton.initial[p] = ca.initial[p];
        out.pi[p] = c.pi[p];
        for (int x = 0; x < n; ++x) enabled[p].push_back(enabled_controllable(ca, p, x));
    }
    // Local choices can only express joint decisions that are products.
    auto in = [](const std::vector<int>& v, int x) { return std::binary_search(v.begin(), v.end(), x); };
    for (const auto& g : reachable_states(ca)) {
        for (int act = 0; act < alpha.num_actions(); ++act) {
            const auto& dom = alpha.dom(act);
            if (dom.size() != 2 || !alpha.controllable(act)) continue;
            const int x = g[dom[0]], y = g[dom[1]];
            if (!in(enabled[dom[0]][x], act) || !in(enabled[dom[1]][y], act) || ca.next(act, {x, y})) continue;
            if (source.automaton.next(act, {c.pi[dom[0]][x], c.pi[dom[1]][y]}))
                throw StructuralError("forward_localize: controller blocks '" + alpha.actions[act].name + "' at (" +
                                      ca.states[dom[0]][x] + "," + ca.states[dom[1]][y] +
                                      ") although both sides offer it");
        }
    }
    for (int p = 0; p < np; ++p) {
        const int n = ca.num_states(p);
        for (int x = 0; x < n; ++x) {
            auto it = choice_state.find({p, c.pi[p][x], enabled[p][x]});
            auto ch = ch_action.find({p, enabled[p][x]});
            if (it == choice_state.end() || ch == ch_action.end())
                throw InputError("forward_localize: controller does not cover the plant at '" + ca.states[p][x] + "'");
            out.automaton.add_state(p, tuple_name({ca.states[p][x], "ch"}));
            out.pi[p].push_back(it->second);
            out.automaton.add_transition(ch->second, {x, kNone}, {n + x, kNone});
        }
    }
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.dom(act);
        const bool ctrl = source.alphabet().controllable(act);
        for (const auto& [f, t] : ca.delta(act)) {
            if (dom.size() == 1) {
                const int p = dom[0];
                if (!ctrl) out.automaton.add_transition(act, f, t);
                out.automaton.add_transition(act, {offset[p] + f[0], kNone}, t);
                continue;
            }
            const int p0 = dom[0], p1 = dom[1];
            const int c0 = offset[p0] + f[0], c1 = offset[p1] + f[1];
            out.automaton.add_transition(act, {c0, c1}, t);
            if (ctrl) continue;
            out.automaton.add_transition(act, f, t);
            out.automaton.add_transition(act, {c0, f[1]}, t);
            out.automaton.add_transition(act, {f[0], c1}, t);
        }
    }
    return pruned(out, la);
}

Controller lift_localize(const Localization& loc, const Controller& c, const Plant& source) {
    const auto& ca = c.automaton;
    const auto& alpha = source.alphabet();
    const int np = alpha.num_processes();

    std::vector<std::vector<int>> keep(np), chosen(np);
    Controller out = empty_like(alpha);
    for (int p = 0; p < np; ++p) {
        keep[p].assign(ca.num_states(p), kNone);
        chosen[p].assign(ca.num_states(p), kNone);
        for (int x = 0; x < ca.num_states(p); ++x) {
            if (loc.is_choice_state(p, c.pi[p][x])) continue;
            keep[p][x] = out.automaton.add_state(p, ca.states[p][x]);
            out.pi[p].push_back(c.pi[p][x]);
            for (int act = loc.num_source_actions; act < ca.alphabet.num_actions(); ++act) {
                if (ca.alphabet.dom(act)[0] != p) continue;
                if (auto t = ca.next(act, {x, kNone})) {
                    chosen[p][x] = (*t)[0];
                    break;
                }
            }
        }
        if (keep[p][ca.initial[p]] == kNone) throw InputError("lift_localize: initial state is a choice state");
        out.automaton.initial[p] = keep[p][ca.initial[p]];
    }
    // chosen_by[p][d]: states whose choice leads to d
    std::vector<std::vector<std::vector<int>>> chosen_by(np);
    for (int p = 0; p < np; ++p) {
        chosen_by[p].resize(ca.num_states(p));
        for (int x = 0; x < ca.num_states(p); ++x)
            if (keep[p][x] != kNone && chosen[p][x] != kNone) chosen_by[p][chosen[p][x]].push_back(x);
    }
    for (int act = 0; act < loc.num_source_actions; ++act) {
        const auto& dom = alpha.dom(act);
        const bool ctrl = alpha.controllable(act);
        for (const auto& [f, t] : ca.delta(act)) {
            LocalPair to{kNone, kNone};
            bool ok = true;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                to[i] = keep[dom[i]][t[i]];
                ok &= to[i] != kNone;
            }
            if (!ok) continue;
            if (!ctrl) {
                LocalPair from{kNone, kNone};
                for (std::size_t i = 0; i < dom.size(); ++i) {
                    from[i] = keep[dom[i]][f[i]];
                    ok &= from[i] != kNone;
                }
                if (ok) out.automaton.add_transition(act, from, to);
                continue;
            }
            if (dom.size() == 1) {
                for (int x : chosen_by[dom[0]][f[0]]) out.automaton.add_transition(act, {keep[dom[0]][x], kNone}, to);
                continue;
            }
            for (int x : chosen_by[dom[0]][f[0]])
                for (int y : chosen_by[dom[1]][f[1]])
                    out.automaton.add_transition(act, {keep[dom[0]][x], keep[dom[1]][y]}, to);
        }
    }
    return pruned(out, source.automaton);
}

// --- shortening -----------------------------------------------------------------

Controller forward_short(const Shortening& sh, const Controller& c) {
    const auto& ca = c.automaton;
    const auto& alpha = ca.alphabet;
    const auto& sa = sh.plant.automaton;
    const int r = sh.r;
    std::map<std::vector<int>, int> seq_index;
    for (std::size_t i = 0; i < sh.seq.size(); ++i)
        if (!sh.seq[i].empty()) seq_index[sh.seq[i]] = static_cast<int>(i);

    std::map<std::pair<int, int>, int> index;
    std::vector<std::pair<int, int>> keys;
    std::deque<int> work;
    auto intern = [&](int x, int w) {
        auto [it, fresh] = index.emplace(std::make_pair(x, w), static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back({x, w});
            work.push_back(it->second);
        }
        return it->second;
    };
    auto edges = out_edges(ca, r);
    std::vector<Edge> pend;
    if (sh.seq[sa.initial[r]] != std::vector<int>{c.pi[r][ca.initial[r]]})
        throw InputError("forward_short: initial states do not match");
    intern(ca.initial[r], sa.initial[r]);
    while (!work.empty()) {
        const int k = work.front();
        work.pop_front();
        const auto [x, w] = keys[k];
        if (w == sh.top || w == sh.bottom) continue;
        for (const auto& e : edges[x]) {
            const int slot = dom_slot(alpha, e.action, r);
            const int d = e.to[slot];
            int w2;
            if (alpha.is_local(e.action)) {
                auto t = sa.next(e.action, {w, kNone});
                if (!t) throw InputError("forward_short: controller does not cover the plant");
                w2 = (*t)[0];
            } else {
                auto it = seq_index.find({c.pi[r][d]});
                if (it == seq_index.end()) throw InputError("forward_short: controller does not cover the plant");
                w2 = it->second;
            }
            LocalPair f = e.from, t = e.to;
            f[slot] = k;
            t[slot] = intern(d, w2);
            pend.push_back({e.action, f, t});
        }
    }

    Controller out = empty_like(alpha);
    for (int p = 0; p < alpha.num_processes(); ++p)
        if (p != r) copy_process(c, p, out, p);
    for (const auto& [x, w] : keys) {
        out.automaton.add_state(r, ca.states[r][x] + "@" + sa.states[r][w]);
        out.pi[r].push_back(w);
    }
    out.automaton.initial[r] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, r))
            for (const auto& [f, t] : ca.delta(act)) out.automaton.add_transition(act, f, t);
    for (const auto& e : pend) out.automaton.add_transition(e.action, e.from, e.to);
    return pruned(out, sa);
}

Controller lift_short(const Shortening& sh, const Plant& aware, const Controller& c) {
    const auto& ca = c.automaton;
    const auto& alpha = ca.alphabet;
    const auto& aa = aware.automaton;
    const int r = sh.r;
    const std::size_t cap = static_cast<std::size_t>(ca.num_states(r));

    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> keys;
    std::deque<int> work;
    auto intern = [&](const std::vector<int>& stack) {
        if (stack.size() > cap) throw InputError("lift_short: local history longer than the short controller");
        auto [it, fresh] = index.emplace(stack, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(stack);
            work.push_back(it->second);
        }
        return it->second;
    };
    auto seq_of = [&](int x) -> const std::vector<int>& {
        const auto& w = sh.seq[c.pi[r][x]];
        if (w.empty()) throw InputError("lift_short: controller state '" + ca.states[r][x] + "' covers a sink");
        return w;
    };
    auto edges = out_edges(ca, r);
    std::vector<Edge> pend;
    intern({ca.initial[r]});
    while (!work.empty()) {
        const int k = work.front();
        work.pop_front();
        const std::vector<int> stack = keys[k];
        const int top = stack.back();
        const auto& w = seq_of(top);
        for (const auto& e : edges[top]) {
            const int slot = dom_slot(alpha, e.action, r);
            const int d = e.to[slot];
            int target;
            if (!alpha.is_local(e.action)) {
                target = intern({d});
            } else if (c.pi[r][d] == sh.bottom) {
                continue;
            } else if (c.pi[r][d] == sh.top) {
                auto t = aa.next(e.action, {w.back(), kNone});
                if (!t) throw InputError("lift_short: controller does not cover the plant");
                auto pos = std::find(w.begin(), w.end(), (*t)[0]);
                if (pos == w.end() || pos - w.begin() >= static_cast<long>(stack.size()))
                    throw InputError("lift_short: loop target is not on the local history");
                target = intern(std::vector<int>(stack.begin(), stack.begin() + (pos - w.begin()) + 1));
            } else {
                auto s2 = stack;
                s2.push_back(d);
                target = intern(s2);
            }
            LocalPair f = e.from, t = e.to;
            f[slot] = k;
            t[slot] = target;
            pend.push_back({e.action, f, t});
        }
    }

    Controller out = empty_like(alpha);
    for (int p = 0; p < alpha.num_processes(); ++p)
        if (p != r) copy_process(c, p, out, p);
    for (const auto& stack : keys) {
        std::string name;
        for (std::size_t i = 0; i < stack.size(); ++i) name += (i ? "." : "") + ca.states[r][stack[i]];
        out.automaton.add_state(r, "[" + name + "]");
        out.pi[r].push_back(seq_of(stack.back()).back());
    }
    out.automaton.initial[r] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, r))
            for (const auto& [f, t] : ca.delta(act)) out.automaton.add_transition(act, f, t);
    for (const auto& e : pend) out.automaton.add_transition(e.action, e.from, e.to);
    return pruned(out, aa);
}

// --- reduction ------------------------------------------------------------------

Controller single_choice(const Controller& c, int p) {
    Controller out = c;
    auto& a = out.automaton;
    const auto ctrl = a.alphabet.controllable_of(p);
    for (int x = 0; x < a.num_states(p); ++x) {
        bool kept = false;
        for (int act : ctrl) {
            if (!a.alphabet.is_local(act) || !a.next(act, {x, kNone})) continue;
            if (kept) a.erase_transition(act, {x, kNone});
            kept = true;
        }
    }
    return out;
}

LocalStrategy strategy_of(const Controller& c, int r, int c_r) {
    const auto& a = c.automaton;
    const auto local = a.alphabet.local_actions(r);
    LocalStrategy f;
    f.origin = c.pi[r][c_r];
    std::vector<int> history;
    std::function<void(int)> walk = [&](int x) {
        if (history.size() > static_cast<std::size_t>(a.num_states(r)))
            throw InputError("strategy_of: local cycle in the controller's leaf component");
        int offered = kNone;
        for (int act : local)
            if (a.alphabet.controllable(act) && a.next(act, {x, kNone})) {
                offered = act;
                break;
            }
        if (offered != kNone) f.moves.push_back({history, offered});
        for (int act : local) {
            if (a.alphabet.controllable(act) && act != offered) continue;
            auto t = a.next(act, {x, kNone});
            if (!t) continue;
            history.push_back(act);
            walk((*t)[0]);
            history.pop_back();
        }
    };
    walk(c_r);
    std::sort(f.moves.begin(), f.moves.end());
    return f;
}

Controller forward_red(const Reduction& red, const Controller& input) {
    const int q = red.q, r = red.r, qr = red.qr;
    const Controller c = single_choice(single_choice(input, q), r);
    const auto& ca = c.automaton;
    const auto& alpha = ca.alphabet;
    const auto& ra = red.plant.automaton;
    using Shape = RedQState::Shape;

    std::map<std::tuple<int, int, int, int, int>, int> red_index;
    for (std::size_t i = 0; i < red.qstates.size(); ++i) {
        const auto& s = red.qstates[i];
        red_index[{static_cast<int>(s.shape), s.sq, s.action, s.sr, s.strategy}] = static_cast<int>(i);
    }
    std::vector<int> strat(ca.num_states(r), -2);
    auto strategy = [&](int cr) {
        if (strat[cr] == -2) {
            auto it = red.strategy_index.find(strategy_of(c, r, cr));
            if (it == red.strategy_index.end())
                throw StructuralError("forward_red: controller plays a strategy the reduced plant does not offer");
            strat[cr] = it->second;
        }
        return strat[cr];
    };
    auto chosen = [&](int cq) {
        for (int act : alpha.controllable_of(q))
            if (alpha.is_local(act) && ca.next(act, {cq, kNone})) return act;
        return kNone;
    };

    using Key = std::tuple<int, int, int>;  // shape, c_q, c_r
    std::map<Key, int> index;
    std::vector<Key> keys;
    std::deque<int> work;
    auto intern = [&](Shape sh, int cq, int cr) {
        Key k{static_cast<int>(sh), cq, cr};
        auto [it, fresh] = index.emplace(k, static_cast<int>(keys.size()));
        if (fresh) {
            keys.push_back(k);
            work.push_back(it->second);
        }
        return it->second;
    };
    const auto q_edges = out_edges(ca, q);
    const auto r_edges = out_edges(ca, r);
    std::vector<Edge> pend;
    intern(Shape::Pair, ca.initial[q], ca.initial[r]);
    while (!work.empty()) {
        const int k = work.front();
        work.pop_front();
        const auto [shape_i, cq, cr] = keys[k];
        const auto shape = static_cast<Shape>(shape_i);
        auto unary = [&](int act, int target) { pend.push_back({act, {k, kNone}, {target, kNone}}); };
        if (shape == Shape::Pair) {
            unary(red.ch_strategy[strategy(cr)], intern(Shape::Triple, cq, cr));
            continue;
        }
        if (shape == Shape::Triple) {
            const int a = chosen(cq);
            unary(a == kNone ? red.ch_a0 : red.ch_choice.at(a), intern(Shape::Quad, cq, cr));
            continue;
        }
        for (const auto& e : q_edges[cq]) {
            const int slot = dom_slot(alpha, e.action, q);
            const auto& dom = alpha.dom(e.action);
            if (dom.size() == 1) {
                unary(e.action, intern(Shape::Triple, e.to[0], cr));
            } else if (alpha.involves(e.action, r)) {
                const int rs = dom_slot(alpha, e.action, r);
                if (e.from[rs] != cr) continue;
                unary(e.action, intern(Shape::Pair, e.to[slot], e.to[rs]));
            } else {
                LocalPair f = e.from, t = e.to;
                f[slot] = k;
                t[slot] = intern(Shape::Triple, e.to[slot], cr);
                pend.push_back({e.action, f, t});
            }
        }
        for (const auto& e : r_edges[cr])
            if (alpha.is_local(e.action)) unary(e.action, intern(Shape::Quad, cq, e.to[0]));
    }

    Controller out = empty_like(ra.alphabet);
    for (int p = 0; p < alpha.num_processes(); ++p)
        if (p != q && p != r) copy_process(c, p, out, red.source_to_proc[p]);
    for (const auto& [shape_i, cq, cr] : keys) {
        const auto shape = static_cast<Shape>(shape_i);
        const int sq = c.pi[q][cq], sr = c.pi[r][cr];
        int target = kNone;
        std::string name;
        if (shape == Shape::Pair) {
            auto it = red_index.find({shape_i, sq, kNone, sr, kNone});
            if (it != red_index.end()) target = it->second;
            name = "<" + ca.states[q][cq] + "," + ca.states[r][cr] + ">";
        } else {
            const int f = strategy(cr);
            const int a = shape == Shape::Quad ? chosen(cq) : kNone;
            auto it = red_index.find({shape_i, sq, a, sr, f});
            if (it != red_index.end()) target = it->second;
            name = "<" + ca.states[q][cq] + "," + (shape == Shape::Quad ? (a == kNone ? "-," : alpha.actions[a].name + ",") : "") +
                   ca.states[r][cr] + ",f" + std::to_string(f) + ">";
        }
        if (target == kNone) throw StructuralError("forward_red: no reduced plant state for " + name);
        out.automaton.add_state(qr, name);
        out.pi[qr].push_back(target);
    }
    out.automaton.initial[qr] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, q) && !alpha.involves(act, r))
            for (const auto& [f, t] : ca.delta(act)) out.automaton.add_transition(act, f, t);
    for (const auto& e : pend) out.automaton.add_transition(e.action, e.from, e.to);
    return pruned(out, ra);
}

namespace {

// The ch move of a reduced q-state that lifting follows: lowest target, then
// lowest action.
std::pair<int, int> chosen_ch(const Reduction& red, const Controller& rd, int x) {
    const auto& a = rd.automaton;
    std::pair<int, int> best{kNone, kNone};
    for (int act = red.num_source_actions; act < a.alphabet.num_actions(); ++act) {
        auto t = a.next(act, {x, kNone});
        if (t && (best.second == kNone || (*t)[0] < best.second)) best = {act, (*t)[0]};
    }
    return best;
}

class TrueStates {
public:
    TrueStates(const Reduction& red, const Controller& rd) : red_(red), rd_(rd) {}

    // ts(x), kNone when the controller stops choosing.
    int operator()(int x) const {
        for (int steps = 0; steps < 3; ++steps) {
            if (red_.is_true_state(rd_.pi[red_.qr][x])) return x;
            x = chosen_ch(red_, rd_, x).second;
            if (x == kNone) return kNone;
        }
        return kNone;
    }

private:
    const Reduction& red_;
    const Controller& rd_;
};

}  // namespace

LiftedRed lift_red(const Reduction& red, const Controller& rd) {
    const int q = red.q, r = red.r, qr = red.qr;
    const auto& sa = red.source.automaton;
    const auto& alpha = sa.alphabet;
    const auto& da = rd.automaton;
    TrueStates ts(red, rd);

    const int d1 = ts(da.initial[qr]);
    if (d1 == kNone) throw InputError("lift_red: reduced controller never reaches a true state");

    const auto r_local = alpha.local_actions(r);
    std::vector<int> qr_comm;
    for (int act : alpha.actions_of(r))
        if (!alpha.is_local(act)) qr_comm.push_back(act);

    std::map<std::pair<int, std::vector<int>>, std::optional<int>> run_memo;
    std::function<std::optional<int>(int, const std::vector<int>&)> run_from = [&](int d, const std::vector<int>& x) {
        auto key = std::make_pair(d, x);
        auto it = run_memo.find(key);
        if (it != run_memo.end()) return it->second;
        std::optional<int> res = d;
        if (!x.empty()) {
            auto prev = run_from(d, std::vector<int>(x.begin(), x.end() - 1));
            res = std::nullopt;
            if (prev)
                if (auto t = da.next(x.back(), {*prev, kNone})) res = (*t)[0];
        }
        run_memo.emplace(key, res);
        return res;
    };

    LiftedRed out;
    std::map<int, int> q_index;
    std::map<std::pair<int, std::vector<int>>, int> r_index;
    std::deque<std::pair<bool, int>> work;  // (is r-state, index)
    std::vector<bool> q_done, r_done;
    auto add_q = [&](int d) {
        auto [it, fresh] = q_index.emplace(d, static_cast<int>(out.q_origin.size()));
        if (fresh) {
            out.q_origin.push_back(d);
            q_done.push_back(false);
            work.push_back({false, it->second});
        }
        return it->second;
    };
    auto add_r = [&](int d, const std::vector<int>& x) {
        auto [it, fresh] = r_index.emplace(std::make_pair(d, x), static_cast<int>(out.r_origin.size()));
        if (fresh) {
            out.r_origin.push_back({d, x});
            r_done.push_back(false);
            work.push_back({true, it->second});
        }
        return it->second;
    };
    auto order = [&](int act, int qv, int rv) {
        return dom_slot(alpha, act, q) == 0 ? LocalPair{qv, rv} : LocalPair{rv, qv};
    };

    std::vector<Edge> pend;
    const auto d_edges = out_edges(da, qr);
    auto qr_pair = [&](int i, int j) {
        const int dq = out.q_origin[i];
        const auto& [d2, x] = out.r_origin[j];
        // Pairs whose s_r or f disagree are unreachable; leaving them out
        // keeps every transition mapped onto the plant.
        const auto& s1 = red.qstates[rd.pi[qr][dq]];
        const auto& s2 = red.qstates[rd.pi[qr][d2]];
        if (s1.sr != s2.sr || s1.strategy != s2.strategy) return;
        auto y = run_from(dq, x);
        if (!y) return;
        for (int act : qr_comm) {
            auto t = da.next(act, {*y, kNone});
            if (!t) continue;
            const int d = ts((*t)[0]);
            if (d == kNone) continue;
            const int ti = add_q(d), tj = add_r(d, {});
            pend.push_back({act, order(act, i, j), order(act, ti, tj)});
        }
    };

    add_q(d1);
    add_r(d1, {});
    while (!work.empty()) {
        const auto [is_r, i] = work.front();
        work.pop_front();
        if (!is_r) {
            const int d = out.q_origin[i];
            for (const auto& e : d_edges[d]) {
                if (e.action >= red.num_source_actions || !alpha.involves(e.action, q) ||
                    alpha.involves(e.action, r))
                    continue;
                const int slot = dom_slot(da.alphabet, e.action, qr);
                const int t = ts(e.to[slot]);
                if (t == kNone) continue;
                LocalPair f = e.from, to = e.to;
                f[slot] = i;
                to[slot] = add_q(t);
                pend.push_back({e.action, f, to});
            }
            for (std::size_t j = 0; j < r_done.size(); ++j)
                if (r_done[j]) qr_pair(i, static_cast<int>(j));
            q_done[i] = true;
        } else {
            const auto [d, x] = out.r_origin[i];
            auto y = run_from(d, x);
            if (y)
                for (int act : r_local)
                    if (da.next(act, {*y, kNone})) {
                        auto x2 = x;
                        x2.push_back(act);
                        pend.push_back({act, {i, kNone}, {add_r(d, x2), kNone}});
                    }
            for (std::size_t j = 0; j < q_done.size(); ++j)
                if (q_done[j]) qr_pair(static_cast<int>(j), i);
            r_done[i] = true;
        }
    }

    Controller c = empty_like(alpha);
    for (int p = 0; p < alpha.num_processes(); ++p)
        if (p != q && p != r) copy_process(rd, red.source_to_proc[p], c, p);
    auto reduced_of = [&](int x) -> const RedQState& { return red.qstates[rd.pi[qr][x]]; };
    for (int d : out.q_origin) {
        c.automaton.add_state(q, da.states[qr][d]);
        c.pi[q].push_back(reduced_of(d).sq);
    }
    for (const auto& [d, x] : out.r_origin) {
        c.automaton.add_state(r, da.states[qr][d] + "/" + join_actions(alpha, x));
        c.pi[r].push_back(reduced_of(*run_from(d, x)).sr);
    }
    c.automaton.initial[q] = 0;
    c.automaton.initial[r] = 0;
    for (int act = 0; act < alpha.num_actions(); ++act)
        if (!alpha.involves(act, q) && !alpha.involves(act, r))
            for (const auto& [f, t] : da.delta(act)) c.automaton.add_transition(act, f, t);
    for (const auto& e : pend) c.automaton.add_transition(e.action, e.from, e.to);

    auto pr = prune_unreachable(c.automaton);
    for (int p = 0; p < alpha.num_processes(); ++p) {
        std::vector<int> pi(c.automaton.num_states(p));
        for (std::size_t s = 0; s < pr.old_to_new[p].size(); ++s)
            if (pr.old_to_new[p][s] != kNone) pi[pr.old_to_new[p][s]] = c.pi[p][s];
        c.pi[p] = std::move(pi);
    }
    auto remap = [&](auto& meta, int p, auto none) {
        std::remove_reference_t<decltype(meta)> kept(c.automaton.num_states(p), none);
        for (std::size_t s = 0; s < pr.old_to_new[p].size(); ++s)
            if (pr.old_to_new[p][s] != kNone) kept[pr.old_to_new[p][s]] = meta[s];
        meta = std::move(kept);
    };
    remap(out.q_origin, q, kNone);
    remap(out.r_origin, r, std::pair<int, std::vector<int>>{kNone, {}});
    complete_uncontrollable(c, sa);
    out.q_origin.resize(c.automaton.num_states(q), kNone);
    out.r_origin.resize(c.automaton.num_states(r), {kNone, {}});
    out.controller = std::move(c);
    return out;
}

bool property_star(const Reduction& red, const Controller& rd, const LiftedRed& lifted, std::string* why) {
    const auto& a = lifted.controller.automaton;
    for (const auto& g : reachable_states(a)) {
        const int dq = lifted.q_origin[g[red.q]];
        const int d2 = lifted.r_origin[g[red.r]].first;
        if (dq == kNone || d2 == kNone) {
            if (why) *why = "reachable state without origin";
            return false;
        }
        const auto& x = red.qstates[rd.pi[red.qr][dq]];
        const auto& y = red.qstates[rd.pi[red.qr][d2]];
        if (x.sr != y.sr || x.strategy != y.strategy) {
            if (why)
                *why = "q at '" + a.states[red.q][g[red.q]] + "' and r at '" + a.states[red.r][g[red.r]] +
                       "' disagree on the r-component";
            return false;
        }
    }
    return true;
}

// --- word maps ----------------------------------------------------------------------

std::vector<int> hide(const Reduction& red, const std::vector<int>& w) {
    std::vector<int> out;
    for (int x : w)
        if (x < red.num_source_actions) out.push_back(x);
    return out;
}

std::vector<int> slow_normalize(const Alphabet& alpha, int q, int r, const std::vector<int>& w) {
    std::vector<int> out, ys, xs;
    for (int x : w) {
        if (!alpha.involves(x, r)) {
            ys.push_back(x);
        } else if (alpha.is_local(x)) {
            xs.push_back(x);
        } else {
            if (!alpha.involves(x, q)) throw InputError("slow_normalize: r is not a leaf under q");
            out.insert(out.end(), ys.begin(), ys.end());
            out.insert(out.end(), xs.begin(), xs.end());
            out.push_back(x);
            ys.clear();
            xs.clear();
        }
    }
    out.insert(out.end(), ys.begin(), ys.end());
    out.insert(out.end(), xs.begin(), xs.end());
    return out;
}

std::vector<int> chi(const Reduction& red, const Controller& rd, const std::vector<int>& w) {
    const auto& a = rd.automaton;
    const auto& src = red.source.alphabet();
    const int qr = red.qr;
    GlobalState g = a.initial;
    std::vector<int> out;
    auto settle = [&] {
        for (int steps = 0; steps < 3 && !red.is_true_state(rd.pi[qr][g[qr]]); ++steps) {
            auto [act, t] = chosen_ch(red, rd, g[qr]);
            if (act == kNone) throw StructuralError("chi: reduced controller makes no choice");
            out.push_back(act);
            g[qr] = t;
        }
    };
    settle();
    for (int b : w) {
        auto nxt = step(a, g, b);
        if (!nxt) throw StructuralError("chi: reduced controller cannot follow '" + src.actions[b].name + "'");
        g = std::move(*nxt);
        out.push_back(b);
        if (src.involves(b, red.q)) settle();
    }
    return out;
}

}  // namespace zsynth
