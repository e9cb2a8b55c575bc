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

#include "zsynth/verify.hpp"

#include "zsynth/games.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <sstream>

namespace zsynth {

std::string to_string(Verdict::Kind k) {
    switch (k) {
        case Verdict::Kind::Correct: return "correct";
        case Verdict::Kind::DeadState: return "dead-state";
        case Verdict::Kind::Lasso: return "lasso";
    }
    return "?";
}

std::string to_string(Verdict::Reason r) {
    switch (r) {
        case Verdict::Reason::None: return "none";
        case Verdict::Reason::OddParity: return "odd-parity";
        case Verdict::Reason::NotTerminal: return "not-terminal";
    }
    return "?";
}

namespace {

struct Edge {
    int action;
    int target;
};

// Reachable global graph of a controller, in BFS order.
struct GlobalGraph {
    std::vector<GlobalState> states;
    std::vector<std::vector<Edge>> out;
    std::vector<int> parent;
    std::vector<int> parent_action;

    GlobalGraph(const Automaton& a, std::size_t max_states) {
        std::unordered_map<GlobalState, int, GlobalStateHash> index;
        states.push_back(a.initial);
        index.emplace(a.initial, 0);
        parent.push_back(kNone);
        parent_action.push_back(kNone);
        for (std::size_t i = 0; i < states.size(); ++i) {
            std::vector<Edge> edges;
            for (int act = 0; act < a.alphabet.num_actions(); ++act) {
                auto nxt = step(a, states[i], act);
                if (!nxt) continue;
                auto [it, inserted] = index.emplace(*nxt, static_cast<int>(states.size()));
                if (inserted) {
                    states.push_back(std::move(*nxt));
                    parent.push_back(static_cast<int>(i));
                    parent_action.push_back(act);
                    if (max_states && states.size() > max_states)
                        throw SizeLimitError("controlled state space exceeds " + std::to_string(max_states));
                }
                edges.push_back({act, it->second});
            }
            out.push_back(std::move(edges));
        }
    }

    int size() const { return static_cast<int>(states.size()); }

    std::vector<int> path_to(int v) const {
        std::vector<int> w;
        for (; parent[v] != kNone; v = parent[v]) w.push_back(parent_action[v]);
        std::reverse(w.begin(), w.end());
        return w;
    }
};

unsigned dom_mask(const Alphabet& alpha, int a) {
    unsigned m = 0;
    for (int p : alpha.dom(a)) m |= 1u << p;
    return m;
}

struct Conditions {
    const Plant& plant;
    const Controller& c;

    int rank(const GlobalState& g, int p) const { return plant.conditions[p].rank[c.pi[p][g[p]]]; }
    bool terminal(const GlobalState& g, int p) const { return plant.conditions[p].terminal[c.pi[p][g[p]]]; }
};

// BFS path inside `allowed` vertices/edges from `from` to `to`.
std::vector<int> inner_path(const GlobalGraph& gg, int from, int to, const std::function<bool(int, const Edge&)>& ok,
                            int* reached = nullptr) {
    if (reached) *reached = from;
    if (from == to) return {};
    std::vector<int> par(gg.size(), kNone), par_act(gg.size(), kNone);
    std::vector<bool> seen(gg.size(), false);
    std::deque<int> work{from};
    seen[from] = true;
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        for (const auto& e : gg.out[v]) {
            if (!ok(v, e) || seen[e.target]) continue;
            seen[e.target] = true;
            par[e.target] = v;
            par_act[e.target] = e.action;
            if (e.target == to) {
                std::vector<int> w;
                for (int x = to; x != from; x = par[x]) w.push_back(par_act[x]);
                std::reverse(w.begin(), w.end());
                if (reached) *reached = to;
                return w;
            }
            work.push_back(e.target);
        }
    }
    throw StructuralError("verify: expected path inside component not found");
}

}  // namespace

bool satisfies(const Plant& plant, const Controller& c, const Run& r, int p, Verdict::Reason* why) {
    Conditions cond{plant, c};
    const auto& alpha = c.automaton.alphabet;
    bool acts = false;
    for (int a : r.cycle) acts |= alpha.involves(a, p);
    if (r.is_lasso() && acts) {
        int m = 0;
        for (std::size_t i = r.stem.size(); i < r.states.size(); ++i) m = std::max(m, cond.rank(r.states[i], p));
        if (m % 2 == 1) {
            if (why) *why = Verdict::Reason::OddParity;
            return false;
        }
        return true;
    }
    if (!cond.terminal(r.states.back(), p)) {
        if (why) *why = Verdict::Reason::NotTerminal;
        return false;
    }
    return true;
}

Verdict verify(const Plant& plant, const Controller& c, std::size_t max_states) {
    auto diags = check_covering(plant, c);
    if (has_errors(diags)) throw InputError("verify: controller does not cover the plant: " + diags.front().message);
    const auto& a = c.automaton;
    const auto& alpha = a.alphabet;
    const int np = alpha.num_processes();
    if (np > 20) throw InputError("verify: too many processes");
    GlobalGraph gg(a, max_states);
    Conditions cond{plant, c};
    const int n = gg.size();

    for (int v = 0; v < n; ++v) {
        if (!gg.out[v].empty()) continue;
        for (int p = 0; p < np; ++p)
            if (!cond.terminal(gg.states[v], p)) {
                Verdict vd;
                vd.kind = Verdict::Kind::DeadState;
                vd.process = p;
                vd.reason = Verdict::Reason::NotTerminal;
                vd.run = *run(a, gg.path_to(v));
                return vd;
            }
    }

    std::vector<unsigned> masks(alpha.num_actions());
    for (int act = 0; act < alpha.num_actions(); ++act) masks[act] = dom_mask(alpha, act);
    const unsigned full = (1u << np) - 1;

    struct Candidate {
        int entry = kNone;
        int process = kNone;
        Verdict::Reason reason = Verdict::Reason::None;
        unsigned frozen = 0;
        int threshold = -1;  // rank bound for odd-parity candidates
    };
    Candidate best;
    auto offer = [&](const Candidate& cand) {
        if (best.entry == kNone || cand.entry < best.entry) best = cand;
    };

    for (unsigned frozen = 0; frozen < full; ++frozen) {
        const unsigned acting = full & ~frozen;
        std::vector<bool> valid(n, true);
        for (int v = 0; v < n; ++v)
            for (const auto& e : gg.out[v])
                if ((masks[e.action] & ~frozen) == 0) valid[v] = false;

        // SCC analysis on the subgraph limited by a vertex predicate
        auto analyse = [&](const std::function<bool(int)>& keep, const std::function<void(const std::vector<int>&)>& on) {
            std::vector<std::vector<int>> sub(n);
            for (int v = 0; v < n; ++v) {
                if (!valid[v] || !keep(v)) continue;
                for (const auto& e : gg.out[v])
                    if ((masks[e.action] & frozen) == 0 && keep(e.target)) sub[v].push_back(e.target);
            }
            int count = 0;
            auto comp = scc_ids(sub, &count);
            std::vector<unsigned> cover(count, 0);
            for (int v = 0; v < n; ++v) {
                if (!valid[v] || !keep(v)) continue;
                for (const auto& e : gg.out[v])
                    if ((masks[e.action] & frozen) == 0 && keep(e.target) && comp[e.target] == comp[v])
                        cover[comp[v]] |= masks[e.action];
            }
            std::vector<std::vector<int>> members(count);
            for (int v = 0; v < n; ++v)
                if (valid[v] && keep(v)) members[comp[v]].push_back(v);
            for (int k = 0; k < count; ++k)
                if ((cover[k] & acting) == acting && !members[k].empty()) on(members[k]);
        };

        analyse([](int) { return true; }, [&](const std::vector<int>& scc) {
            int v = scc.front();
            for (int p = 0; p < np; ++p)
                if ((frozen >> p & 1u) && !cond.terminal(gg.states[v], p)) {
                    offer({v, p, Verdict::Reason::NotTerminal, frozen, -1});
                    return;
                }
        });
        for (int p = 0; p < np; ++p) {
            if (!(acting >> p & 1u)) continue;
            int max_rank = 0;
            for (const auto& g : gg.states) max_rank = std::max(max_rank, cond.rank(g, p));
            for (int k = 1; k <= max_rank; k += 2) {
                analyse([&](int v) { return cond.rank(gg.states[v], p) <= k; }, [&](const std::vector<int>& scc) {
                    for (int v : scc)
                        if (cond.rank(gg.states[v], p) == k) {
                            offer({v, p, Verdict::Reason::OddParity, frozen, k});
                            return;
                        }
                });
            }
        }
    }
    if (best.entry == kNone) return {};

    // Closed walk from the entry through one edge per acting process.
    const unsigned frozen = best.frozen;
    const unsigned acting = full & ~frozen;
    const int p_bad = best.process;
    const int k = best.threshold;
    std::vector<bool> valid(n, true);
    for (int v = 0; v < n; ++v)
        for (const auto& e : gg.out[v])
            if ((masks[e.action] & ~frozen) == 0) valid[v] = false;
    auto keep = [&](int v) { return valid[v] && (k < 0 || cond.rank(gg.states[v], p_bad) <= k); };
    std::vector<std::vector<int>> sub(n);
    for (int v = 0; v < n; ++v) {
        if (!keep(v)) continue;
        for (const auto& e : gg.out[v])
            if ((masks[e.action] & frozen) == 0 && keep(e.target)) sub[v].push_back(e.target);
    }
    auto comp = scc_ids(sub);
    const int target_comp = comp[best.entry];
    auto ok = [&](int v, const Edge& e) {
        return keep(v) && (masks[e.action] & frozen) == 0 && keep(e.target) && comp[e.target] == target_comp &&
               comp[v] == target_comp;
    };
    std::vector<int> cycle;
    int cur = best.entry;
    unsigned covered = 0;
    for (int p = 0; p < np; ++p) {
        if (!(acting >> p & 1u) || (covered >> p & 1u)) continue;
        for (int v = 0; v < n && !(covered >> p & 1u); ++v) {
            if (comp[v] != target_comp || !keep(v)) continue;
            for (const auto& e : gg.out[v]) {
                if (!ok(v, e) || !(masks[e.action] >> p & 1u)) continue;
                auto w = inner_path(gg, cur, v, ok);
                cycle.insert(cycle.end(), w.begin(), w.end());
                cycle.push_back(e.action);
                covered |= masks[e.action];
                cur = e.target;
                break;
            }
        }
    }
    auto back = inner_path(gg, cur, best.entry, ok);
    cycle.insert(cycle.end(), back.begin(), back.end());

    Verdict vd;
    vd.kind = Verdict::Kind::Lasso;
    vd.process = best.process;
    vd.reason = best.reason;
    vd.run = run_lasso(a, gg.path_to(best.entry), cycle);
    return vd;
}

Verdict verify_bounded(const Plant& plant, const Controller& c, std::size_t depth) {
    const auto& a = c.automaton;
    const auto& alpha = a.alphabet;
    const int np = alpha.num_processes();
    Conditions cond{plant, c};

    // states within `depth` steps, with shortest words
    std::vector<GlobalState> states{a.initial};
    std::vector<std::vector<int>> words{{}};
    std::map<GlobalState, int> index{{a.initial, 0}};
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (words[i].size() >= depth) continue;
        for (int act = 0; act < alpha.num_actions(); ++act) {
            auto nxt = step(a, states[i], act);
            if (!nxt || index.count(*nxt)) continue;
            index.emplace(*nxt, static_cast<int>(states.size()));
            auto w = words[i];
            w.push_back(act);
            states.push_back(*nxt);
            words.push_back(std::move(w));
        }
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (!enabled_actions(a, states[i]).empty()) continue;
        for (int p = 0; p < np; ++p)
            if (!cond.terminal(states[i], p)) {
                Verdict vd;
                vd.kind = Verdict::Kind::DeadState;
                vd.process = p;
                vd.reason = Verdict::Reason::NotTerminal;
                vd.run = *run(a, words[i]);
                return vd;
            }
    }

    for (std::size_t i = 0; i < states.size(); ++i) {
        const GlobalState& s = states[i];
        std::map<std::vector<int>, std::size_t> explored;  // config -> remaining budget
        std::vector<int> walk;
        std::optional<Verdict> found;

        std::function<void(const GlobalState&, unsigned, std::vector<int>&)> dfs =
            [&](const GlobalState& g, unsigned acting, std::vector<int>& ranks) {
                if (found) return;
                if (!walk.empty() && g == s) {
                    bool maximal = true;
                    for (int act = 0; act < alpha.num_actions() && maximal; ++act) {
                        bool frozen_only = true;
                        for (int p : alpha.dom(act)) frozen_only &= !(acting >> p & 1u);
                        if (frozen_only && a.enabled(act, s)) maximal = false;
                    }
                    if (maximal) {
                        for (int p = 0; p < np && !found; ++p) {
                            bool acts = acting >> p & 1u;
                            Verdict::Reason why = Verdict::Reason::None;
                            if (acts && ranks[p] % 2 == 1) why = Verdict::Reason::OddParity;
                            if (!acts && !cond.terminal(s, p)) why = Verdict::Reason::NotTerminal;
                            if (why == Verdict::Reason::None) continue;
                            Verdict vd;
                            vd.kind = Verdict::Kind::Lasso;
                            vd.process = p;
                            vd.reason = why;
                            vd.run = run_lasso(a, words[i], walk);
                            found = vd;
                        }
                    }
                }
                if (walk.size() >= depth) return;
                std::vector<int> key = g;
                key.push_back(static_cast<int>(acting));
                key.insert(key.end(), ranks.begin(), ranks.end());
                key.push_back(walk.empty() ? 1 : 0);
                std::size_t budget = depth - walk.size();
                auto it = explored.find(key);
                if (it != explored.end() && it->second >= budget) return;
                explored[key] = budget;
                for (int act = 0; act < alpha.num_actions() && !found; ++act) {
                    auto nxt = step(a, g, act);
                    if (!nxt) continue;
                    unsigned acting2 = acting;
                    for (int p : alpha.dom(act)) acting2 |= 1u << p;
                    std::vector<int> ranks2 = ranks;
                    for (int p = 0; p < np; ++p) ranks2[p] = std::max(ranks2[p], cond.rank(*nxt, p));
                    walk.push_back(act);
                    dfs(*nxt, acting2, ranks2);
                    walk.pop_back();
                }
            };
        std::vector<int> ranks(np);
        for (int p = 0; p < np; ++p) ranks[p] = cond.rank(s, p);
        dfs(s, 0, ranks);
        if (found) return *found;
    }
    return {};
}

bool witness_holds(const Plant& plant, const Controller& c, const Verdict& v) {
    if (v.correct()) return true;
    const auto& a = c.automaton;
    Run r;
    try {
        if (v.kind == Verdict::Kind::Lasso) {
            if (v.run.cycle.empty()) return false;
            r = run_lasso(a, v.run.stem, v.run.cycle);
        } else {
            if (!v.run.cycle.empty()) return false;
            auto rr = run(a, v.run.stem);
            if (!rr) return false;
            r = *rr;
        }
    } catch (const StructuralError&) {
        return false;
    }
    if (!is_maximal(a, r)) return false;
    Verdict::Reason why = Verdict::Reason::None;
    if (satisfies(plant, c, r, v.process, &why)) return false;
    return why == v.reason;
}

std::string explain(const Plant& plant, const Controller& c, const Verdict& v) {
    const auto& a = c.automaton;
    const auto& alpha = a.alphabet;
    std::ostringstream os;
    if (v.correct()) {
        os << "CORRECT: every maximal run satisfies every local condition\n";
        return os.str();
    }
    auto word = [&](const std::vector<int>& w) {
        std::string s;
        for (int x : w) s += (s.empty() ? "" : " ") + alpha.actions[x].name;
        return s.empty() ? std::string("(empty)") : s;
    };
    auto local = [&](int p, int x) {
        std::string cs = a.states[p][x];
        std::string ps = plant.automaton.states[p][c.pi[p][x]];
        return cs == ps ? cs : cs + "[" + ps + "]";
    };
    const std::string pname = alpha.processes[v.process];
    if (v.kind == Verdict::Kind::DeadState) {
        os << "VIOLATION: finite maximal run ends outside the terminal states of " << pname << "\n";
        os << "word: " << word(v.run.stem) << "\n";
    } else {
        os << "VIOLATION: infinite maximal run violates the condition of " << pname << " ("
           << (v.reason == Verdict::Reason::OddParity ? "largest rank seen infinitely often is odd"
                                                      : "local run stops outside the terminal states")
           << ")\n";
        os << "stem: " << word(v.run.stem) << "\n";
        os << "cycle: " << word(v.run.cycle) << "\n";
    }
    os << "projections:\n";
    const bool lasso = v.run.is_lasso();
    for (int p = 0; p < alpha.num_processes(); ++p) {
        os << "  " << alpha.processes[p] << ": " << local(p, v.run.states.front()[p]);
        auto steps = project_run(a, v.run, p);
        for (std::size_t i = 0; i < steps.size(); ++i) {
            os << " -" << alpha.actions[steps[i].action].name << "-> " << local(p, steps[i].to);
        }
        bool acts = false;
        for (int x : v.run.cycle) acts |= alpha.involves(x, p);
        const auto& last = v.run.states.back();
        const auto& cond = plant.conditions[p];
        if (lasso && acts) {
            int m = 0;
            for (std::size_t i = v.run.stem.size(); i < v.run.states.size(); ++i)
                m = std::max(m, cond.rank[c.pi[p][v.run.states[i][p]]]);
            os << "   (repeats; max rank on cycle " << m << ")";
        } else {
            os << "   (stops in " << (cond.terminal[c.pi[p][last[p]]] ? "terminal" : "non-terminal") << " state)";
        }
        os << "\n";
    }
    os << "maximality: ";
    if (!lasso) {
        os << "no action is enabled in the last global state\n";
    } else {
        std::string frozen;
        for (int p = 0; p < alpha.num_processes(); ++p) {
            bool acts = false;
            for (int x : v.run.cycle) acts |= alpha.involves(x, p);
            if (!acts) frozen += (frozen.empty() ? "" : ",") + alpha.processes[p];
        }
        if (frozen.empty())
            os << "every process acts on the cycle\n";
        else
            os << "processes {" << frozen << "} stop acting and no action over them alone is enabled\n";
    }
    return os.str();
}

}  // namespace zsynth
