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

#include "zsynth/games.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace zsynth {

// --- SCCs -------------------------------------------------------------------

std::vector<int> scc_ids(const std::vector<std::vector<int>>& succ, int* count) {
    const int n = static_cast<int>(succ.size());
    std::vector<int> index(n, kNone), low(n, 0), comp(n, kNone), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::pair<int, std::size_t>> call;
    int next_index = 0, next_comp = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] != kNone) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < succ[v].size()) {
                int w = succ[v][i++];
                if (index[w] == kNone) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = next_comp;
                } while (w != v);
                ++next_comp;
            }
            int done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
        }
    }
    if (count) *count = next_comp;
    return comp;
}

// --- progress measures ------------------------------------------------------

int compare_at_level(const ProgressMeasure& pm, const Signature& a, const Signature& b, int k) {
    for (std::size_t j = 0; j < pm.odd_ranks.size() && pm.odd_ranks[j] >= k; ++j) {
        if (a[j] != b[j]) return a[j] < b[j] ? -1 : 1;
    }
    return 0;
}

bool edge_respects(const ProgressMeasure& pm, int rank_c, const Signature& c, const Signature& c2) {
    int cmp = compare_at_level(pm, c, c2, rank_c);
    return rank_c % 2 == 1 ? cmp > 0 : cmp >= 0;
}

std::vector<int> find_odd_cycle(const RankedGraph& g) {
    const int n = g.size();
    int max_rank = 0;
    for (int r : g.rank) max_rank = std::max(max_rank, r);
    for (int k = 1; k <= max_rank; k += 2) {
        std::vector<std::vector<int>> sub(n);
        for (int v = 0; v < n; ++v) {
            if (g.rank[v] > k) continue;
            for (int w : g.succ[v])
                if (g.rank[w] <= k) sub[v].push_back(w);
        }
        auto comp = scc_ids(sub);
        for (int v = 0; v < n; ++v) {
            if (g.rank[v] != k) continue;
            // BFS inside the SCC of v for a path back to v
            std::vector<int> parent(n, kNone);
            std::deque<int> work{v};
            std::vector<bool> seen(n, false);
            int last = kNone;
            while (!work.empty() && last == kNone) {
                int x = work.front();
                work.pop_front();
                for (int y : sub[x]) {
                    if (comp[y] != comp[v]) continue;
                    if (y == v) {
                        last = x;
                        break;
                    }
                    if (!seen[y]) {
                        seen[y] = true;
                        parent[y] = x;
                        work.push_back(y);
                    }
                }
            }
            if (last == kNone) continue;
            std::vector<int> cycle;
            for (int x = last; x != v; x = parent[x]) cycle.push_back(x);
            cycle.push_back(v);
            std::reverse(cycle.begin(), cycle.end());
            return cycle;
        }
    }
    return {};
}

ProgressMeasure progress_measures(const RankedGraph& g) {
    ProgressMeasure pm;
    const int n = g.size();
    int max_rank = 0;
    for (int r : g.rank) max_rank = std::max(max_rank, r);
    for (int k = max_rank - (max_rank % 2 == 0 ? 1 : 0); k >= 1; k -= 2) pm.odd_ranks.push_back(k);
    const std::size_t width = pm.odd_ranks.size();
    std::vector<int> bound(width, 0);
    for (std::size_t j = 0; j < width; ++j)
        bound[j] = static_cast<int>(std::count(g.rank.begin(), g.rank.end(), pm.odd_ranks[j]));

    std::vector<std::vector<int>> pred(n);
    for (int v = 0; v < n; ++v)
        for (int w : g.succ[v]) pred[w].push_back(v);

    std::vector<Signature> sig(n, Signature(width, 0));
    std::vector<bool> top(n, false);

    // least m' with m' >=_k m, strict for odd k; false on overflow
    auto prog = [&](const Signature& m, int k, Signature& out) {
        out.assign(width, 0);
        std::size_t len = 0;
        while (len < width && pm.odd_ranks[len] >= k) ++len;
        for (std::size_t j = 0; j < len; ++j) out[j] = m[j];
        if (k % 2 == 0) return true;
        for (std::size_t j = len; j-- > 0;) {
            if (out[j] < bound[j]) {
                ++out[j];
                return true;
            }
            out[j] = 0;
        }
        return false;
    };

    std::deque<int> work;
    std::vector<bool> queued(n, true);
    for (int v = 0; v < n; ++v) work.push_back(v);
    Signature cand;
    while (!work.empty()) {
        int v = work.front();
        work.pop_front();
        queued[v] = false;
        if (top[v]) continue;
        bool to_top = false;
        Signature best(width, 0);
        for (int w : g.succ[v]) {
            if (top[w] || !prog(sig[w], g.rank[v], cand)) {
                to_top = true;
                break;
            }
            if (cand > best) best = cand;
        }
        bool changed = false;
        if (to_top) {
            top[v] = true;
            changed = true;
        } else if (best > sig[v]) {
            sig[v] = best;
            changed = true;
        }
        if (!changed) continue;
        for (int u : pred[v])
            if (!queued[u]) {
                queued[u] = true;
                work.push_back(u);
            }
    }
    if (std::find(top.begin(), top.end(), true) != top.end()) {
        pm.bad_cycle = find_odd_cycle(g);
        return pm;
    }
    pm.sig = std::move(sig);
    return pm;
}

// --- parity games -----------------------------------------------------------

namespace {

struct Zielonka {
    const ParityGame& g;
    std::vector<std::vector<int>> pred;

    explicit Zielonka(const ParityGame& game) : g(game), pred(game.size()) {
        for (int v = 0; v < g.size(); ++v)
            for (int w : g.succ[v]) pred[w].push_back(v);
    }

    // Attractor of `target` for player i inside `mask`; strat gets the
    // attracting successor for i's vertices.
    std::vector<bool> attractor(int i, const std::vector<bool>& target, const std::vector<bool>& mask,
                                std::vector<int>& strat) {
        const int n = g.size();
        std::vector<bool> in = target;
        std::vector<int> count(n, 0);
        std::deque<int> work;
        for (int v = 0; v < n; ++v) {
            if (!mask[v]) continue;
            if (in[v]) work.push_back(v);
            for (int w : g.succ[v]) count[v] += mask[w] ? 1 : 0;
        }
        while (!work.empty()) {
            int w = work.front();
            work.pop_front();
            for (int v : pred[w]) {
                if (!mask[v] || in[v]) continue;
                if (g.owner[v] == i) {
                    in[v] = true;
                    strat[v] = w;
                    work.push_back(v);
                } else if (--count[v] == 0) {
                    in[v] = true;
                    work.push_back(v);
                }
            }
        }
        return in;
    }

    void solve(const std::vector<bool>& mask, std::vector<int>& winner, std::vector<int>& strat) {
        const int n = g.size();
        int d = -1;
        for (int v = 0; v < n; ++v)
            if (mask[v]) d = std::max(d, g.priority[v]);
        if (d < 0) return;
        const int i = d % 2;
        std::vector<bool> u(n, false);
        for (int v = 0; v < n; ++v) u[v] = mask[v] && g.priority[v] == d;
        std::vector<int> astrat(n, kNone);
        auto a = attractor(i, u, mask, astrat);

        std::vector<bool> rest(n);
        for (int v = 0; v < n; ++v) rest[v] = mask[v] && !a[v];
        std::vector<int> w1(n, kNone), s1(n, kNone);
        solve(rest, w1, s1);
        bool opponent_wins_some = false;
        for (int v = 0; v < n; ++v) opponent_wins_some |= rest[v] && w1[v] == 1 - i;

        if (!opponent_wins_some) {
            for (int v = 0; v < n; ++v) {
                if (!mask[v]) continue;
                winner[v] = i;
                if (g.owner[v] != i) continue;
                if (rest[v]) {
                    strat[v] = s1[v];
                } else if (!u[v]) {
                    strat[v] = astrat[v];
                } else {
                    for (int w : g.succ[v])
                        if (mask[w]) {
                            strat[v] = w;
                            break;
                        }
                }
            }
            return;
        }
        std::vector<bool> opp(n, false);
        for (int v = 0; v < n; ++v) opp[v] = rest[v] && w1[v] == 1 - i;
        std::vector<int> bstrat(n, kNone);
        auto b = attractor(1 - i, opp, mask, bstrat);
        for (int v = 0; v < n; ++v) {
            if (!b[v]) continue;
            winner[v] = 1 - i;
            if (g.owner[v] == 1 - i) strat[v] = opp[v] ? s1[v] : bstrat[v];
        }
        std::vector<bool> rest2(n);
        for (int v = 0; v < n; ++v) rest2[v] = mask[v] && !b[v];
        solve(rest2, winner, strat);
    }
};

}  // namespace

ParitySolution solve_parity(const ParityGame& g) {
    for (int v = 0; v < g.size(); ++v)
        if (g.succ[v].empty()) throw InputError("parity game vertex without successor");
    Zielonka z(g);
    ParitySolution sol;
    sol.winner.assign(g.size(), kNone);
    sol.strategy.assign(g.size(), kNone);
    z.solve(std::vector<bool>(g.size(), true), sol.winner, sol.strategy);
    for (int v = 0; v < g.size(); ++v)
        if (sol.winner[v] != g.owner[v]) sol.strategy[v] = kNone;
    return sol;
}

// --- control games ----------------------------------------------------------

ControlGame control_game(const Plant& plant) {
    const auto& a = plant.automaton;
    if (a.num_processes() != 1) throw InputError("control game needs a single-process plant");
    ControlGame g;
    g.initial = a.initial[0];
    g.moves.resize(a.num_states(0));
    for (int act = 0; act < a.alphabet.num_actions(); ++act)
        for (const auto& [f, t] : a.delta(act))
            g.moves[f[0]].push_back({act, t[0], a.alphabet.controllable(act)});
    g.terminal = plant.conditions[0].terminal;
    g.rank = plant.conditions[0].rank;
    return g;
}

std::optional<std::vector<std::vector<int>>> solve_control_game(const ControlGame& cg) {
    const int n = cg.size();
    ParityGame g;
    // vertices 0..n-1: system; then WIN, LOSE sinks; then environment vertices
    g.owner.assign(n, 0);
    g.priority = cg.rank;
    g.succ.assign(n, {});
    const int win = n, lose = n + 1;
    g.owner.push_back(0);
    g.priority.push_back(0);
    g.succ.push_back({win});
    g.owner.push_back(0);
    g.priority.push_back(1);
    g.succ.push_back({lose});
    std::vector<std::pair<int, int>> option;  // env vertex -> (state, chosen move or kNone)
    for (int s = 0; s < n; ++s) {
        std::vector<int> choices{kNone};
        for (int m = 0; m < static_cast<int>(cg.moves[s].size()); ++m)
            if (cg.moves[s][m].controllable) choices.push_back(m);
        for (int c : choices) {
            int e = g.size();
            g.owner.push_back(1);
            g.priority.push_back(0);
            std::vector<int> out;
            for (int m = 0; m < static_cast<int>(cg.moves[s].size()); ++m)
                if (!cg.moves[s][m].controllable || m == c) out.push_back(cg.moves[s][m].target);
            if (out.empty()) out.push_back(cg.terminal[s] ? win : lose);
            g.succ.push_back(std::move(out));
            g.succ[s].push_back(e);
            option.push_back({s, c});
        }
    }
    auto sol = solve_parity(g);
    if (sol.winner[cg.initial] != 0) return std::nullopt;
    std::vector<std::vector<int>> proposal(n);
    for (int s = 0; s < n; ++s) {
        if (sol.winner[s] != 0) continue;
        int c = option[sol.strategy[s] - (n + 2)].second;
        if (c != kNone) proposal[s].push_back(cg.moves[s][c].action);
    }
    return proposal;
}

Controller controller_from_proposal(const Plant& plant, const std::vector<std::vector<int>>& proposal) {
    const auto& a = plant.automaton;
    Controller c = identity_controller(a);
    auto& ca = c.automaton;
    for (int act = 0; act < a.alphabet.num_actions(); ++act) {
        if (!a.alphabet.controllable(act)) continue;
        for (const auto& [f, t] : a.delta(act)) {
            const auto& allowed = proposal[f[0]];
            if (std::find(allowed.begin(), allowed.end(), act) == allowed.end()) ca.erase_transition(act, f);
        }
    }
    return pruned(c, a);
}

// --- representatives --------------------------------------------------------

RankedGraph local_graph(const Plant& plant, const Controller& c, int r) {
    const auto& ca = c.automaton;
    RankedGraph g;
    const int n = ca.num_states(r);
    g.succ.assign(n, {});
    g.rank.assign(n, 0);
    for (int x = 0; x < n; ++x) g.rank[x] = plant.conditions[r].rank[c.pi[r][x]];
    for (int act : ca.alphabet.local_actions(r))
        for (const auto& [f, t] : ca.delta(act)) g.succ[f[0]].push_back(t[0]);
    for (auto& s : g.succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    return g;
}

namespace {

std::vector<std::vector<bool>> reach_sets(const std::vector<std::vector<int>>& succ) {
    const int n = static_cast<int>(succ.size());
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int s = 0; s < n; ++s) {
        std::deque<int> work{s};
        reach[s][s] = true;
        while (!work.empty()) {
            int v = work.front();
            work.pop_front();
            for (int w : succ[v])
                if (!reach[s][w]) {
                    reach[s][w] = true;
                    work.push_back(w);
                }
        }
    }
    return reach;
}

}  // namespace

std::vector<int> representatives(const RankedGraph& local, const std::vector<int>& pi, const ProgressMeasure& pm) {
    if (!pm.exists()) throw InputError("representatives: signature assignment is not consistent");
    const int n = local.size();
    auto reach = reach_sets(local.succ);
    auto comp = scc_ids(local.succ);
    std::vector<bool> closed(n, true);
    for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
            if (reach[c][d] && pi[d] == pi[c] && comp[d] != comp[c]) closed[c] = false;
    std::vector<int> rep(n, kNone);
    for (int c = 0; c < n; ++c) {
        for (int d = 0; d < n; ++d) {
            if (!reach[c][d] || pi[d] != pi[c] || !closed[d]) continue;
            if (rep[c] == kNone || pm.sig[d] < pm.sig[rep[c]]) rep[c] = d;
        }
    }
    return rep;
}

Controller memoryless_r(const Controller& input, const Plant& plant, int r) {
    Controller c = pruned(input);
    auto g = local_graph(plant, c, r);
    auto pm = progress_measures(g);
    if (!pm.exists()) throw InputError("memoryless_r: controller has an odd local cycle on its leaf process");
    auto rep = representatives(g, c.pi[r], pm);
    // Every way into an r-state is redirected to its representative, so all
    // reachable r-states are representatives.
    Automaton out(c.automaton.alphabet);
    out.states = c.automaton.states;
    out.initial = c.automaton.initial;
    out.initial[r] = rep[out.initial[r]];
    for (int act = 0; act < out.alphabet.num_actions(); ++act) {
        const auto& dom = out.alphabet.dom(act);
        int slot = kNone;
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (dom[i] == r) slot = static_cast<int>(i);
        for (const auto& [f, t] : c.automaton.delta(act)) {
            LocalPair t2 = t;
            if (slot != kNone) t2[slot] = rep[t[slot]];
            out.add_transition(act, f, t2);
        }
    }
    c.automaton = std::move(out);
    return pruned(c, plant.automaton);
}

bool is_r_memoryless(const Controller& c, int r) {
    const auto& ca = c.automaton;
    const int n = ca.num_states(r);
    std::vector<std::vector<int>> succ(n);
    for (int act : ca.alphabet.local_actions(r))
        for (const auto& [f, t] : ca.delta(act)) succ[f[0]].push_back(t[0]);
    auto reach = reach_sets(succ);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (x != y && reach[x][y] && c.pi[r][x] == c.pi[r][y]) return false;
    return true;
}

}  // namespace zsynth
