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

#include "zsynth/core.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>

namespace zsynth {

// --- Alphabet ---------------------------------------------------------------

bool Alphabet::involves(int a, int p) const {
    const auto& d = actions[a].dom;
    return std::find(d.begin(), d.end(), p) != d.end();
}

int Alphabet::partner(int a, int p) const {
    const auto& d = actions[a].dom;
    if (d.size() != 2) return kNone;
    return d[0] == p ? d[1] : d[0];
}

std::vector<int> Alphabet::actions_of(int p) const {
    std::vector<int> out;
    for (int a = 0; a < num_actions(); ++a)
        if (involves(a, p)) out.push_back(a);
    return out;
}

std::vector<int> Alphabet::local_actions(int p) const {
    std::vector<int> out;
    for (int a = 0; a < num_actions(); ++a)
        if (is_local_to(a, p)) out.push_back(a);
    return out;
}

std::vector<int> Alphabet::controllable_of(int p) const {
    std::vector<int> out;
    for (int a = 0; a < num_actions(); ++a)
        if (involves(a, p) && controllable(a)) out.push_back(a);
    return out;
}

std::optional<int> Alphabet::find_process(const std::string& name) const {
    for (int p = 0; p < num_processes(); ++p)
        if (processes[p] == name) return p;
    return std::nullopt;
}

std::optional<int> Alphabet::find_action(const std::string& name) const {
    for (int a = 0; a < num_actions(); ++a)
        if (actions[a].name == name) return a;
    return std::nullopt;
}

std::string Alphabet::fresh_action_name(const std::string& name) const {
    std::string candidate = name;
    while (find_action(candidate)) candidate += "'";
    return candidate;
}

// --- Automaton --------------------------------------------------------------

Automaton::Automaton(Alphabet alpha)
    : alphabet(std::move(alpha)),
      states(alphabet.processes.size()),
      initial(alphabet.processes.size(), 0),
      delta_(alphabet.actions.size()) {}

std::size_t Automaton::total_local_states() const {
    std::size_t n = 0;
    for (const auto& s : states) n += s.size();
    return n;
}

int Automaton::add_state(int p, std::string name) {
    states[p].push_back(std::move(name));
    return static_cast<int>(states[p].size()) - 1;
}

std::optional<int> Automaton::find_state(int p, const std::string& name) const {
    const auto& s = states[p];
    auto it = std::find(s.begin(), s.end(), name);
    if (it == s.end()) return std::nullopt;
    return static_cast<int>(it - s.begin());
}

void Automaton::add_transition(int a, LocalPair from, LocalPair to) {
    if (delta_.size() < alphabet.actions.size()) delta_.resize(alphabet.actions.size());
    const auto& dom = alphabet.actions[a].dom;
    if (dom.size() > 2 || dom.empty()) {
        rejected_.push_back({a, {from[0], from[1]}, {to[0], to[1]}});
        return;
    }
    if (dom.size() == 1) {
        from[1] = kNone;
        to[1] = kNone;
    }
    auto [it, inserted] = delta_[a].emplace(from, to);
    if (!inserted && it->second != to) {
        std::vector<int> f{from[0]}, t{to[0]};
        if (dom.size() == 2) {
            f.push_back(from[1]);
            t.push_back(to[1]);
        }
        rejected_.push_back({a, f, t});
    }
}

void Automaton::add_transition(const RawTransition& t) {
    if (delta_.size() < alphabet.actions.size()) delta_.resize(alphabet.actions.size());
    const auto& dom = alphabet.actions[t.action].dom;
    if (dom.size() > 2 || t.from.size() != dom.size() || t.to.size() != dom.size()) {
        rejected_.push_back(t);
        return;
    }
    LocalPair f{t.from[0], dom.size() == 2 ? t.from[1] : kNone};
    LocalPair g{t.to[0], dom.size() == 2 ? t.to[1] : kNone};
    add_transition(t.action, f, g);
}

std::optional<LocalPair> Automaton::next(int a, LocalPair from) const {
    const auto& d = delta_[a];
    auto it = d.find(from);
    if (it == d.end()) return std::nullopt;
    return it->second;
}

std::size_t Automaton::num_transitions() const {
    std::size_t n = 0;
    for (const auto& d : delta_) n += d.size();
    return n;
}

LocalPair Automaton::project(int a, const GlobalState& g) const {
    const auto& dom = alphabet.actions[a].dom;
    return {g[dom[0]], dom.size() == 2 ? g[dom[1]] : kNone};
}

bool Automaton::enabled(int a, const GlobalState& g) const {
    if (alphabet.actions[a].dom.size() > 2) return false;
    return delta_[a].count(project(a, g)) != 0;
}

LocalCondition trivial_condition(std::size_t num_states) {
    return {std::vector<bool>(num_states, true), std::vector<int>(num_states, 0)};
}

std::vector<int> Run::word() const {
    std::vector<int> w = stem;
    w.insert(w.end(), cycle.begin(), cycle.end());
    return w;
}

// --- validation -------------------------------------------------------------

namespace {

std::string describe_tuple(const Automaton& a, int action, const std::vector<int>& t) {
    std::ostringstream os;
    os << "(";
    const auto& dom = a.alphabet.actions[action].dom;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) os << ",";
        if (i < dom.size() && dom[i] >= 0 && dom[i] < a.num_processes() && t[i] >= 0 &&
            t[i] < a.num_states(dom[i]))
            os << a.states[dom[i]][t[i]];
        else
            os << t[i];
    }
    os << ")";
    return os.str();
}

}  // namespace

std::vector<Diagnostic> validate(const Automaton& a) {
    using S = Diagnostic::Severity;
    std::vector<Diagnostic> out;
    const auto& alpha = a.alphabet;
    const int np = alpha.num_processes();

    std::set<std::string> names;
    for (const auto& p : alpha.processes)
        if (!names.insert(p).second)
            out.push_back({S::Error, "duplicate-process", "process name '" + p + "' is not unique"});
    names.clear();
    for (const auto& act : alpha.actions) {
        if (!names.insert(act.name).second)
            out.push_back({S::Error, "duplicate-action", "action name '" + act.name + "' is not unique"});
        if (act.dom.empty() || act.dom.size() > 2)
            out.push_back({S::Error, "arity",
                           "action '" + act.name + "' has " + std::to_string(act.dom.size()) +
                               " processes in its domain; actions must be at most binary"});
        std::set<int> seen;
        for (int p : act.dom) {
            if (p < 0 || p >= np)
                out.push_back({S::Error, "bad-domain", "action '" + act.name + "' names an unknown process"});
            else if (!seen.insert(p).second)
                out.push_back({S::Error, "bad-domain", "action '" + act.name + "' repeats a process"});
        }
        if (!std::is_sorted(act.dom.begin(), act.dom.end()))
            out.push_back({S::Error, "bad-domain", "domain of '" + act.name + "' is not in process order"});
    }
    if (static_cast<int>(a.states.size()) != np || static_cast<int>(a.initial.size()) != np) {
        out.push_back({S::Error, "shape", "state table does not match the process count"});
        return out;
    }
    for (int p = 0; p < np; ++p) {
        if (a.states[p].empty())
            out.push_back({S::Error, "empty-process", "process '" + alpha.processes[p] + "' has no states"});
        else if (a.initial[p] < 0 || a.initial[p] >= a.num_states(p))
            out.push_back({S::Error, "initial", "initial state of '" + alpha.processes[p] + "' is out of range"});
        std::set<std::string> sn;
        for (const auto& s : a.states[p])
            if (!sn.insert(s).second)
                out.push_back({S::Error, "duplicate-state",
                               "state '" + s + "' of '" + alpha.processes[p] + "' is not unique"});
    }
    for (const auto& t : a.rejected()) {
        const auto& act = alpha.actions[t.action];
        if (act.dom.size() > 2 || act.dom.empty())
            out.push_back({S::Error, "arity", "transition on non-binary action '" + act.name + "' from " +
                                                  describe_tuple(a, t.action, t.from)});
        else if (t.from.size() != act.dom.size() || t.to.size() != act.dom.size())
            out.push_back({S::Error, "width", "transition on '" + act.name + "' has a tuple of the wrong width"});
        else
            out.push_back({S::Error, "nondeterministic",
                           "action '" + act.name + "' has two images from " +
                               describe_tuple(a, t.action, t.from) + "; second image " +
                               describe_tuple(a, t.action, t.to)});
    }
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.actions[act].dom;
        if (dom.empty() || dom.size() > 2) continue;
        bool bad_dom = false;
        for (int p : dom) bad_dom |= (p < 0 || p >= np);
        if (bad_dom) continue;
        for (const auto& [from, to] : a.delta(act)) {
            for (std::size_t i = 0; i < dom.size(); ++i) {
                int n = a.num_states(dom[i]);
                if (from[i] < 0 || from[i] >= n || to[i] < 0 || to[i] >= n) {
                    out.push_back({S::Error, "bad-state", "transition on '" + alpha.actions[act].name +
                                                              "' refers to an unknown state"});
                    break;
                }
            }
        }
    }
    if (has_errors(out)) return out;

    auto reach = reachable_states(a);
    std::vector<std::vector<bool>> used(np);
    for (int p = 0; p < np; ++p) used[p].assign(a.num_states(p), false);
    for (const auto& g : reach)
        for (int p = 0; p < np; ++p) used[p][g[p]] = true;
    for (int p = 0; p < np; ++p)
        for (int s = 0; s < a.num_states(p); ++s)
            if (!used[p][s])
                out.push_back({S::Warning, "unreachable",
                               "state '" + a.states[p][s] + "' of '" + alpha.processes[p] +
                                   "' occurs in no run; prune it"});
    return out;
}

std::vector<Diagnostic> validate(const Plant& plant) {
    using S = Diagnostic::Severity;
    auto out = validate(plant.automaton);
    const auto& a = plant.automaton;
    if (static_cast<int>(plant.conditions.size()) != a.num_processes()) {
        out.push_back({S::Error, "conditions", "one local condition per process is required"});
        return out;
    }
    for (int p = 0; p < a.num_processes(); ++p) {
        const auto& c = plant.conditions[p];
        if (static_cast<int>(c.terminal.size()) != a.num_states(p) ||
            static_cast<int>(c.rank.size()) != a.num_states(p))
            out.push_back({S::Error, "conditions", "condition of '" + a.alphabet.processes[p] +
                                                       "' does not cover its states"});
        for (int r : c.rank)
            if (r < 0) out.push_back({S::Error, "rank", "negative rank on '" + a.alphabet.processes[p] + "'"});
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.is_error(); });
}

void require_valid(const Plant& plant) {
    auto diags = validate(plant);
    if (!has_errors(diags)) return;
    std::string msg = "invalid plant:";
    for (const auto& d : diags)
        if (d.is_error()) msg += " [" + d.code + "] " + d.message + ";";
    throw InputError(msg);
}

// --- runs -------------------------------------------------------------------

std::optional<GlobalState> step(const Automaton& a, const GlobalState& g, int action) {
    auto img = a.next(action, a.project(action, g));
    if (!img) return std::nullopt;
    GlobalState out = g;
    const auto& dom = a.alphabet.actions[action].dom;
    for (std::size_t i = 0; i < dom.size(); ++i) out[dom[i]] = (*img)[i];
    return out;
}

std::optional<Run> run(const Automaton& a, const std::vector<int>& word) {
    Run r;
    r.stem = word;
    r.states.push_back(a.initial);
    for (int act : word) {
        auto nxt = step(a, r.states.back(), act);
        if (!nxt) return std::nullopt;
        r.states.push_back(std::move(*nxt));
    }
    return r;
}

Run run_lasso(const Automaton& a, const std::vector<int>& stem, const std::vector<int>& cycle) {
    std::vector<int> w = stem;
    w.insert(w.end(), cycle.begin(), cycle.end());
    auto r = run(a, w);
    if (!r) throw StructuralError("lasso word does not label a run");
    if (r->states[stem.size()] != r->states.back())
        throw StructuralError("lasso cycle does not return to its entry state");
    r->stem = stem;
    r->cycle = cycle;
    return *r;
}

std::vector<LocalStep> project_run(const Automaton& a, const Run& r, int p) {
    std::vector<LocalStep> out;
    auto w = r.word();
    for (std::size_t i = 0; i < w.size(); ++i)
        if (a.alphabet.involves(w[i], p)) out.push_back({r.states[i][p], w[i], r.states[i + 1][p]});
    return out;
}

std::vector<int> enabled_actions(const Automaton& a, const GlobalState& g) {
    std::vector<int> out;
    for (int act = 0; act < a.alphabet.num_actions(); ++act)
        if (a.enabled(act, g)) out.push_back(act);
    return out;
}

std::optional<MaximalityWitness> maximality_violation(const Automaton& a, const Run& r) {
    const auto& alpha = a.alphabet;
    if (!r.is_lasso()) {
        const auto& last = r.states.back();
        for (int act = 0; act < alpha.num_actions(); ++act)
            if (a.enabled(act, last)) return MaximalityWitness{r.stem.size(), act};
        return std::nullopt;
    }
    std::vector<bool> active(alpha.num_processes(), false);
    for (int act : r.cycle)
        for (int p : alpha.dom(act)) active[p] = true;
    const auto& entry = r.states[r.stem.size()];
    for (int act = 0; act < alpha.num_actions(); ++act) {
        bool frozen_only = true;
        for (int p : alpha.dom(act)) frozen_only &= !active[p];
        if (!frozen_only || !a.enabled(act, entry)) continue;
        // insertion point: right after the last stem action touching dom(act)
        std::size_t pos = 0;
        for (std::size_t i = 0; i < r.stem.size(); ++i)
            for (int p : alpha.dom(r.stem[i]))
                if (alpha.involves(act, p)) pos = i + 1;
        return MaximalityWitness{pos, act};
    }
    return std::nullopt;
}

// --- product ----------------------------------------------------------------

Automaton product(const Automaton& a, const Automaton& b) {
    if (!(a.alphabet == b.alphabet)) throw InputError("product: alphabets differ");
    Automaton out(a.alphabet);
    const int np = a.num_processes();
    for (int p = 0; p < np; ++p) {
        for (int s = 0; s < a.num_states(p); ++s)
            for (int c = 0; c < b.num_states(p); ++c)
                out.add_state(p, "(" + a.states[p][s] + "," + b.states[p][c] + ")");
        out.initial[p] = a.initial[p] * b.num_states(p) + b.initial[p];
    }
    for (int act = 0; act < a.alphabet.num_actions(); ++act) {
        const auto& dom = a.alphabet.dom(act);
        for (const auto& [fa, ta] : a.delta(act))
            for (const auto& [fb, tb] : b.delta(act)) {
                LocalPair f{kNone, kNone}, t{kNone, kNone};
                for (std::size_t i = 0; i < dom.size(); ++i) {
                    int nb = b.num_states(dom[i]);
                    f[i] = fa[i] * nb + fb[i];
                    t[i] = ta[i] * nb + tb[i];
                }
                out.add_transition(act, f, t);
            }
    }
    return out;
}

// --- covering ---------------------------------------------------------------

std::vector<Diagnostic> check_covering(const Automaton& plant, const Controller& c) {
    using S = Diagnostic::Severity;
    std::vector<Diagnostic> out;
    const auto& ca = c.automaton;
    if (!(ca.alphabet == plant.alphabet)) {
        out.push_back({S::Error, "alphabet", "controller and plant alphabets differ"});
        return out;
    }
    const int np = plant.num_processes();
    if (static_cast<int>(c.pi.size()) != np) {
        out.push_back({S::Error, "pi", "projection must cover every process"});
        return out;
    }
    for (int p = 0; p < np; ++p) {
        if (static_cast<int>(c.pi[p].size()) != ca.num_states(p)) {
            out.push_back({S::Error, "pi", "projection of '" + plant.alphabet.processes[p] + "' is not total"});
            return out;
        }
        for (int v : c.pi[p])
            if (v < 0 || v >= plant.num_states(p)) {
                out.push_back({S::Error, "pi", "projection of '" + plant.alphabet.processes[p] +
                                                   "' leaves the plant's state set"});
                return out;
            }
    }
    auto name = [&](int act, LocalPair t, bool ctrl) {
        const auto& dom = plant.alphabet.dom(act);
        std::vector<std::string> parts;
        for (std::size_t i = 0; i < dom.size(); ++i)
            parts.push_back(ctrl ? ca.states[dom[i]][t[i]] : plant.states[dom[i]][t[i]]);
        return tuple_name(parts);
    };
    for (int act = 0; act < plant.alphabet.num_actions(); ++act) {
        const auto& dom = plant.alphabet.dom(act);
        auto map_pair = [&](LocalPair t) {
            LocalPair m{kNone, kNone};
            for (std::size_t i = 0; i < dom.size(); ++i) m[i] = c.pi[dom[i]][t[i]];
            return m;
        };
        for (const auto& [f, t] : ca.delta(act)) {
            auto img = plant.next(act, map_pair(f));
            if (!img || *img != map_pair(t))
                out.push_back({S::Error, "transition",
                               "controller transition " + name(act, f, true) + " -" +
                                   plant.alphabet.actions[act].name + "-> " + name(act, t, true) +
                                   " is not mapped onto a plant transition"});
        }
        if (plant.alphabet.controllable(act)) continue;
        // every controller source tuple whose projection enables act must enable it
        int n0 = ca.num_states(dom[0]);
        int n1 = dom.size() == 2 ? ca.num_states(dom[1]) : 1;
        for (int x = 0; x < n0; ++x)
            for (int y = 0; y < n1; ++y) {
                LocalPair src{x, dom.size() == 2 ? y : kNone};
                if (!plant.next(act, map_pair(src))) continue;
                if (!ca.next(act, src))
                    out.push_back({S::Error, "refused",
                                   "uncontrollable " + plant.alphabet.actions[act].name + " refused at " +
                                       name(act, src, true)});
            }
    }
    return out;
}

std::vector<Diagnostic> check_covering(const Plant& plant, const Controller& c) {
    return check_covering(plant.automaton, c);
}

void complete_uncontrollable(Controller& c, const Automaton& plant) {
    auto& ca = c.automaton;
    const auto& alpha = plant.alphabet;
    auto state_for = [&](int p, int s) {
        for (int x = 0; x < ca.num_states(p); ++x)
            if (c.pi[p][x] == s) return x;
        std::string name = plant.states[p][s] + "~";
        while (ca.find_state(p, name)) name += "~";
        c.pi[p].push_back(s);
        return ca.add_state(p, name);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (int act = 0; act < alpha.num_actions(); ++act) {
            if (alpha.controllable(act)) continue;
            const auto& dom = alpha.dom(act);
            int n0 = ca.num_states(dom[0]);
            int n1 = dom.size() == 2 ? ca.num_states(dom[1]) : 1;
            for (int x = 0; x < n0; ++x)
                for (int y = 0; y < n1; ++y) {
                    LocalPair src{x, dom.size() == 2 ? y : kNone};
                    LocalPair img{c.pi[dom[0]][x], dom.size() == 2 ? c.pi[dom[1]][y] : kNone};
                    auto target = plant.next(act, img);
                    if (!target || ca.next(act, src)) continue;
                    LocalPair t{state_for(dom[0], (*target)[0]), kNone};
                    if (dom.size() == 2) t[1] = state_for(dom[1], (*target)[1]);
                    ca.add_transition(act, src, t);
                    changed = true;
                }
        }
    }
}

Controller pruned(const Controller& ctrl, const Automaton& plant, std::size_t max_states) {
    Controller out = pruned(ctrl, max_states);
    complete_uncontrollable(out, plant);
    return out;
}

Controller identity_controller(const Automaton& a) {
    Controller c{a, {}};
    for (int p = 0; p < a.num_processes(); ++p) {
        std::vector<int> id(a.num_states(p));
        std::iota(id.begin(), id.end(), 0);
        c.pi.push_back(std::move(id));
    }
    return c;
}

// --- architecture -----------------------------------------------------------

CommunicationGraph communication_graph(const Alphabet& alpha) {
    CommunicationGraph g;
    g.num_processes = alpha.num_processes();
    std::set<std::pair<int, int>> edges;
    for (const auto& act : alpha.actions)
        if (act.dom.size() == 2) edges.insert({std::min(act.dom[0], act.dom[1]), std::max(act.dom[0], act.dom[1])});
    g.edges.assign(edges.begin(), edges.end());
    g.neighbours.assign(g.num_processes, {});
    for (auto [p, q] : g.edges) {
        g.neighbours[p].push_back(q);
        g.neighbours[q].push_back(p);
    }
    for (auto& n : g.neighbours) std::sort(n.begin(), n.end());
    return g;
}

std::vector<std::vector<int>> connected_components(const CommunicationGraph& g) {
    std::vector<int> comp(g.num_processes, kNone);
    std::vector<std::vector<int>> out;
    for (int s = 0; s < g.num_processes; ++s) {
        if (comp[s] != kNone) continue;
        std::vector<int> members;
        std::deque<int> work{s};
        comp[s] = static_cast<int>(out.size());
        while (!work.empty()) {
            int p = work.front();
            work.pop_front();
            members.push_back(p);
            for (int q : g.neighbours[p])
                if (comp[q] == kNone) {
                    comp[q] = comp[s];
                    work.push_back(q);
                }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

bool is_acyclic(const CommunicationGraph& g) {
    auto comps = connected_components(g);
    return g.edges.size() + comps.size() == static_cast<std::size_t>(g.num_processes);
}

std::vector<RootedTree> root_and_order(const CommunicationGraph& g) {
    if (!is_acyclic(g)) throw InputError("communication graph is not acyclic");
    std::vector<RootedTree> out;
    for (auto& members : connected_components(g)) {
        RootedTree t;
        t.root = members.front();
        t.members = members;
        t.parent.assign(g.num_processes, kNone);
        std::vector<int> children(g.num_processes, 0);
        std::deque<int> work{t.root};
        std::vector<bool> seen(g.num_processes, false);
        seen[t.root] = true;
        while (!work.empty()) {
            int p = work.front();
            work.pop_front();
            for (int q : g.neighbours[p])
                if (!seen[q]) {
                    seen[q] = true;
                    t.parent[q] = p;
                    ++children[p];
                    work.push_back(q);
                }
        }
        std::vector<bool> removed(g.num_processes, false);
        for (std::size_t k = 1; k < members.size(); ++k) {
            for (int p : members) {
                if (p == t.root || removed[p] || children[p] != 0) continue;
                removed[p] = true;
                --children[t.parent[p]];
                t.order.push_back({p, t.parent[p]});
                break;
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

// --- monitors ---------------------------------------------------------------

Plant compose_monitor(const Plant& plant, int p, const ParityMonitor& monitor) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    const int nm = static_cast<int>(monitor.states.size());
    if (nm == 0 || monitor.initial < 0 || monitor.initial >= nm ||
        static_cast<int>(monitor.delta.size()) != nm || static_cast<int>(monitor.rank.size()) != nm ||
        static_cast<int>(monitor.terminal.size()) != nm)
        throw InputError("compose_monitor: malformed monitor");
    for (int m = 0; m < nm; ++m)
        for (int act : alpha.actions_of(p)) {
            auto it = monitor.delta[m].find(act);
            if (it == monitor.delta[m].end())
                throw InputError("compose_monitor: monitor is partial at state '" + monitor.states[m] +
                                 "' on action '" + alpha.actions[act].name + "'");
            if (it->second < 0 || it->second >= nm) throw InputError("compose_monitor: bad monitor target");
        }

    Plant out;
    out.automaton = Automaton(alpha);
    auto& b = out.automaton;
    const int ns = a.num_states(p);
    auto id = [nm](int s, int m) { return s * nm + m; };
    for (int q = 0; q < a.num_processes(); ++q) {
        if (q == p) {
            for (int s = 0; s < ns; ++s)
                for (int m = 0; m < nm; ++m) b.add_state(q, "(" + a.states[q][s] + "," + monitor.states[m] + ")");
            b.initial[q] = id(a.initial[q], monitor.initial);
        } else {
            b.states[q] = a.states[q];
            b.initial[q] = a.initial[q];
        }
    }
    for (int act = 0; act < alpha.num_actions(); ++act) {
        const auto& dom = alpha.dom(act);
        int slot = -1;
        for (std::size_t i = 0; i < dom.size(); ++i)
            if (dom[i] == p) slot = static_cast<int>(i);
        for (const auto& [f, t] : a.delta(act)) {
            if (slot < 0) {
                b.add_transition(act, f, t);
                continue;
            }
            for (int m = 0; m < nm; ++m) {
                LocalPair f2 = f, t2 = t;
                f2[slot] = id(f[slot], m);
                t2[slot] = id(t[slot], monitor.delta[m].at(act));
                b.add_transition(act, f2, t2);
            }
        }
    }
    out.conditions = plant.conditions;
    LocalCondition c;
    for (int s = 0; s < ns; ++s)
        for (int m = 0; m < nm; ++m) {
            c.terminal.push_back(monitor.terminal[m]);
            c.rank.push_back(monitor.rank[m]);
        }
    out.conditions[p] = std::move(c);
    return pruned(out);
}

// --- reachability and pruning -----------------------------------------------

std::vector<GlobalState> reachable_states(const Automaton& a, std::size_t max_states) {
    std::vector<GlobalState> order{a.initial};
    std::unordered_map<GlobalState, int, GlobalStateHash> index{{a.initial, 0}};
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (int act = 0; act < a.alphabet.num_actions(); ++act) {
            auto nxt = step(a, order[i], act);
            if (!nxt || index.count(*nxt)) continue;
            index.emplace(*nxt, static_cast<int>(order.size()));
            order.push_back(std::move(*nxt));
            if (max_states && order.size() > max_states)
                throw SizeLimitError("reachable global state space exceeds " + std::to_string(max_states));
        }
    }
    return order;
}

PruneResult prune_unreachable(Automaton& a, std::size_t max_states) {
    const int np = a.num_processes();
    auto reach = reachable_states(a, max_states);
    std::vector<std::vector<bool>> used(np);
    for (int p = 0; p < np; ++p) used[p].assign(a.num_states(p), false);
    for (const auto& g : reach)
        for (int p = 0; p < np; ++p) used[p][g[p]] = true;
    PruneResult res;
    res.old_to_new.resize(np);
    Automaton out(a.alphabet);
    for (int p = 0; p < np; ++p) {
        res.old_to_new[p].assign(a.num_states(p), kNone);
        for (int s = 0; s < a.num_states(p); ++s)
            if (used[p][s]) res.old_to_new[p][s] = out.add_state(p, a.states[p][s]);
        out.initial[p] = res.old_to_new[p][a.initial[p]];
    }
    for (int act = 0; act < a.alphabet.num_actions(); ++act) {
        const auto& dom = a.alphabet.dom(act);
        for (const auto& [f, t] : a.delta(act)) {
            LocalPair f2{kNone, kNone}, t2{kNone, kNone};
            bool ok = true;
            for (std::size_t i = 0; i < dom.size(); ++i) {
                f2[i] = res.old_to_new[dom[i]][f[i]];
                t2[i] = res.old_to_new[dom[i]][t[i]];
                ok &= f2[i] != kNone && t2[i] != kNone;
            }
            if (ok) out.add_transition(act, f2, t2);
        }
    }
    a = std::move(out);
    return res;
}

Plant pruned(const Plant& plant, std::size_t max_states) {
    Plant out = plant;
    auto res = prune_unreachable(out.automaton, max_states);
    for (int p = 0; p < out.automaton.num_processes(); ++p) {
        LocalCondition c;
        for (std::size_t s = 0; s < res.old_to_new[p].size(); ++s)
            if (res.old_to_new[p][s] != kNone) {
                c.terminal.push_back(plant.conditions[p].terminal[s]);
                c.rank.push_back(plant.conditions[p].rank[s]);
            }
        out.conditions[p] = std::move(c);
    }
    return out;
}

Controller pruned(const Controller& ctrl, std::size_t max_states) {
    Controller out = ctrl;
    auto res = prune_unreachable(out.automaton, max_states);
    for (int p = 0; p < out.automaton.num_processes(); ++p) {
        std::vector<int> pi;
        for (std::size_t s = 0; s < res.old_to_new[p].size(); ++s)
            if (res.old_to_new[p][s] != kNone) pi.push_back(ctrl.pi[p][s]);
        out.pi[p] = std::move(pi);
    }
    return out;
}

Plant restrict_to(const Plant& plant, const std::vector<int>& keep) {
    const auto& a = plant.automaton;
    const auto& alpha = a.alphabet;
    std::vector<int> newp(alpha.num_processes(), kNone);
    Alphabet na;
    for (int p : keep) {
        newp[p] = na.num_processes();
        na.processes.push_back(alpha.processes[p]);
    }
    std::vector<int> acts;
    for (int act = 0; act < alpha.num_actions(); ++act) {
        Action x = alpha.actions[act];
        bool inside = true;
        for (int& p : x.dom) {
            inside &= newp[p] != kNone;
            p = newp[p];
        }
        if (!inside) continue;
        acts.push_back(act);
        na.actions.push_back(std::move(x));
    }
    Plant out;
    out.automaton = Automaton(na);
    for (int p : keep) {
        out.automaton.states[newp[p]] = a.states[p];
        out.automaton.initial[newp[p]] = a.initial[p];
        out.conditions.push_back(plant.conditions[p]);
    }
    for (std::size_t i = 0; i < acts.size(); ++i)
        for (const auto& [f, t] : a.delta(acts[i])) out.automaton.add_transition(static_cast<int>(i), f, t);
    return out;
}

std::string tuple_name(const std::vector<std::string>& parts) {
    std::string s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) s += ",";
        s += parts[i];
    }
    return s + ")";
}

}  // namespace zsynth
