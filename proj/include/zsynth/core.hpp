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

// Distributed alphabets, Zielonka automata and their run semantics.
//
// A Zielonka automaton is a family of finite processes that synchronise on
// shared actions. Every action a has a location dom(a), a set of one or two
// processes, and a partial transition function on the dom(a)-tuples of local
// states. All actions handled here are at most binary, so local tuples are
// stored as a fixed pair with -1 in the unused slot.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace zsynth {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition of an operation.
class InputError : public Error {
public:
    using Error::Error;
};

/// A structural inconsistency detected while building or replaying a run.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Raised when a construction exceeds the configured state budget.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

using LocalPair = std::array<int, 2>;
inline constexpr int kNone = -1;

struct Action {
    std::string name;
    std::vector<int> dom;  // ascending process indices
    bool controllable = false;

    bool operator==(const Action&) const = default;
};

struct Alphabet {
    std::vector<std::string> processes;
    std::vector<Action> actions;

    int num_processes() const { return static_cast<int>(processes.size()); }
    int num_actions() const { return static_cast<int>(actions.size()); }

    const std::vector<int>& dom(int a) const { return actions[a].dom; }
    bool controllable(int a) const { return actions[a].controllable; }
    bool involves(int a, int p) const;
    bool is_local(int a) const { return actions[a].dom.size() == 1; }
    bool is_local_to(int a, int p) const { return is_local(a) && actions[a].dom[0] == p; }
    /// Partner of p in a binary action, kNone for local actions.
    int partner(int a, int p) const;

    std::vector<int> actions_of(int p) const;      // Σ_p
    std::vector<int> local_actions(int p) const;   // Σ_p^loc
    std::vector<int> controllable_of(int p) const; // Σ_p^sys

    std::optional<int> find_process(const std::string& name) const;
    std::optional<int> find_action(const std::string& name) const;

    /// Returns name, or name decorated with primes until it is not yet used.
    std::string fresh_action_name(const std::string& name) const;

    bool operator==(const Alphabet&) const = default;
};

struct RawTransition {
    int action = kNone;
    std::vector<int> from;
    std::vector<int> to;

    bool operator==(const RawTransition&) const = default;
};

using GlobalState = std::vector<int>;

struct GlobalStateHash {
    std::size_t operator()(const GlobalState& g) const noexcept {
        std::size_t h = 1469598103934665603ull;
        for (int v : g) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }
};

class Automaton {
public:
    Alphabet alphabet;
    std::vector<std::vector<std::string>> states;  // per process, local state names
    std::vector<int> initial;

    Automaton() = default;
    explicit Automaton(Alphabet alpha);

    int num_processes() const { return alphabet.num_processes(); }
    int num_states(int p) const { return static_cast<int>(states[p].size()); }
    std::size_t total_local_states() const;

    int add_state(int p, std::string name);
    std::optional<int> find_state(int p, const std::string& name) const;

    /// Records a transition. A second image for the same source, a tuple of
    /// the wrong width or an action of arity > 2 is kept aside for
    /// `validate` instead of being stored.
    void add_transition(int a, LocalPair from, LocalPair to);
    void add_transition(const RawTransition& t);

    std::optional<LocalPair> next(int a, LocalPair from) const;
    const std::map<LocalPair, LocalPair>& delta(int a) const { return delta_[a]; }
    std::size_t num_transitions() const;

    /// Keeps only the transition tables; clears rejected records.
    void clear_transitions(int a) { delta_[a].clear(); }
    void erase_transition(int a, LocalPair from) { delta_[a].erase(from); }

    const std::vector<RawTransition>& rejected() const { return rejected_; }

    LocalPair project(int a, const GlobalState& g) const;
    bool enabled(int a, const GlobalState& g) const;

    bool operator==(const Automaton&) const = default;

private:
    std::vector<std::map<LocalPair, LocalPair>> delta_;
    std::vector<RawTransition> rejected_;
};

/// Per-process correctness condition: terminal states for finite local runs,
/// max-parity over state ranks for infinite ones.
struct LocalCondition {
    std::vector<bool> terminal;
    std::vector<int> rank;

    bool operator==(const LocalCondition&) const = default;
};

struct Plant {
    Automaton automaton;
    std::vector<LocalCondition> conditions;

    const Alphabet& alphabet() const { return automaton.alphabet; }
    bool operator==(const Plant&) const = default;
};

/// A Zielonka automaton over the plant's alphabet with a per-process
/// projection pi onto the plant's local states.
struct Controller {
    Automaton automaton;
    std::vector<std::vector<int>> pi;

    bool operator==(const Controller&) const = default;
};

LocalCondition trivial_condition(std::size_t num_states);

/// Local transition appearing in a projected run: (source, action, target).
struct LocalStep {
    int from;
    int action;
    int to;
    bool operator==(const LocalStep&) const = default;
};

/// Finite run (empty cycle) or lasso stem·cycle^ω.
struct Run {
    std::vector<int> stem;
    std::vector<int> cycle;
    std::vector<GlobalState> states;  // states along stem·cycle, size |stem|+|cycle|+1

    bool is_lasso() const { return !cycle.empty(); }
    std::vector<int> word() const;
};

struct Diagnostic {
    enum class Severity { Error, Warning };
    Severity severity = Severity::Error;
    std::string code;
    std::string message;

    bool is_error() const { return severity == Severity::Error; }
};

std::vector<Diagnostic> validate(const Automaton& a);
std::vector<Diagnostic> validate(const Plant& plant);
bool has_errors(const std::vector<Diagnostic>& diags);
/// Throws InputError listing the errors if any diagnostic is an error.
void require_valid(const Plant& plant);

std::optional<GlobalState> step(const Automaton& a, const GlobalState& g, int action);
/// Runs w from the initial state. Absent at the first undefined step.
std::optional<Run> run(const Automaton& a, const std::vector<int>& word);
/// Runs stem·cycle and checks that the cycle closes.
Run run_lasso(const Automaton& a, const std::vector<int>& stem, const std::vector<int>& cycle);

std::vector<LocalStep> project_run(const Automaton& a, const Run& r, int p);

std::vector<int> enabled_actions(const Automaton& a, const GlobalState& g);

struct MaximalityWitness {
    std::size_t position = 0;  // u = word[0..position)
    int action = kNone;        // a with dom(a) disjoint from the suffix
};

/// A run is maximal when there is no decomposition u·v and action a with dom(a)
/// disjoint from dom(v) such that u·a·v still runs. Returns the witness when
/// the run is not maximal.
std::optional<MaximalityWitness> maximality_violation(const Automaton& a, const Run& r);
inline bool is_maximal(const Automaton& a, const Run& r) { return !maximality_violation(a, r).has_value(); }

Automaton product(const Automaton& a, const Automaton& b);

std::vector<Diagnostic> check_covering(const Automaton& plant, const Controller& c);
std::vector<Diagnostic> check_covering(const Plant& plant, const Controller& c);

/// Adds transitions on uncontrollable actions wherever the controller definition demands one
/// but the controller has none, targeting the lowest-index controller state
/// with the required projection (a fresh copy of the plant state when there
/// is none). Such sources never co-occur in a reachable global state of a
/// controller that covers the plant along its runs, so behaviour is unchanged.
void complete_uncontrollable(Controller& c, const Automaton& plant);

/// pruned() followed by complete_uncontrollable().
Controller pruned(const Controller& c, const Automaton& plant, std::size_t max_states = 0);

/// The controller C = A with pi = id.
Controller identity_controller(const Automaton& a);

// --- architecture ---------------------------------------------------------

struct CommunicationGraph {
    int num_processes = 0;
    std::vector<std::pair<int, int>> edges;  // p < q, sorted, unique
    std::vector<std::vector<int>> neighbours;
};

CommunicationGraph communication_graph(const Alphabet& alpha);
bool is_acyclic(const CommunicationGraph& g);

struct EliminationStep {
    int leaf;
    int parent;
};

struct RootedTree {
    int root;
    std::vector<int> members;          // ascending
    std::vector<int> parent;           // indexed by process, kNone for root / non-members
    std::vector<EliminationStep> order;
};

/// One rooted tree per connected component. Root is the lowest-index process
/// of the component; leaves are removed lowest index first.
std::vector<RootedTree> root_and_order(const CommunicationGraph& g);
std::vector<std::vector<int>> connected_components(const CommunicationGraph& g);

// --- monitors -------------------------------------------------------------

/// Deterministic parity automaton over Σ_p (letters are action indices).
struct ParityMonitor {
    std::vector<std::string> states;
    int initial = 0;
    std::vector<std::map<int, int>> delta;  // state -> action -> state
    std::vector<int> rank;
    std::vector<bool> terminal;
};

/// Replaces process p by S_p x monitor states; the condition of p becomes the
/// monitor's. Throws InputError if the monitor is partial on Σ_p.
Plant compose_monitor(const Plant& plant, int p, const ParityMonitor& monitor);

// --- utilities shared by the constructions ----------------------------------

/// Global states reachable from the initial state; throws SizeLimitError past
/// max_states (0 = unbounded).
std::vector<GlobalState> reachable_states(const Automaton& a, std::size_t max_states = 0);

struct PruneResult {
    std::vector<std::vector<int>> old_to_new;  // per process, kNone when removed
};

/// Drops local states not occurring in any reachable global state.
PruneResult prune_unreachable(Automaton& a, std::size_t max_states = 0);
Plant pruned(const Plant& p, std::size_t max_states = 0);
Controller pruned(const Controller& c, std::size_t max_states = 0);

/// Keeps only the processes in `keep` (ascending) and actions whose domain
/// lies inside them.
Plant restrict_to(const Plant& plant, const std::vector<int>& keep);

std::string tuple_name(const std::vector<std::string>& parts);

}  // namespace zsynth
