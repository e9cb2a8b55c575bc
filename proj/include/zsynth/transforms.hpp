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

// Plant transformations used by the synthesis induction.
//
// Every transformation keeps the action indices of its input (new actions are
// appended) and returns enough bookkeeping for the controller translations in
// lift.hpp. Outputs are deterministic functions of their inputs.

#include "zsynth/core.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace zsynth {

/// Index of process p inside dom(a), or kNone.
int dom_slot(const Alphabet& alpha, int a, int p);

bool has_controllable_communication(const Alphabet& alpha);

// --- controllable communications ------------------------------------------

/// A' where controllable actions are chosen by local ch(A) moves. Old states
/// and actions keep their indices; choice states <s,A> and ch actions follow.
struct Localization {
    Plant plant;
    int num_source_actions = 0;
    std::vector<int> num_source_states;          // per process
    std::vector<std::vector<int>> base;          // per process: state -> source state
    std::vector<std::vector<std::vector<int>>> choice;  // per process: state -> A (choice states only)
    std::vector<std::pair<int, std::vector<int>>> ch_sets;  // (process, A) per ch action

    bool is_choice_state(int p, int s) const { return s >= num_source_states[p]; }
    bool is_choice_action(int a) const { return a >= num_source_actions; }
    const std::vector<int>& choice_set(int a) const { return ch_sets[a - num_source_actions].second; }
};

/// Controllable actions enabled at a source state: local ones with a
/// transition, shared ones with a transition for some partner state.
std::vector<int> enabled_controllable(const Automaton& a, int p, int s);

/// Old actions become uncontrollable and s ->ch(A)-> <s,A> is added for every
/// subset A of the controllable actions enabled at s. A choice state offers
/// the actions of A and mirrors the uncontrollable moves of s, so a choice can
/// never be used to hide environment moves. <s,A> is ranked like s and is
/// terminal iff s is.
Localization localize_controllable(const Plant& plant);

// --- r-awareness -------------------------------------------------------------

struct Awareness {
    Plant plant;
    int r = kNone;
    std::vector<int> base;   // r-state -> source r-state
    std::vector<int> level;  // r-state -> largest rank since the last q-r communication
};

/// r-states become (s, m). Local moves raise m to the target's rank, a q-r
/// communication resets it to the rank of the new state.
Awareness make_r_aware(const Plant& plant, int r);

// --- r-short automata ------------------------------------------------------------

struct Shortening {
    Plant plant;
    int r = kNone;
    std::vector<std::vector<int>> seq;  // r-state -> repetition free sequence, empty for top/bottom
    int top = kNone;
    int bottom = kNone;
};

/// Replaces A_r by repetition free local histories; closing a loop leads to
/// the terminal sink top when its largest rank is even and to the odd,
/// non-terminal sink bottom otherwise. Communications restart the history.
/// The number of histories can be exponential; max_states (0 = unlimited)
/// bounds it.
Shortening shorten(const Plant& plant, int r, std::size_t max_states = 0);

/// Longest run of local r-actions between q-r communications over the
/// r-states reachable in A_r's own graph; absent when a local cycle is
/// reachable.
std::optional<int> r_short_bound(const Automaton& a, int r);

// --- local r-strategies ------------------------------------------------------------

/// Finite partial map from local r-histories to controllable local r-actions,
/// stored as sorted (history, action) pairs. Only histories that are plays of
/// the strategy itself are in the domain.
struct LocalStrategy {
    int origin = kNone;
    std::vector<std::pair<std::vector<int>, int>> moves;

    std::optional<int> at(const std::vector<int>& history) const;
    /// f|_b: histories v with b.v in the domain, rebased at `target`.
    LocalStrategy residual(int b, int target) const;

    auto operator<=>(const LocalStrategy&) const = default;
};

/// Local actions of r permitted by f at the empty history: uncontrollable
/// ones and f(eps).
bool strategy_allows(const Alphabet& alpha, const LocalStrategy& f, int b);

/// All strategies from s_r in lexicographic order: withholding comes first,
/// then offered actions by index, children by action index. Throws InputError
/// when a local cycle is reachable and SizeLimitError past `limit` (0 = none).
std::vector<LocalStrategy> enumerate_local_strategies(const Plant& plant, int r, int s_r, std::size_t limit = 0);

/// Every maximal local play from f.origin respecting f ends in T_r.
bool strategy_guarantees_terminal(const Plant& plant, int r, const LocalStrategy& f);

// --- leaf elimination ------------------------------------------------------------------

struct RedQState {
    enum class Shape { Pair, Triple, Quad };
    Shape shape = Shape::Pair;
    int sq = kNone;
    int action = kNone;  // source action for Quad, kNone stands for a0
    int sr = kNone;
    int strategy = kNone;
};

/// The reduced plant over P \ {r}. Source actions keep their indices (their
/// domain has r replaced by q); ch(f) and ch(a) actions are appended.
struct Reduction {
    Plant source;
    int q = kNone;
    int r = kNone;
    Plant plant;
    std::vector<int> proc_to_source;  // reduced process -> source process
    std::vector<int> source_to_proc;  // source process -> reduced, kNone for r
    int qr = kNone;                   // index of q in the reduced plant
    int num_source_actions = 0;

    std::vector<LocalStrategy> strategies;
    std::vector<bool> guarantee;
    std::map<LocalStrategy, int> strategy_index;
    std::vector<int> ch_strategy;          // strategy id -> action
    std::map<int, int> ch_choice;          // source controllable q-action -> action
    int ch_a0 = kNone;
    std::vector<RedQState> qstates;        // reduced q-state -> shape

    bool is_true_state(int x) const { return qstates[x].shape == RedQState::Shape::Quad; }
};

/// Leaf elimination of r into its parent q. Requires r to be a leaf attached
/// to q, controllable actions of q and r to be local, and A to be r-short.
/// q's condition in the result is terminal on Quad states over T_q x T_r and
/// otherwise trivial; compile_red_condition supplies the full condition.
Reduction reduce(const Plant& plant, int q, int r, std::size_t max_states = 0);

/// Bound on |states of the reduced q| from the construction.
std::size_t reduce_size_bound(const Reduction& red);

struct CompiledReduction {
    Plant plant;             // reduced plant with q refined by the condition monitor
    std::vector<int> base;   // compiled q-state -> reduced q-state
};

/// Parity condition for the merged q: q's parity on the A_q projection and,
/// for r, parity when r moves infinitely often or a terminal-guaranteeing
/// strategy once it stops. The conjunction is compiled with an index
/// appearance record over Streett pairs; a compiled state is (x, moved, perm)
/// where moved records that the last step was an r-transition.
CompiledReduction compile_red_condition(const Reduction& red, std::size_t max_states = 0);

/// Direct evaluation of the merged q-condition on reduced q-states
/// x0 -a0-> x1 ... -> xn. With loop = kNone the run is finite and must end in
/// a terminal state; otherwise xn == x_loop and the suffix repeats forever.
bool red_condition_holds(const Reduction& red, const std::vector<int>& states, const std::vector<int>& actions,
                         int loop);

}  // namespace zsynth
