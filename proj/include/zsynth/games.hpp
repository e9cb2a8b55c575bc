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

// Parity machinery: progress measures over one-player ranked graphs, a
// recursive two-player parity game solver, the single-process control game
// and the r-memoryless normalisation of covering controllers.
//
// Parity is max-parity throughout: an infinite path is good when the largest
// rank seen infinitely often is even.

#include "zsynth/core.hpp"

#include <optional>
#include <vector>

namespace zsynth {

struct RankedGraph {
    std::vector<std::vector<int>> succ;
    std::vector<int> rank;

    int size() const { return static_cast<int>(succ.size()); }
};

/// One entry per odd rank, highest odd rank first. sig[j] counts visits to
/// rank d_j = (largest odd rank) - 2j and is bounded by the number of vertices
/// carrying that rank.
using Signature = std::vector<int>;

struct ProgressMeasure {
    std::vector<int> odd_ranks;          // ranks indexed by signature position
    std::vector<Signature> sig;          // empty when no measure exists
    std::vector<int> bad_cycle;          // vertices of an odd-dominated cycle otherwise

    bool exists() const { return bad_cycle.empty(); }
};

/// Positions of `sig` compared by >=_k: only entries for odd ranks >= k count.
int compare_at_level(const ProgressMeasure& pm, const Signature& a, const Signature& b, int k);

/// Edge condition sig(c) >=_{rank(c)} sig(c'), strict when rank(c) is odd.
bool edge_respects(const ProgressMeasure& pm, int rank_c, const Signature& c, const Signature& c2);

/// Least consistent signature assignment, or a witness cycle whose maximal
/// rank is odd.
ProgressMeasure progress_measures(const RankedGraph& g);

/// An odd-dominated cycle reachable anywhere in g, or empty.
std::vector<int> find_odd_cycle(const RankedGraph& g);

/// Strongly connected components (Tarjan); comp[v] numbered in reverse
/// topological order.
std::vector<int> scc_ids(const std::vector<std::vector<int>>& succ, int* count = nullptr);

// --- two-player parity games ------------------------------------------------

struct ParityGame {
    std::vector<int> owner;  // 0 = even player, 1 = odd player
    std::vector<std::vector<int>> succ;
    std::vector<int> priority;

    int size() const { return static_cast<int>(owner.size()); }
};

struct ParitySolution {
    std::vector<int> winner;    // 0 or 1 per vertex
    std::vector<int> strategy;  // chosen successor for vertices won by their owner, else kNone
};

/// Recursive attractor decomposition. Every vertex must have a successor.
ParitySolution solve_parity(const ParityGame& g);

// --- single-process control games -------------------------------------------

struct ControlMove {
    int action;
    int target;
    bool controllable;
};

struct ControlGame {
    int initial = 0;
    std::vector<std::vector<ControlMove>> moves;
    std::vector<bool> terminal;
    std::vector<int> rank;

    int size() const { return static_cast<int>(moves.size()); }
};

ControlGame control_game(const Plant& single_process_plant);

/// A proposal per state: the allowed controllable actions (at most one is
/// ever needed). Absent when the system cannot win from the initial state.
std::optional<std::vector<std::vector<int>>> solve_control_game(const ControlGame& game);

/// The plant restricted by a proposal map, as a covering controller with
/// pi = id, pruned to its reachable part.
Controller controller_from_proposal(const Plant& plant, const std::vector<std::vector<int>>& proposal);

// --- r-memoryless controllers -----------------------------------------------

/// Graph of local r-transitions of a controller, ranked through pi.
RankedGraph local_graph(const Plant& plant, const Controller& c, int r);

/// rep(c) for each vertex: pi-equal, reachable, closed under pi-equal
/// reachability within its SCC, least signature, then least index.
std::vector<int> representatives(const RankedGraph& local, const std::vector<int>& pi, const ProgressMeasure& pm);

/// Redirects every transition into an r-state (and the initial r-state) to
/// the representative of its target, then prunes.
Controller memoryless_r(const Controller& c, const Plant& plant, int r);

/// No two distinct r-states joined by a local r-path share a pi-image.
bool is_r_memoryless(const Controller& c, int r);

}  // namespace zsynth
