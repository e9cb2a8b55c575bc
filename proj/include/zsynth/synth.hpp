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

// Controller synthesis for acyclic architectures by leaf elimination.
//
// A plant is first made to have local controllable actions only. A forest is
// solved per tree; a tree with one process is a parity control game, and a
// larger tree loses its lowest-index leaf r into the parent q:
//
//   A -> r-aware A -> short A -> reduced A (q condition compiled) -> recurse
//
// and the recursive answer is lifted back along the same chain.

#include "zsynth/core.hpp"
#include "zsynth/io.hpp"

#include <optional>
#include <string>
#include <vector>

namespace zsynth {

struct SynthOptions {
    std::size_t max_states = 0;  // guardrail for every pass and for verification, 0 = none
};

struct PassRecord {
    int depth = 0;
    std::string pass;  // split, localize, aware, shorten, reduce, compile, game
    std::vector<std::string> processes;
    std::string leaf;
    std::string parent;
    std::size_t states_in = 0;   // total local states of the pass input
    std::size_t states_out = 0;  // total local states of the pass output
    std::size_t strategies = 0;
    std::optional<int> short_bound;
    std::size_t reduced_q_states = 0;
    std::size_t size_bound = 0;
};

struct PipelineTrace {
    std::vector<PassRecord> passes;
    bool realizable = false;

    /// Every reduce pass stayed within reduce_size_bound.
    bool bounds_hold() const;
};

/// A correct covering controller, or nothing when none exists. The result is
/// checked with `verify` and StructuralError is thrown if that fails. Throws
/// InputError for cyclic architectures or invalid plants.
std::optional<Controller> synthesize(const Plant& plant, const SynthOptions& opts = {});

/// Runs the synthesis pipeline and records every pass.
PipelineTrace pipeline_trace(const Plant& plant, const SynthOptions& opts = {});

json trace_report_to_json(const PipelineTrace& t);

/// Disjoint union of controllers of restrict_to(plant, keep) for a partition
/// of the processes.
Controller disjoint_union(const Plant& plant, const std::vector<std::vector<int>>& parts,
                          const std::vector<Controller>& controllers);

}  // namespace zsynth
