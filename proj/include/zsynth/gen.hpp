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

// Seeded random plants for tests and the `gen` subcommand.

#include "zsynth/core.hpp"

#include <cstdint>
#include <random>

namespace zsynth {

struct GenParams {
    int processes = 2;
    int states = 3;           // per process, before pruning
    int actions = 4;
    int max_rank = 2;
    double density = 0.5;     // chance that a source tuple gets a transition
    double controllable = 0.5;
    double terminal = 0.5;
    bool local_controllable = true;  // only local actions may be controllable
    bool connected = true;           // communication graph is a tree, not a forest
};

/// A random plant with an acyclic communication graph, pruned to its
/// reachable part.
Plant random_plant(const GenParams& params, std::mt19937_64& rng);
Plant random_plant(const GenParams& params, std::uint64_t seed);

}  // namespace zsynth
