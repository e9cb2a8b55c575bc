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

// Controller translations along the transformations of transforms.hpp.
//
// forward_* maps a controller of the input plant to one of the transformed
// plant; lift_* maps back. Only the lifts are needed for synthesis, the
// forward maps exist so both directions can be checked against `verify`.
// All outputs are covering controllers completed on uncontrollable actions.

#include "zsynth/core.hpp"
#include "zsynth/transforms.hpp"

#include <string>
#include <vector>

namespace zsynth {

// --- plumbing ----------------------------------------------------------------

/// Same controller, with pi_p composed with `base` (refined plant state ->
/// coarse plant state). Used to drop monitor or awareness components.
Controller coarsen(const Controller& c, const Automaton& coarse_plant, int p, const std::vector<int>& base);

/// Product of the p-component of `c` with a deterministic refinement of the
/// plant's p-component, so that pi lands in the refined plant.
Controller refine(const Controller& c, const Plant& refined, int p, const std::vector<int>& base);

// --- localization ---------------------------------------------------------------

/// c ->ch(A)-> c_A with A the controllable actions c enables; c_A fires A and
/// mirrors the uncontrollable moves of c. Throws StructuralError when c
/// blocks a shared controllable action at a reachable pair where both sides
/// offer it, since local choices cannot express that decision.
Controller forward_localize(const Localization& loc, const Controller& c, const Plant& source);

/// Deletes c ->ch(A)-> d and splices d's moves on A back onto c. When a state
/// has several ch moves the lowest action index is kept.
Controller lift_localize(const Localization& loc, const Controller& c, const Plant& source);

// --- shortening -----------------------------------------------------------------

/// Pairs every r-state of c with the repetition free history it has produced
/// since the last communication. Meant for r-memoryless controllers.
Controller forward_short(const Shortening& sh, const Controller& c);

/// r-states become stacks of short controller states; reaching top pops back
/// to the state that closed the even loop. Throws InputError when a stack
/// outgrows the short controller's r-component.
Controller lift_short(const Shortening& sh, const Plant& aware, const Controller& c);

// --- reduction ------------------------------------------------------------------

/// The local r-strategy played by c from r-state c_r, assuming at most one
/// controllable local move per state.
LocalStrategy strategy_of(const Controller& c, int r, int c_r);

/// Keeps the lowest-index controllable local move of every state of p.
Controller single_choice(const Controller& c, int p);

/// Merges C_q and C_r into the reduced q-component: (c_q,c_r), (c_q,c_r,f)
/// and (c_q,a,c_r,f) with a and f read off the controller.
Controller forward_red(const Reduction& red, const Controller& c);

struct LiftedRed {
    Controller controller;
    std::vector<int> q_origin;                          // D_q state -> reduced q-state of the input
    std::vector<std::pair<int, std::vector<int>>> r_origin;  // D_r state -> (d_q, x)
};

/// D_q = true states of the reduced controller, D_r = pairs (d_q, x) of a
/// true state and local r-actions it can still perform. The input is first
/// made to have one ch move per state (lowest target index).
LiftedRed lift_red(const Reduction& red, const Controller& rd);

/// Consistency invariant over the reachable global states of a lifted controller: the
/// s_r and f components of d_q and of the r-state's origin agree.
bool property_star(const Reduction& red, const Controller& rd, const LiftedRed& lifted, std::string* why = nullptr);

// --- word maps ----------------------------------------------------------------------

/// Drops the actions a reduction added.
std::vector<int> hide(const Reduction& red, const std::vector<int>& w);

/// Reorders a finite word into slow_r form y0 x0 a1 y1 x1 ...: between two
/// q-r communications, moves not involving r come before local r-moves.
std::vector<int> slow_normalize(const Alphabet& alpha, int q, int r, const std::vector<int>& w);

/// chi(w) for a word in slow_r form: ch moves of the reduced controller are
/// inserted after every q-action. Throws StructuralError if the reduced
/// controller cannot follow.
std::vector<int> chi(const Reduction& red, const Controller& rd, const std::vector<int>& w);

}  // namespace zsynth
