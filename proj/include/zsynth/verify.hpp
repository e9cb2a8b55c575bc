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

// Model checking of covering controllers. A controller is correct when every
// maximal run of it satisfies every local condition, read through pi: a
// finite local run must end in a terminal state, an infinite one must meet
// the parity condition.

#include "zsynth/core.hpp"

#include <string>

namespace zsynth {

struct Verdict {
    enum class Kind { Correct, DeadState, Lasso };
    enum class Reason { None, OddParity, NotTerminal };

    Kind kind = Kind::Correct;
    int process = kNone;
    Reason reason = Reason::None;
    Run run;  // over the controller's global states

    bool correct() const { return kind == Kind::Correct; }
};

/// Exact verifier. Throws InputError if `c` does not cover the plant and
/// SizeLimitError past max_states reachable global states (0 = unbounded).
Verdict verify(const Plant& plant, const Controller& c, std::size_t max_states = 0);

/// Brute force over runs of length <= depth. Only meant as a test oracle.
Verdict verify_bounded(const Plant& plant, const Controller& c, std::size_t depth);

/// Checks a verdict's witness against the plant by direct replay: the run
/// exists, is maximal and violates the named process as stated.
bool witness_holds(const Plant& plant, const Controller& c, const Verdict& v);

/// Evaluates Corr_p on a finite or lasso run of the controller.
bool satisfies(const Plant& plant, const Controller& c, const Run& r, int p, Verdict::Reason* why = nullptr);

std::string explain(const Plant& plant, const Controller& c, const Verdict& v);

std::string to_string(Verdict::Kind k);
std::string to_string(Verdict::Reason r);

}  // namespace zsynth
