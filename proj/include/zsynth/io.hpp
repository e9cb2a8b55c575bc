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

// JSON documents. Every artifact is one object with a "kind" tag: alphabet,
// plant, controller or trace. The canonical form has sorted keys, arrays in
// index order and a trailing newline, so equal values give equal bytes.

#include "zsynth/core.hpp"
#include "zsynth/verify.hpp"

#include <json.hpp>

#include <string>

namespace zsynth {

using json = nlohmann::json;

std::string dump_canonical(const json& j);
json load_json_file(const std::string& path);
json parse_json_text(const std::string& text);

json alphabet_to_json(const Alphabet& alpha);
Alphabet alphabet_from_json(const json& j);

json plant_to_json(const Plant& plant);
Plant plant_from_json(const json& j);

/// pi is written with plant state names, so reading needs the plant.
json controller_to_json(const Controller& c, const Automaton& plant);
Controller controller_from_json(const json& j, const Automaton& plant);

/// A verdict together with the plant and controller it speaks about.
json trace_to_json(const Plant& plant, const Controller& c, const Verdict& v);

struct TraceDocument {
    Plant plant;
    Controller controller;
    Verdict verdict;
};

/// Reads a trace and replays its run on the embedded controller.
TraceDocument trace_from_json(const json& j);

/// Throws InputError unless j["kind"] == kind.
void expect_kind(const json& j, const std::string& kind);

}  // namespace zsynth
