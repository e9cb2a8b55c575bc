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

#include "support.hpp"

using namespace zsynth;
using namespace zsynth::test;

TEST_CASE("corpus round trip is byte stable") {
    for (const char* name : {"example2_raw.json", "example2.json", "cas.json"}) {
        auto j = load_json_file(corpus(name));
        auto plant = plant_from_json(j);
        auto text = dump_canonical(plant_to_json(plant));
        auto again = plant_from_json(parse_json_text(text));
        CHECK(again == plant);
        CHECK(dump_canonical(plant_to_json(again)) == text);
    }
    auto plant = load_plant("example2.json");
    auto c = load_controller("example2_controller.json", plant);
    auto text = dump_canonical(controller_to_json(c, plant.automaton));
    auto again = controller_from_json(parse_json_text(text), plant.automaton);
    CHECK(again == c);
}

TEST_CASE("random plants round trip") {
    std::mt19937_64 rng(71);
    for (int i = 0; i < 100; ++i) {
        GenParams gp;
        gp.processes = 1 + static_cast<int>(rng() % 3);
        auto plant = random_plant(gp, rng);
        auto text = dump_canonical(plant_to_json(plant));
        CHECK(plant_from_json(parse_json_text(text)) == plant);
    }
}

TEST_CASE("errors carry a document path") {
    auto j = load_json_file(corpus("example2_raw.json"));
    auto bad = j;
    bad["transitions"][2]["from"][0] = "nowhere";
    try {
        plant_from_json(bad);
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("/transitions/2/from/0") != std::string::npos);
    }
    auto kind = j;
    kind["kind"] = "controller";
    CHECK_THROWS_AS(plant_from_json(kind), InputError);
    CHECK_THROWS_AS(parse_json_text("{not json"), InputError);
    CHECK_THROWS_AS(load_json_file("/nonexistent/file.json"), InputError);
}

TEST_CASE("domain order in documents") {
    // tuples follow the dom order as written, even when it is not process order
    auto j = parse_json_text(R"({"kind":"plant","processes":["p","q"],
      "actions":[{"name":"x","dom":["q","p"],"controllable":false}],
      "states":{"p":["p0","p1"],"q":["q0","q1"]},"initial":{"p":"p0","q":"q0"},
      "transitions":[{"action":"x","from":["q0","p0"],"to":["q1","p1"]}],
      "conditions":{"p":{"terminal":["p1"]},"q":{"terminal":["q1"]}}})");
    auto plant = plant_from_json(j);
    auto next = step(plant.automaton, plant.automaton.initial, 0);
    REQUIRE(next);
    CHECK(*next == GlobalState{1, 1});
    auto out = plant_to_json(plant);
    CHECK(out["actions"][0]["dom"] == json::array({"p", "q"}));
    CHECK(out["transitions"][0]["from"] == json::array({"p0", "q0"}));
}
