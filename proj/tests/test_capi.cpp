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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "zsynth/zsynth.h"

#include <string>

namespace {

const std::string corpus_dir = ZSYNTH_CORPUS_DIR;

std::string take(char* s) {
    std::string out = s ? s : "";
    zs_string_free(s);
    return out;
}

}  // namespace

TEST_CASE("plant handles and errors") {
    zs_plant* p = nullptr;
    CHECK(zs_plant_read((corpus_dir + "/example2.json").c_str(), &p) == ZS_OK);
    REQUIRE(p != nullptr);

    char* text = nullptr;
    REQUIRE(zs_plant_json(p, &text) == ZS_OK);
    const std::string doc = take(text);
    CHECK(doc.back() == '\n');

    zs_plant* q = nullptr;
    REQUIRE(zs_plant_parse(doc.c_str(), &q) == ZS_OK);
    REQUIRE(zs_plant_json(q, &text) == ZS_OK);
    CHECK(take(text) == doc);
    zs_plant_free(q);

    zs_plant* bad = nullptr;
    CHECK(zs_plant_parse("{not json", &bad) == ZS_E_INPUT);
    CHECK(bad == nullptr);
    CHECK(std::string(zs_last_error()).size() > 0);
    CHECK(zs_plant_parse(nullptr, &bad) == ZS_E_INPUT);
    CHECK(zs_plant_json(nullptr, &text) == ZS_E_INPUT);

    zs_plant* t = nullptr;
    CHECK(zs_transform(p, "nonsense", nullptr, nullptr, 0, &t) == ZS_E_INPUT);
    CHECK(zs_transform(p, "aware", "nobody", nullptr, 0, &t) == ZS_E_INPUT);
    CHECK(zs_transform(p, "aware", "r", nullptr, 0, &t) == ZS_OK);
    zs_plant_free(t);
    CHECK(zs_transform(p, "aware", nullptr, nullptr, 2, &t) == ZS_E_SIZE_LIMIT);
    zs_plant_free(p);
    zs_plant_free(nullptr);
}

TEST_CASE("synthesize, verify and explain") {
    zs_plant* p = nullptr;
    REQUIRE(zs_plant_read((corpus_dir + "/example2.json").c_str(), &p) == ZS_OK);
    zs_controller* c = nullptr;
    REQUIRE(zs_synthesize(p, 0, &c) == ZS_OK);
    char* trace = nullptr;
    CHECK(zs_verify(p, c, 0, &trace) == ZS_OK);
    char* story = nullptr;
    CHECK(zs_explain(take(trace).c_str(), &story) == ZS_OK);
    CHECK(take(story).size() > 0);

    char* listing = nullptr;
    CHECK(zs_simulate(p, nullptr, "a,b c", &listing) == ZS_OK);
    CHECK(take(listing).find("3 c") != std::string::npos);
    CHECK(zs_simulate(p, nullptr, "zz", &listing) == ZS_E_INPUT);

    char* report = nullptr;
    REQUIRE(zs_trace(p, 0, &report) == ZS_OK);
    CHECK(take(report).find("\"realizable\": true") != std::string::npos);
    zs_controller_free(c);
    zs_plant_free(p);
}

TEST_CASE("generator and unrealizable plants") {
    zs_gen_params gp{2, 3, 4, 2, 1, 1};
    zs_plant* a = nullptr;
    zs_plant* b = nullptr;
    REQUIRE(zs_generate(5, &gp, &a) == ZS_OK);
    REQUIRE(zs_generate(5, &gp, &b) == ZS_OK);
    char* ta = nullptr;
    char* tb = nullptr;
    zs_plant_json(a, &ta);
    zs_plant_json(b, &tb);
    CHECK(take(ta) == take(tb));
    zs_plant_free(a);
    zs_plant_free(b);

    gp.processes = 0;
    CHECK(zs_generate(5, &gp, &a) == ZS_E_INPUT);

    zs_plant* p = nullptr;
    REQUIRE(zs_plant_parse(R"({
      "kind": "plant", "processes": ["p"],
      "actions": [{"name": "u", "dom": ["p"], "controllable": false}],
      "states": {"p": ["s", "t"]}, "initial": {"p": "s"},
      "transitions": [{"action": "u", "from": ["s"], "to": ["t"]}],
      "conditions": {"p": {"terminal": ["s"]}}
    })", &p) == ZS_OK);
    zs_controller* c = nullptr;
    CHECK(zs_synthesize(p, 0, &c) == ZS_NO);
    CHECK(c == nullptr);
    zs_plant_free(p);
}
