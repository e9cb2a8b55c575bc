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

#ifndef ZSYNTH_ZSYNTH_H_
#define ZSYNTH_ZSYNTH_H_

/*
 * C interface of libzsynth.
 *
 * Plants and controllers are opaque handles. Functions return a zs_status;
 * on failure zs_last_error() describes the problem (thread local, valid until
 * the next call on the same thread). Strings returned through char** are
 * owned by the caller and released with zs_string_free.
 *
 * Status values double as process exit codes for the command line tool.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZS_API __declspec(dllexport)
#else
#define ZS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct zs_plant zs_plant;
typedef struct zs_controller zs_controller;

typedef enum zs_status {
    ZS_OK = 0,
    ZS_NO = 1,            /* negative answer: unrealizable, incorrect, blocked */
    ZS_E_INPUT = 2,       /* malformed or inconsistent input */
    ZS_E_SIZE_LIMIT = 3,  /* max_states exceeded */
    ZS_E_INTERNAL = 4     /* violated internal invariant */
} zs_status;

typedef struct zs_gen_params {
    int processes;
    int states;
    int actions;
    int max_rank;
    int local_controllable; /* nonzero: only local actions are controllable */
    int connected;          /* nonzero: tree architecture, else a forest */
} zs_gen_params;

ZS_API const char* zs_version(void);
ZS_API const char* zs_last_error(void);
ZS_API void zs_string_free(char* s);

/* --- plants --------------------------------------------------------------- */

ZS_API zs_status zs_plant_read(const char* path, zs_plant** out);
ZS_API zs_status zs_plant_parse(const char* text, zs_plant** out);
ZS_API void zs_plant_free(zs_plant* p);
/* Canonical JSON document, newline terminated. */
ZS_API zs_status zs_plant_json(const zs_plant* p, char** out);
/* One diagnostic per line. ZS_NO when any of them is an error. */
ZS_API zs_status zs_plant_validate(const zs_plant* p, char** report);
/* Communication graph, acyclicity and elimination order. ZS_NO when cyclic. */
ZS_API zs_status zs_plant_graph(const zs_plant* p, char** report);
ZS_API zs_status zs_generate(uint64_t seed, const zs_gen_params* params, zs_plant** out);

/* pass: "localize", "aware", "shorten" or "reduce". leaf and parent may be
 * NULL to use the first elimination step. reduce returns the reduced plant
 * with the merged condition compiled in. */
ZS_API zs_status zs_transform(const zs_plant* p, const char* pass, const char* leaf, const char* parent,
                              size_t max_states, zs_plant** out);

/* --- controllers ---------------------------------------------------------- */

ZS_API zs_status zs_controller_read(const zs_plant* plant, const char* path, zs_controller** out);
ZS_API zs_status zs_controller_parse(const zs_plant* plant, const char* text, zs_controller** out);
ZS_API void zs_controller_free(zs_controller* c);
ZS_API zs_status zs_controller_json(const zs_controller* c, char** out);

/* ZS_NO when no correct controller exists. */
ZS_API zs_status zs_synthesize(const zs_plant* p, size_t max_states, zs_controller** out);
/* ZS_OK when correct, ZS_NO otherwise; trace (may be NULL) receives the
 * verdict document for zs_explain. */
ZS_API zs_status zs_verify(const zs_plant* p, const zs_controller* c, size_t max_states, char** trace);
ZS_API zs_status zs_explain(const char* trace_text, char** narrative);
/* Runs a word of action names separated by spaces or commas on the plant, or
 * on the controller when c is not NULL. ZS_NO when the word blocks. */
ZS_API zs_status zs_simulate(const zs_plant* p, const zs_controller* c, const char* word, char** listing);
/* Pipeline report as a JSON document. */
ZS_API zs_status zs_trace(const zs_plant* p, size_t max_states, char** report);

#ifdef __cplusplus
}
#endif

#endif /* ZSYNTH_ZSYNTH_H_ */
