/* SPDX-License-Identifier: Apache-2.0 */

#ifndef BASESPACE_H
#define BASESPACE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes; the first five match the command-line exit codes.
 */
typedef enum BsStatus {
  /*
   Success; for a decision, the property holds.
   */
  BS_STATUS_OK = 0,
  BS_STATUS_FAILS = 1,
  BS_STATUS_PRECONDITION_UNMET = 2,
  BS_STATUS_UNDECIDED = 3,
  BS_STATUS_INPUT_ERROR = 4,
  BS_STATUS_NULL_POINTER = 5,
  BS_STATUS_INVALID_UTF8 = 6,
  BS_STATUS_PANIC = 7,
} BsStatus;

/*
 Named objects loaded from one JSON document.
 */
typedef struct BsWorkspace BsWorkspace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The last error on this thread, or null. Valid until the next call.
 */
const char *bs_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` is null or came from this library and was not freed before.
 */
void bs_string_free(char *s);

/*
 Loads a JSON document into a new workspace.

 # Safety
 `json` is a NUL-terminated string; `out` is writable.
 */
enum BsStatus bs_workspace_load_json(const char *json, struct BsWorkspace **out);

/*
 # Safety
 `ws` is null or a live workspace from `bs_workspace_load_json`.
 */
void bs_workspace_free(struct BsWorkspace *ws);

/*
 Classifies a base: `Holds` when it is lsb (equivalently csb and sb on
 finite spaces), `Fails` otherwise. The witness, if any, is written to
 `witness_json` when that pointer is non-null.

 # Safety
 Pointers are null or valid; `base` is NUL-terminated.
 */
enum BsStatus bs_classify(const struct BsWorkspace *ws, const char *base, char **witness_json);

/*
 Decides whether net `from` approaches net `to` in the base declared on
 their space.

 # Safety
 Pointers are valid; names are NUL-terminated.
 */
enum BsStatus bs_approaches(const struct BsWorkspace *ws, const char *from, const char *to);

/*
 Writes the number of limits of `net` to `count`; `Fails` when there
 are none.

 # Safety
 Pointers are valid; `net` is NUL-terminated.
 */
enum BsStatus bs_limit_count(const struct BsWorkspace *ws, const char *net, uintptr_t *count);

/*
 Runs a command-line invocation given as a JSON array of arguments
 (without the program name). The rendered report goes to `report`; the
 status is the command's exit code.

 # Safety
 `args_json` is NUL-terminated; `report` is writable.
 */
enum BsStatus bs_run_json(const char *args_json, char **report);

/*
 The library version, statically allocated.
 */
const char *bs_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASESPACE_H */
