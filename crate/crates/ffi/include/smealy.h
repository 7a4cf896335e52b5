#ifndef SMEALY_H
#define SMEALY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SmealyOracle {
  SMEALY_ORACLE_LEXMIN = 0,
  SMEALY_ORACLE_RANDOM = 1,
} SmealyOracle;

typedef enum SmealyStatus {
  SMEALY_STATUS_OK = 0,
  SMEALY_STATUS_NULL_ARGUMENT = 1,
  SMEALY_STATUS_INVALID_UTF8 = 2,
  SMEALY_STATUS_PARSE = 3,
  SMEALY_STATUS_INVALID_INPUT = 4,
  SMEALY_STATUS_LEARNING_FAILED = 5,
  SMEALY_STATUS_IO = 6,
  SMEALY_STATUS_PANIC = 7,
} SmealyStatus;

/**
 * Opaque automaton handle.
 */
typedef struct SmealyAutomaton SmealyAutomaton;

/**
 * Statistics of one learning run.
 */
typedef struct SmealyStats {
  uint64_t eq_queries;
  uint64_t output_queries;
  uint64_t sigma_e;
  uint64_t s_size;
  uint64_t r_size;
  uint64_t e_size;
  uint64_t max_cex_len;
  uint64_t runtime_us;
} SmealyStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call into this library on the same thread.
 */
const char *smealy_last_error(void);

/**
 * Parses and validates an automaton in the JSON file format.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be valid for writes.
 */
enum SmealyStatus smealy_automaton_from_json(const char *json, struct SmealyAutomaton **out);

/**
 * Built-in target: `worked-example`, `mh`, `atgs` or `lower:n,k`.
 *
 * # Safety
 * `name` must be a nul-terminated string; `out` must be valid for writes.
 */
enum SmealyStatus smealy_automaton_builtin(const char *name, struct SmealyAutomaton **out);

/**
 * Random interval automaton with three outputs.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum SmealyStatus smealy_automaton_random(size_t states,
                                          size_t essential,
                                          uint64_t seed,
                                          struct SmealyAutomaton **out);

/**
 * # Safety
 * `a` must be a live handle or null.
 */
void smealy_automaton_free(struct SmealyAutomaton *a);

/**
 * # Safety
 * `s` must be a string returned by this library, or null.
 */
void smealy_string_free(char *s);

/**
 * Number of states, or 0 for a null handle.
 *
 * # Safety
 * `a` must be a live handle or null.
 */
size_t smealy_automaton_state_count(const struct SmealyAutomaton *a);

/**
 * Number of transitions, or 0 for a null handle.
 *
 * # Safety
 * `a` must be a live handle or null.
 */
size_t smealy_automaton_transition_count(const struct SmealyAutomaton *a);

/**
 * # Safety
 * `a` must be a live handle; `out` must be valid for writes.
 */
enum SmealyStatus smealy_automaton_to_json(const struct SmealyAutomaton *a, char **out);

/**
 * # Safety
 * `a` must be a live handle; `out` must be valid for writes.
 */
enum SmealyStatus smealy_automaton_to_dot(const struct SmealyAutomaton *a, char **out);

/**
 * Output on a word given as a JSON array, e.g. `[0, 20]` or `[[0, 1.5]]`.
 *
 * # Safety
 * `a` must be a live handle, `word_json` a nul-terminated string and
 * `out` valid for writes.
 */
enum SmealyStatus smealy_automaton_run(const struct SmealyAutomaton *a,
                                       const char *word_json,
                                       char **out);

/**
 * Sets `*out_equal`; when the automata differ and `out_witness` is not
 * null, also stores a distinguishing word as a JSON array.
 *
 * # Safety
 * `a` and `b` must be live handles; `out_equal` must be valid for writes;
 * `out_witness` must be null or valid for writes.
 */
enum SmealyStatus smealy_automaton_equivalent(const struct SmealyAutomaton *a,
                                              const struct SmealyAutomaton *b,
                                              bool *out_equal,
                                              char **out_witness);

/**
 * Learns `target` from a simulated teacher. `out_stats` may be null.
 *
 * # Safety
 * `target` must be a live handle; `out_learned` must be valid for writes;
 * `out_stats` must be null or valid for writes.
 */
enum SmealyStatus smealy_learn(const struct SmealyAutomaton *target,
                               enum SmealyOracle oracle,
                               uint64_t seed,
                               struct SmealyAutomaton **out_learned,
                               struct SmealyStats *out_stats);

/**
 * Static name of a status code.
 */
const char *smealy_status_name(enum SmealyStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SMEALY_H */
