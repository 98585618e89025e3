/* C interface to the lazy convertibility checker. All handles are opaque;
 * every function that can fail returns an lc_status and leaves a message
 * for lc_last_error(). Strings returned through char** are owned by the
 * caller and released with lc_string_free. */
#ifndef LAZYCONV_H
#define LAZYCONV_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LC_API __declspec(dllexport)
#else
#define LC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lc_status {
  LC_OK = 0,
  LC_ERR_PARSE = 1,    /* syntax or well-formedness error in the input */
  LC_ERR_IO = 2,       /* file could not be read */
  LC_ERR_MACHINE = 3,  /* evaluation went wrong (e.g. match on a function) */
  LC_ERR_ARG = 4,      /* null pointer, unknown key or suite */
  LC_ERR_INTERNAL = 5
} lc_status;

typedef enum lc_verdict {
  LC_CONVERTIBLE = 0,
  LC_NOT_CONVERTIBLE = 1,
  LC_UNKNOWN_FUEL = 2,
  LC_UNKNOWN_DEADLOCK = 3
} lc_verdict;

typedef struct lc_defs lc_defs;
typedef struct lc_result lc_result;

typedef struct lc_options {
  int frozen;           /* default 1 */
  int conv_sharing;     /* default 1 */
  int presharing;       /* default 0 */
  int eta;              /* default 0 */
  int check_invariants; /* default 0; counts violations in the stats */
} lc_options;

/* One line per unfolding decision: "step=.. chan=.. const=.. side=.. rule=..". */
typedef void (*lc_trace_fn)(const char* line, void* user);

LC_API const char* lc_last_error(void);
LC_API void lc_string_free(char* s);
LC_API void lc_options_default(lc_options* opts);

LC_API lc_status lc_defs_parse(const char* text, lc_defs** out);
LC_API lc_status lc_defs_load(const char* path, lc_defs** out);
/* The built-in benchmark definitions. */
LC_API lc_status lc_defs_bench(lc_defs** out);
LC_API void lc_defs_free(lc_defs* defs);

/* opts may be NULL for defaults; trace may be NULL. */
LC_API lc_status lc_check(const lc_defs* defs, const char* lhs, const char* rhs, const lc_options* opts, uint64_t fuel,
                          lc_trace_fn trace, void* user, lc_result** out);

/* Normal form of term; *nf is NULL when the run did not finish (see the
 * result's verdict: LC_UNKNOWN_FUEL or LC_UNKNOWN_DEADLOCK). */
LC_API lc_status lc_normalize(const lc_defs* defs, const char* term, const lc_options* opts, uint64_t fuel, char** nf,
                              lc_result** out);

LC_API lc_verdict lc_result_verdict(const lc_result* r);
LC_API const char* lc_verdict_text(lc_verdict v);
/* Keys: transitions, processes_created, conv_processes, peak_queue,
 * memo_hits, eval_steps_total, invariant_violations. */
LC_API lc_status lc_result_stat(const lc_result* r, const char* key, uint64_t* value);
LC_API uint64_t lc_result_eval_steps(const lc_result* r, uint32_t channel);
LC_API uint32_t lc_result_lhs_channel(const lc_result* r);
LC_API uint32_t lc_result_rhs_channel(const lc_result* r);
/* Flat "key: value" lines. */
LC_API char* lc_result_stats_text(const lc_result* r);
LC_API void lc_result_free(lc_result* r);

/* Reference normalizer: *decided is 0 when either side ran out of fuel. */
LC_API lc_status lc_oracle_check(const lc_defs* defs, const char* lhs, const char* rhs, uint64_t fuel, int* decided,
                                 int* convertible);
LC_API lc_status lc_oracle_normalize(const lc_defs* defs, const char* term, uint64_t fuel, char** nf);

/* Benchmark families. */
LC_API size_t lc_bench_suite_count(void);
LC_API const char* lc_bench_suite_name(size_t i);

typedef struct lc_bench_row {
  const char* suite;
  unsigned n;
  const char* config;
  const char* variant;
  lc_verdict verdict;
  lc_verdict expected;
  const lc_result* result;
  double millis;
} lc_bench_row;

typedef void (*lc_bench_fn)(const lc_bench_row* row, void* user);

/* Runs every configuration of `suite` at size n and reports one row each. */
LC_API lc_status lc_bench_run(const char* suite, unsigned n, uint64_t fuel, lc_bench_fn cb, void* user);

#ifdef __cplusplus
}
#endif

#endif
