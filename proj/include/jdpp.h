/*
 * jdpp - C API for the finite determinantal point process / CAR
 * verification toolkit.
 *
 * All objects are opaque handles created and destroyed through this
 * interface; every fallible call returns a jdpp_status and leaves a
 * thread-local message readable via jdpp_last_error(). Strings returned
 * through char** are heap-allocated and must be released with
 * jdpp_string_free().
 *
 * Site subsets are bitmasks with site i (1-based) on bit i-1.
 */
#ifndef JDPP_H
#define JDPP_H

#include <stdint.h>

#if defined(_WIN32)
#define JDPP_API __declspec(dllexport)
#else
#define JDPP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum jdpp_status {
  JDPP_OK = 0,
  JDPP_ERR_INVALID_ARGUMENT = 1,
  JDPP_ERR_DIMENSION = 2,
  JDPP_ERR_VALIDATION = 3,
  JDPP_ERR_INFEASIBLE = 4,
  JDPP_ERR_PARSE = 5,
  JDPP_ERR_IO = 6,
  JDPP_ERR_INTERNAL = 7
} jdpp_status;

typedef struct jdpp_space jdpp_space;
typedef struct jdpp_kernel jdpp_kernel;
typedef struct jdpp_bundle jdpp_bundle;
typedef struct jdpp_table jdpp_table;

JDPP_API const char* jdpp_version(void);
JDPP_API const char* jdpp_last_error(void);
JDPP_API void jdpp_string_free(char* s);

/* ---- ground set ------------------------------------------------------- */
JDPP_API jdpp_status jdpp_space_create(int d, const double* sigma, const int* part,
                                       jdpp_space** out);
JDPP_API void jdpp_space_free(jdpp_space* s);
JDPP_API int jdpp_space_dim(const jdpp_space* s);

/* ---- kernels ----------------------------------------------------------- */
JDPP_API jdpp_status jdpp_kernel_from_json(const char* doc, jdpp_kernel** out);
JDPP_API jdpp_status jdpp_kernel_to_json(const jdpp_kernel* k, char** out);
JDPP_API jdpp_status jdpp_kernel_generate(const jdpp_space* s, const char* name,
                                          const char* spec_json, jdpp_kernel** out);
JDPP_API void jdpp_kernel_free(jdpp_kernel* k);
JDPP_API int jdpp_kernel_dim(const jdpp_kernel* k);
JDPP_API jdpp_status jdpp_kernel_validate(const jdpp_kernel* k, double tol, char** report_json,
                                          int* pass);

/* ---- J-kernel bundles --------------------------------------------------- */
JDPP_API jdpp_status jdpp_bundle_assemble(const jdpp_kernel* k, double tol, jdpp_bundle** out);
JDPP_API void jdpp_bundle_free(jdpp_bundle* b);
JDPP_API jdpp_status jdpp_bundle_certificate(const jdpp_bundle* b, char** report_json);
JDPP_API jdpp_status jdpp_bundle_khat(const jdpp_bundle* b, jdpp_kernel** out);

/* Wick moment of one Delta-tuple by every feasible route. */
JDPP_API jdpp_status jdpp_moment_report(const jdpp_bundle* b, const uint64_t* deltas, int n,
                                        int want_pairing, char** report_json);

/* ---- exact distributions ------------------------------------------------ */
JDPP_API jdpp_status jdpp_table_build(const jdpp_kernel* k, jdpp_table** out);
JDPP_API jdpp_status jdpp_table_build_j(const jdpp_bundle* b, jdpp_table** out);
JDPP_API jdpp_status jdpp_table_pushforward(const jdpp_table* t, jdpp_table** out);
JDPP_API void jdpp_table_free(jdpp_table* t);
JDPP_API int64_t jdpp_table_size(const jdpp_table* t);
JDPP_API double jdpp_table_prob(const jdpp_table* t, uint64_t mask);
JDPP_API jdpp_status jdpp_table_to_json(const jdpp_table* t, char** out);

/* Exact sampling; out_masks must hold count entries. Deterministic per
 * (seed, index). */
JDPP_API jdpp_status jdpp_sample(const jdpp_kernel* k, uint64_t seed, int count,
                                 uint64_t* out_masks);

/* ---- config-driven commands (the CLI surface) --------------------------- */
JDPP_API jdpp_status jdpp_cmd_validate(const char* config_json, const char* base_dir,
                                       char** report_json, int* pass);
JDPP_API jdpp_status jdpp_cmd_verify(const char* config_json, const char* base_dir,
                                     const char* suites_csv, char** report_json, int* pass);
/* tuples: strings like "{1}|{2,3}"; format "json" or "csv". */
JDPP_API jdpp_status jdpp_cmd_moments(const char* config_json, const char* base_dir,
                                      const char* const* tuples, int n_tuples, const char* format,
                                      char** out_text);
JDPP_API jdpp_status jdpp_cmd_sample(const char* config_json, const char* base_dir,
                                     int override_seed, uint64_t seed, int override_count,
                                     int count, char** jsonl, char** summary_json);
/* Density operator of one subset as a sparse-triplet CSV
 * (row-bitstring, col-bitstring, re, im). */
JDPP_API jdpp_status jdpp_dump_operator(const char* config_json, const char* base_dir,
                                        const char* subset, char** csv);
JDPP_API jdpp_status jdpp_suite_names(char** csv);

#ifdef __cplusplus
}
#endif

#endif /* JDPP_H */
