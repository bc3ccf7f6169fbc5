#ifndef QKDNET_QKDNET_H
#define QKDNET_QKDNET_H

/* C interface to the key-relay planning library. Every function returns a
 * status; on failure qkdn_last_error() describes the problem (per thread).
 * Strings returned through char** are owned by the caller and released with
 * qkdn_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QKDN_API __declspec(dllexport)
#else
#define QKDN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qkdn_status {
  QKDN_OK = 0,
  QKDN_INVALID_ARGUMENT = 1, /* null pointer or bad enum value */
  QKDN_INPUT = 2,            /* malformed or inconsistent input */
  QKDN_INFEASIBLE = 3,       /* no solution; see qkdn_last_error_value */
  QKDN_LIMIT = 4,            /* size limit exceeded */
  QKDN_IO = 5,
  QKDN_INTERNAL = 6
} qkdn_status;

typedef struct qkdn_network qkdn_network;
typedef struct qkdn_trust_table qkdn_trust_table;
typedef struct qkdn_plan qkdn_plan;
typedef struct qkdn_run qkdn_run;

QKDN_API const char* qkdn_version(void);
QKDN_API const char* qkdn_last_error(void);
/* Best achievable value attached to the last QKDN_INFEASIBLE error. */
QKDN_API double qkdn_last_error_value(void);
QKDN_API void qkdn_string_free(char* s);

/* ---- topology ---- */

/* block_seconds > 0 overrides the file's planning block length. */
QKDN_API qkdn_status qkdn_network_load_file(const char* path, double block_seconds,
                                            qkdn_network** out);
QKDN_API qkdn_status qkdn_network_load_json(const char* text, double block_seconds,
                                            qkdn_network** out);
QKDN_API void qkdn_network_free(qkdn_network* net);
/* Normalised network document. */
QKDN_API qkdn_status qkdn_network_to_json(const qkdn_network* net, char** out);

QKDN_API qkdn_status qkdn_trust_table_load_file(const char* path, qkdn_trust_table** out);
QKDN_API void qkdn_trust_table_free(qkdn_trust_table* table);
QKDN_API qkdn_status qkdn_trust_table_evaluator(const qkdn_trust_table* table, char** out);

/* ---- flow routing ---- */

/* Optimal flood value; `exhaustive` is 0 when the orientation limit forced
 * the undirected fallback. `optimal_count` counts optimal orientations. */
QKDN_API qkdn_status qkdn_flood_value(const qkdn_network* net, const char* source,
                                      const char* sink, size_t orientation_limit,
                                      int64_t* value, int* exhaustive, size_t* optimal_count);
QKDN_API qkdn_status qkdn_flood_plan(const qkdn_network* net, const char* source,
                                     const char* sink, size_t orientation_limit,
                                     qkdn_plan** out);
QKDN_API qkdn_status qkdn_plan_load_json(const char* text, qkdn_plan** out);
QKDN_API qkdn_status qkdn_plan_to_json(const qkdn_plan* plan, char** out);
QKDN_API void qkdn_plan_free(qkdn_plan* plan);

/* Internally disjoint paths as JSON {"paths": [[interior...]...], "cross_points": []}.
 * required = 0 asks for as many as exist. */
QKDN_API qkdn_status qkdn_mnops_json(const qkdn_network* net, const char* source,
                                     const char* sink, size_t required, char** out);

/* ---- flooding ---- */

QKDN_API qkdn_status qkdn_flood_run(const qkdn_plan* plan, uint64_t seed, qkdn_run** out);
QKDN_API void qkdn_run_free(qkdn_run* run);
QKDN_API qkdn_status qkdn_run_transcript_jsonl(const qkdn_run* run, char** out);
/* Assembled keys, shared fragments, retained surplus and the eavesdropper
 * audit of both assemblies. */
QKDN_API qkdn_status qkdn_run_report_json(const qkdn_run* run, char** out);
/* Decodes `transcript_jsonl` at the sink; *matches is 1 when the result equals
 * the bits the source designated. */
QKDN_API qkdn_status qkdn_run_replay(const qkdn_run* run, const char* transcript_jsonl,
                                     int* matches);

/* mode: "trusted", "dishonest" or "collective"; key: "rate" or "secure". */
QKDN_API qkdn_status qkdn_run_audit(const qkdn_run* run, const char* mode,
                                    const char* const* members, size_t member_count,
                                    size_t bound, const char* key, int* compromised,
                                    char** report_json);

/* ---- trust ---- */

/* assessment: {"paths": [[ids...]...], "trust": {id: T}, "rates": [..] optional}.
 * Output JSON carries the closed form (when paths do not overlap), the
 * enumeration results for both adversary modes and, with paper_literal, the
 * literal compromise expression and its gap to the enumeration. */
QKDN_API qkdn_status qkdn_trust_eval(const char* assessment_json, int paper_literal,
                                     uint64_t monte_carlo_samples, uint64_t seed, char** out);
/* Assessment over the disjoint paths of the network, trust from `table`. */
QKDN_API qkdn_status qkdn_trust_assessment_auto(const qkdn_network* net,
                                                const qkdn_trust_table* table,
                                                const char* source, const char* sink,
                                                char** out);
QKDN_API qkdn_status qkdn_trust_optimize(const char* assessment_json, double t_min,
                                         unsigned min_subset, char** table_csv,
                                         char** best_json);
QKDN_API qkdn_status qkdn_trust_frontier_csv(unsigned n, double t_lo, double t_hi,
                                             double step, char** out);
QKDN_API qkdn_status qkdn_trust_symmetric(unsigned m, unsigned n_prime, double trust,
                                          double* out);
QKDN_API qkdn_status qkdn_trust_xor(const double* path_trust, size_t count, double* out);

/* ---- authentication planning ---- */

typedef enum qkdn_d_convention { QKDN_D_ROUND = 0, QKDN_D_COMM = 1 } qkdn_d_convention;

typedef struct qkdn_wc_params {
  double insecurity;     /* c */
  double comm_ratio;     /* g */
  double reuse_fraction; /* f */
  qkdn_d_convention d_convention;
  uint64_t round_bits;   /* a, filled */
  double comm_bits;      /* d, filled */
  uint64_t tag_bits;     /* b, filled */
  uint64_t key_bits;     /* s, filled */
} qkdn_wc_params;

typedef struct qkdn_siat {
  double rate_xu;
  double rate_xv;
  double rate_uv;
  double tag_transfer_seconds;
  double qkd_round_seconds;
  double trust_window_seconds;
} qkdn_siat;

QKDN_API qkdn_status qkdn_wc_key_length(double insecurity, double comm_bits, uint64_t* out);
QKDN_API qkdn_status qkdn_round_size(double insecurity, double comm_ratio,
                                     double reuse_fraction, uint64_t cap, uint64_t* out);
QKDN_API qkdn_status qkdn_wc_size(qkdn_wc_params* params);
QKDN_API qkdn_status qkdn_siat_plan(const qkdn_network* net, const char* intermediary,
                                    const char* u, const char* v, uint64_t tag_key_bits,
                                    uint64_t round_bits, qkdn_siat* out);
QKDN_API qkdn_status qkdn_siat_table_csv(const qkdn_network* net, const char* new_user,
                                         uint64_t tag_key_bits, uint64_t round_bits,
                                         char** out);
QKDN_API qkdn_status qkdn_key_scaling(uint64_t n, uint64_t c_a, uint64_t* out);
QKDN_API qkdn_status qkdn_flooded_siat(const qkdn_network* net, const qkdn_trust_table* u_table,
                                       const qkdn_trust_table* v_table, const char* u,
                                       const char* v, double t_min, unsigned min_subset,
                                       uint64_t tag_key_bits, uint64_t round_bits,
                                       char** report_json, char** table_csv);

#ifdef __cplusplus
}
#endif

#endif
