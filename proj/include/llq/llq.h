#ifndef LLQ_LLQ_H
#define LLQ_LLQ_H

/* C interface to the llq engine. Handles are opaque; every call returns a
 * status, and on failure llq_last_error() describes it (per thread).
 * Results own their strings until llq_result_free. */

#include <stddef.h>

#if defined(_WIN32)
#define LLQ_API __declspec(dllexport)
#else
#define LLQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum llq_status {
  LLQ_OK = 0,
  LLQ_ERR_PARSE = 1,
  LLQ_ERR_LEVEL = 2,
  LLQ_ERR_IO = 3,
  LLQ_ERR_INVALID = 4,
  LLQ_ERR_INTERNAL = 5
} llq_status;

typedef struct llq_theory llq_theory;
typedef struct llq_model llq_model;
typedef struct llq_result llq_result;

typedef struct llq_options {
  const char* logic;         /* "L", "L1" or "L1star"; NULL means L1star */
  unsigned long long seed;   /* sampling cross-checks */
  unsigned samples;          /* entails: sampled models checked against an Entailed verdict */
  unsigned jobs;             /* parallel leaves, >= 1 */
  unsigned cont_budget;      /* qalg: prefix length of continuity streams */
  int structural;            /* normalize: stop at normal theories, no finiteness splits */
  int proofs;                /* entails: elaborate proofs for affine goals */
} llq_options;

LLQ_API void llq_options_init(llq_options* o);
LLQ_API const char* llq_version(void);

LLQ_API const char* llq_last_error(void);
/* 1-based position of the last parse error, 0 when unknown. */
LLQ_API size_t llq_last_error_line(void);
LLQ_API size_t llq_last_error_column(void);

/* One judgement per line, '#' comments. */
LLQ_API llq_status llq_theory_parse(const char* text, const llq_options* o, llq_theory** out);
LLQ_API size_t llq_theory_size(const llq_theory* t);
LLQ_API void llq_theory_free(llq_theory* t);

/* `prop = value` lines; unlisted propositions take default_value ("0" if NULL). */
LLQ_API llq_status llq_model_parse(const char* text, const char* default_value, llq_model** out);
LLQ_API void llq_model_free(llq_model* m);

LLQ_API llq_status llq_eval(const llq_model* m, const char* formula, const llq_options* o, llq_result** out);
LLQ_API llq_status llq_normalize(const llq_theory* t, const llq_options* o, llq_result** out);
LLQ_API llq_status llq_sat(const llq_theory* t, const llq_options* o, llq_result** out);
LLQ_API llq_status llq_entails(const llq_theory* t, const char* goal, const llq_options* o, llq_result** out);
/* assumptions may be NULL (no assumptions). */
LLQ_API llq_status llq_check_proof(const char* proof, const llq_theory* assumptions, const llq_options* o,
                                   llq_result** out);
LLQ_API llq_status llq_qalg_check(const char* terms, const char* distances, const llq_options* o, llq_result** out);

/* 1 for Satisfiable / Entailed / Accepted / Pass / a value, 0 for the negative verdicts. */
LLQ_API int llq_result_positive(const llq_result* r);
LLQ_API const char* llq_result_verdict(const llq_result* r);
LLQ_API const char* llq_result_json(const llq_result* r);
LLQ_API const char* llq_result_text(const llq_result* r);
LLQ_API void llq_result_free(llq_result* r);

#ifdef __cplusplus
}
#endif

#endif
