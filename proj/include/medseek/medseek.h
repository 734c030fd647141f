#ifndef MEDSEEK_MEDSEEK_H
#define MEDSEEK_MEDSEEK_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MEDSEEK_API __declspec(dllexport)
#else
#define MEDSEEK_API __attribute__((visibility("default")))
#endif

typedef enum medseek_status {
  MEDSEEK_OK = 0,
  MEDSEEK_E_INVALID_ARGUMENT,
  MEDSEEK_E_MALFORMED_TOPIC_FILE,
  MEDSEEK_E_MISSING_FIELD,
  MEDSEEK_E_DUPLICATE_TOPIC_ID,
  MEDSEEK_E_UNKNOWN_STANCE,
  MEDSEEK_E_INVALID_TOPIC,
  MEDSEEK_E_PROVIDER_UNAVAILABLE,
  MEDSEEK_E_RATE_LIMITED,
  MEDSEEK_E_EMPTY_SERP,
  MEDSEEK_E_STORE_CORRUPT,
  MEDSEEK_E_INVALID_URL,
  MEDSEEK_E_EMPTY_PAGE,
  MEDSEEK_E_SCORER_UNAVAILABLE,
  MEDSEEK_E_EMPTY_INPUT,
  MEDSEEK_E_PROVIDER_ERROR,
  MEDSEEK_E_BUDGET_EXCEEDED,
  MEDSEEK_E_OFFLINE_CACHE_MISS,
  MEDSEEK_E_EMPTY_DEMOS,
  MEDSEEK_E_DEMO_TOPIC_OVERLAP,
  MEDSEEK_E_MISSING_SERP,
  MEDSEEK_E_LENGTH_MISMATCH,
  MEDSEEK_E_NO_ANSWERED_RECORDS,
  MEDSEEK_E_TOO_FEW_PAIRS,
  MEDSEEK_E_TOPIC_SET_MISMATCH,
  MEDSEEK_E_UNKNOWN_FORMAT,
  MEDSEEK_E_PARSE_ERROR,
  MEDSEEK_E_IO_ERROR,
  MEDSEEK_E_INTERNAL
} medseek_status;

/* Message of the last failure on the calling thread; never NULL. */
MEDSEEK_API const char* medseek_last_error(void);
MEDSEEK_API const char* medseek_status_name(medseek_status status);

/* Every char** output is heap-allocated and released with this. */
MEDSEEK_API void medseek_string_free(char* s);

typedef struct medseek_session medseek_session;

typedef struct medseek_session_options {
  const char* config; /* JSON config file, may be NULL */
  const char* store;  /* store directory, NULL for the configured one */
  int offline;        /* non-zero: cache misses on live providers are errors */
  long long budget;   /* live LLM call cap, negative for none */
} medseek_session_options;

MEDSEEK_API medseek_status medseek_session_open(const medseek_session_options* options, medseek_session** out);
MEDSEEK_API void medseek_session_close(medseek_session* session);
/* Adapter calls (SERP, page, LLM, remote scorer) made through this session. */
MEDSEEK_API size_t medseek_session_provider_calls(const medseek_session* session);

/* Verbs. `engines` is a comma-separated list or NULL for every configured
   engine; `topics` is a topic file or NULL for the configured one; `year` 0
   means the configured year. Outputs are text bodies as described. */

/* JSON summary {"count", "year", "ids"}. */
MEDSEEK_API medseek_status medseek_topics_validate(medseek_session* s, const char* topics, int year, char** out);
/* One SERP per line (JSON). */
MEDSEEK_API medseek_status medseek_serp_fetch(medseek_session* s, const char* engines, const char* topics, char** out);
/* CSV url,status,words. */
MEDSEEK_API medseek_status medseek_pages_fetch(medseek_session* s, const char* engines, const char* topics, char** out);
/* One evidence entry per line (JSON). */
MEDSEEK_API medseek_status medseek_passages_rank(medseek_session* s, const char* engine, int topic_id,
                                                 const char* topics, char** out);
/* One answer record per line (JSON); records are persisted. */
MEDSEEK_API medseek_status medseek_se_answers(medseek_session* s, const char* engines, const char* topics, char** out);
/* CSV rendered from stored records. mode: "per_entry" or "per_topic". */
MEDSEEK_API medseek_status medseek_se_curve(medseek_session* s, const char* mode, char** out);
MEDSEEK_API medseek_status medseek_se_score(medseek_session* s, char** out);
MEDSEEK_API medseek_status medseek_se_usersim(medseek_session* s, char** out);
/* One answer row per line (JSON); error-free rows are persisted. */
MEDSEEK_API medseek_status medseek_llm_run(medseek_session* s, const char* plan, const char* topics, char** out);
MEDSEEK_API medseek_status medseek_rag_run(medseek_session* s, const char* plan, const char* topics, char** out);
/* CSV over stored zero-shot rows. Systems are "model/kind"; both NULL gives all pairs. */
MEDSEEK_API medseek_status medseek_stats_mcnemar(medseek_session* s, const char* system_a, const char* system_b,
                                                 char** out);
/* format: "markdown" or "csv". semantic_endpoint may be NULL. */
MEDSEEK_API medseek_status medseek_memcheck_run(medseek_session* s, const char* model, const char* topics, int year,
                                                const char* semantic_endpoint, const char* format, char** out);
/* Annotation template, JSON lines. kind: no_context, non_expert or expert. */
MEDSEEK_API medseek_status medseek_errors_export(medseek_session* s, const char* kind, const char* topics, char** out);
/* CSV kind,category,percent from a filled annotation file. */
MEDSEEK_API medseek_status medseek_errors_tally(const char* annotations, char** out);
/* Newline-separated list of written files. format: csv, svg or markdown. */
MEDSEEK_API medseek_status medseek_report_emit(medseek_session* s, const char* format, const char* out_dir,
                                               char** out);

/* Pure helpers. */
MEDSEEK_API double medseek_levenshtein_similarity(const char* a, const char* b);
MEDSEEK_API double medseek_rouge_l(const char* candidate, const char* reference);
MEDSEEK_API medseek_status medseek_mcnemar_p(int b, int c, double* p);
/* One-sided signed-rank test; w is the positive rank sum. */
MEDSEEK_API medseek_status medseek_wilcoxon(const double* diffs, size_t n, double* w, double* p);

/* Judgements: 0 correct, 1 incorrect, 2 unanswered.
   Decisions: 0 correct, 1 incorrect, 2 no answer. */
MEDSEEK_API medseek_status medseek_lazy_user(const int* judgements, size_t n, int* decision, int* effort);
MEDSEEK_API medseek_status medseek_diligent_user(const int* judgements, size_t n, int* decision, int* effort);

MEDSEEK_API medseek_status medseek_build_qa_prompt(const char* question, const char* kind, char** out);
/* Uses the first k built-in demonstration pairs. */
MEDSEEK_API medseek_status medseek_build_fewshot_prompt(const char* question, const char* kind, int k, char** out);
MEDSEEK_API medseek_status medseek_build_rc_prompt(const char* passage, const char* question, char** out);
MEDSEEK_API medseek_status medseek_build_rag_prompt(const char* question, const char* evidence, const char* kind,
                                                    char** out);
/* stance: "yes" or "no". */
MEDSEEK_API medseek_status medseek_build_general_prompt(const char* query, const char* question, const char* stance,
                                                        char** out);
MEDSEEK_API medseek_status medseek_build_guided_prompt(const char* query, const char* question, const char* stance,
                                                       int year, char** out);

#ifdef __cplusplus
}
#endif

#endif
