/* TIDE C API: concept-grounded single-source domain generalization.
 *
 * All functionality is reached through an opaque session handle carrying a
 * validated run configuration. Calls return tide_rc; on failure the
 * session stores a message retrievable with tide_session_last_error().
 * Returned strings are heap-allocated; release them with tide_string_free().
 *
 * Thread safety: a session may be used from one thread at a time. Distinct
 * sessions are independent.
 */

#ifndef TIDE_TIDE_H_
#define TIDE_TIDE_H_

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TIDE_API __declspec(dllexport)
#else
#define TIDE_API __attribute__((visibility("default")))
#endif

typedef enum tide_rc {
  TIDE_OK = 0,
  TIDE_ERR_INVALID_ARG = 1,
  TIDE_ERR_CONFIG = 2,
  TIDE_ERR_IO = 3,
  TIDE_ERR_CORRUPT_DATASET = 4,
  TIDE_ERR_GENERATION = 5,
  TIDE_ERR_PROVIDER = 6,
  TIDE_ERR_RUNTIME = 7,
  TIDE_ERR_UNKNOWN = 8
} tide_rc;

typedef struct tide_session tide_session;

TIDE_API const char* tide_version(void);

/* Opens a session from a JSON config file; pass NULL for built-in
 * defaults. The config is validated eagerly. */
TIDE_API tide_rc tide_session_open(const char* config_path_or_null,
                                   tide_session** out_session);

TIDE_API void tide_session_close(tide_session* session);

/* Message for the most recent failing call on this session; owned by the
 * session and valid until the next call on it. */
TIDE_API const char* tide_session_last_error(const tide_session* session);

/* Overrides: "seed" (decimal), "out_dir", "dataset_dir", "ablate"
 * (comma-separated of k,csa,lcc), "split" (train|test), "tau", "delta". */
TIDE_API tide_rc tide_session_set(tide_session* session, const char* key,
                                  const char* value);

/* Pipeline stages. Each returns TIDE_OK and (when out_summary_json is
 * non-NULL) a JSON summary of what was produced. */
TIDE_API tide_rc tide_run_generate(tide_session* session,
                                   char** out_summary_json);
TIDE_API tide_rc tide_run_annotate(tide_session* session,
                                   char** out_summary_json);
TIDE_API tide_rc tide_run_discover(tide_session* session,
                                   char** out_summary_json);
TIDE_API tide_rc tide_run_train(tide_session* session,
                                char** out_summary_json);
TIDE_API tide_rc tide_run_evaluate(tide_session* session, int with_correction,
                                   char** out_report_json);
TIDE_API tide_rc tide_run_correct(tide_session* session,
                                  char** out_summary_json);
/* sample_ids: comma-separated dataset sample ids. */
TIDE_API tide_rc tide_run_overlay(tide_session* session,
                                  const char* sample_ids,
                                  char** out_summary_json);
TIDE_API tide_rc tide_run_export_features(tide_session* session,
                                          const char* split,
                                          char** out_summary_json);
/* traces_path may be NULL to use the current run's traces. */
TIDE_API tide_rc tide_run_report(tide_session* session,
                                 const char* traces_path,
                                 char** out_report_json);

TIDE_API void tide_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TIDE_TIDE_H_ */
