#ifndef PUP_H
#define PUP_H

/* C interface to the price-aware recommendation library.
 *
 * All functions returning pup_status report failure through the return
 * value; pup_last_error() then holds a message for the calling thread.
 * Handles created by *_new / *_load calls are released with the matching
 * *_free; freeing NULL is a no-op. Strings returned by the library stay
 * valid until the next library call on the same thread (error messages)
 * or for the life of the process (version, variant tags).
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pup_status {
  PUP_OK = 0,
  PUP_ERROR_INVALID_ARGUMENT = 1,
  PUP_ERROR_IO = 2,
  PUP_ERROR_PARSE = 3,
  PUP_ERROR_DIVERGED = 4,
  PUP_ERROR_MISMATCH = 5,
  PUP_ERROR_INTERNAL = 6
} pup_status;

const char* pup_version(void);

/* Message for the most recent failing call on this thread ("" if none). */
const char* pup_last_error(void);

/* Warnings (skipped users, empty splits) go to stderr by default; install
 * a callback to capture them instead. Pass NULL to restore the default. */
typedef void (*pup_log_callback)(const char* message, void* user_data);
void pup_set_log_callback(pup_log_callback callback, void* user_data);

/* A run configuration: optional config file plus key=value overrides.
 * Keys match the config-file keys; overrides win over file values.
 * Validation happens when a command runs, not when values are set. */
typedef struct pup_config pup_config;

pup_status pup_config_new(pup_config** out_config);
void pup_config_free(pup_config* config);
pup_status pup_config_load_file(pup_config* config, const char* path);
pup_status pup_config_set(pup_config* config, const char* key,
                          const char* value);

/* The five pipeline commands. Each resolves and validates the
 * configuration, runs, and writes its outputs plus a manifest into the
 * configured output directory. */
pup_status pup_run_prepare(const pup_config* config);
pup_status pup_run_analyze_cwtp(const pup_config* config);
pup_status pup_run_train(const pup_config* config);
pup_status pup_run_evaluate(const pup_config* config);
pup_status pup_run_coldstart_eval(const pup_config* config);

/* Direct access to a prepared dataset bundle and a trained model, for
 * embedding the scorer in another program. */
typedef struct pup_dataset pup_dataset;

pup_status pup_dataset_load(const char* path, pup_dataset** out_dataset);
void pup_dataset_free(pup_dataset* dataset);
int pup_dataset_user_count(const pup_dataset* dataset);
int pup_dataset_item_count(const pup_dataset* dataset);
int pup_dataset_category_count(const pup_dataset* dataset);

typedef struct pup_model pup_model;

/* The dataset must be the one the checkpoint was trained on (shape is
 * verified). The model keeps its own copy, so the dataset handle may be
 * freed once loading returns. */
pup_status pup_model_load(const char* checkpoint_path,
                          const pup_dataset* dataset, pup_model** out_model);
void pup_model_free(pup_model* model);
const char* pup_model_variant(const pup_model* model);
pup_status pup_model_score(const pup_model* model, int user, int item,
                           double* out_score);

#ifdef __cplusplus
}
#endif

#endif /* PUP_H */
