/*
 * C API of the duet simulation library.
 *
 * Usage: create a config, adjust it with duet_config_set / load a file,
 * then duet_run() executes the configured experiment and writes its
 * artifacts (summary.json, plotdata.tsv, optional CSVs) into the configured
 * output directory.
 *
 * All functions return a duet_status; on anything other than DUET_OK a
 * human-readable message is available from duet_last_error() (thread-local).
 */
#ifndef DUET_H
#define DUET_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum duet_status {
  DUET_OK = 0,
  DUET_ERROR = 1,           /* runtime failure */
  DUET_BOUND_FAILED = 2,    /* experiment ran, a statistical bound failed */
  DUET_INVALID_ARGUMENT = 3,/* bad key, value or constraint violation */
  DUET_IO_ERROR = 4         /* filesystem failure, path in the message */
} duet_status;

typedef struct duet_config duet_config;

/* Config with documented defaults; NULL only on allocation failure. */
duet_config *duet_config_create(void);
void duet_config_destroy(duet_config *cfg);

/* Merge a flat key-value config file (TOML-compatible subset) into cfg. */
duet_status duet_config_load_file(duet_config *cfg, const char *path);

/* Set / get one field by key (e.g. "experiment", "T", "n_paths", "seed"). */
duet_status duet_config_set(duet_config *cfg, const char *key, const char *value);
duet_status duet_config_get(const duet_config *cfg, const char *key, char *buf,
                            size_t buflen);

/* Validate all constraints; the error message names the violated inequality. */
duet_status duet_config_validate(const duet_config *cfg);

/* Hex content digest of the semantic config fields. */
duet_status duet_config_digest(const duet_config *cfg, char *buf, size_t buflen);

/* Run the configured experiment and write artifacts into output_dir.
 * DUET_OK: ran, all bounds passed. DUET_BOUND_FAILED: ran and wrote
 * artifacts, but at least one statistical bound failed. */
duet_status duet_run(const duet_config *cfg);

/* Thread-local message for the most recent failure. */
const char *duet_last_error(void);

/* Experiment table (index 0 .. count-1). */
int duet_experiment_count(void);
const char *duet_experiment_name(int index);
const char *duet_experiment_anchor(int index);
const char *duet_experiment_summary(int index);

const char *duet_version(void);

#ifdef __cplusplus
}
#endif

#endif /* DUET_H */
