#ifndef KOSIM_KOSIM_H
#define KOSIM_KOSIM_H

/* Knockout-competition simulation engine.
 *
 * Every function that can fail returns a ko_status; KO_OK means success and
 * any out-parameter has been written. On failure ko_last_error() describes
 * what went wrong for the calling thread. Strings returned through char**
 * out-parameters are owned by the caller and released with ko_string_free().
 * Handles are released with their matching *_free(); freeing NULL is a no-op.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define KOSIM_ABI_VERSION 1

typedef enum ko_status {
    KO_OK = 0,
    KO_ERR_ARG = 1,    /* null handle or out-parameter */
    KO_ERR_INPUT = 2,  /* malformed or inconsistent input data */
    KO_ERR_TRAIN = 3,  /* training failure: empty data, divergence */
    KO_ERR_SIM = 4,    /* invalid bracket or unsimulatable matchup */
    KO_ERR_IO = 5,     /* file could not be read or written */
    KO_ERR_FORMAT = 6  /* corrupt or version-incompatible artifact */
} ko_status;

typedef struct ko_corpus ko_corpus;
typedef struct ko_model ko_model;
typedef struct ko_bracket ko_bracket;
typedef struct ko_simulation ko_simulation;

int ko_abi_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* ko_last_error(void);

void ko_string_free(char* s);

/* --- Corpus: validated historical match data --- */

ko_status ko_corpus_from_csv_files(const char* team_csv_path, const char* player_csv_path,
                                   ko_corpus** out);
ko_status ko_corpus_from_csv_text(const char* team_csv, const char* player_csv,
                                  ko_corpus** out);
ko_status ko_corpus_synthetic(uint64_t seed, int n_teams, int n_matches,
                              int players_per_team, ko_corpus** out);
ko_status ko_corpus_save(const ko_corpus* corpus, const char* path);
ko_status ko_corpus_load(const char* path, ko_corpus** out);
ko_status ko_corpus_stats_json(const ko_corpus* corpus, char** out);
ko_status ko_corpus_team_csv(const ko_corpus* corpus, char** out);
ko_status ko_corpus_player_csv(const ko_corpus* corpus, char** out);
/* feature,pearson_r rows ranked by correlation with goals. */
ko_status ko_corpus_correlations_csv(const ko_corpus* corpus, char** out);
/* Tidy team,metric,value rows for passes, possession, and corners. */
ko_status ko_corpus_distributions_csv(const ko_corpus* corpus, char** out);
void ko_corpus_free(ko_corpus* corpus);

/* --- Training --- */

typedef struct ko_train_config {
    double learning_rate;
    int batch_size;
    int epochs;
    double noise_sigma;
    double beta1;
    double beta2;
    double epsilon;
    uint64_t seed;
    double val_fraction;
} ko_train_config;

/* Fills in the defaults: lr 0.01, batch 10, 150 epochs, sigma 0.1,
 * betas 0.9/0.999, epsilon 1e-8, seed 0, val_fraction 0.15. */
void ko_train_config_init(ko_train_config* config);

typedef enum ko_model_kind {
    KO_MODEL_TEAM = 0,
    KO_MODEL_PLAYER = 1
} ko_model_kind;

ko_status ko_train(const ko_corpus* corpus, const ko_train_config* config,
                   ko_model_kind kind, ko_model** out);
ko_status ko_model_save(const ko_model* model, const char* path);
ko_status ko_model_load(const char* path, ko_model** out);
/* kind, layer sizes, config, and final train/val RMSE. */
ko_status ko_model_summary_json(const ko_model* model, char** out);
void ko_model_free(ko_model* model);

/* --- Bracket and simulation --- */

ko_status ko_bracket_load_file(const char* path, ko_bracket** out);
ko_status ko_bracket_load_text(const char* json_text, ko_bracket** out);
void ko_bracket_free(ko_bracket* bracket);

/* Simulates every unplayed leg. runs > 1 adds champion frequencies; each run
 * draws from an independent stream derived from (seed, run index). */
ko_status ko_simulate(const ko_bracket* bracket, const ko_model* team_model,
                      const ko_model* player_model, const ko_corpus* corpus,
                      int runs, uint64_t seed, ko_simulation** out);
ko_status ko_simulation_report_json(const ko_simulation* sim, char** out);
ko_status ko_simulation_legs_csv(const ko_simulation* sim, char** out);
ko_status ko_simulation_distributions_csv(const ko_simulation* sim, char** out);
ko_status ko_simulation_summary_text(const ko_simulation* sim, char** out);
void ko_simulation_free(ko_simulation* sim);

#ifdef __cplusplus
}
#endif

#endif /* KOSIM_KOSIM_H */
