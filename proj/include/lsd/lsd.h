/* C interface to the decoding toolkit.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns an lsd_status; on failure a message describing
 * the most recent error of the calling thread is available from
 * lsd_last_error(). Index arrays are 32-bit; syndromes and corrections are
 * supports (lists of set positions). Strings returned through char** are
 * owned by the caller and released with lsd_string_free.
 */
#ifndef LSD_LSD_H
#define LSD_LSD_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LSD_API __declspec(dllexport)
#else
#define LSD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lsd_status {
    LSD_OK = 0,
    LSD_ERR_INVALID_ARGUMENT = 1,
    LSD_ERR_PARSE = 2,
    LSD_ERR_IO = 3,
    LSD_ERR_UNSATISFIABLE = 4,
    LSD_ERR_DUPLICATE_COLUMN = 5,
    LSD_ERR_OVERLAPPING_ROWS = 6,
    LSD_ERR_NOT_IN_IMAGE = 7,
    LSD_ERR_DOMAIN = 8,
    LSD_ERR_BUFFER_TOO_SMALL = 9,
    LSD_ERR_INTERNAL = 100
} lsd_status;

LSD_API const char* lsd_last_error(void);
LSD_API const char* lsd_status_string(lsd_status status);
LSD_API void lsd_string_free(char* s);

/* ---- codes --------------------------------------------------------------- */

typedef struct lsd_code lsd_code;

typedef enum lsd_side { LSD_SIDE_X = 0, LSD_SIDE_Z = 1 } lsd_side;

LSD_API lsd_status lsd_code_surface(uint32_t d, lsd_code** out);
LSD_API lsd_status lsd_code_repetition(uint32_t d, lsd_code** out);
/* Hypergraph product of two dense 0/1 text matrices; h2_path may be NULL to
 * take the product of h1 with itself. */
LSD_API lsd_status lsd_code_hgp_files(const char* h1_path, const char* h2_path, lsd_code** out);
/* Bivariate bicycle code. a and b hold (x, y) exponent pairs, flattened. */
LSD_API lsd_status lsd_code_bivariate_bicycle(uint32_t l, uint32_t m, const uint32_t* a, size_t a_terms,
                                              const uint32_t* b, size_t b_terms, lsd_code** out);
/* Bivariate bicycle code from a text config with lines `l <int>`, `m <int>`,
 * `a x,y ...` and `b x,y ...`. */
LSD_API lsd_status lsd_code_bb_file(const char* path, lsd_code** out);
LSD_API size_t lsd_code_n(const lsd_code* code);
LSD_API size_t lsd_code_k(const lsd_code* code);
/* Number of checks on the given side (detectors per round). */
LSD_API size_t lsd_code_checks(const lsd_code* code, lsd_side side);
/* 1 iff hx * hz^T = 0. */
LSD_API int lsd_code_commutes(const lsd_code* code);
LSD_API void lsd_code_free(lsd_code* code);

/* Random column/row-regular matrix without 4-cycles, written as dense text. */
LSD_API lsd_status lsd_random_regular_write(size_t rows, size_t cols, uint32_t col_weight, uint32_t row_weight,
                                            uint64_t seed, int full_rank, const char* path);

/* ---- models -------------------------------------------------------------- */

typedef struct lsd_model lsd_model;

LSD_API lsd_status lsd_model_load(const char* path, lsd_model** out);
LSD_API lsd_status lsd_model_parse(const char* text, lsd_model** out);
LSD_API lsd_status lsd_model_save(const lsd_model* model, const char* path);
LSD_API lsd_status lsd_model_format(const lsd_model* model, char** text);
LSD_API lsd_status lsd_model_code_capacity(const lsd_code* code, lsd_side side, double p, lsd_model** out);
/* rounds >= 1; rounds == 1 is the code-capacity model. */
LSD_API lsd_status lsd_model_phenomenological(const lsd_code* code, lsd_side side, double p, uint32_t rounds,
                                              lsd_model** out);
LSD_API size_t lsd_model_num_detectors(const lsd_model* model);
LSD_API size_t lsd_model_num_faults(const lsd_model* model);
LSD_API size_t lsd_model_num_observables(const lsd_model* model);
LSD_API double lsd_model_mean_prior(const lsd_model* model);
/* Sets *ok to 1 iff H * correction equals the syndrome. */
LSD_API lsd_status lsd_model_check(const lsd_model* model, const uint32_t* correction, size_t correction_len,
                                   const uint32_t* syndrome, size_t syndrome_len, int* ok);
/* Syndrome of the error sampled for (seed, shot). *len receives the weight;
 * fails with LSD_ERR_BUFFER_TOO_SMALL if capacity is insufficient. */
LSD_API lsd_status lsd_model_sample_syndrome(const lsd_model* model, uint64_t seed, uint64_t shot, uint32_t* out,
                                             size_t capacity, size_t* len);
LSD_API void lsd_model_free(lsd_model* model);

/* ---- decoders ------------------------------------------------------------ */

typedef enum lsd_post { LSD_POST_NONE = 0, LSD_POST_LSD = 1, LSD_POST_OSD = 2 } lsd_post;
typedef enum lsd_osd_kind { LSD_OSD_NONE = -1, LSD_OSD_0 = 0, LSD_OSD_E = 1, LSD_OSD_CS = 2 } lsd_osd_kind;
typedef enum lsd_schedule { LSD_SCHEDULE_PARALLEL = 0, LSD_SCHEDULE_SERIAL = 1 } lsd_schedule;

typedef struct lsd_decoder_config {
    int use_bp;
    uint32_t bp_iterations;
    double bp_scaling;
    lsd_schedule bp_schedule;
    double bp_clip;
    lsd_post post;
    uint32_t mu;
    double mu_fraction; /* negative: use mu */
    lsd_osd_kind local_osd;
    uint32_t local_order;
    int lsd_parallel;
    lsd_osd_kind osd; /* method when post == LSD_POST_OSD */
    uint32_t osd_order;
} lsd_decoder_config;

/* BP (30 iterations, scaling 0.625, parallel schedule) followed by LSD-0. */
LSD_API void lsd_decoder_config_default(lsd_decoder_config* config);
/* Short human-readable description of the pipeline. */
LSD_API lsd_status lsd_decoder_config_describe(const lsd_decoder_config* config, char** text);

typedef struct lsd_decoder lsd_decoder;

typedef struct lsd_decode_info {
    int bp_converged;
    int lsd_invoked;
    size_t nu;
    size_t kappa;
    double kappa_alpha;
} lsd_decode_info;

/* The model must outlive the decoder. */
LSD_API lsd_status lsd_decoder_create(const lsd_model* model, const lsd_decoder_config* config, lsd_decoder** out);
/* Overlapping (window, commit) decoder over rounds of detectors_per_round. */
LSD_API lsd_status lsd_windowed_decoder_create(const lsd_model* model, const lsd_decoder_config* config,
                                               uint32_t rounds, size_t detectors_per_round, uint32_t window,
                                               uint32_t commit, lsd_decoder** out);
/* Decodes one syndrome. *correction_len always receives the correction
 * weight; info may be NULL. Returns LSD_ERR_UNSATISFIABLE when no
 * correction exists. */
LSD_API lsd_status lsd_decoder_decode(const lsd_decoder* decoder, const uint32_t* syndrome, size_t syndrome_len,
                                      uint32_t* correction, size_t capacity, size_t* correction_len,
                                      lsd_decode_info* info);
LSD_API void lsd_decoder_free(lsd_decoder* decoder);

/* ---- Monte Carlo --------------------------------------------------------- */

typedef struct lsd_run_options {
    size_t shots;
    uint64_t seed;
    uint32_t threads;
    uint32_t cycles;
    /* Windowed decoding when window > 0. */
    uint32_t window;
    uint32_t commit;
    uint32_t rounds;
    size_t detectors_per_round;
    int progress;
    int keep_records;
} lsd_run_options;

LSD_API void lsd_run_options_default(lsd_run_options* options);

typedef struct lsd_run_report {
    double p;
    size_t shots;
    size_t failures;
    size_t decode_errors;
    size_t unsatisfied;
    double p_l;
    double ci_lo, ci_hi;
    double lr_lo, lr_hi;
    double mean_nu, mean_kappa, mean_kappa_alpha;
    double opt_mean_nu, opt_mean_kappa, opt_mean_kappa_alpha;
} lsd_run_report;

typedef struct lsd_records lsd_records;

/* Runs shots against one model; p labels the report. When
 * options->keep_records is set and records is non-NULL the per-shot records
 * are returned. */
LSD_API lsd_status lsd_run(const lsd_model* model, const lsd_decoder_config* config, const lsd_run_options* options,
                           double p, lsd_run_report* report, lsd_records** records);
LSD_API size_t lsd_records_count(const lsd_records* records);
LSD_API lsd_status lsd_records_format_jsonl(const lsd_records* records, double p, char** text);
LSD_API lsd_status lsd_records_format_stats(const lsd_records* records, const char* const* echo, size_t echo_lines,
                                            double p, char** text);
LSD_API void lsd_records_free(lsd_records* records);

LSD_API lsd_status lsd_format_csv_header(const char* const* echo, size_t echo_lines, char** text);
LSD_API lsd_status lsd_format_csv_row(const lsd_run_report* report, char** text);

/* ---- statistics ---------------------------------------------------------- */

LSD_API lsd_status lsd_bethe_avg_cluster(double p, double theta, double* out);
LSD_API lsd_status lsd_per_cycle_rate(double total_rate, uint32_t cycles, double* out);
LSD_API lsd_status lsd_wilson_interval(size_t failures, size_t shots, double* lo, double* hi);

#ifdef __cplusplus
}
#endif

#endif
