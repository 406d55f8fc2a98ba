/*
 * demandfc C API.
 *
 * Opaque handles own their data and are released with the matching
 * dfc_*_free function (NULL is accepted). Every call returns a dfc_status;
 * on failure dfc_last_error() holds a message for the calling thread.
 * Functions that fill caller buffers take a capacity and report the number
 * of elements needed; DFC_ERR_BUFFER is returned when the buffer is short.
 */
#ifndef DEMANDFC_H
#define DEMANDFC_H

#include <stddef.h>
#include <stdint.h>

#if defined(DFC_BUILDING_LIBRARY)
#define DFC_API __attribute__((visibility("default")))
#else
#define DFC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dfc_status {
    DFC_OK = 0,
    DFC_ERR_INVALID_ARGUMENT = 1,
    DFC_ERR_INVALID_ORDER = 2,
    DFC_ERR_DEGENERATE_SERIES = 3,
    DFC_ERR_POSITIVITY = 4,
    DFC_ERR_INVERSION = 5,
    DFC_ERR_INSUFFICIENT_DATA = 6,
    DFC_ERR_CONVERGENCE = 7,
    DFC_ERR_SHAPE = 8,
    DFC_ERR_RANK = 9,
    DFC_ERR_EVALUATION = 10,
    DFC_ERR_PARSE = 11,
    DFC_ERR_IO = 12,
    DFC_ERR_NULL_POINTER = 100,
    DFC_ERR_BUFFER = 101,
    DFC_ERR_INTERNAL = 102
} dfc_status;

typedef struct dfc_series dfc_series;
typedef struct dfc_model dfc_model;
typedef struct dfc_config dfc_config;
typedef struct dfc_document dfc_document;

typedef enum dfc_terms { DFC_TERMS_CONSTANT = 0, DFC_TERMS_CONSTANT_AND_TREND = 1 } dfc_terms;
typedef enum dfc_metric { DFC_METRIC_MSE = 0, DFC_METRIC_RELATIVE = 1 } dfc_metric;
typedef enum dfc_verdict { DFC_MODEL_BETTER = 0, DFC_MODEL_WORSE = 1, DFC_ON_PAR = 2 } dfc_verdict;

typedef struct dfc_order {
    int p, d, q;
} dfc_order;

typedef struct dfc_summary {
    double min, q1, median, q3, max; /* divided by the mean */
    double mean;
    double coef_of_variation;
    double skewness;
    double kurtosis; /* raw, normal = 3 */
    int has_moments; /* 0 for a constant series: skewness and kurtosis undefined */
} dfc_summary;

typedef struct dfc_adf_result {
    double t_statistic;
    int lags_used;
    dfc_terms terms;
    double critical_1pct, critical_5pct, critical_10pct;
    int reject_unit_root;
} dfc_adf_result;

typedef struct dfc_portmanteau_result {
    double q_statistic;
    int df;
    double p_value;
} dfc_portmanteau_result;

typedef struct dfc_arch_result {
    size_t n;
    int s;
    double r_squared;
    double lm_statistic;
    double p_value;
    int heteroskedastic_at_5pct;
} dfc_arch_result;

typedef struct dfc_bootstrap_result {
    double lower, upper;
    int n_s;
    double alpha;
    dfc_verdict verdict;
} dfc_bootstrap_result;

typedef struct dfc_model_info {
    dfc_order order;
    double mean;
    double sigma2;
    double log_likelihood;
    size_t n_used;
} dfc_model_info;

DFC_API const char* dfc_last_error(void);
DFC_API const char* dfc_version(void);

/* ---- series ---- */
DFC_API dfc_status dfc_series_create(const double* values, size_t n, int64_t start_time, int64_t interval,
                                     dfc_series** out);
DFC_API void dfc_series_free(dfc_series* s);
DFC_API size_t dfc_series_length(const dfc_series* s);
DFC_API int64_t dfc_series_start_time(const dfc_series* s);
DFC_API int64_t dfc_series_interval(const dfc_series* s);
DFC_API dfc_status dfc_series_values(const dfc_series* s, double* out, size_t capacity, size_t* needed);
DFC_API dfc_status dfc_series_difference(const dfc_series* s, int d, dfc_series** out);
DFC_API dfc_status dfc_series_slice(const dfc_series* s, size_t first, size_t count, dfc_series** out);
DFC_API dfc_status dfc_series_write_csv(const dfc_series* s, const char* path);

/* bucket_seconds: aggregation width (3600 = hourly); aggregate = 0 keeps raw values. */
DFC_API dfc_status dfc_ingest_csv(const char* path, int64_t bucket_seconds, int aggregate, int skip_empty,
                                  dfc_series** out, size_t* empty_buckets_skipped);

/* ---- statistics ---- */
/* coefficients: max_lag + 1 values (lag 0 first). */
DFC_API dfc_status dfc_acf(const dfc_series* s, int max_lag, double* coefficients, double* confidence_band);
/* coefficients: max_lag values (lags 1..max_lag). */
DFC_API dfc_status dfc_pacf(const dfc_series* s, int max_lag, double* coefficients, double* confidence_band);
DFC_API dfc_status dfc_summarize(const dfc_series* s, dfc_summary* out);

/* ---- Box-Cox ---- */
DFC_API dfc_status dfc_boxcox_transform(const dfc_series* s, double lambda, dfc_series** out);
DFC_API dfc_status dfc_boxcox_inverse(double y, double lambda, double* out);
/* curve_lambda / curve_loglik may be NULL; otherwise they need *curve_points entries. */
DFC_API dfc_status dfc_boxcox_select(const dfc_series* s, double grid_from, double grid_to, double grid_step,
                                     double* best_lambda, double* curve_lambda, double* curve_loglik,
                                     size_t capacity, size_t* curve_points);

/* ---- ARIMA ---- */
DFC_API dfc_status dfc_model_fit(const dfc_series* s, dfc_order order, dfc_model** out);
/* MA coefficients use the (1 - theta B) sign convention. */
DFC_API dfc_status dfc_model_create(dfc_order order, const double* ar, const double* ma, double sigma2,
                                    dfc_model** out);
DFC_API void dfc_model_free(dfc_model* m);
DFC_API dfc_status dfc_model_info_get(const dfc_model* m, dfc_model_info* out);
DFC_API dfc_status dfc_model_coefficients(const dfc_model* m, double* ar, double* ma);
/* boxcox_lambda is used only when use_boxcox != 0; out needs `horizon` entries. */
DFC_API dfc_status dfc_model_forecast(const dfc_model* m, const dfc_series* s, int horizon, int use_boxcox,
                                      double boxcox_lambda, double* out);
DFC_API dfc_status dfc_model_residuals(const dfc_model* m, const dfc_series* s, dfc_series** out);
DFC_API dfc_status dfc_model_to_json(const dfc_model* m, dfc_document** out);
DFC_API dfc_status dfc_simulate(dfc_order order, const double* ar, const double* ma, double sigma, size_t n,
                                uint64_t seed, dfc_series** out);

/* ---- diagnostics ---- */
DFC_API dfc_status dfc_adf_test(const dfc_series* s, int lags, dfc_terms terms, dfc_adf_result* out);
DFC_API dfc_status dfc_adf_critical_value(dfc_terms terms, double level, double n, double* out);
DFC_API dfc_status dfc_ljung_box(const dfc_series* residuals, int max_lag, int fitted_params,
                                 dfc_portmanteau_result* out);
DFC_API dfc_status dfc_chi2_pvalue(double statistic, int df, double* out);
DFC_API dfc_status dfc_arch_test(const dfc_series* residuals, int s, dfc_arch_result* out);

/* ---- backtest ---- */
/* errors/window_lengths need (to - from) / step + 1 entries; *count receives the number filled. */
DFC_API dfc_status dfc_evaluate_scheme(const dfc_series* s, dfc_order order, int from, int to, int step,
                                       int horizon, dfc_metric metric, int use_boxcox, double boxcox_lambda,
                                       double* errors, int* window_lengths, size_t capacity, size_t* count,
                                       int* skipped_fits);
/* Log ratios ln(model / benchmark); zero-error pairs are dropped. */
DFC_API dfc_status dfc_nde(const double* model_errors, const double* benchmark_errors, size_t n,
                           double* epsilon_hat, size_t* count, size_t* excluded);
DFC_API dfc_status dfc_bootstrap_test(const double* epsilon_hat, size_t n, int n_s, double alpha, uint64_t seed,
                                      dfc_bootstrap_result* out);

/* ---- configuration and pipeline ---- */
DFC_API dfc_status dfc_config_create(dfc_config** out);
DFC_API void dfc_config_free(dfc_config* cfg);
/* Keys as in the config file (input, output, sample_span, boxcox, orders, order, window_from, ...). */
DFC_API dfc_status dfc_config_set(dfc_config* cfg, const char* key, const char* value);
DFC_API dfc_status dfc_config_load_file(dfc_config* cfg, const char* path);
DFC_API dfc_status dfc_config_load_text(dfc_config* cfg, const char* text);

/* Full comparison report; writes the JSON report and CSV files when `output` is set. */
DFC_API dfc_status dfc_run_compare(const dfc_config* cfg, dfc_document** out);
DFC_API dfc_status dfc_run_diagnose(const dfc_config* cfg, dfc_document** out);
DFC_API dfc_status dfc_run_evaluate(const dfc_config* cfg, dfc_document** out);
DFC_API dfc_status dfc_run_fit(const dfc_config* cfg, dfc_document** out);
/* Bootstrap on an NDE CSV; model may be NULL/empty and horizon <= 0 for no filter. */
DFC_API dfc_status dfc_run_boottest(const dfc_config* cfg, const char* nde_csv_path, const char* model,
                                    int horizon, dfc_document** out);

DFC_API const char* dfc_document_text(const dfc_document* doc);
/* Plain-text comparison table; empty for documents without one. */
DFC_API const char* dfc_document_table(const dfc_document* doc);
DFC_API void dfc_document_free(dfc_document* doc);

#ifdef __cplusplus
}
#endif

#endif /* DEMANDFC_H */
