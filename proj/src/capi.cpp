#include "demandfc/demandfc.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <string>

#include "demandfc/arima.hpp"
#include "demandfc/backtest.hpp"
#include "demandfc/boxcox.hpp"
#include "demandfc/diagnostics.hpp"
#include "demandfc/error.hpp"
#include "demandfc/pipeline.hpp"
#include "demandfc/series.hpp"

struct dfc_series {
    demandfc::Series s;
};

struct dfc_model {
    demandfc::ArimaModel m;
};

struct dfc_config {
    demandfc::RunConfig cfg;
};

struct dfc_document {
    std::string text;
    std::string table;
};

namespace {

thread_local std::string last_error;

dfc_status set_error(dfc_status status, const std::string& message) {
    last_error = message;
    return status;
}

template <class F>
dfc_status guard(F&& f) {
    try {
        last_error.clear();
        f();
        return DFC_OK;
    } catch (const demandfc::Error& e) {
        return set_error(static_cast<dfc_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DFC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DFC_ERR_INTERNAL, e.what());
    }
}

#define DFC_REQUIRE(ptr) \
    if (!(ptr)) return set_error(DFC_ERR_NULL_POINTER, "null argument: " #ptr)

demandfc::ArimaOrder to_order(dfc_order o) { return {o.p, o.d, o.q}; }

dfc_order from_order(const demandfc::ArimaOrder& o) { return {o.p, o.d, o.q}; }

demandfc::DeterministicTerms to_terms(dfc_terms t) {
    return t == DFC_TERMS_CONSTANT ? demandfc::DeterministicTerms::Constant
                                   : demandfc::DeterministicTerms::ConstantAndTrend;
}

std::optional<demandfc::BoxCoxParam> to_bc(int use, double lambda) {
    if (!use) return std::nullopt;
    return demandfc::BoxCoxParam{lambda};
}

dfc_verdict to_verdict(demandfc::Verdict v) {
    switch (v) {
        case demandfc::Verdict::ModelBetter: return DFC_MODEL_BETTER;
        case demandfc::Verdict::ModelWorse: return DFC_MODEL_WORSE;
        case demandfc::Verdict::OnPar: return DFC_ON_PAR;
    }
    return DFC_ON_PAR;
}

void fill_bootstrap(const demandfc::BootstrapResult& r, dfc_bootstrap_result* out) {
    out->lower = r.lower;
    out->upper = r.upper;
    out->n_s = r.n_s;
    out->alpha = r.alpha;
    out->verdict = to_verdict(r.verdict);
}

void emit(const demandfc::RunConfig& cfg, demandfc::PipelineOutput&& result, dfc_document** out) {
    if (!cfg.output.empty()) demandfc::write_outputs(cfg.output, result);
    *out = new dfc_document{std::move(result.report_json), std::move(result.table_text)};
}

}  // namespace

extern "C" {

const char* dfc_last_error(void) { return last_error.c_str(); }

const char* dfc_version(void) { return "1.0.0"; }

dfc_status dfc_series_create(const double* values, size_t n, int64_t start_time, int64_t interval,
                             dfc_series** out) {
    DFC_REQUIRE(out);
    if (n > 0) DFC_REQUIRE(values);
    return guard([&] {
        *out = new dfc_series{demandfc::Series(std::vector<double>(values, values + n), start_time, interval)};
    });
}

void dfc_series_free(dfc_series* s) { delete s; }

size_t dfc_series_length(const dfc_series* s) { return s ? s->s.size() : 0; }

int64_t dfc_series_start_time(const dfc_series* s) { return s ? s->s.start_time() : 0; }

int64_t dfc_series_interval(const dfc_series* s) { return s ? s->s.interval() : 0; }

dfc_status dfc_series_values(const dfc_series* s, double* out, size_t capacity, size_t* needed) {
    DFC_REQUIRE(s);
    const size_t n = s->s.size();
    if (needed) *needed = n;
    if (capacity < n) return set_error(DFC_ERR_BUFFER, "buffer holds " + std::to_string(capacity) +
                                                           " values, " + std::to_string(n) + " needed");
    DFC_REQUIRE(out);
    std::memcpy(out, s->s.data().data(), n * sizeof(double));
    return DFC_OK;
}

dfc_status dfc_series_difference(const dfc_series* s, int d, dfc_series** out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_series{demandfc::difference(s->s, d)}; });
}

dfc_status dfc_series_slice(const dfc_series* s, size_t first, size_t count, dfc_series** out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_series{s->s.slice(first, count)}; });
}

dfc_status dfc_series_write_csv(const dfc_series* s, const char* path) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(path);
    return guard([&] {
        const std::string text = demandfc::series_to_csv(s->s);
        if (std::strcmp(path, "-") == 0) {
            std::cout << text << std::flush;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) demandfc::fail(demandfc::ErrorCode::Io, std::string("cannot write '") + path + "'");
        f << text;
        if (!f) demandfc::fail(demandfc::ErrorCode::Io, std::string("write failed for '") + path + "'");
    });
}

dfc_status dfc_ingest_csv(const char* path, int64_t bucket_seconds, int aggregate, int skip_empty, dfc_series** out,
                          size_t* empty_buckets_skipped) {
    DFC_REQUIRE(path);
    DFC_REQUIRE(out);
    return guard([&] {
        demandfc::IngestOptions opts;
        opts.bucket_seconds = bucket_seconds;
        opts.aggregation = aggregate ? demandfc::Aggregation::BucketMean : demandfc::Aggregation::None;
        opts.skip_empty = skip_empty != 0;
        auto result = demandfc::ingest(path, opts);
        if (empty_buckets_skipped) *empty_buckets_skipped = result.empty_buckets_skipped;
        *out = new dfc_series{std::move(result.series)};
    });
}

dfc_status dfc_acf(const dfc_series* s, int max_lag, double* coefficients, double* confidence_band) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(coefficients);
    return guard([&] {
        const auto r = demandfc::acf(s->s, max_lag);
        std::memcpy(coefficients, r.coefficients.data(), r.coefficients.size() * sizeof(double));
        if (confidence_band) *confidence_band = r.confidence_band;
    });
}

dfc_status dfc_pacf(const dfc_series* s, int max_lag, double* coefficients, double* confidence_band) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(coefficients);
    return guard([&] {
        const auto r = demandfc::pacf(s->s, max_lag);
        std::memcpy(coefficients, r.coefficients.data(), r.coefficients.size() * sizeof(double));
        if (confidence_band) *confidence_band = r.confidence_band;
    });
}

dfc_status dfc_summarize(const dfc_series* s, dfc_summary* out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] {
        const auto r = demandfc::summarize(s->s);
        out->min = r.min;
        out->q1 = r.q1;
        out->median = r.median;
        out->q3 = r.q3;
        out->max = r.max;
        out->mean = r.mean;
        out->coef_of_variation = r.coef_of_variation;
        out->has_moments = r.skewness.has_value() ? 1 : 0;
        out->skewness = r.skewness.value_or(0.0);
        out->kurtosis = r.kurtosis.value_or(0.0);
    });
}

dfc_status dfc_boxcox_transform(const dfc_series* s, double lambda, dfc_series** out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_series{demandfc::transform(s->s, demandfc::BoxCoxParam{lambda})}; });
}

dfc_status dfc_boxcox_inverse(double y, double lambda, double* out) {
    DFC_REQUIRE(out);
    return guard([&] { *out = demandfc::boxcox_inverse(y, demandfc::BoxCoxParam{lambda}); });
}

dfc_status dfc_boxcox_select(const dfc_series* s, double grid_from, double grid_to, double grid_step,
                             double* best_lambda, double* curve_lambda, double* curve_loglik, size_t capacity,
                             size_t* curve_points) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(best_lambda);
    dfc_status status = DFC_OK;
    const dfc_status st = guard([&] {
        const auto sel = demandfc::select_lambda(s->s, demandfc::LambdaGrid{grid_from, grid_to, grid_step});
        *best_lambda = sel.best.lambda;
        if (curve_points) *curve_points = sel.profile.size();
        if (!curve_lambda && !curve_loglik) return;
        if (capacity < sel.profile.size()) {
            status = set_error(DFC_ERR_BUFFER, "profile buffer too small");
            return;
        }
        for (size_t i = 0; i < sel.profile.size(); ++i) {
            if (curve_lambda) curve_lambda[i] = sel.profile[i].lambda;
            if (curve_loglik) curve_loglik[i] = sel.profile[i].log_likelihood;
        }
    });
    return st != DFC_OK ? st : status;
}

dfc_status dfc_model_fit(const dfc_series* s, dfc_order order, dfc_model** out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_model{demandfc::fit(s->s, to_order(order))}; });
}

dfc_status dfc_model_create(dfc_order order, const double* ar, const double* ma, double sigma2, dfc_model** out) {
    DFC_REQUIRE(out);
    if (order.p > 0) DFC_REQUIRE(ar);
    if (order.q > 0) DFC_REQUIRE(ma);
    return guard([&] {
        const auto o = to_order(order);
        o.validate();
        std::vector<double> a(ar, ar + o.p);
        std::vector<double> m(ma, ma + o.q);
        *out = new dfc_model{demandfc::make_model(o, std::move(a), std::move(m), sigma2)};
    });
}

void dfc_model_free(dfc_model* m) { delete m; }

dfc_status dfc_model_info_get(const dfc_model* m, dfc_model_info* out) {
    DFC_REQUIRE(m);
    DFC_REQUIRE(out);
    out->order = from_order(m->m.order);
    out->mean = m->m.mean;
    out->sigma2 = m->m.sigma2;
    out->log_likelihood = m->m.log_likelihood;
    out->n_used = m->m.n_used;
    return DFC_OK;
}

dfc_status dfc_model_coefficients(const dfc_model* m, double* ar, double* ma) {
    DFC_REQUIRE(m);
    if (!m->m.ar.empty()) DFC_REQUIRE(ar);
    if (!m->m.ma.empty()) DFC_REQUIRE(ma);
    std::copy(m->m.ar.begin(), m->m.ar.end(), ar);
    std::copy(m->m.ma.begin(), m->m.ma.end(), ma);
    return DFC_OK;
}

dfc_status dfc_model_forecast(const dfc_model* m, const dfc_series* s, int horizon, int use_boxcox,
                              double boxcox_lambda, double* out) {
    DFC_REQUIRE(m);
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] {
        const auto f = demandfc::forecast(m->m, s->s, horizon, to_bc(use_boxcox, boxcox_lambda));
        std::copy(f.point_forecasts.begin(), f.point_forecasts.end(), out);
    });
}

dfc_status dfc_model_residuals(const dfc_model* m, const dfc_series* s, dfc_series** out) {
    DFC_REQUIRE(m);
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_series{demandfc::residuals(m->m, s->s)}; });
}

dfc_status dfc_model_to_json(const dfc_model* m, dfc_document** out) {
    DFC_REQUIRE(m);
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_document{demandfc::model_to_json(m->m), {}}; });
}

dfc_status dfc_simulate(dfc_order order, const double* ar, const double* ma, double sigma, size_t n, uint64_t seed,
                        dfc_series** out) {
    DFC_REQUIRE(out);
    if (order.p > 0) DFC_REQUIRE(ar);
    if (order.q > 0) DFC_REQUIRE(ma);
    return guard([&] {
        const auto o = to_order(order);
        o.validate();
        const std::span<const double> a(ar, static_cast<size_t>(o.p));
        const std::span<const double> m(ma, static_cast<size_t>(o.q));
        *out = new dfc_series{demandfc::simulate(o, a, m, sigma, n, seed)};
    });
}

dfc_status dfc_adf_test(const dfc_series* s, int lags, dfc_terms terms, dfc_adf_result* out) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(out);
    return guard([&] {
        const int k = lags < 0 ? demandfc::default_adf_lags(s->s.size()) : lags;
        const auto r = demandfc::adf_test(s->s, k, to_terms(terms));
        out->t_statistic = r.t_statistic;
        out->lags_used = r.lags_used;
        out->terms = terms;
        out->critical_1pct = r.critical_values.at(0.01);
        out->critical_5pct = r.critical_values.at(0.05);
        out->critical_10pct = r.critical_values.at(0.10);
        out->reject_unit_root = r.reject_unit_root ? 1 : 0;
    });
}

dfc_status dfc_adf_critical_value(dfc_terms terms, double level, double n, double* out) {
    DFC_REQUIRE(out);
    return guard([&] { *out = demandfc::adf_critical_value(to_terms(terms), level, n); });
}

dfc_status dfc_ljung_box(const dfc_series* residuals, int max_lag, int fitted_params, dfc_portmanteau_result* out) {
    DFC_REQUIRE(residuals);
    DFC_REQUIRE(out);
    return guard([&] {
        const auto r = demandfc::ljung_box(residuals->s, max_lag, fitted_params);
        out->q_statistic = r.q_statistic;
        out->df = r.df;
        out->p_value = r.p_value;
    });
}

dfc_status dfc_chi2_pvalue(double statistic, int df, double* out) {
    DFC_REQUIRE(out);
    return guard([&] { *out = demandfc::chi_squared_upper_tail(statistic, df); });
}

dfc_status dfc_arch_test(const dfc_series* residuals, int s, dfc_arch_result* out) {
    DFC_REQUIRE(residuals);
    DFC_REQUIRE(out);
    return guard([&] {
        const auto r = demandfc::arch_test(residuals->s, s);
        out->n = r.n;
        out->s = r.s;
        out->r_squared = r.r_squared;
        out->lm_statistic = r.lm_statistic;
        out->p_value = r.p_value;
        out->heteroskedastic_at_5pct = r.heteroskedastic_at_5pct ? 1 : 0;
    });
}

dfc_status dfc_evaluate_scheme(const dfc_series* s, dfc_order order, int from, int to, int step, int horizon,
                               dfc_metric metric, int use_boxcox, double boxcox_lambda, double* errors,
                               int* window_lengths, size_t capacity, size_t* count, int* skipped_fits) {
    DFC_REQUIRE(s);
    DFC_REQUIRE(errors);
    DFC_REQUIRE(count);
    dfc_status status = DFC_OK;
    const dfc_status st = guard([&] {
        const demandfc::WindowScheme scheme{from, to, step};
        scheme.validate();
        const auto m = metric == DFC_METRIC_RELATIVE ? demandfc::ErrorMetric::Relative : demandfc::ErrorMetric::Mse;
        const auto we = demandfc::evaluate_scheme(s->s, to_order(order), scheme, horizon, m,
                                                  to_bc(use_boxcox, boxcox_lambda));
        *count = we.per_window_error.size();
        if (skipped_fits) *skipped_fits = we.skipped_fits;
        if (capacity < we.per_window_error.size()) {
            status = set_error(DFC_ERR_BUFFER, "error buffer too small");
            return;
        }
        std::copy(we.per_window_error.begin(), we.per_window_error.end(), errors);
        if (window_lengths) std::copy(we.window_lengths.begin(), we.window_lengths.end(), window_lengths);
    });
    return st != DFC_OK ? st : status;
}

dfc_status dfc_nde(const double* model_errors, const double* benchmark_errors, size_t n, double* epsilon_hat,
                   size_t* count, size_t* excluded) {
    DFC_REQUIRE(count);
    if (n > 0) {
        DFC_REQUIRE(model_errors);
        DFC_REQUIRE(benchmark_errors);
        DFC_REQUIRE(epsilon_hat);
    }
    return guard([&] {
        demandfc::WindowErrors m, b;
        for (size_t i = 0; i < n; ++i) {
            m.window_lengths.push_back(static_cast<int>(i));
            b.window_lengths.push_back(static_cast<int>(i));
        }
        m.per_window_error.assign(model_errors, model_errors + n);
        b.per_window_error.assign(benchmark_errors, benchmark_errors + n);
        const auto sample = demandfc::nde(m, b);
        std::copy(sample.epsilon_hat.begin(), sample.epsilon_hat.end(), epsilon_hat);
        *count = sample.epsilon_hat.size();
        if (excluded) *excluded = static_cast<size_t>(sample.excluded);
    });
}

dfc_status dfc_bootstrap_test(const double* epsilon_hat, size_t n, int n_s, double alpha, uint64_t seed,
                              dfc_bootstrap_result* out) {
    DFC_REQUIRE(out);
    if (n > 0) DFC_REQUIRE(epsilon_hat);
    return guard([&] {
        demandfc::NdeSample sample;
        sample.epsilon_hat.assign(epsilon_hat, epsilon_hat + n);
        for (size_t i = 0; i < n; ++i) sample.window_lengths.push_back(static_cast<int>(i));
        fill_bootstrap(demandfc::bootstrap_test(sample, n_s, alpha, seed), out);
    });
}

dfc_status dfc_config_create(dfc_config** out) {
    DFC_REQUIRE(out);
    return guard([&] { *out = new dfc_config{}; });
}

void dfc_config_free(dfc_config* cfg) { delete cfg; }

dfc_status dfc_config_set(dfc_config* cfg, const char* key, const char* value) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(key);
    DFC_REQUIRE(value);
    return guard([&] { cfg->cfg.set(key, value); });
}

dfc_status dfc_config_load_file(dfc_config* cfg, const char* path) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(path);
    return guard([&] { cfg->cfg.load_file(path); });
}

dfc_status dfc_config_load_text(dfc_config* cfg, const char* text) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(text);
    return guard([&] { cfg->cfg.load_text(text); });
}

dfc_status dfc_run_compare(const dfc_config* cfg, dfc_document** out) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(out);
    return guard([&] { emit(cfg->cfg, demandfc::run_pipeline(cfg->cfg), out); });
}

dfc_status dfc_run_diagnose(const dfc_config* cfg, dfc_document** out) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(out);
    return guard([&] {
        demandfc::PipelineOutput result;
        result.report_json = demandfc::diagnose(cfg->cfg, demandfc::load_input(cfg->cfg).series);
        emit(cfg->cfg, std::move(result), out);
    });
}

dfc_status dfc_run_evaluate(const dfc_config* cfg, dfc_document** out) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(out);
    return guard([&] { emit(cfg->cfg, demandfc::evaluate(cfg->cfg, demandfc::load_input(cfg->cfg).series), out); });
}

dfc_status dfc_run_fit(const dfc_config* cfg, dfc_document** out) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(out);
    return guard([&] {
        demandfc::PipelineOutput result;
        result.report_json = demandfc::fit_models(cfg->cfg, demandfc::load_input(cfg->cfg).series);
        emit(cfg->cfg, std::move(result), out);
    });
}

dfc_status dfc_run_boottest(const dfc_config* cfg, const char* nde_csv_path, const char* model, int horizon,
                            dfc_document** out) {
    DFC_REQUIRE(cfg);
    DFC_REQUIRE(nde_csv_path);
    DFC_REQUIRE(out);
    return guard([&] {
        const std::string text = demandfc::read_text_file(nde_csv_path);
        const std::optional<int> h = horizon > 0 ? std::optional<int>(horizon) : std::nullopt;
        demandfc::PipelineOutput result;
        result.report_json = demandfc::boottest(text, cfg->cfg, model ? model : "", h);
        emit(cfg->cfg, std::move(result), out);
    });
}

const char* dfc_document_text(const dfc_document* doc) { return doc ? doc->text.c_str() : ""; }

const char* dfc_document_table(const dfc_document* doc) { return doc ? doc->table.c_str() : ""; }

void dfc_document_free(dfc_document* doc) { delete doc; }

}  // extern "C"
