#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "demandfc/error.hpp"
#include "demandfc/pipeline.hpp"
#include "report_json.hpp"

namespace demandfc {

namespace {

using detail::Json;
using detail::to_json;

struct Spans {
    std::optional<IndexSpan> sample;
    IndexSpan eval;
};

Spans resolve_spans(const RunConfig& cfg, std::size_t n) {
    auto check = [n](const IndexSpan& s, const char* what) {
        if (s.last >= n) {
            fail(ErrorCode::InvalidArgument, std::string(what) + " span ends at index " + std::to_string(s.last) +
                                                 " but the series has " + std::to_string(n) + " values");
        }
    };
    Spans out;
    out.sample = cfg.sample_span;
    if (out.sample) check(*out.sample, "sample");
    if (cfg.eval_span) {
        out.eval = *cfg.eval_span;
    } else if (out.sample) {
        if (out.sample->last + 1 >= n) fail(ErrorCode::InvalidArgument, "sample span leaves no evaluation data");
        out.eval = {out.sample->last + 1, n - 1};
    } else {
        out.eval = {0, n - 1};
    }
    check(out.eval, "evaluation");
    return out;
}

Series span_of(const Series& s, const IndexSpan& span) { return s.slice(span.first, span.size()); }

struct LambdaChoice {
    std::optional<BoxCoxParam> bc;
    std::optional<LambdaSelection> selection;
};

LambdaChoice choose_lambda(const RunConfig& cfg, const std::optional<Series>& sample) {
    LambdaChoice out;
    switch (cfg.boxcox) {
        case BoxCoxMode::None: break;
        case BoxCoxMode::Fixed: out.bc = BoxCoxParam{cfg.lambda}; break;
        case BoxCoxMode::Auto:
            if (!sample) fail(ErrorCode::InvalidArgument, "boxcox=auto needs a sample span");
            out.selection = select_lambda(*sample, cfg.lambda_grid);
            out.bc = out.selection->best;
            break;
    }
    return out;
}

Json boxcox_json(const RunConfig& cfg, const LambdaChoice& choice) {
    Json j;
    j["mode"] = cfg.boxcox == BoxCoxMode::None ? "none" : (cfg.boxcox == BoxCoxMode::Auto ? "auto" : "fixed");
    j["lambda"] = choice.bc ? Json(choice.bc->lambda) : Json(nullptr);
    if (choice.selection) {
        double best = -INFINITY;
        for (const auto& p : choice.selection->profile) best = std::max(best, p.log_likelihood);
        j["max_log_likelihood"] = best;
        j["grid_points"] = choice.selection->profile.size();
    }
    return j;
}

std::string profile_csv(const LambdaSelection& sel) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda,log_likelihood\n";
    for (const auto& p : sel.profile) os << p.lambda << ',' << p.log_likelihood << '\n';
    return os.str();
}

template <class F>
Json guarded(F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        return Json{{"error", e.what()}};
    }
}

// Identification diagnostics on `raw` (untransformed) with optional transform.
Json identification(const RunConfig& cfg, const Series& raw, const std::optional<BoxCoxParam>& bc) {
    const Series data = bc ? transform(raw, *bc) : raw;
    const std::size_t n = data.size();
    Json j;
    j["n"] = n;
    j["summary"] = guarded([&] { return to_json(summarize(raw)); });
    const int lags = std::min<int>(cfg.acf_lags, static_cast<int>(n) - 2);
    j["levels"] = guarded([&] {
        return Json{{"acf", to_json(acf(data, lags))}, {"pacf", to_json(pacf(data, lags))}};
    });
    j["adf"] = guarded([&] {
        const int k = cfg.adf_lags ? *cfg.adf_lags : default_adf_lags(n);
        return to_json(adf_test(data, k, cfg.adf_terms));
    });
    j["differenced"] = guarded([&] {
        const auto diff = difference(data, 1);
        const int dl = std::min<int>(cfg.acf_lags, static_cast<int>(diff.size()) - 2);
        return Json{{"acf", to_json(acf(diff, dl))}, {"pacf", to_json(pacf(diff, dl))}};
    });

    Json models = Json::array();
    for (const auto& order : cfg.orders) {
        Json m;
        m["label"] = model_label(order);
        m["order"] = to_json(order);
        try {
            const auto model = fit(data, order);
            m["fit"] = to_json(model);
            const auto res = residuals(model, data);
            const int max_lag = std::min<int>(cfg.lb_lags, static_cast<int>(res.size()) - 1);
            m["ljung_box"] = guarded([&] { return to_json(ljung_box(res, max_lag, cfg.lb_fitted_params)); });
            m["arch"] = guarded([&] { return to_json(arch_test(res, cfg.arch_order)); });
        } catch (const Error& e) {
            m["error"] = e.what();
        }
        models.push_back(std::move(m));
    }
    j["models"] = std::move(models);
    return j;
}

Json input_json(const Series& s, std::size_t records, std::size_t skipped) {
    return Json{{"records", records},
                {"series_length", s.size()},
                {"start_time", s.start_time()},
                {"interval_seconds", s.interval()},
                {"empty_buckets_skipped", skipped}};
}

Json spans_json(const Spans& spans) {
    Json j;
    j["sample"] = spans.sample ? Json::array({spans.sample->first, spans.sample->last}) : Json(nullptr);
    j["evaluation"] = Json::array({spans.eval.first, spans.eval.last});
    return j;
}

Json comparison_json(const ComparisonReport& report) {
    Json j;
    j["scheme"] = to_json(report.options.scheme);
    j["horizons"] = report.options.horizons;
    j["n_s"] = report.options.n_s;
    j["alpha"] = report.options.alpha;
    j["seed"] = report.options.seed;
    j["nde_convention"] = "epsilon_hat = ln(e_model / e_rw); F = Pr(e_model <= e_rw); ties count 1/2";
    Json bench = Json::array();
    for (const auto& row : report.benchmark) {
        bench.push_back(Json{{"horizon", row.horizon},
                             {"mean_relative_error", row.summary.mean_relative_error},
                             {"window_count", row.summary.window_count},
                             {"skipped_fits", row.relative.skipped_fits},
                             {"skipped_windows", row.relative.skipped_windows}});
    }
    j["benchmark"] = Json{{"label", "RW"}, {"order", to_json(ArimaOrder{0, 1, 0})}, {"rows", bench}};
    Json models = Json::array();
    for (std::size_t mi = 0; mi < report.models.size(); ++mi) {
        const auto& m = report.models[mi];
        Json rows = Json::array();
        for (const auto& h : m.horizons) {
            Json row = to_json(h.bound);
            row["horizon"] = h.horizon;
            row["n_w"] = h.nde.epsilon_hat.size();
            row["excluded_zero_error_windows"] = h.nde.excluded;
            row["skipped_fits"] = h.model_mse.skipped_fits;
            row["skipped_windows"] = h.model_mse.skipped_windows;
            row["bootstrap_seed"] = bootstrap_seed(report.options.seed, mi + 1, h.horizon);
            rows.push_back(std::move(row));
        }
        models.push_back(Json{{"label", m.label}, {"order", to_json(m.order)}, {"rows", rows}});
    }
    j["models"] = models;
    return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Splits one CSV line; fields may be double-quoted with "" as an escaped quote.
std::vector<std::string> split_csv(const std::string& line) {
    auto trim = [](const std::string& f) {
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    };
    std::vector<std::string> out;
    std::string field;
    bool quoted = false, was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = was_quoted = true;
        } else if (c == ',') {
            out.push_back(was_quoted ? field : trim(field));
            field.clear();
            was_quoted = false;
        } else if (!(was_quoted && (c == ' ' || c == '\t' || c == '\r'))) {
            field += c;
        }
    }
    out.push_back(was_quoted ? field : trim(field));
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

PipelineOutput run_pipeline_impl(const RunConfig& cfg, const Series& series, std::size_t records,
                                 std::size_t skipped) {
    cfg.validate();
    const auto spans = resolve_spans(cfg, series.size());
    std::optional<Series> sample;
    if (spans.sample) sample = span_of(series, *spans.sample);
    const Series eval = span_of(series, spans.eval);

    const auto lambda = choose_lambda(cfg, sample);

    Json report;
    report["config"] = to_json(cfg);
    report["input"] = input_json(series, records, skipped);
    report["spans"] = spans_json(spans);
    report["boxcox"] = boxcox_json(cfg, lambda);
    report["identification"] = sample ? identification(cfg, *sample, lambda.bc) : Json(nullptr);

    CompareOptions opts;
    opts.orders = cfg.orders;
    opts.scheme = cfg.scheme;
    opts.horizons = cfg.horizons;
    opts.bc = lambda.bc;
    opts.n_s = cfg.n_s;
    opts.alpha = cfg.alpha;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    const auto cmp = compare_models(eval, opts);

    PipelineOutput out;
    out.table_text = comparison_table(cmp);
    report["comparison"] = comparison_json(cmp);
    report["table"] = out.table_text;
    out.report_json = dump(report);

    std::vector<std::pair<std::string, const WindowErrors*>> rows;
    for (const auto& b : cmp.benchmark) rows.emplace_back("RW", &b.relative);
    for (const auto& m : cmp.models) {
        for (const auto& h : m.horizons) {
            rows.emplace_back(m.label, &h.model_mse);
            rows.emplace_back("RW|" + m.label, &h.benchmark_mse);
        }
    }
    out.files.push_back({"_nde.csv", detail::nde_csv(cmp)});
    out.files.push_back({"_window_errors.csv", detail::window_errors_csv(rows)});
    out.files.push_back({"_table.txt", out.table_text});
    if (lambda.selection) out.files.push_back({"_boxcox.csv", profile_csv(*lambda.selection)});
    return out;
}

}  // namespace

IngestResult load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) fail(ErrorCode::InvalidArgument, "no input file configured");
    return ingest(cfg.input, cfg.ingest);
}

PipelineOutput run_pipeline(const RunConfig& cfg) {
    const auto in = load_input(cfg);
    return run_pipeline_impl(cfg, in.series, in.records, in.empty_buckets_skipped);
}

PipelineOutput run_pipeline(const RunConfig& cfg, const Series& series) {
    return run_pipeline_impl(cfg, series, series.size(), 0);
}

std::string diagnose(const RunConfig& cfg, const Series& series) {
    const auto spans = resolve_spans(cfg, series.size());
    const Series data = spans.sample ? span_of(series, *spans.sample) : series;
    RunConfig local = cfg;
    if (!spans.sample && local.boxcox == BoxCoxMode::Auto) local.sample_span = IndexSpan{0, series.size() - 1};
    const auto lambda = choose_lambda(local, data);
    Json j;
    j["span"] = spans.sample ? Json::array({spans.sample->first, spans.sample->last})
                             : Json::array({std::size_t{0}, series.size() - 1});
    j["boxcox"] = boxcox_json(local, lambda);
    j["diagnostics"] = identification(local, data, lambda.bc);
    return dump(j);
}

std::string fit_models(const RunConfig& cfg, const Series& series) {
    const auto spans = resolve_spans(cfg, series.size());
    const Series data = spans.sample ? span_of(series, *spans.sample) : series;
    const auto lambda = choose_lambda(cfg, data);
    const Series scaled = lambda.bc ? transform(data, *lambda.bc) : data;
    Json models = Json::array();
    for (const auto& order : cfg.orders) {
        Json m = to_json(fit(scaled, order));
        m["label"] = model_label(order);
        m["boxcox_lambda"] = lambda.bc ? Json(lambda.bc->lambda) : Json(nullptr);
        models.push_back(std::move(m));
    }
    return dump(models);
}

PipelineOutput evaluate(const RunConfig& cfg, const Series& series) {
    cfg.validate();
    const auto spans = resolve_spans(cfg, series.size());
    std::optional<Series> sample;
    if (spans.sample) sample = span_of(series, *spans.sample);
    const Series eval = span_of(series, spans.eval);
    const auto lambda = choose_lambda(cfg, sample);

    std::vector<WindowErrors> all;
    Json results = Json::array();
    for (const auto& order : cfg.orders) {
        for (int h : cfg.horizons) {
            auto we = evaluate_scheme(eval, order, cfg.scheme, h, cfg.metric, lambda.bc);
            Json row{{"label", model_label(order)},
                     {"order", to_json(order)},
                     {"horizon", h},
                     {"metric", to_string(cfg.metric)},
                     {"n_w", we.per_window_error.size()},
                     {"skipped_fits", we.skipped_fits},
                     {"skipped_windows", we.skipped_windows}};
            if (cfg.metric == ErrorMetric::Relative) {
                row["mean_relative_error"] = mean_relative_error(we).mean_relative_error;
            } else {
                double sum = 0.0;
                for (double e : we.per_window_error) sum += e;
                row["mean_error"] = sum / static_cast<double>(we.per_window_error.size());
            }
            results.push_back(std::move(row));
            all.push_back(std::move(we));
        }
    }
    Json j;
    j["config"] = to_json(cfg);
    j["spans"] = spans_json(spans);
    j["boxcox"] = boxcox_json(cfg, lambda);
    j["results"] = results;

    std::vector<std::pair<std::string, const WindowErrors*>> rows;
    for (const auto& we : all) rows.emplace_back(model_label(we.order), &we);
    PipelineOutput out;
    out.report_json = dump(j);
    out.files.push_back({"_window_errors.csv", detail::window_errors_csv(rows)});
    return out;
}

NdeSample parse_nde_csv(const std::string& text, const std::string& model_filter, std::optional<int> horizon_filter) {
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    int col_eps = -1, col_model = -1, col_h = -1, col_w = -1;
    bool first = true;
    NdeSample out;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (first) {
            first = false;
            bool numeric = true;
            for (const auto& f : fields) numeric = numeric && to_double(f).has_value();
            if (!numeric) {
                for (std::size_t i = 0; i < fields.size(); ++i) {
                    const int c = static_cast<int>(i);
                    if (fields[i] == "epsilon_hat") col_eps = c;
                    if (fields[i] == "model") col_model = c;
                    if (fields[i] == "horizon") col_h = c;
                    if (fields[i] == "window_length") col_w = c;
                }
                if (col_eps < 0) col_eps = static_cast<int>(fields.size()) - 1;
                continue;
            }
            col_eps = static_cast<int>(fields.size()) - 1;
            if (fields.size() >= 2) col_w = 0;
        }
        if (col_eps >= static_cast<int>(fields.size())) {
            fail(ErrorCode::Parse, "NDE CSV line " + std::to_string(line_no) + ": missing column");
        }
        if (col_model >= 0 && !model_filter.empty() && fields[static_cast<std::size_t>(col_model)] != model_filter) continue;
        if (col_h >= 0 && horizon_filter) {
            const auto h = to_double(fields[static_cast<std::size_t>(col_h)]);
            if (!h || static_cast<int>(*h) != *horizon_filter) continue;
        }
        const auto eps = to_double(fields[static_cast<std::size_t>(col_eps)]);
        if (!eps || !std::isfinite(*eps)) {
            fail(ErrorCode::Parse, "NDE CSV line " + std::to_string(line_no) + ": bad epsilon_hat value");
        }
        int w = static_cast<int>(out.epsilon_hat.size());
        if (col_w >= 0) {
            const auto wv = to_double(fields[static_cast<std::size_t>(col_w)]);
            if (wv) w = static_cast<int>(*wv);
        }
        out.window_lengths.push_back(w);
        out.epsilon_hat.push_back(*eps);
    }
    if (out.epsilon_hat.empty()) fail(ErrorCode::Parse, "NDE CSV has no matching rows");
    return out;
}

std::string boottest(const std::string& nde_csv_text, const RunConfig& cfg, const std::string& model_filter,
                     std::optional<int> horizon_filter) {
    const auto sample = parse_nde_csv(nde_csv_text, model_filter, horizon_filter);
    const auto result = bootstrap_test(sample, cfg.n_s, cfg.alpha, cfg.seed);
    Json j = to_json(result);
    j["n_w"] = sample.epsilon_hat.size();
    j["seed"] = cfg.seed;
    if (!model_filter.empty()) j["model"] = model_filter;
    if (horizon_filter) j["horizon"] = *horizon_filter;
    return dump(j);
}

}  // namespace demandfc
