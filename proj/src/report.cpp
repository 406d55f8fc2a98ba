#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "demandfc/error.hpp"
#include "report_json.hpp"

namespace demandfc {

namespace detail {

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json numbers(const std::vector<double>& values) {
    Json arr = Json::array();
    for (double v : values) arr.push_back(number_or_null(v));
    return arr;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string boxcox_mode_name(BoxCoxMode m) {
    switch (m) {
        case BoxCoxMode::None: return "none";
        case BoxCoxMode::Auto: return "auto";
        case BoxCoxMode::Fixed: return "fixed";
    }
    return "none";
}

Json span_json(const std::optional<IndexSpan>& span) {
    if (!span) return nullptr;
    return Json::array({span->first, span->last});
}

}  // namespace

Json to_json(const ArimaOrder& o) { return Json{{"p", o.p}, {"d", o.d}, {"q", o.q}}; }

Json to_json(const ArimaModel& m) {
    Json j;
    j["order"] = to_json(m.order);
    j["ar"] = numbers(m.ar);
    j["ma"] = numbers(m.ma);
    j["ma_sign_convention"] = "(1 - theta_1 B - ... - theta_q B^q) a_t";
    if (m.order.d == 0) j["mean"] = number_or_null(m.mean);
    j["sigma2"] = number_or_null(m.sigma2);
    j["log_likelihood"] = number_or_null(m.log_likelihood);
    j["coeff_std_errors"] = numbers(m.coeff_std_errors);
    j["n_used"] = m.n_used;
    j["iterations"] = m.iterations;
    return j;
}

Json to_json(const CorrelogramResult& c) {
    return Json{{"lags", c.lags}, {"coefficients", numbers(c.coefficients)}, {"confidence_band", c.confidence_band}};
}

Json to_json(const DistributionSummary& s) {
    Json j;
    j["mean"] = s.mean;
    j["normalized"] = Json{{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
    j["coef_of_variation"] = s.coef_of_variation;
    j["skewness"] = s.skewness ? Json(*s.skewness) : Json(nullptr);
    j["kurtosis"] = s.kurtosis ? Json(*s.kurtosis) : Json(nullptr);
    j["kurtosis_convention"] = "raw (normal = 3)";
    j["quartile_convention"] = "linear interpolation between order statistics (type 7)";
    return j;
}

Json to_json(const AdfResult& r) {
    Json cv;
    for (const auto& [level, value] : r.critical_values) {
        std::ostringstream key;
        key << level * 100 << "%";
        cv[key.str()] = value;
    }
    return Json{{"t_statistic", r.t_statistic},
                {"lags_used", r.lags_used},
                {"deterministic_terms", to_string(r.deterministic_terms)},
                {"n_obs", r.n_obs},
                {"critical_values", cv},
                {"reject_unit_root", r.reject_unit_root}};
}

Json to_json(const PortmanteauResult& r) {
    return Json{{"q_statistic", r.q_statistic}, {"max_lag", r.max_lag}, {"df", r.df}, {"p_value", r.p_value}};
}

Json to_json(const ArchTestResult& r) {
    return Json{{"n", r.n},
                {"s", r.s},
                {"r_squared", r.r_squared},
                {"lm_statistic", r.lm_statistic},
                {"p_value", r.p_value},
                {"heteroskedastic_at_5pct", r.heteroskedastic_at_5pct}};
}

Json to_json(const BootstrapResult& r) {
    return Json{{"lower", r.lower},
                {"upper", r.upper},
                {"n_s", r.n_s},
                {"alpha", r.alpha},
                {"verdict", to_string(r.verdict)}};
}

Json to_json(const WindowScheme& s) {
    return Json{{"from", s.from}, {"to", s.to}, {"step", s.step}, {"n_w", s.count()}};
}

Json to_json(const RunConfig& cfg) {
    Json j;
    j["input"] = cfg.input;
    j["output"] = cfg.output;
    j["bucket_seconds"] = cfg.ingest.bucket_seconds;
    j["aggregation"] = cfg.ingest.aggregation == Aggregation::BucketMean ? "hourly_mean" : "none";
    j["skip_empty"] = cfg.ingest.skip_empty;
    j["sample_span"] = span_json(cfg.sample_span);
    j["eval_span"] = span_json(cfg.eval_span);
    j["boxcox"] = boxcox_mode_name(cfg.boxcox);
    j["lambda"] = cfg.boxcox == BoxCoxMode::Fixed ? Json(cfg.lambda) : Json(nullptr);
    j["lambda_grid"] = Json{{"from", cfg.lambda_grid.from}, {"to", cfg.lambda_grid.to}, {"step", cfg.lambda_grid.step}};
    Json orders = Json::array();
    for (const auto& o : cfg.orders) orders.push_back(to_json(o));
    j["orders"] = orders;
    j["window_scheme"] = to_json(cfg.scheme);
    j["horizons"] = cfg.horizons;
    j["samples"] = cfg.n_s;
    j["alpha"] = cfg.alpha;
    j["seed"] = cfg.seed;
    j["metric"] = to_string(cfg.metric);
    j["adf_lags"] = cfg.adf_lags ? Json(*cfg.adf_lags) : Json("auto");
    j["adf_terms"] = to_string(cfg.adf_terms);
    j["acf_lags"] = cfg.acf_lags;
    j["lb_lags"] = cfg.lb_lags;
    j["lb_fitted"] = cfg.lb_fitted_params;
    j["arch_order"] = cfg.arch_order;
    return j;
}

std::string window_errors_csv(const std::vector<std::pair<std::string, const WindowErrors*>>& rows) {
    std::ostringstream os;
    os << "model,horizon,metric,window_length,error\n";
    for (const auto& [label, we] : rows) {
        for (std::size_t i = 0; i < we->per_window_error.size(); ++i) {
            os << csv_field(label) << ',' << we->horizon << ',' << to_string(we->metric) << ',' << we->window_lengths[i] << ','
               << format_double(we->per_window_error[i]) << '\n';
        }
    }
    return os.str();
}

std::string nde_csv(const ComparisonReport& report) {
    std::ostringstream os;
    os << "model,horizon,window_length,epsilon_hat\n";
    for (const auto& m : report.models) {
        for (const auto& h : m.horizons) {
            for (std::size_t i = 0; i < h.nde.epsilon_hat.size(); ++i) {
                os << csv_field(m.label) << ',' << h.horizon << ',' << h.nde.window_lengths[i] << ','
                   << format_double(h.nde.epsilon_hat[i]) << '\n';
            }
        }
    }
    return os.str();
}

}  // namespace detail

std::string model_to_json(const ArimaModel& m) { return detail::to_json(m).dump(2) + "\n"; }

std::string comparison_table(const ComparisonReport& report) {
    constexpr int kLabelWidth = 16;
    constexpr int kCellWidth = 16;
    std::ostringstream os;
    os << std::left << std::setw(kLabelWidth) << "";
    for (int h : report.options.horizons) os << std::setw(kCellWidth) << (std::to_string(h) + " SE");
    os << '\n';

    os << std::setw(kLabelWidth) << "RW";
    for (const auto& row : report.benchmark) {
        char cell[32];
        std::snprintf(cell, sizeof cell, "%.4f", row.summary.mean_relative_error);
        os << std::setw(kCellWidth) << cell;
    }
    os << '\n';

    for (const auto& m : report.models) {
        os << std::setw(kLabelWidth) << m.label;
        for (const auto& h : m.horizons) {
            char cell[48];
            std::snprintf(cell, sizeof cell, "[%.3f,%.3f]", h.bound.lower, h.bound.upper);
            os << std::setw(kCellWidth) << cell;
        }
        os << '\n';
    }
    return os.str();
}

void write_outputs(const std::string& output_path, const PipelineOutput& out) {
    namespace fs = std::filesystem;
    auto write = [](const fs::path& path, const std::string& content) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream f(path, std::ios::binary);
        if (!f) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
        f << content;
        if (!f) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
    };
    const fs::path report(output_path);
    write(report, out.report_json);
    fs::path stem = report;
    if (stem.extension() == ".json") stem.replace_extension();
    for (const auto& file : out.files) write(fs::path(stem.string() + file.name), file.content);
}

}  // namespace demandfc
