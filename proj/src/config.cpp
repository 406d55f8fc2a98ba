#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "demandfc/error.hpp"
#include "demandfc/pipeline.hpp"

namespace demandfc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    fail(ErrorCode::Parse, "config '" + key + "': cannot parse '" + value + "' (" + expected + ")");
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    const auto t = trim(value);
    T out{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, value, "number");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const auto t = trim(value);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    bad_value(key, value, "boolean");
}

IndexSpan parse_span(const std::string& key, const std::string& value) {
    const auto t = trim(value);
    const auto sep = t.find_first_of(":-");
    if (sep == std::string::npos) bad_value(key, value, "first:last");
    IndexSpan span{parse_number<std::size_t>(key, t.substr(0, sep)), parse_number<std::size_t>(key, t.substr(sep + 1))};
    if (span.last < span.first) bad_value(key, value, "first <= last");
    return span;
}

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        "input",        "output",      "bucket_seconds", "aggregation", "skip_empty", "sample_span",
        "eval_span",    "boxcox",      "lambda_grid",    "orders",      "order",      "window_from",
        "window_to",    "window_step", "horizons",       "samples",     "alpha",      "seed",
        "metric",       "adf_lags",    "adf_terms",      "acf_lags",    "lb_lags",    "lb_fitted",
        "arch_order",   "threads",
    };
    return keys;
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const auto key = trim(raw_key);
    const auto value = trim(raw_value);
    if (key == "input") {
        input = value;
    } else if (key == "output") {
        output = value;
    } else if (key == "bucket_seconds") {
        ingest.bucket_seconds = parse_number<std::int64_t>(key, value);
    } else if (key == "aggregation") {
        if (value == "hourly_mean" || value == "mean") {
            ingest.aggregation = Aggregation::BucketMean;
        } else if (value == "none") {
            ingest.aggregation = Aggregation::None;
        } else {
            bad_value(key, value, "hourly_mean|none");
        }
    } else if (key == "skip_empty") {
        ingest.skip_empty = parse_bool(key, value);
    } else if (key == "sample_span") {
        if (value == "none") {
            sample_span.reset();
        } else {
            sample_span = parse_span(key, value);
        }
    } else if (key == "eval_span") {
        if (value == "none") {
            eval_span.reset();
        } else {
            eval_span = parse_span(key, value);
        }
    } else if (key == "boxcox") {
        if (value == "none") {
            boxcox = BoxCoxMode::None;
        } else if (value == "auto") {
            boxcox = BoxCoxMode::Auto;
        } else {
            boxcox = BoxCoxMode::Fixed;
            lambda = parse_number<double>(key, value);
        }
    } else if (key == "lambda_grid") {
        const auto parts = split_list(value, ':');
        if (parts.size() != 3) bad_value(key, value, "from:to:step");
        lambda_grid = {parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1]),
                       parse_number<double>(key, parts[2])};
    } else if (key == "orders") {
        orders.clear();
        for (const auto& item : split_list(value, ' ')) orders.push_back(parse_order(item));
    } else if (key == "order") {
        orders.push_back(parse_order(value));
    } else if (key == "window_from") {
        scheme.from = parse_number<int>(key, value);
    } else if (key == "window_to") {
        scheme.to = parse_number<int>(key, value);
    } else if (key == "window_step") {
        scheme.step = parse_number<int>(key, value);
    } else if (key == "horizons") {
        horizons.clear();
        for (const auto& item : split_list(value, ',')) horizons.push_back(parse_number<int>(key, item));
    } else if (key == "samples") {
        n_s = parse_number<int>(key, value);
    } else if (key == "alpha") {
        alpha = parse_number<double>(key, value);
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "metric") {
        metric = parse_metric(value);
    } else if (key == "adf_lags") {
        if (value == "auto") {
            adf_lags.reset();
        } else {
            adf_lags = parse_number<int>(key, value);
        }
    } else if (key == "adf_terms") {
        adf_terms = parse_terms(value);
    } else if (key == "acf_lags") {
        acf_lags = parse_number<int>(key, value);
    } else if (key == "lb_lags") {
        lb_lags = parse_number<int>(key, value);
    } else if (key == "lb_fitted") {
        lb_fitted_params = parse_number<int>(key, value);
    } else if (key == "arch_order") {
        arch_order = parse_number<int>(key, value);
    } else if (key == "threads") {
        threads = parse_number<int>(key, value);
    } else {
        fail(ErrorCode::Parse, "unknown config key '" + key + "'");
    }
}

void RunConfig::load_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(ErrorCode::Parse, "config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        try {
            set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const Error& e) {
            fail(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::load_file(const std::string& path) { load_text(read_text_file(path)); }

void RunConfig::validate() const {
    scheme.validate();
    if (orders.empty()) fail(ErrorCode::InvalidArgument, "no model orders configured");
    if (horizons.empty()) fail(ErrorCode::InvalidArgument, "no horizons configured");
    for (int h : horizons)
        if (h < 1) fail(ErrorCode::InvalidArgument, "horizons must be >= 1");
    if (n_s < 100) fail(ErrorCode::InvalidArgument, "samples must be >= 100");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");
    if (acf_lags < 1 || lb_lags < 1 || arch_order < 1) {
        fail(ErrorCode::InvalidArgument, "acf_lags, lb_lags and arch_order must be positive");
    }
    if (boxcox == BoxCoxMode::Auto && !sample_span) {
        fail(ErrorCode::InvalidArgument, "boxcox=auto selects lambda on the sample span; set sample_span");
    }
    if (sample_span && eval_span) {
        const bool overlap = !(eval_span->last < sample_span->first || sample_span->last < eval_span->first);
        if (overlap) fail(ErrorCode::InvalidArgument, "sample span and evaluation span overlap");
    }
}

}  // namespace demandfc
