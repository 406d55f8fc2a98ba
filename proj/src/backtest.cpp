#include "demandfc/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "demandfc/error.hpp"
#include "demandfc/rng.hpp"

namespace demandfc {

namespace {

using Path = std::optional<std::vector<double>>;

// Forecast paths (horizons 1..max_h) for every partition at one window length;
// nullopt marks a partition whose fit or back-transform failed.
std::vector<Path> partition_paths(std::span<const double> z, const ArimaOrder& order, int window, int max_h,
                                  const std::optional<BoxCoxParam>& bc) {
    const std::size_t count = partition_count(z.size(), window);
    const auto w = static_cast<std::size_t>(window);
    std::vector<Path> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        // Skip partitions with no scorable target at all.
        if (i * w + w >= z.size()) continue;
        auto part = z.subspan(i * w, w);
        std::vector<double> data = bc ? transform(part, *bc) : std::vector<double>(part.begin(), part.end());
        try {
            const auto model = fit(data, order);
            auto path = forecast(model, data, max_h);
            if (bc) {
                for (double& v : path) v = boxcox_inverse(v, *bc);
            }
            out[i] = std::move(path);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Convergence && e.code() != ErrorCode::Inversion) throw;
        }
    }
    return out;
}

std::size_t target_index(std::size_t partition, int window, int horizon) {
    const auto w = static_cast<std::size_t>(window);
    return partition * w + w - 1 + static_cast<std::size_t>(horizon);
}

double score(double predicted, double actual, ErrorMetric metric) {
    if (metric == ErrorMetric::Mse) return (actual - predicted) * (actual - predicted);
    if (actual == 0.0) fail(ErrorCode::DegenerateSeries, "relative error undefined for a zero observation");
    return std::abs(predicted - actual) / std::abs(actual);
}

struct Accumulated {
    double sum = 0.0;
    int used = 0;
    int failed = 0;
};

// Mean error at one horizon over partitions accepted by `use`.
template <class Use>
Accumulated accumulate(std::span<const double> z, const std::vector<Path>& paths, int window, int horizon,
                       ErrorMetric metric, Use use) {
    Accumulated acc;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::size_t target = target_index(i, window, horizon);
        if (target >= z.size()) continue;
        if (!use(i)) {
            ++acc.failed;
            continue;
        }
        acc.sum += score((*paths[i])[static_cast<std::size_t>(horizon - 1)], z[target], metric);
        ++acc.used;
    }
    return acc;
}

void check_series_length(const Series& s, int window) {
    if (s.size() < 2 * static_cast<std::size_t>(window)) {
        fail(ErrorCode::InsufficientData, "series of length " + std::to_string(s.size()) +
                                              " is shorter than twice the window " + std::to_string(window));
    }
}

void check_horizon(int h) {
    if (h < 1) fail(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
}

template <class Task>
void parallel_for(std::size_t count, int threads, Task task) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(run);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::string to_string(ErrorMetric metric) { return metric == ErrorMetric::Mse ? "mse" : "relative"; }

ErrorMetric parse_metric(const std::string& text) {
    if (text == "mse") return ErrorMetric::Mse;
    if (text == "relative") return ErrorMetric::Relative;
    fail(ErrorCode::Parse, "unknown metric '" + text + "', expected mse or relative");
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::ModelBetter: return "model_better";
        case Verdict::ModelWorse: return "model_worse";
        case Verdict::OnPar: return "on_par";
    }
    return "on_par";
}

void WindowScheme::validate() const {
    if (from < 20) fail(ErrorCode::InvalidArgument, "window scheme 'from' must be >= 20");
    if (to < from) fail(ErrorCode::InvalidArgument, "window scheme 'to' must be >= 'from'");
    if (step < 1) fail(ErrorCode::InvalidArgument, "window scheme step must be positive");
}

std::vector<int> WindowScheme::lengths() const {
    validate();
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (int i = 0; i < count(); ++i) out.push_back(from + i * step);
    return out;
}

std::size_t partition_count(std::size_t length, int window) {
    if (window < 1) fail(ErrorCode::InvalidArgument, "window must be positive");
    const auto w = static_cast<std::size_t>(window);
    if (length < w + 2) return 0;
    return (length - w - 2) / w + 1;
}

WindowError window_errors(const Series& s, const ArimaOrder& order, int window, int horizon, ErrorMetric metric,
                          std::optional<BoxCoxParam> bc) {
    check_horizon(horizon);
    check_series_length(s, window);
    const auto paths = partition_paths(s.values(), order, window, horizon, bc);
    const auto acc =
        accumulate(s.values(), paths, window, horizon, metric, [&](std::size_t i) { return paths[i].has_value(); });
    if (acc.used == 0) {
        fail(ErrorCode::Evaluation, order.name() + ": no usable partition at window " + std::to_string(window));
    }
    return {acc.sum / acc.used, acc.used, acc.failed};
}

WindowErrors evaluate_scheme(const Series& s, const ArimaOrder& order, const WindowScheme& scheme, int horizon,
                             ErrorMetric metric, std::optional<BoxCoxParam> bc) {
    scheme.validate();
    check_horizon(horizon);
    check_series_length(s, scheme.to);
    WindowErrors out;
    out.order = order;
    out.horizon = horizon;
    out.metric = metric;
    for (int window : scheme.lengths()) {
        try {
            const auto e = window_errors(s, order, window, horizon, metric, bc);
            out.window_lengths.push_back(window);
            out.per_window_error.push_back(e.mean_error);
            out.skipped_fits += e.skipped_fits;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::Evaluation) throw;
            ++out.skipped_windows;
        }
    }
    if (out.per_window_error.empty()) {
        fail(ErrorCode::Evaluation, order.name() + ": every window length failed");
    }
    return out;
}

NdeSample nde(const WindowErrors& model, const WindowErrors& benchmark) {
    if (model.window_lengths != benchmark.window_lengths || model.horizon != benchmark.horizon) {
        fail(ErrorCode::Shape, "model and benchmark errors cover different windows or horizons");
    }
    NdeSample out;
    for (std::size_t i = 0; i < model.per_window_error.size(); ++i) {
        const double em = model.per_window_error[i];
        const double eb = benchmark.per_window_error[i];
        if (!(em > 0.0) || !(eb > 0.0)) {
            ++out.excluded;
            continue;
        }
        out.window_lengths.push_back(model.window_lengths[i]);
        out.epsilon_hat.push_back(std::log(em) - std::log(eb));
    }
    return out;
}

Verdict verdict_for(double lower, double upper) {
    if (lower > 0.5) return Verdict::ModelBetter;
    if (upper < 0.5) return Verdict::ModelWorse;
    return Verdict::OnPar;
}

BootstrapResult bootstrap_test(const NdeSample& sample, int n_s, double alpha, std::uint64_t seed) {
    if (sample.epsilon_hat.empty()) fail(ErrorCode::InvalidArgument, "bootstrap needs a non-empty NDE sample");
    if (n_s < 100) fail(ErrorCode::InvalidArgument, "bootstrap needs at least 100 resamples");
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must be in (0, 1)");

    const auto& x = sample.epsilon_hat;
    const std::size_t n = x.size();
    Rng rng(seed);
    std::vector<double> fractions(static_cast<std::size_t>(n_s));
    for (auto& f : fractions) {
        // Ties at zero count one half so identical predictors land on 0.5.
        double hits = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double v = x[rng.below(n)];
            hits += v < 0.0 ? 1.0 : (v == 0.0 ? 0.5 : 0.0);
        }
        f = hits / static_cast<double>(n);
    }
    std::sort(fractions.begin(), fractions.end());

    // 1-based rank round(n_s * p), half to even, clamped to [1, n_s].
    auto at = [&](double p) {
        const double rank = std::clamp(std::nearbyint(n_s * p), 1.0, static_cast<double>(n_s));
        return fractions[static_cast<std::size_t>(rank) - 1];
    };
    BootstrapResult out;
    out.lower = at(alpha / 2.0);
    out.upper = at(1.0 - alpha / 2.0);
    out.n_s = n_s;
    out.alpha = alpha;
    out.verdict = verdict_for(out.lower, out.upper);
    return out;
}

ErrorSummary mean_relative_error(const WindowErrors& errors) {
    if (errors.metric != ErrorMetric::Relative) {
        fail(ErrorCode::InvalidArgument, "mean relative error needs relative window errors");
    }
    if (errors.per_window_error.empty()) fail(ErrorCode::InvalidArgument, "no window errors to summarize");
    ErrorSummary out;
    out.horizon = errors.horizon;
    out.window_count = static_cast<int>(errors.per_window_error.size());
    double sum = 0.0;
    for (double e : errors.per_window_error) sum += e;
    out.mean_relative_error = sum / out.window_count;
    return out;
}

std::string model_label(const ArimaOrder& order) {
    if (order == ArimaOrder{0, 1, 0}) return "RW";
    if (order == ArimaOrder{0, 1, 1}) return "EWMA";
    return order.name();
}

std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t model_index, int horizon) {
    return splitmix64(splitmix64(seed ^ (0x1000193ULL * (model_index + 1))) + static_cast<std::uint64_t>(horizon));
}

ComparisonReport compare_models(const Series& s, const CompareOptions& options) {
    const ArimaOrder rw{0, 1, 0};
    options.scheme.validate();
    if (options.horizons.empty()) fail(ErrorCode::InvalidArgument, "at least one horizon is required");
    for (int h : options.horizons) check_horizon(h);
    for (const auto& o : options.orders) o.validate();
    const auto rw_it = std::find(options.orders.begin(), options.orders.end(), rw);
    if (rw_it == options.orders.end()) {
        fail(ErrorCode::InvalidArgument, "model list must include the random walk benchmark (0,1,0)");
    }
    check_series_length(s, options.scheme.to);

    // The first (0,1,0) entry is the benchmark; all others are compared to it.
    std::vector<ArimaOrder> fitted{rw};
    for (auto it = options.orders.begin(); it != options.orders.end(); ++it) {
        if (it != rw_it) fitted.push_back(*it);
    }

    const auto lengths = options.scheme.lengths();
    const int max_h = *std::max_element(options.horizons.begin(), options.horizons.end());
    const auto z = s.values();

    // paths[window][model][partition]
    std::vector<std::vector<std::vector<Path>>> paths(lengths.size(), std::vector<std::vector<Path>>(fitted.size()));
    parallel_for(lengths.size() * fitted.size(), options.threads, [&](std::size_t job) {
        const std::size_t wi = job / fitted.size();
        const std::size_t mi = job % fitted.size();
        auto result = partition_paths(z, fitted[mi], lengths[wi], max_h, options.bc);
        paths[wi][mi] = std::move(result);
    });

    ComparisonReport report;
    report.options = options;

    for (int h : options.horizons) {
        BenchmarkRow row;
        row.horizon = h;
        row.relative.order = rw;
        row.relative.horizon = h;
        row.relative.metric = ErrorMetric::Relative;
        for (std::size_t wi = 0; wi < lengths.size(); ++wi) {
            const auto& rw_paths = paths[wi][0];
            const auto acc = accumulate(z, rw_paths, lengths[wi], h, ErrorMetric::Relative,
                                        [&](std::size_t i) { return rw_paths[i].has_value(); });
            row.relative.skipped_fits += acc.failed;
            if (acc.used == 0) {
                ++row.relative.skipped_windows;
                continue;
            }
            row.relative.window_lengths.push_back(lengths[wi]);
            row.relative.per_window_error.push_back(acc.sum / acc.used);
        }
        if (row.relative.per_window_error.empty()) fail(ErrorCode::Evaluation, "random walk: every window failed");
        row.summary = mean_relative_error(row.relative);
        report.benchmark.push_back(std::move(row));
    }

    for (std::size_t mi = 1; mi < fitted.size(); ++mi) {
        ModelComparison cmp;
        cmp.order = fitted[mi];
        cmp.label = model_label(fitted[mi]);
        for (std::size_t hi = 0; hi < options.horizons.size(); ++hi) {
            const int h = options.horizons[hi];
            HorizonComparison hc;
            hc.horizon = h;
            for (WindowErrors* we : {&hc.model_mse, &hc.benchmark_mse}) {
                we->horizon = h;
                we->metric = ErrorMetric::Mse;
            }
            hc.model_mse.order = fitted[mi];
            hc.benchmark_mse.order = rw;
            for (std::size_t wi = 0; wi < lengths.size(); ++wi) {
                const auto& mp = paths[wi][mi];
                const auto& bp = paths[wi][0];
                auto both = [&](std::size_t i) { return mp[i].has_value() && bp[i].has_value(); };
                const auto am = accumulate(z, mp, lengths[wi], h, ErrorMetric::Mse, both);
                const auto ab = accumulate(z, bp, lengths[wi], h, ErrorMetric::Mse, both);
                hc.model_mse.skipped_fits += am.failed;
                hc.benchmark_mse.skipped_fits += ab.failed;
                if (am.used == 0) {
                    ++hc.model_mse.skipped_windows;
                    ++hc.benchmark_mse.skipped_windows;
                    continue;
                }
                hc.model_mse.window_lengths.push_back(lengths[wi]);
                hc.model_mse.per_window_error.push_back(am.sum / am.used);
                hc.benchmark_mse.window_lengths.push_back(lengths[wi]);
                hc.benchmark_mse.per_window_error.push_back(ab.sum / ab.used);
            }
            hc.nde = nde(hc.model_mse, hc.benchmark_mse);
            if (hc.nde.epsilon_hat.empty()) {
                fail(ErrorCode::Evaluation, cmp.label + ": no window with nonzero errors at horizon " + std::to_string(h));
            }
            hc.bound = bootstrap_test(hc.nde, options.n_s, options.alpha, bootstrap_seed(options.seed, mi, h));
            cmp.horizons.push_back(std::move(hc));
        }
        report.models.push_back(std::move(cmp));
    }
    return report;
}

}  // namespace demandfc
