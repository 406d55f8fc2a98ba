#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "demandfc/arima.hpp"
#include "demandfc/boxcox.hpp"
#include "demandfc/series.hpp"

namespace demandfc {

enum class ErrorMetric { Mse, Relative };

std::string to_string(ErrorMetric metric);
ErrorMetric parse_metric(const std::string& text);

/// Window lengths from, from + step, ..., up to and including `to` when it is on the grid.
struct WindowScheme {
    int from = 100;
    int to = 149;
    int step = 1;

    void validate() const;
    [[nodiscard]] int count() const { return (to - from) / step + 1; }
    [[nodiscard]] std::vector<int> lengths() const;
};

/// Mean forecast error at each window length for one (model, horizon) pair.
struct WindowErrors {
    ArimaOrder order;
    int horizon = 1;
    ErrorMetric metric = ErrorMetric::Mse;
    std::vector<int> window_lengths;     // parallel to per_window_error
    std::vector<double> per_window_error;
    int skipped_fits = 0;                // partitions dropped for failed fits
    int skipped_windows = 0;             // window lengths with no usable partition
};

/// Log ratios ln(e_model / e_benchmark), one per window length.
struct NdeSample {
    std::vector<int> window_lengths;
    std::vector<double> epsilon_hat;
    int excluded = 0;  // windows where either error was zero
};

enum class Verdict { ModelBetter, ModelWorse, OnPar };

std::string to_string(Verdict verdict);

/// Percentile bound on F = Pr(e_model <= e_benchmark).
struct BootstrapResult {
    double lower = 0.0;
    double upper = 0.0;
    int n_s = 0;
    double alpha = 0.05;
    Verdict verdict = Verdict::OnPar;
};

struct ErrorSummary {
    double mean_relative_error = 0.0;
    int horizon = 1;
    int window_count = 0;
};

/// Result of evaluating one window length.
struct WindowError {
    double mean_error = 0.0;
    int partitions_used = 0;
    int skipped_fits = 0;
};

/// Number of non-overlapping adjacent partitions for a window length,
/// floor((length - window - 2) / window) + 1.
std::size_t partition_count(std::size_t length, int window);

/// Splits the series into adjacent windows, refits the model on each, and
/// scores the h-step forecast against the observation h steps after the
/// window end. Partitions whose target falls past the end are not scored.
WindowError window_errors(const Series& s, const ArimaOrder& order, int window, int horizon, ErrorMetric metric,
                          std::optional<BoxCoxParam> bc = std::nullopt);

WindowErrors evaluate_scheme(const Series& s, const ArimaOrder& order, const WindowScheme& scheme, int horizon,
                             ErrorMetric metric, std::optional<BoxCoxParam> bc = std::nullopt);

NdeSample nde(const WindowErrors& model, const WindowErrors& benchmark);

/// Percentile bootstrap of the fraction of non-positive log ratios.
/// Resampling uses Rng (mt19937_64, Lemire bounded draws) seeded with `seed`.
BootstrapResult bootstrap_test(const NdeSample& sample, int n_s, double alpha, std::uint64_t seed);

Verdict verdict_for(double lower, double upper);

ErrorSummary mean_relative_error(const WindowErrors& errors);

struct CompareOptions {
    std::vector<ArimaOrder> orders;  // must include (0,1,0)
    WindowScheme scheme;
    std::vector<int> horizons{1, 2, 3};
    std::optional<BoxCoxParam> bc;
    int n_s = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
};

struct HorizonComparison {
    int horizon = 1;
    WindowErrors model_mse;
    WindowErrors benchmark_mse;
    NdeSample nde;
    BootstrapResult bound;
};

struct ModelComparison {
    ArimaOrder order;
    std::string label;
    std::vector<HorizonComparison> horizons;
};

struct BenchmarkRow {
    int horizon = 1;
    WindowErrors relative;
    ErrorSummary summary;
};

struct ComparisonReport {
    CompareOptions options;
    std::vector<BenchmarkRow> benchmark;
    std::vector<ModelComparison> models;
};

/// "RW" for (0,1,0), "EWMA" for (0,1,1), otherwise "ARIMA(p,d,q)".
std::string model_label(const ArimaOrder& order);

/// Full comparison: benchmark relative-error rows plus paired MSE, NDE and
/// bootstrap bound for every other model at every horizon. A partition whose
/// fit fails for either model is dropped from both sides of that pair.
ComparisonReport compare_models(const Series& s, const CompareOptions& options);

/// Seed for the bootstrap of model `model_index` at `horizon`.
std::uint64_t bootstrap_seed(std::uint64_t seed, std::size_t model_index, int horizon);

}  // namespace demandfc
