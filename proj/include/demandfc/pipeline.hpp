#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "demandfc/arima.hpp"
#include "demandfc/backtest.hpp"
#include "demandfc/boxcox.hpp"
#include "demandfc/diagnostics.hpp"
#include "demandfc/series.hpp"

namespace demandfc {

// ---------------------------------------------------------------- ingestion

struct TraceRecord {
    std::int64_t timestamp;  // epoch seconds
    double value;
};

enum class Aggregation { BucketMean, None };

struct IngestOptions {
    std::int64_t bucket_seconds = 3600;
    Aggregation aggregation = Aggregation::BucketMean;
    /// Empty buckets fail by default; when set they are dropped and counted.
    bool skip_empty = false;
};

struct IngestResult {
    Series series;
    std::size_t records = 0;
    std::size_t empty_buckets_skipped = 0;
};

/// ISO-8601 ("2006-01-02T03:04:05Z", optional fraction and offset, 'T' or
/// space separator, date only) or epoch seconds.
std::optional<std::int64_t> parse_timestamp(const std::string& text);

/// Two-column `timestamp,value` CSV. A header row is detected and skipped.
/// Throws Parse with the 1-based line number of the first bad row.
std::vector<TraceRecord> parse_trace(const std::string& csv_text);
std::vector<TraceRecord> read_trace(const std::string& path);

/// Buckets records into intervals aligned to multiples of bucket_seconds
/// (calendar hours for 3600) and averages each bucket.
IngestResult aggregate(const std::vector<TraceRecord>& records, const IngestOptions& options = {});
IngestResult ingest(const std::string& path, const IngestOptions& options = {});

/// Writes `timestamp,value` rows with epoch-second timestamps.
std::string series_to_csv(const Series& s);

// ------------------------------------------------------------ configuration

enum class BoxCoxMode { None, Auto, Fixed };

/// Inclusive index range [first, last].
struct IndexSpan {
    std::size_t first = 0;
    std::size_t last = 0;
    [[nodiscard]] std::size_t size() const { return last - first + 1; }
};

struct RunConfig {
    std::string input;
    std::string output;
    IngestOptions ingest;

    std::optional<IndexSpan> sample_span;  // structure identification only
    std::optional<IndexSpan> eval_span;    // default: everything after the sample span

    BoxCoxMode boxcox = BoxCoxMode::None;
    double lambda = 1.0;
    LambdaGrid lambda_grid;

    std::vector<ArimaOrder> orders{{0, 1, 0}, {0, 1, 1}, {1, 1, 0}};
    WindowScheme scheme;
    std::vector<int> horizons{1, 2, 3};
    int n_s = 1000;
    double alpha = 0.05;
    std::uint64_t seed = 1;
    ErrorMetric metric = ErrorMetric::Mse;

    std::optional<int> adf_lags;
    DeterministicTerms adf_terms = DeterministicTerms::ConstantAndTrend;
    int acf_lags = 20;
    int lb_lags = 100;
    int lb_fitted_params = 0;
    int arch_order = 3;
    int threads = 0;

    /// Applies one `key = value` setting. Unknown keys and bad values throw Parse.
    void set(const std::string& key, const std::string& value);
    /// Reads `key = value` lines; '#' starts a comment.
    void load_file(const std::string& path);
    void load_text(const std::string& text);
    void validate() const;
};

/// Keys accepted by RunConfig::set.
const std::vector<std::string>& config_keys();

// ----------------------------------------------------------------- pipeline

struct OutputFile {
    std::string name;  // suffix appended to the output stem, e.g. "_nde.csv"
    std::string content;
};

struct PipelineOutput {
    std::string report_json;
    std::string table_text;
    std::vector<OutputFile> files;
};

/// Loads the input named in the config (ingest + aggregation).
IngestResult load_input(const RunConfig& cfg);

/// ingest -> optional lambda selection on the sample span -> diagnostics on
/// the sample span -> model comparison on the evaluation span.
PipelineOutput run_pipeline(const RunConfig& cfg);
PipelineOutput run_pipeline(const RunConfig& cfg, const Series& series);

/// Diagnostics document (summary, ADF, ACF/PACF, Ljung-Box and ARCH on the
/// residuals of every configured model) for the sample span, or the whole
/// series when no sample span is configured.
std::string diagnose(const RunConfig& cfg, const Series& series);

/// Fits every configured order on the sample span (whole series when unset),
/// on the Box-Cox scale when one is configured. JSON array of models.
std::string fit_models(const RunConfig& cfg, const Series& series);

/// Window errors for every configured order and horizon on the evaluation span.
PipelineOutput evaluate(const RunConfig& cfg, const Series& series);

/// Bootstrap on a precomputed NDE CSV (columns detected from the header).
std::string boottest(const std::string& nde_csv_text, const RunConfig& cfg, const std::string& model_filter,
                     std::optional<int> horizon_filter);
NdeSample parse_nde_csv(const std::string& text, const std::string& model_filter, std::optional<int> horizon_filter);

std::string model_to_json(const ArimaModel& m);

/// Aligned plain-text table: one RW relative-error row, one bound row per model.
std::string comparison_table(const ComparisonReport& report);

/// Writes the report to cfg.output and the extra files alongside it.
void write_outputs(const std::string& output_path, const PipelineOutput& out);

std::string read_text_file(const std::string& path);

}  // namespace demandfc
