#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace demandfc {

/// Ordered, equally spaced demand observations.
///
/// Values are finite and there is at least one of them; the sampling
/// interval is strictly positive. Timestamps are epoch seconds.
class Series {
public:
    explicit Series(std::vector<double> values, std::int64_t start_time = 0,
                    std::int64_t interval = 3600);

    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] double back() const { return values_.back(); }
    [[nodiscard]] std::int64_t start_time() const noexcept { return start_time_; }
    [[nodiscard]] std::int64_t interval() const noexcept { return interval_; }

    /// Contiguous sub-series [first, first + count), keeping the time axis.
    [[nodiscard]] Series slice(std::size_t first, std::size_t count) const;
    /// Same time axis, new values (must be finite, same semantics as the ctor).
    [[nodiscard]] Series with_values(std::vector<double> values) const;

private:
    std::vector<double> values_;
    std::int64_t start_time_;
    std::int64_t interval_;
};

struct CorrelogramResult {
    std::vector<int> lags;
    std::vector<double> coefficients;
    double confidence_band = 0.0;
};

/// Quartiles and range are divided by the series mean. Kurtosis is raw
/// (normal reference 3). Skewness and kurtosis are absent for a constant series.
struct DistributionSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    double mean = 0;
    double coef_of_variation = 0;
    std::optional<double> skewness;
    std::optional<double> kurtosis;

    /// Throws DegenerateSeries when the input was constant.
    [[nodiscard]] double kurtosis_value() const;
};

/// d-th order differences; d == 0 returns the input unchanged.
Series difference(const Series& s, int d);
std::vector<double> difference(std::span<const double> x, int d);

/// Sample autocorrelation, biased (n-denominator) estimator, lags 0..max_lag.
CorrelogramResult acf(const Series& s, int max_lag);
std::vector<double> autocorrelations(std::span<const double> x, int max_lag);

/// Partial autocorrelation at lags 1..max_lag via Durbin-Levinson on the sample ACF.
CorrelogramResult pacf(const Series& s, int max_lag);

DistributionSummary summarize(const Series& s);

/// Linear interpolation between order statistics (type 7). `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

}  // namespace demandfc
