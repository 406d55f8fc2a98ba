#include "demandfc/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "demandfc/error.hpp"

namespace demandfc {

namespace {

void require_finite(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            fail(ErrorCode::InvalidArgument, "series value at index " + std::to_string(i) + " is not finite");
        }
    }
}

double mean_of(std::span<const double> x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

}  // namespace

Series::Series(std::vector<double> values, std::int64_t start_time, std::int64_t interval)
    : values_(std::move(values)), start_time_(start_time), interval_(interval) {
    if (values_.empty()) fail(ErrorCode::InvalidArgument, "series must contain at least one value");
    if (interval_ <= 0) fail(ErrorCode::InvalidArgument, "series interval must be positive");
    require_finite(values_);
}

Series Series::slice(std::size_t first, std::size_t count) const {
    if (first + count > values_.size() || count == 0) {
        fail(ErrorCode::Shape, "slice [" + std::to_string(first) + ", " + std::to_string(first + count) +
                                   ") out of range for series of length " + std::to_string(values_.size()));
    }
    std::vector<double> part(values_.begin() + static_cast<std::ptrdiff_t>(first),
                             values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return Series(std::move(part), start_time_ + static_cast<std::int64_t>(first) * interval_, interval_);
}

Series Series::with_values(std::vector<double> values) const {
    return Series(std::move(values), start_time_, interval_);
}

double DistributionSummary::kurtosis_value() const {
    if (!kurtosis) fail(ErrorCode::DegenerateSeries, "kurtosis undefined for a constant series");
    return *kurtosis;
}

std::vector<double> difference(std::span<const double> x, int d) {
    if (d < 0 || static_cast<std::size_t>(d) >= x.size()) {
        fail(ErrorCode::InvalidOrder, "differencing order " + std::to_string(d) + " invalid for length " +
                                          std::to_string(x.size()));
    }
    std::vector<double> out(x.begin(), x.end());
    for (int k = 0; k < d; ++k) {
        for (std::size_t i = 0; i + 1 < out.size(); ++i) out[i] = out[i + 1] - out[i];
        out.pop_back();
    }
    return out;
}

Series difference(const Series& s, int d) {
    auto out = difference(s.values(), d);
    return Series(std::move(out), s.start_time() + static_cast<std::int64_t>(d) * s.interval(), s.interval());
}

std::vector<double> autocorrelations(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
        fail(ErrorCode::InvalidArgument, "max_lag must be in [0, n)");
    }
    const double mu = mean_of(x);
    double c0 = 0.0;
    for (double v : x) c0 += (v - mu) * (v - mu);
    if (!(c0 > 0.0)) fail(ErrorCode::DegenerateSeries, "series has zero variance");

    std::vector<double> r(static_cast<std::size_t>(max_lag) + 1);
    r[0] = 1.0;
    for (int k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t t = static_cast<std::size_t>(k); t < n; ++t) ck += (x[t] - mu) * (x[t - k] - mu);
        r[static_cast<std::size_t>(k)] = std::clamp(ck / c0, -1.0, 1.0);
    }
    return r;
}

CorrelogramResult acf(const Series& s, int max_lag) {
    if (max_lag < 1) fail(ErrorCode::InvalidArgument, "max_lag must be positive");
    CorrelogramResult out;
    out.coefficients = autocorrelations(s.values(), max_lag);
    out.lags.resize(out.coefficients.size());
    std::iota(out.lags.begin(), out.lags.end(), 0);
    out.confidence_band = 1.96 / std::sqrt(static_cast<double>(s.size()));
    return out;
}

CorrelogramResult pacf(const Series& s, int max_lag) {
    if (max_lag < 1) fail(ErrorCode::InvalidArgument, "max_lag must be positive");
    const auto r = autocorrelations(s.values(), max_lag);

    CorrelogramResult out;
    out.confidence_band = 1.96 / std::sqrt(static_cast<double>(s.size()));
    std::vector<double> phi;  // phi_{k-1, 1..k-1}
    for (int k = 1; k <= max_lag; ++k) {
        double num = r[static_cast<std::size_t>(k)];
        double den = 1.0;
        for (int j = 1; j < k; ++j) {
            num -= phi[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(k - j)];
            den -= phi[static_cast<std::size_t>(j - 1)] * r[static_cast<std::size_t>(j)];
        }
        const double kappa = k == 1 ? r[1] : std::clamp(num / den, -1.0, 1.0);
        std::vector<double> next(static_cast<std::size_t>(k));
        for (int j = 1; j < k; ++j) {
            next[static_cast<std::size_t>(j - 1)] =
                phi[static_cast<std::size_t>(j - 1)] - kappa * phi[static_cast<std::size_t>(k - j - 1)];
        }
        next[static_cast<std::size_t>(k - 1)] = kappa;
        phi = std::move(next);
        out.lags.push_back(k);
        out.coefficients.push_back(kappa);
    }
    return out;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) fail(ErrorCode::InvalidArgument, "quantile of empty data");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

DistributionSummary summarize(const Series& s) {
    const auto x = s.values();
    if (x.size() < 3) fail(ErrorCode::InsufficientData, "summary needs at least 3 values");
    const double mu = mean_of(x);
    if (mu == 0.0) fail(ErrorCode::DegenerateSeries, "cannot normalize by a zero mean");

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());

    DistributionSummary out;
    out.mean = mu;
    out.min = sorted.front() / mu;
    out.q1 = quantile_sorted(sorted, 0.25) / mu;
    out.median = quantile_sorted(sorted, 0.5) / mu;
    out.q3 = quantile_sorted(sorted, 0.75) / mu;
    out.max = sorted.back() / mu;
    if (mu < 0.0) {
        // Dividing by a negative mean flips the order; keep the fields ascending.
        std::swap(out.min, out.max);
        std::swap(out.q1, out.q3);
    }

    const double n = static_cast<double>(x.size());
    double m2 = 0, m3 = 0, m4 = 0;
    for (double v : x) {
        const double e = v - mu;
        m2 += e * e;
        m3 += e * e * e;
        m4 += e * e * e * e;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Sample standard deviation (n - 1) for the coefficient of variation.
    out.coef_of_variation = std::sqrt(m2 * n / (n - 1.0)) / std::abs(mu);
    const double tiny = 1e-13 * std::abs(mu);
    if (m2 > tiny * tiny) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis = m4 / (m2 * m2);
    } else {
        out.coef_of_variation = 0.0;
    }
    return out;
}

}  // namespace demandfc
