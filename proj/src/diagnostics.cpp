#include "demandfc/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <string>

#include "demandfc/error.hpp"
#include "ols.hpp"

namespace demandfc {

namespace {

// Dickey-Fuller tau percentiles (Fuller 1976, as tabulated in Hamilton 1994
// Table B.6). Columns: 1%, 2.5%, 5%, 10%.
constexpr std::array<double, 6> kTableSizes{25, 50, 100, 250, 500, 1e5};
constexpr std::array<double, 4> kTableLevels{0.01, 0.025, 0.05, 0.10};

constexpr double kConstant[6][4] = {
    {-3.75, -3.33, -3.00, -2.63}, {-3.58, -3.22, -2.93, -2.60}, {-3.51, -3.17, -2.89, -2.58},
    {-3.46, -3.14, -2.88, -2.57}, {-3.44, -3.13, -2.87, -2.57}, {-3.43, -3.12, -2.86, -2.57},
};
constexpr double kConstantTrend[6][4] = {
    {-4.38, -3.95, -3.60, -3.24}, {-4.15, -3.80, -3.50, -3.18}, {-4.04, -3.73, -3.45, -3.15},
    {-3.99, -3.69, -3.43, -3.13}, {-3.98, -3.68, -3.42, -3.13}, {-3.96, -3.66, -3.41, -3.12},
};

}  // namespace

std::string to_string(DeterministicTerms terms) {
    return terms == DeterministicTerms::Constant ? "constant" : "constant_and_trend";
}

DeterministicTerms parse_terms(const std::string& text) {
    if (text == "constant" || text == "c") return DeterministicTerms::Constant;
    if (text == "constant_and_trend" || text == "ct" || text == "trend") return DeterministicTerms::ConstantAndTrend;
    fail(ErrorCode::Parse, "unknown deterministic terms '" + text + "'");
}

int default_adf_lags(std::size_t n) {
    return n < 2 ? 0 : static_cast<int>(std::trunc(std::cbrt(static_cast<double>(n) - 1.0)));
}

double adf_critical_value(DeterministicTerms terms, double level, double n) {
    std::size_t col = kTableLevels.size();
    for (std::size_t i = 0; i < kTableLevels.size(); ++i)
        if (std::abs(kTableLevels[i] - level) < 1e-12) col = i;
    if (col == kTableLevels.size()) {
        fail(ErrorCode::InvalidArgument, "no tabulated critical value at level " + std::to_string(level));
    }
    const auto& table = terms == DeterministicTerms::Constant ? kConstant : kConstantTrend;
    if (n <= kTableSizes.front()) return table[0][col];
    if (n >= kTableSizes.back()) return table[kTableSizes.size() - 1][col];
    std::size_t hi = 1;
    while (kTableSizes[hi] < n) ++hi;
    const double frac = (n - kTableSizes[hi - 1]) / (kTableSizes[hi] - kTableSizes[hi - 1]);
    return table[hi - 1][col] + frac * (table[hi][col] - table[hi - 1][col]);
}

AdfResult adf_test(const Series& s, int lags, DeterministicTerms terms) {
    if (lags < 0) fail(ErrorCode::InvalidArgument, "ADF lag count must be non-negative");
    const auto z = s.values();
    const std::size_t k = static_cast<std::size_t>(lags);
    if (z.size() <= k + 10) {
        fail(ErrorCode::InsufficientData, "ADF test with " + std::to_string(lags) + " lags needs more than " +
                                              std::to_string(k + 10) + " observations");
    }
    const auto dz = difference(z, 1);
    const std::size_t rows = dz.size() - k;
    const bool trend = terms == DeterministicTerms::ConstantAndTrend;
    const auto cols = static_cast<Eigen::Index>(2 + (trend ? 1 : 0) + k);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), cols);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t j = r + k;  // index into dz
        const auto row = static_cast<Eigen::Index>(r);
        Eigen::Index c = 0;
        y(row) = dz[j];
        x(row, c++) = z[j];  // lagged level
        x(row, c++) = 1.0;
        if (trend) x(row, c++) = static_cast<double>(j + 1);
        for (std::size_t i = 1; i <= k; ++i) x(row, c++) = dz[j - i];
    }
    const auto fit = detail::ols(x, y);

    AdfResult out;
    out.t_statistic = fit.beta(0) / fit.std_errors(0);
    out.lags_used = lags;
    out.deterministic_terms = terms;
    out.n_obs = rows;
    const double table_n = static_cast<double>(dz.size());
    for (double level : {0.01, 0.05, 0.10}) out.critical_values[level] = adf_critical_value(terms, level, table_n);
    out.reject_unit_root = out.t_statistic < out.critical_values.at(0.05);
    return out;
}

double chi_squared_upper_tail(double q, double df) {
    if (!(df > 0.0)) fail(ErrorCode::InvalidArgument, "chi-squared degrees of freedom must be positive");
    if (std::isnan(q)) fail(ErrorCode::InvalidArgument, "chi-squared statistic is NaN");
    if (q <= 0.0) return 1.0;
    return boost::math::gamma_q(df / 2.0, q / 2.0);
}

PortmanteauResult ljung_box_from_statistic(double q_statistic, int df) {
    if (df < 1) fail(ErrorCode::InvalidArgument, "Ljung-Box degrees of freedom must be >= 1");
    if (!(q_statistic >= 0.0)) fail(ErrorCode::InvalidArgument, "Ljung-Box statistic must be >= 0");
    PortmanteauResult out;
    out.q_statistic = q_statistic;
    out.df = df;
    out.p_value = chi_squared_upper_tail(q_statistic, df);
    return out;
}

PortmanteauResult ljung_box(const Series& residuals, int max_lag, int fitted_params) {
    const std::size_t n = residuals.size();
    if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= n) {
        fail(ErrorCode::InvalidArgument, "Ljung-Box max_lag must be in [1, n)");
    }
    if (fitted_params < 0) fail(ErrorCode::InvalidArgument, "fitted_params must be >= 0");
    const int df = max_lag - fitted_params;
    if (df < 1) fail(ErrorCode::InvalidArgument, "Ljung-Box degrees of freedom max_lag - fitted_params < 1");

    double q = 0.0;
    try {
        const auto r = autocorrelations(residuals.values(), max_lag);
        const double nn = static_cast<double>(n);
        for (int k = 1; k <= max_lag; ++k) {
            q += r[static_cast<std::size_t>(k)] * r[static_cast<std::size_t>(k)] / (nn - k);
        }
        q *= nn * (nn + 2.0);
    } catch (const Error& e) {
        // Constant residuals carry no autocorrelation.
        if (e.code() != ErrorCode::DegenerateSeries) throw;
    }
    auto out = ljung_box_from_statistic(q, df);
    out.max_lag = max_lag;
    return out;
}

ArchTestResult arch_test(const Series& residuals, int s) {
    if (s < 1) fail(ErrorCode::InvalidArgument, "ARCH test order must be positive");
    const std::size_t n = residuals.size();
    const auto order = static_cast<std::size_t>(s);
    if (n <= order + 10) {
        fail(ErrorCode::InsufficientData, "ARCH test of order " + std::to_string(s) + " needs more than " +
                                              std::to_string(order + 10) + " residuals");
    }
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = residuals[i] * residuals[i];

    const std::size_t rows = n - order;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(order + 1));
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + order;
        const auto row = static_cast<Eigen::Index>(r);
        y(row) = sq[t];
        x(row, 0) = 1.0;
        for (std::size_t i = 1; i <= order; ++i) x(row, static_cast<Eigen::Index>(i)) = sq[t - i];
    }
    const auto fit = detail::ols(x, y);
    if (!(fit.sst > 0.0)) fail(ErrorCode::Rank, "squared residuals are constant");

    ArchTestResult out;
    out.n = n;
    out.s = s;
    out.r_squared = std::clamp(fit.r_squared(), 0.0, 1.0);
    out.lm_statistic = static_cast<double>(n - order) * out.r_squared;
    out.p_value = chi_squared_upper_tail(out.lm_statistic, s);
    out.heteroskedastic_at_5pct = out.p_value < 0.05;
    return out;
}

}  // namespace demandfc
