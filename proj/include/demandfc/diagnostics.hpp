#pragma once

#include <map>
#include <span>
#include <string>

#include "demandfc/series.hpp"

namespace demandfc {

enum class DeterministicTerms { Constant, ConstantAndTrend };

std::string to_string(DeterministicTerms terms);
DeterministicTerms parse_terms(const std::string& text);

struct AdfResult {
    double t_statistic = 0.0;
    int lags_used = 0;
    DeterministicTerms deterministic_terms = DeterministicTerms::ConstantAndTrend;
    std::size_t n_obs = 0;
    /// Keyed by significance level: 0.01, 0.05, 0.10.
    std::map<double, double> critical_values;
    bool reject_unit_root = false;
};

struct PortmanteauResult {
    double q_statistic = 0.0;
    int df = 0;
    int max_lag = 0;
    double p_value = 1.0;
};

struct ArchTestResult {
    std::size_t n = 0;
    int s = 0;
    double r_squared = 0.0;
    double lm_statistic = 0.0;
    double p_value = 1.0;
    bool heteroskedastic_at_5pct = false;
};

/// Default augmentation lag, trunc((n - 1)^(1/3)).
int default_adf_lags(std::size_t n);

/// Dickey-Fuller tau critical value, interpolated linearly in n between the
/// tabulated sample sizes {25, 50, 100, 250, 500, inf}. `level` is one of
/// 0.01, 0.025, 0.05, 0.10.
double adf_critical_value(DeterministicTerms terms, double level, double n);

AdfResult adf_test(const Series& s, int lags, DeterministicTerms terms = DeterministicTerms::ConstantAndTrend);

/// Upper tail of the chi-squared distribution, 1 - F(q; df).
double chi_squared_upper_tail(double q, double df);

PortmanteauResult ljung_box(const Series& residuals, int max_lag, int fitted_params = 0);
/// p-value side of the portmanteau test for a precomputed statistic.
PortmanteauResult ljung_box_from_statistic(double q_statistic, int df);

/// Engle LM test: squared residuals regressed on an intercept and s of their lags.
ArchTestResult arch_test(const Series& residuals, int s);

}  // namespace demandfc
