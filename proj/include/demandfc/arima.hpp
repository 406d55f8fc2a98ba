#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demandfc/boxcox.hpp"
#include "demandfc/series.hpp"

namespace demandfc {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    static constexpr int kMaxComponent = 20;

    /// Throws InvalidOrder when a component is negative or above the cap.
    void validate() const;
    [[nodiscard]] bool is_random_walk() const { return p == 0 && d == 1 && q == 0; }
    [[nodiscard]] std::string name() const;

    friend bool operator==(const ArimaOrder&, const ArimaOrder&) = default;
};

/// Parses "p,d,q".
ArimaOrder parse_order(const std::string& text);

/// A fitted ARIMA(p,d,q) model in Box-Jenkins sign convention:
///
///   phi(B) (1-B)^d (Z_t - mean) = theta(B) a_t
///   phi(B)   = 1 - phi_1 B - ... - phi_p B^p
///   theta(B) = 1 - theta_1 B - ... - theta_q B^q
///
/// A mean is only estimated for d == 0. With this convention IMA(1,1)
/// with parameter theta is exponential smoothing with factor 1 - theta.
struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar;
    std::vector<double> ma;
    double mean = 0.0;
    double sigma2 = 0.0;
    double log_likelihood = 0.0;
    /// Order: ar..., ma..., mean (d == 0 only). NaN where the information matrix was singular.
    std::vector<double> coeff_std_errors;
    int iterations = 0;
    std::size_t n_used = 0;
};

struct Forecast {
    int horizon = 0;
    std::vector<double> point_forecasts;
};

struct FitOptions {
    int max_iterations = 500;
    double tolerance = 1e-8;
};

/// Exact Gaussian maximum likelihood fit, sigma2 concentrated out.
ArimaModel fit(const Series& s, const ArimaOrder& order, const FitOptions& options = {});
ArimaModel fit(std::span<const double> z, const ArimaOrder& order, const FitOptions& options = {});

/// Exact Gaussian log-likelihood of the differenced data at the given
/// coefficients with sigma2 at its conditional maximum. Returns -inf outside
/// the stationary/invertible region.
double arima_log_likelihood(std::span<const double> z, const ArimaOrder& order, std::span<const double> ar,
                            std::span<const double> ma, double mean = 0.0);

/// Builds a model from known coefficients (sigma2 from the conditional residuals).
ArimaModel make_model(const ArimaOrder& order, std::vector<double> ar, std::vector<double> ma,
                      double sigma2 = 1.0, double mean = 0.0);

/// Minimum-MSE h-step forecasts from the model recursion, future innovations zero.
/// With a Box-Cox parameter the model works on the transformed scale and the
/// point forecast is naively inverse-transformed.
Forecast forecast(const ArimaModel& m, const Series& s, int horizon,
                  std::optional<BoxCoxParam> bc = std::nullopt);
std::vector<double> forecast(const ArimaModel& m, std::span<const double> z, int horizon);

/// One-step in-sample innovations, pre-sample values zero. Length size(s) - d.
Series residuals(const ArimaModel& m, const Series& s);
std::vector<double> residuals(const ArimaModel& m, std::span<const double> z);

/// Deterministic synthetic path: Gaussian innovations, ARMA recursion with a
/// 200-sample burn-in, then d cumulative sums.
Series simulate(const ArimaOrder& order, std::span<const double> ar, std::span<const double> ma, double sigma,
                std::size_t n, std::uint64_t seed);

/// True when 1 - c_1 x - ... - c_k x^k has all roots outside the unit circle.
bool roots_outside_unit_circle(std::span<const double> coeffs);

}  // namespace demandfc
