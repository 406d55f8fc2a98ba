#include "demandfc/arima.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "demandfc/error.hpp"
#include "demandfc/rng.hpp"
#include "optimize.hpp"

namespace demandfc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMaxUnconstrained = 10.0;
constexpr std::size_t kBurnIn = 200;

// Partial autocorrelations -> coefficients of 1 - c_1 x - ... - c_k x^k.
std::vector<double> step_up(std::span<const double> kappa) {
    std::vector<double> c;
    c.reserve(kappa.size());
    for (std::size_t k = 0; k < kappa.size(); ++k) {
        std::vector<double> next(k + 1);
        for (std::size_t j = 0; j < k; ++j) next[j] = c[j] - kappa[k] * c[k - 1 - j];
        next[k] = kappa[k];
        c = std::move(next);
    }
    return c;
}

// Inverse of step_up; nullopt when some |kappa| >= 1.
std::optional<std::vector<double>> step_down(std::span<const double> coeffs) {
    std::vector<double> c(coeffs.begin(), coeffs.end());
    std::vector<double> kappa(c.size());
    for (std::size_t k = c.size(); k-- > 0;) {
        const double kk = c[k];
        if (!(std::abs(kk) < 1.0)) return std::nullopt;
        kappa[k] = kk;
        const double denom = 1.0 - kk * kk;
        std::vector<double> prev(k);
        for (std::size_t j = 0; j < k; ++j) prev[j] = (c[j] + kk * c[k - 1 - j]) / denom;
        c = std::move(prev);
    }
    return kappa;
}

std::vector<double> constrain(std::span<const double> u) {
    std::vector<double> kappa(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) kappa[i] = std::tanh(std::clamp(u[i], -kMaxUnconstrained, kMaxUnconstrained));
    return step_up(kappa);
}

struct KalmanSums {
    double ssq = 0.0;     // sum v_t^2 / F_t
    double sum_log_f = 0.0;
    bool ok = false;
};

// Exact Gaussian likelihood pieces for the zero-mean ARMA(p,q) series w with
// unit innovation variance (Harvey state-space form, stationary initial state).
KalmanSums arma_kalman(std::span<const double> w, std::span<const double> phi, std::span<const double> theta) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t r = std::max(p, q + 1);

    std::vector<double> ph(r, 0.0), rv(r, 0.0);
    std::copy(phi.begin(), phi.end(), ph.begin());
    rv[0] = 1.0;
    for (std::size_t j = 0; j < q; ++j) rv[j + 1] = -theta[j];

    // Stationary covariance P = T P T' + R R' by the doubling recursion.
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t i = 0; i < r; ++i) {
        tm(static_cast<Eigen::Index>(i), 0) = ph[i];
        if (i + 1 < r) tm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 1.0;
    }
    Eigen::Map<const Eigen::VectorXd> rvec(rv.data(), static_cast<Eigen::Index>(r));
    Eigen::MatrixXd pm = rvec * rvec.transpose();
    Eigen::MatrixXd am = tm;
    for (int it = 0; it < 80; ++it) {
        pm += am * pm * am.transpose();
        am = am * am;
        const double norm = am.cwiseAbs().maxCoeff();
        if (!std::isfinite(norm) || !pm.allFinite()) return {};
        if (norm < 1e-16) break;
    }

    std::vector<double> pcov(r * r), tmp(r * r), state(r, 0.0);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) pcov[i * r + j] = pm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));

    KalmanSums out;
    for (double obs : w) {
        const double f = pcov[0];
        if (!(f > 0.0) || !std::isfinite(f)) return {};
        const double v = obs - state[0];
        out.ssq += v * v / f;
        out.sum_log_f += std::log(f);

        // Measurement update.
        const double gain_scale = v / f;
        for (std::size_t i = 0; i < r; ++i) state[i] += pcov[i * r] * gain_scale;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) tmp[i * r + j] = pcov[i * r + j] - pcov[i * r] * pcov[j] / f;

        // Time update: state <- T state, P <- T P T' + R R'.
        const double head = state[0];
        for (std::size_t i = 0; i < r; ++i) state[i] = ph[i] * head + (i + 1 < r ? state[i + 1] : 0.0);
        // M = T * tmp, stored in pcov.
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                pcov[i * r + j] = ph[i] * tmp[j] + (i + 1 < r ? tmp[(i + 1) * r + j] : 0.0);
        // tmp = M * T' + R R'.
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                tmp[i * r + j] = pcov[i * r] * ph[j] + (j + 1 < r ? pcov[i * r + j + 1] : 0.0) + rv[i] * rv[j];
        std::swap(pcov, tmp);
    }
    out.ok = true;
    return out;
}

struct ConcentratedLikelihood {
    double log_likelihood = -kInf;
    double sigma2 = 0.0;
};

ConcentratedLikelihood concentrated(std::span<const double> w, std::span<const double> phi,
                                    std::span<const double> theta) {
    const auto sums = arma_kalman(w, phi, theta);
    if (!sums.ok) return {};
    const double n = static_cast<double>(w.size());
    const double sigma2 = sums.ssq / n;
    if (!(sigma2 > 0.0)) return {};
    const double ll = -0.5 * (n * std::log(2.0 * std::numbers::pi * sigma2) + n + sums.sum_log_f);
    return {ll, sigma2};
}

// Negative concentrated log-likelihood without the additive constants, which
// keeps its magnitude (and rounding noise) small for the optimizer.
double profile_objective(std::span<const double> w, std::span<const double> phi, std::span<const double> theta) {
    const auto sums = arma_kalman(w, phi, theta);
    if (!sums.ok || !(sums.ssq > 0.0)) return kInf;
    const double n = static_cast<double>(w.size());
    return 0.5 * (n * std::log(sums.ssq / n) + sums.sum_log_f);
}

// Conditional innovations: pre-sample values and innovations are zero.
std::vector<double> conditional_innovations(std::span<const double> w, std::span<const double> phi,
                                            std::span<const double> theta) {
    std::vector<double> a(w.size());
    for (std::size_t t = 0; t < w.size(); ++t) {
        double v = w[t];
        for (std::size_t i = 0; i < phi.size() && i < t; ++i) v -= phi[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < theta.size() && j < t; ++j) v += theta[j] * a[t - 1 - j];
        a[t] = v;
    }
    return a;
}

double css_objective(std::span<const double> w, std::span<const double> phi, std::span<const double> theta) {
    // Condition on the first p observations.
    const std::size_t p = phi.size();
    std::vector<double> a(w.size(), 0.0);
    double ss = 0.0;
    for (std::size_t t = p; t < w.size(); ++t) {
        double v = w[t];
        for (std::size_t i = 0; i < p; ++i) v -= phi[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < theta.size() && t >= p + j + 1; ++j) v += theta[j] * a[t - 1 - j];
        a[t] = v;
        ss += v * v;
    }
    const double m = static_cast<double>(w.size() - p);
    if (!(ss > 0.0) || !std::isfinite(ss)) return kInf;
    return 0.5 * m * std::log(ss / m);
}

struct Layout {
    std::size_t p, q;
    bool mean;
    [[nodiscard]] std::size_t size() const { return p + q + (mean ? 1 : 0); }
};

struct Coefficients {
    std::vector<double> ar, ma;
    double mean = 0.0;
};

Coefficients decode(const Layout& lay, const std::vector<double>& x) {
    Coefficients c;
    c.ar = constrain(std::span(x).subspan(0, lay.p));
    c.ma = constrain(std::span(x).subspan(lay.p, lay.q));
    if (lay.mean) c.mean = x[lay.p + lay.q];
    return c;
}

std::vector<double> demeaned(std::span<const double> w, double mean) {
    std::vector<double> out(w.begin(), w.end());
    if (mean != 0.0)
        for (double& v : out) v -= mean;
    return out;
}

std::vector<double> standard_errors(std::span<const double> w, const Layout& lay, const Coefficients& c) {
    const std::size_t k = lay.size();
    std::vector<double> theta0(c.ar);
    theta0.insert(theta0.end(), c.ma.begin(), c.ma.end());
    if (lay.mean) theta0.push_back(c.mean);

    auto negll = [&](const std::vector<double>& v) {
        std::span<const double> ar(v.data(), lay.p);
        std::span<const double> ma(v.data() + lay.p, lay.q);
        if (!roots_outside_unit_circle(ar) || !roots_outside_unit_circle(ma)) return kInf;
        const double mu = lay.mean ? v[lay.p + lay.q] : 0.0;
        return -concentrated(demeaned(w, mu), ar, ma).log_likelihood;
    };

    std::vector<double> steps(k);
    for (std::size_t i = 0; i < k; ++i) steps[i] = 1e-4 * std::max(1.0, std::abs(theta0[i]));

    Eigen::MatrixXd hess(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    const double f0 = negll(theta0);
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        auto v = theta0;
        v[i] += di;
        v[j] += dj;
        return negll(v);
    };
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            double h;
            if (i == j) {
                h = (at(i, steps[i], i, 0) - 2.0 * f0 + at(i, -steps[i], i, 0)) / (steps[i] * steps[i]);
            } else {
                h = (at(i, steps[i], j, steps[j]) - at(i, steps[i], j, -steps[j]) - at(i, -steps[i], j, steps[j]) +
                     at(i, -steps[i], j, -steps[j])) /
                    (4.0 * steps[i] * steps[j]);
            }
            hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h;
            hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = h;
        }
    }
    std::vector<double> se(k, std::numeric_limits<double>::quiet_NaN());
    if (!hess.allFinite()) return se;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return se;
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)));
    for (std::size_t i = 0; i < k; ++i) {
        const double var = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
        if (var > 0.0) se[i] = std::sqrt(var);
    }
    return se;
}

// Differences of orders 0..d, each as its own vector.
std::vector<std::vector<double>> difference_ladder(std::span<const double> z, int d) {
    std::vector<std::vector<double>> out;
    out.emplace_back(z.begin(), z.end());
    for (int k = 0; k < d; ++k) out.push_back(difference(std::span<const double>(out.back()), 1));
    return out;
}

}  // namespace

void ArimaOrder::validate() const {
    for (int v : {p, d, q}) {
        if (v < 0 || v > kMaxComponent) {
            fail(ErrorCode::InvalidOrder, "ARIMA order " + name() + " outside [0, " + std::to_string(kMaxComponent) + "]");
        }
    }
}

std::string ArimaOrder::name() const {
    std::ostringstream os;
    os << "ARIMA(" << p << "," << d << "," << q << ")";
    return os.str();
}

ArimaOrder parse_order(const std::string& text) {
    ArimaOrder order;
    char c1 = 0, c2 = 0;
    std::istringstream is(text);
    if (!(is >> order.p >> c1 >> order.d >> c2 >> order.q) || c1 != ',' || c2 != ',' || !(is >> std::ws).eof()) {
        fail(ErrorCode::Parse, "cannot parse ARIMA order '" + text + "', expected p,d,q");
    }
    order.validate();
    return order;
}

bool roots_outside_unit_circle(std::span<const double> coeffs) { return step_down(coeffs).has_value(); }

double arima_log_likelihood(std::span<const double> z, const ArimaOrder& order, std::span<const double> ar,
                            std::span<const double> ma, double mean) {
    order.validate();
    if (ar.size() != static_cast<std::size_t>(order.p) || ma.size() != static_cast<std::size_t>(order.q)) {
        fail(ErrorCode::Shape, "coefficient counts do not match " + order.name());
    }
    if (!roots_outside_unit_circle(ar) || !roots_outside_unit_circle(ma)) return -kInf;
    const auto w = difference(z, order.d);
    return concentrated(demeaned(w, order.d == 0 ? mean : 0.0), ar, ma).log_likelihood;
}

ArimaModel fit(std::span<const double> z, const ArimaOrder& order, const FitOptions& options) {
    order.validate();
    const auto min_len = static_cast<std::size_t>(5 * (order.p + order.q) + order.d + 10);
    if (z.size() < min_len) {
        fail(ErrorCode::InsufficientData, order.name() + " needs at least " + std::to_string(min_len) +
                                              " observations, got " + std::to_string(z.size()));
    }
    const auto w = difference(z, order.d);
    const double n = static_cast<double>(w.size());
    const Layout lay{static_cast<std::size_t>(order.p), static_cast<std::size_t>(order.q), order.d == 0};

    ArimaModel model;
    model.order = order;
    model.n_used = w.size();
    model.ar.assign(lay.p, 0.0);
    model.ma.assign(lay.q, 0.0);

    const double sample_mean = std::accumulate(w.begin(), w.end(), 0.0) / n;
    const double start_mean = lay.mean ? sample_mean : 0.0;
    double spread = 0.0;
    for (double v : w) spread = std::max(spread, std::abs(v - start_mean));

    if (spread == 0.0) {
        // Exactly deterministic after differencing: zero innovations.
        model.mean = start_mean;
        model.sigma2 = 0.0;
        model.log_likelihood = kInf;
        model.coeff_std_errors.assign(lay.size(), std::numeric_limits<double>::quiet_NaN());
        return model;
    }

    if (lay.p + lay.q == 0) {
        double ss = 0.0;
        for (double v : w) ss += (v - start_mean) * (v - start_mean);
        model.mean = start_mean;
        model.sigma2 = ss / n;
        model.log_likelihood = -0.5 * n * (std::log(2.0 * std::numbers::pi * model.sigma2) + 1.0);
        if (lay.mean) model.coeff_std_errors = {std::sqrt(model.sigma2 / n)};
        return model;
    }

    // Optimize on unit-scale data so the objective and its finite differences
    // do not depend on the units of the series.
    double rms = 0.0;
    for (double v : w) rms += (v - start_mean) * (v - start_mean);
    rms = std::sqrt(rms / n);
    std::vector<double> unit(w);
    for (double& v : unit) v /= rms;

    auto css = [&](const std::vector<double>& x) {
        const auto c = decode(lay, x);
        return css_objective(demeaned(unit, c.mean), c.ar, c.ma);
    };
    auto ml = [&](const std::vector<double>& x) {
        const auto c = decode(lay, x);
        return profile_objective(demeaned(unit, c.mean), c.ar, c.ma);
    };

    std::vector<double> x0(lay.size(), 0.0);
    if (lay.mean) x0.back() = start_mean / rms;

    auto init = detail::minimize_bfgs(css, x0, options.max_iterations, options.tolerance);
    std::vector<double> start = std::isfinite(ml(init.x)) ? init.x : x0;
    auto best = detail::minimize_bfgs(ml, start, options.max_iterations, options.tolerance);
    if (!best.converged || !std::isfinite(best.value)) {
        fail(ErrorCode::Convergence, order.name() + " maximum likelihood did not converge after " +
                                         std::to_string(best.iterations) + " iterations");
    }
    best.x = detail::polish_newton(ml, best.x);
    best.value = ml(best.x);

    auto c = decode(lay, best.x);
    c.mean *= rms;
    const auto lik = concentrated(demeaned(unit, c.mean / rms), c.ar, c.ma);
    model.ar = c.ar;
    model.ma = c.ma;
    model.mean = c.mean;
    model.sigma2 = lik.sigma2 * rms * rms;
    model.log_likelihood = lik.log_likelihood - n * std::log(rms);
    model.iterations = best.iterations;
    model.coeff_std_errors = standard_errors(w, lay, c);
    return model;
}

ArimaModel fit(const Series& s, const ArimaOrder& order, const FitOptions& options) {
    return fit(s.values(), order, options);
}

ArimaModel make_model(const ArimaOrder& order, std::vector<double> ar, std::vector<double> ma, double sigma2,
                      double mean) {
    order.validate();
    if (ar.size() != static_cast<std::size_t>(order.p) || ma.size() != static_cast<std::size_t>(order.q)) {
        fail(ErrorCode::Shape, "coefficient counts do not match " + order.name());
    }
    if (!roots_outside_unit_circle(ar)) fail(ErrorCode::InvalidArgument, "AR coefficients are not stationary");
    if (!roots_outside_unit_circle(ma)) fail(ErrorCode::InvalidArgument, "MA coefficients are not invertible");
    if (!(sigma2 >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma2 must be non-negative");
    ArimaModel m;
    m.order = order;
    m.ar = std::move(ar);
    m.ma = std::move(ma);
    m.sigma2 = sigma2;
    m.mean = order.d == 0 ? mean : 0.0;
    m.log_likelihood = std::numeric_limits<double>::quiet_NaN();
    return m;
}

std::vector<double> residuals(const ArimaModel& m, std::span<const double> z) {
    if (z.size() <= static_cast<std::size_t>(m.order.d)) {
        fail(ErrorCode::Shape, "series too short for differencing order " + std::to_string(m.order.d));
    }
    const auto w = demeaned(difference(z, m.order.d), m.mean);
    return conditional_innovations(w, m.ar, m.ma);
}

Series residuals(const ArimaModel& m, const Series& s) {
    if (m.n_used != 0 && s.size() != m.n_used + static_cast<std::size_t>(m.order.d)) {
        fail(ErrorCode::Shape, "model was fit on " + std::to_string(m.n_used + static_cast<std::size_t>(m.order.d)) +
                                   " observations, series has " + std::to_string(s.size()));
    }
    auto a = residuals(m, s.values());
    return Series(std::move(a), s.start_time() + m.order.d * s.interval(), s.interval());
}

std::vector<double> forecast(const ArimaModel& m, std::span<const double> z, int horizon) {
    if (horizon < 1) fail(ErrorCode::InvalidArgument, "forecast horizon must be >= 1");
    if (z.size() <= static_cast<std::size_t>(m.order.d)) {
        fail(ErrorCode::Shape, "series too short for differencing order " + std::to_string(m.order.d));
    }
    const auto ladder = difference_ladder(z, m.order.d);
    auto w = demeaned(ladder.back(), m.mean);
    auto a = conditional_innovations(w, m.ar, m.ma);
    const std::size_t n = w.size();
    const auto h = static_cast<std::size_t>(horizon);
    w.resize(n + h, 0.0);
    a.resize(n + h, 0.0);
    for (std::size_t t = n; t < n + h; ++t) {
        double v = 0.0;
        for (std::size_t i = 0; i < m.ar.size() && i < t; ++i) v += m.ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < m.ma.size() && j < t; ++j) v -= m.ma[j] * a[t - 1 - j];
        w[t] = v;
    }
    std::vector<double> path(w.begin() + static_cast<std::ptrdiff_t>(n), w.end());
    for (double& v : path) v += m.mean;
    for (int k = m.order.d - 1; k >= 0; --k) {
        double level = ladder[static_cast<std::size_t>(k)].back();
        for (double& v : path) {
            level += v;
            v = level;
        }
    }
    return path;
}

Forecast forecast(const ArimaModel& m, const Series& s, int horizon, std::optional<BoxCoxParam> bc) {
    Forecast out;
    out.horizon = horizon;
    if (bc) {
        out.point_forecasts = forecast(m, transform(s.values(), *bc), horizon);
        for (double& v : out.point_forecasts) v = boxcox_inverse(v, *bc);
    } else {
        out.point_forecasts = forecast(m, s.values(), horizon);
    }
    return out;
}

Series simulate(const ArimaOrder& order, std::span<const double> ar, std::span<const double> ma, double sigma,
                std::size_t n, std::uint64_t seed) {
    order.validate();
    if (ar.size() != static_cast<std::size_t>(order.p) || ma.size() != static_cast<std::size_t>(order.q)) {
        fail(ErrorCode::Shape, "coefficient counts do not match " + order.name());
    }
    if (!roots_outside_unit_circle(ar)) fail(ErrorCode::InvalidArgument, "AR coefficients are not stationary");
    if (!roots_outside_unit_circle(ma)) fail(ErrorCode::InvalidArgument, "MA coefficients are not invertible");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail(ErrorCode::InvalidArgument, "sigma must be finite and >= 0");
    if (n == 0) fail(ErrorCode::InvalidArgument, "simulation length must be positive");

    Rng rng(seed);
    const std::size_t total = n + kBurnIn;
    std::vector<double> a(total), w(total);
    for (auto& v : a) v = sigma * rng.normal();
    for (std::size_t t = 0; t < total; ++t) {
        double v = a[t];
        for (std::size_t i = 0; i < ar.size() && i < t; ++i) v += ar[i] * w[t - 1 - i];
        for (std::size_t j = 0; j < ma.size() && j < t; ++j) v -= ma[j] * a[t - 1 - j];
        w[t] = v;
    }
    std::vector<double> out(w.begin() + static_cast<std::ptrdiff_t>(kBurnIn), w.end());
    for (int k = 0; k < order.d; ++k) std::partial_sum(out.begin(), out.end(), out.begin());
    return Series(std::move(out));
}

}  // namespace demandfc
