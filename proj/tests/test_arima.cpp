#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "demandfc/arima.hpp"
#include "demandfc/error.hpp"
#include "support.hpp"

using namespace demandfc;

namespace {

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidArgument;
}

// Concentrated Gaussian log-likelihood from the dense covariance matrix of a
// zero-mean MA(1) w_t = a_t - theta a_{t-1} with unit innovation variance.
double dense_ma1_loglik(const std::vector<double>& w, double theta) {
    const auto n = static_cast<Eigen::Index>(w.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        cov(i, i) = 1.0 + theta * theta;
        if (i + 1 < n) cov(i, i + 1) = cov(i + 1, i) = -theta;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    const double quad = x.dot(llt.solve(x));
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double nn = static_cast<double>(n);
    const double s2 = quad / nn;
    return -0.5 * nn * (std::log(2.0 * std::numbers::pi * s2) + 1.0) - 0.5 * logdet;
}

double ar1_loglik(const std::vector<double>& w, double phi) {
    double s = (1.0 - phi * phi) * w[0] * w[0];
    for (std::size_t t = 1; t < w.size(); ++t) s += (w[t] - phi * w[t - 1]) * (w[t] - phi * w[t - 1]);
    const double n = static_cast<double>(w.size());
    return -0.5 * n * (std::log(2.0 * std::numbers::pi * s / n) + 1.0) + 0.5 * std::log(1.0 - phi * phi);
}

std::vector<double> arima110(std::size_t n, double phi, std::uint64_t seed) {
    return testing::cumsum(testing::ar1(n, phi, seed), 50.0);
}

}  // namespace

TEST_CASE("order parsing and validation") {
    CHECK(parse_order("1,1,0") == ArimaOrder{1, 1, 0});
    CHECK(parse_order(" 16,1,0") == ArimaOrder{16, 1, 0});
    CHECK(code_of([] { (void)parse_order("1,1"); }) == ErrorCode::Parse);
    CHECK(code_of([] { (void)parse_order("1,1,0x"); }) == ErrorCode::Parse);
    CHECK(code_of([] { (void)parse_order("21,1,0"); }) == ErrorCode::InvalidOrder);
    CHECK(code_of([] { ArimaOrder{-1, 0, 0}.validate(); }) == ErrorCode::InvalidOrder);
    CHECK(ArimaOrder{0, 1, 1}.name() == "ARIMA(0,1,1)");
}

TEST_CASE("random walk fit") {
    const auto z = testing::cumsum(testing::gaussian_noise(300, 4), 10.0);
    const auto m = fit(z, {0, 1, 0});
    CHECK(m.ar.empty());
    CHECK(m.ma.empty());
    double ss = 0.0;
    for (std::size_t t = 1; t < z.size(); ++t) ss += (z[t] - z[t - 1]) * (z[t] - z[t - 1]);
    CHECK(m.sigma2 == doctest::Approx(ss / static_cast<double>(z.size() - 1)).epsilon(1e-12));
    CHECK(m.n_used == z.size() - 1);

    std::vector<double> tail = z;
    tail.back() = 42.0;
    const auto f = forecast(m, Series(tail), 3);
    CHECK(f.point_forecasts == std::vector<double>{42.0, 42.0, 42.0});
}

TEST_CASE("random walk residuals are first differences") {
    const Series s(testing::cumsum(testing::gaussian_noise(120, 8)));
    const auto m = fit(s, {0, 1, 0});
    const auto r = residuals(m, s);
    const auto d = difference(s, 1);
    REQUIRE(r.size() == d.size());
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i] == d[i]);
}

TEST_CASE("arima(1,1,0) forecast recursion") {
    const auto m = make_model({1, 1, 0}, {0.5}, {});
    const auto f = forecast(m, Series({3.0, 7.0, 10.0, 12.0}), 3);
    CHECK(f.point_forecasts[0] == doctest::Approx(13.0).epsilon(1e-15));
    CHECK(f.point_forecasts[1] == doctest::Approx(13.5).epsilon(1e-15));
    CHECK(f.point_forecasts[2] == doctest::Approx(13.75).epsilon(1e-15));
}

TEST_CASE("ima(1,1) one-step forecast is exponential smoothing") {
    for (double theta : {0.4, 0.1, 0.9}) {
        const auto m = make_model({0, 1, 1}, {}, {theta});
        const auto z = testing::ima11(200, theta, 31);
        for (std::size_t end = 51; end <= z.size(); end += 7) {
            std::vector<double> head(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(end));
            const double expected = testing::ewma_forecast(head, 1.0 - theta);
            CHECK(std::abs(forecast(m, head, 1)[0] - expected) < 1e-6);
        }
    }
}

TEST_CASE("horizon and length errors") {
    const auto m = make_model({0, 1, 0}, {}, {});
    CHECK(code_of([&] { (void)forecast(m, Series({1.0, 2.0}), 0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)fit(std::vector<double>(14, 1.0), {1, 1, 0}); }) == ErrorCode::InsufficientData);
    CHECK(code_of([] { (void)make_model({1, 0, 0}, {1.2}, {}); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { (void)make_model({1, 0, 0}, {}, {}); }) == ErrorCode::Shape);
    const auto fitted = fit(testing::cumsum(testing::gaussian_noise(50, 1)), {0, 1, 0});
    CHECK(code_of([&] { (void)residuals(fitted, Series(std::vector<double>(40, 1.0))); }) == ErrorCode::Shape);
}

TEST_CASE("exact likelihood against dense oracles") {
    const auto w = testing::ar1(150, 0.6, 3);
    for (double phi : {-0.5, 0.2, 0.6, 0.9}) {
        const double phis[] = {phi};
        CHECK(arima_log_likelihood(w, {1, 0, 0}, phis, {}) == doctest::Approx(ar1_loglik(w, phi)).epsilon(1e-9));
    }
    const auto v = testing::gaussian_noise(120, 5);
    for (double theta : {-0.7, 0.3, 0.8}) {
        const double thetas[] = {theta};
        CHECK(arima_log_likelihood(v, {0, 0, 1}, {}, thetas) == doctest::Approx(dense_ma1_loglik(v, theta)).epsilon(1e-9));
    }
    const double bad[] = {1.0};
    CHECK(arima_log_likelihood(w, {1, 0, 0}, bad, {}) == -INFINITY);
}

TEST_CASE("fitted likelihood dominates the truth") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto z = arima110(400, 0.5, seed);
        const auto m = fit(z, {1, 1, 0});
        const double truth[] = {0.5};
        CHECK(m.log_likelihood >= arima_log_likelihood(z, {1, 1, 0}, truth, {}) - 1e-9);

        const auto y = testing::ima11(400, 0.511, seed + 100);
        const auto mi = fit(y, {0, 1, 1});
        const double th[] = {0.511};
        CHECK(mi.log_likelihood >= arima_log_likelihood(y, {0, 1, 1}, {}, th) - 1e-9);
    }
}

TEST_CASE("parameter recovery") {
    int ar_ok = 0, ma_ok = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        ar_ok += std::abs(fit(arima110(1000, 0.5, seed), {1, 1, 0}).ar[0] - 0.5) < 0.1;
        ma_ok += std::abs(fit(testing::ima11(1000, 0.511, seed), {0, 1, 1}).ma[0] - 0.511) < 0.1;
    }
    CHECK(ar_ok >= 19);
    CHECK(ma_ok >= 19);
}

TEST_CASE("recovery error shrinks with n") {
    std::vector<double> small, large;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        small.push_back(std::abs(fit(arima110(500, 0.5, seed), {1, 1, 0}).ar[0] - 0.5));
        large.push_back(std::abs(fit(arima110(5000, 0.5, seed + 1000), {1, 1, 0}).ar[0] - 0.5));
    }
    CHECK(testing::median(large) < testing::median(small));
}

TEST_CASE("standard errors match asymptotics") {
    const auto z = arima110(4000, 0.5, 77);
    const auto m = fit(z, {1, 1, 0});
    REQUIRE(m.coeff_std_errors.size() == 1);
    const double expected = std::sqrt((1.0 - 0.25) / 3999.0);
    CHECK(m.coeff_std_errors[0] == doctest::Approx(expected).epsilon(0.2));
}

TEST_CASE("stationary model with a mean") {
    auto x = testing::ar1(2000, 0.4, 13);
    for (double& v : x) v += 25.0;
    const auto m = fit(x, {1, 0, 0});
    CHECK(std::abs(m.mean - 25.0) < 0.2);
    CHECK(std::abs(m.ar[0] - 0.4) < 0.06);
    CHECK(m.coeff_std_errors.size() == 2);
}

TEST_CASE("residual properties of a well specified fit") {
    const Series s(arima110(5000, 0.5, 21));
    const auto m = fit(s, {1, 1, 0});
    const auto r = residuals(m, s);
    CHECK(r.size() == s.size() - 1);
    double mean = 0.0, ss = 0.0;
    for (double v : r.values()) {
        mean += v;
        ss += v * v;
    }
    const double n = static_cast<double>(r.size());
    mean /= n;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(m.sigma2) / std::sqrt(n));
    CHECK(ss / n == doctest::Approx(m.sigma2).epsilon(0.05));
}

TEST_CASE("forecasts shift with the level for d >= 1") {
    for (const ArimaOrder order : {ArimaOrder{0, 1, 0}, ArimaOrder{1, 1, 0}, ArimaOrder{0, 1, 1}, ArimaOrder{1, 1, 1}}) {
        const auto z = arima110(300, 0.5, 9);
        auto shifted = z;
        for (double& v : shifted) v += 1000.0;
        const auto m = fit(z, order);
        const auto a = forecast(m, z, 3);
        const auto b = forecast(m, shifted, 3);
        for (std::size_t i = 0; i < 3; ++i) CHECK(b[i] - a[i] == doctest::Approx(1000.0).epsilon(1e-12));
    }
}

TEST_CASE("box-cox forecasts are inverse transformed") {
    auto z = testing::cumsum(testing::gaussian_noise(200, 6, 0.01), 0.0);
    for (double& v : z) v = std::exp(v + 3.0);
    const auto logged = transform(Series(z), {0.0});
    const auto m = fit(logged, {0, 1, 0});
    const auto f = forecast(m, Series(z), 2, BoxCoxParam{0.0});
    CHECK(f.point_forecasts[0] == doctest::Approx(z.back()).epsilon(1e-12));
}

TEST_CASE("simulate") {
    const double ar[] = {0.5};
    const auto a = simulate({1, 1, 0}, ar, {}, 1.0, 500, 7);
    const auto b = simulate({1, 1, 0}, ar, {}, 1.0, 500, 7);
    CHECK(a.data() == b.data());
    CHECK(a.size() == 500);

    const auto rw = simulate({0, 1, 0}, {}, {}, 1.0, 10000, 3);
    const auto d = difference(rw, 1).data();
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d.size() - 1);
    CHECK(std::abs(mean) < 0.05);
    CHECK(std::abs(var - 1.0) < 0.05);

    const auto s = simulate({1, 0, 0}, ar, {}, 1.0, 10000, 5);
    CHECK(std::abs(testing::brute_acf(s.data(), 1) - 0.5) < 0.05);

    const double explosive[] = {1.01};
    CHECK(code_of([&] { (void)simulate({1, 1, 0}, explosive, {}, 1.0, 10, 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)simulate({1, 1, 0}, {}, {}, 1.0, 10, 1); }) == ErrorCode::Shape);
}

TEST_CASE("unit root check") {
    const double ok[] = {0.5, 0.3};
    const double bad[] = {0.5, 0.5};
    CHECK(roots_outside_unit_circle(ok));
    CHECK_FALSE(roots_outside_unit_circle(bad));
    CHECK(roots_outside_unit_circle({}));
}
