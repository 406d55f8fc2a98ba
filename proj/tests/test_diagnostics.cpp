#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "demandfc/diagnostics.hpp"
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

// Upper tail of chi-squared with an even number of degrees of freedom:
// exp(-x/2) * sum_{j < df/2} (x/2)^j / j!, summed in log space.
double chi2_tail_even(double x, int df) {
    const double h = x / 2.0;
    double sum = 0.0;
    for (int j = 0; j < df / 2; ++j) sum += std::exp(j * std::log(h) - std::lgamma(j + 1.0) - h);
    return sum;
}

double brute_ljung_box(const std::vector<double>& x, int max_lag) {
    const double n = static_cast<double>(x.size());
    double q = 0.0;
    for (int k = 1; k <= max_lag; ++k) {
        const double r = testing::brute_acf(x, k);
        q += r * r / (n - k);
    }
    return n * (n + 2.0) * q;
}

// ARCH(1): a_t = sigma_t e_t, sigma_t^2 = omega + alpha a_{t-1}^2.
std::vector<double> arch1(std::size_t n, double omega, double alpha, std::uint64_t seed) {
    const auto e = testing::gaussian_noise(n + 100, seed);
    std::vector<double> out;
    double prev = 0.0;
    for (std::size_t t = 0; t < e.size(); ++t) {
        const double a = std::sqrt(omega + alpha * prev * prev) * e[t];
        if (t >= 100) out.push_back(a);
        prev = a;
    }
    return out;
}

}  // namespace

TEST_CASE("chi-squared tail reproduces the quoted p-values") {
    CHECK(std::abs(chi_squared_upper_tail(228.297, 100) - 4.974e-12) / 4.974e-12 < 0.01);
    CHECK(std::abs(chi_squared_upper_tail(87.758, 100) - 0.804) < 0.005);
}

TEST_CASE("chi-squared tail against the closed form for even df") {
    for (int df : {2, 4, 10, 50, 100}) {
        for (double x : {0.5, 3.0, 17.0, 87.758, 228.297}) {
            CHECK(chi_squared_upper_tail(x, df) == doctest::Approx(chi2_tail_even(x, df)).epsilon(1e-10));
        }
    }
    CHECK(chi_squared_upper_tail(0.0, 5) == 1.0);
    CHECK(code_of([] { (void)chi_squared_upper_tail(1.0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ljung-box statistic") {
    const auto x = testing::ar1(400, 0.3, 12);
    const auto r = ljung_box(Series(x), 20);
    CHECK(r.q_statistic == doctest::Approx(brute_ljung_box(x, 20)).epsilon(1e-10));
    CHECK(r.df == 20);
    CHECK(r.p_value == doctest::Approx(chi_squared_upper_tail(r.q_statistic, 20)));
    const auto adjusted = ljung_box(Series(x), 20, 2);
    CHECK(adjusted.df == 18);
    CHECK(adjusted.q_statistic == r.q_statistic);

    CHECK(code_of([&] { (void)ljung_box(Series(x), 3, 3); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { (void)ljung_box(Series(x), 400); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("ljung-box null statistic") {
    const auto r = ljung_box(Series(std::vector<double>(50, 3.0)), 10);
    CHECK(r.q_statistic == 0.0);
    CHECK(r.p_value == 1.0);
    CHECK(ljung_box_from_statistic(0.0, 100).p_value == 1.0);
}

TEST_CASE("ljung-box monotone and scale free") {
    double prev = 1.0;
    for (double q = 40.0; q < 300.0; q += 10.0) {
        const double p = ljung_box_from_statistic(q, 100).p_value;
        CHECK(p < prev);
        prev = p;
    }
    auto x = testing::gaussian_noise(300, 4);
    const double q1 = ljung_box(Series(x), 15).q_statistic;
    for (double& v : x) v *= 250.0;
    CHECK(ljung_box(Series(x), 15).q_statistic == doctest::Approx(q1).epsilon(1e-10));
}

TEST_CASE("adf critical values") {
    CHECK(adf_critical_value(DeterministicTerms::ConstantAndTrend, 0.05, 1e6) == -3.41);
    CHECK(adf_critical_value(DeterministicTerms::ConstantAndTrend, 0.05, 1e5) == -3.41);
    CHECK(adf_critical_value(DeterministicTerms::Constant, 0.05, 1e6) == -2.86);
    CHECK(adf_critical_value(DeterministicTerms::ConstantAndTrend, 0.01, 25) == -4.38);
    CHECK(adf_critical_value(DeterministicTerms::ConstantAndTrend, 0.05, 75) == doctest::Approx(-3.475));
    CHECK(code_of([] { (void)adf_critical_value(DeterministicTerms::Constant, 0.2, 100); }) ==
          ErrorCode::InvalidArgument);
}

TEST_CASE("adf regression against a direct least squares") {
    const auto z = testing::cumsum(testing::gaussian_noise(200, 31));
    const int k = 3;
    const auto r = adf_test(Series(z), k, DeterministicTerms::ConstantAndTrend);

    const std::size_t rows = z.size() - 1 - k;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), 3 + k);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + k + 1;  // index of the level being differenced
        const auto row = static_cast<Eigen::Index>(i);
        y(row) = z[t] - z[t - 1];
        x(row, 0) = z[t - 1];
        x(row, 1) = 1.0;
        x(row, 2) = static_cast<double>(t);
        for (int j = 1; j <= k; ++j) x(row, 2 + j) = z[t - static_cast<std::size_t>(j)] - z[t - static_cast<std::size_t>(j) - 1];
    }
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    const Eigen::VectorXd beta = xtx_inv * x.transpose() * y;
    const Eigen::VectorXd resid = y - x * beta;
    const double s2 = resid.squaredNorm() / static_cast<double>(rows - static_cast<std::size_t>(x.cols()));
    const double t_expected = beta(0) / std::sqrt(s2 * xtx_inv(0, 0));
    CHECK(r.t_statistic == doctest::Approx(t_expected).epsilon(1e-8));
    CHECK(r.lags_used == k);
    CHECK(r.n_obs == rows);
    CHECK(r.reject_unit_root == (r.t_statistic < r.critical_values.at(0.05)));
}

TEST_CASE("adf invariant to level shifts") {
    auto z = testing::ar1(300, 0.8, 2);
    const double t1 = adf_test(Series(z), 4, DeterministicTerms::Constant).t_statistic;
    const double t2 = adf_test(Series(z), 4, DeterministicTerms::ConstantAndTrend).t_statistic;
    for (double& v : z) v += 5000.0;
    CHECK(adf_test(Series(z), 4, DeterministicTerms::Constant).t_statistic == doctest::Approx(t1).epsilon(1e-7));
    CHECK(adf_test(Series(z), 4, DeterministicTerms::ConstantAndTrend).t_statistic == doctest::Approx(t2).epsilon(1e-7));
}

TEST_CASE("adf power on stationary data") {
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        const Series s(testing::ar1(500, 0.5, seed));
        rejected += adf_test(s, default_adf_lags(s.size())).reject_unit_root;
    }
    CHECK(rejected > 180);
}

TEST_CASE("adf errors") {
    CHECK(code_of([] { (void)adf_test(Series(testing::gaussian_noise(12, 1)), 2); }) == ErrorCode::InsufficientData);
    std::vector<double> line(50);
    for (std::size_t i = 0; i < line.size(); ++i) line[i] = static_cast<double>(i);
    CHECK(code_of([&] { (void)adf_test(Series(line), 1); }) == ErrorCode::Rank);
    CHECK(default_adf_lags(500) == 7);
}

TEST_CASE("arch test statistic") {
    const auto a = arch1(600, 0.2, 0.5, 8);
    const int s = 3;
    const auto r = arch_test(Series(a), s);

    const std::size_t rows = a.size() - s;
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), s + 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::size_t t = i + s;
        y(static_cast<Eigen::Index>(i)) = a[t] * a[t];
        x(static_cast<Eigen::Index>(i), 0) = 1.0;
        for (int j = 1; j <= s; ++j) x(static_cast<Eigen::Index>(i), j) = a[t - static_cast<std::size_t>(j)] * a[t - static_cast<std::size_t>(j)];
    }
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    const double ssr = (y - x * beta).squaredNorm();
    const double sst = (y.array() - y.mean()).square().sum();
    const double r2 = 1.0 - ssr / sst;
    CHECK(r.r_squared == doctest::Approx(r2).epsilon(1e-9));
    CHECK(r.lm_statistic == doctest::Approx((a.size() - s) * r2).epsilon(1e-9));
    CHECK(r.p_value == doctest::Approx(chi_squared_upper_tail(r.lm_statistic, s)));
    CHECK(r.heteroskedastic_at_5pct == (r.p_value < 0.05));
}

TEST_CASE("arch test scale free") {
    auto a = arch1(400, 0.2, 0.3, 3);
    const auto r1 = arch_test(Series(a), 2);
    for (double& v : a) v *= 1e-3;
    const auto r2 = arch_test(Series(a), 2);
    CHECK(r2.p_value == doctest::Approx(r1.p_value).epsilon(1e-8));
    CHECK(r2.lm_statistic == doctest::Approx(r1.lm_statistic).epsilon(1e-8));
}

TEST_CASE("arch test power and errors") {
    int rejected = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) rejected += arch_test(Series(arch1(2000, 0.2, 0.7, seed)), 3).heteroskedastic_at_5pct;
    CHECK(rejected >= 45);

    std::vector<double> alt(40);
    for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1.0 : 1.0;
    CHECK(code_of([&] { (void)arch_test(Series(alt), 2); }) == ErrorCode::Rank);
    CHECK(code_of([] { (void)arch_test(Series(testing::gaussian_noise(12, 1)), 3); }) == ErrorCode::InsufficientData);
}

TEST_CASE("terms parsing") {
    CHECK(parse_terms("ct") == DeterministicTerms::ConstantAndTrend);
    CHECK(parse_terms("constant") == DeterministicTerms::Constant);
    CHECK(to_string(DeterministicTerms::ConstantAndTrend) == "constant_and_trend");
    CHECK(code_of([] { (void)parse_terms("none"); }) == ErrorCode::Parse);
}
