#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "demandfc/boxcox.hpp"
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

}  // namespace

TEST_CASE("transform examples") {
    CHECK(boxcox(std::numbers::e, {0.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(boxcox(3.0, {2.0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(boxcox(5.0, {1.0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(boxcox_inverse(1.0, {0.0}) == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(boxcox_inverse(4.0, {2.0}) == doctest::Approx(3.0).epsilon(1e-15));
}

TEST_CASE("transform errors") {
    CHECK(code_of([] { (void)transform(Series({1.0, 0.0}), {0.5}); }) == ErrorCode::Positivity);
    CHECK(code_of([] { (void)transform(Series({1.0, -2.0}), {0.0}); }) == ErrorCode::Positivity);
    CHECK(code_of([] { (void)boxcox_inverse(-1.0, {2.0}); }) == ErrorCode::Inversion);
    CHECK(code_of([] { (void)boxcox_inverse(0.5, {-3.0}); }) == ErrorCode::Inversion);
}

TEST_CASE("roundtrip on the listed points") {
    for (double lambda : {-3.0, 0.0, 0.8, 1.0}) {
        for (double z : {0.1, 1.0, 100.0}) {
            const double back = boxcox_inverse(boxcox(z, {lambda}), {lambda});
            CAPTURE(lambda);
            CAPTURE(z);
            if (lambda == -3.0 && z == 100.0) {
                // y = (1 - 1e-6) / 3 sits next to the pole at 1/3: one ulp of y moves z by ~1e-9 relative,
                // so the best a double can do is bounded by that conditioning.
                const double y = boxcox(z, {lambda});
                const double ulp_effect = std::abs(z / (1.0 + lambda * y)) * std::numeric_limits<double>::epsilon() * y;
                CHECK(std::abs(back - z) <= 2.0 * ulp_effect);
            } else {
                CHECK(std::abs(back - z) <= 1e-12 * std::max(1.0, z));
            }
        }
    }
}

TEST_CASE("roundtrip over the default grid") {
    for (double lambda : LambdaGrid{}.points()) {
        for (double z : {0.05, 0.5, 1.0, 2.0, 7.5, 30.0}) {
            const double back = boxcox_inverse(boxcox(z, {lambda}), {lambda});
            const double y = boxcox(z, {lambda});
            // Relative conditioning of the inverse at y: |y * d ln z / dy| = |lambda y / (1 + lambda y)| + ...
            const double cond = std::abs(y) / std::abs(1.0 + lambda * y) + 1.0;
            CHECK(std::abs(back - z) <= std::max(1e-12, 4.0 * cond * std::numeric_limits<double>::epsilon()) * z);
        }
    }
}

TEST_CASE("monotone in z") {
    for (double lambda : LambdaGrid{}.points()) {
        double prev = -std::numeric_limits<double>::infinity();
        for (double z = 0.05; z < 50.0; z *= 1.3) {
            const double y = boxcox(z, {lambda});
            CHECK(y > prev);
            prev = y;
        }
    }
}

TEST_CASE("grid points") {
    const auto pts = LambdaGrid{}.points();
    CHECK(pts.size() == 56);
    CHECK(pts.front() == -3.5);
    CHECK(pts.back() == 2.0);
    CHECK(std::find(pts.begin(), pts.end(), 0.0) != pts.end());
    CHECK(std::find(pts.begin(), pts.end(), 0.8) != pts.end());
}

TEST_CASE("select lambda on log-normal data") {
    auto v = testing::gaussian_noise(5000, 17);
    for (double& x : v) x = std::exp(x);
    const auto sel = select_lambda(Series(v), {-2.0, 2.0, 0.1});
    CHECK(std::abs(sel.best.lambda) <= 0.1 + 1e-12);
    CHECK(sel.profile.size() == 41);
    for (const auto& p : sel.profile) CHECK(std::isfinite(p.log_likelihood));
}

TEST_CASE("select lambda on shifted normal data") {
    auto v = testing::gaussian_noise(5000, 23);
    for (double& x : v) x += 10.0;
    const auto sel = select_lambda(Series(v), {-2.0, 2.0, 0.1});
    CHECK(std::abs(sel.best.lambda - 1.0) <= 0.2 + 1e-12);
}

TEST_CASE("profile matches a direct evaluation") {
    auto v = testing::gaussian_noise(300, 2);
    for (double& x : v) x = std::exp(0.5 * x) + 1.0;
    for (double lambda : {-1.0, 0.0, 0.5}) {
        std::vector<double> y(v.size());
        double mean = 0.0, jac = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            y[i] = lambda == 0.0 ? std::log(v[i]) : (std::pow(v[i], lambda) - 1.0) / lambda;
            mean += y[i];
            jac += std::log(v[i]);
        }
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : y) ss += (x - mean) * (x - mean);
        const double n = static_cast<double>(v.size());
        const double expected = -0.5 * n * std::log(ss / n) + (lambda - 1.0) * jac;
        CHECK(boxcox_log_likelihood(v, lambda) == doctest::Approx(expected).epsilon(1e-10));
    }
}
