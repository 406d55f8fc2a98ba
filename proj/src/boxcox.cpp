#include "demandfc/boxcox.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "demandfc/error.hpp"

namespace demandfc {

namespace {

void require_positive(std::span<const double> z) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!(z[i] > 0.0)) {
            fail(ErrorCode::Positivity,
                 "Box-Cox needs strictly positive data; value at index " + std::to_string(i) + " is " +
                     std::to_string(z[i]));
        }
    }
}

}  // namespace

std::vector<double> LambdaGrid::points() const {
    if (!(step > 0.0) || to < from || !std::isfinite(from) || !std::isfinite(to)) {
        fail(ErrorCode::InvalidArgument, "lambda grid must have step > 0 and to >= from");
    }
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((to - from) / step + 1e-9)) + 1;
    out.reserve(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        // Snap to the decimal grid so 0 is hit exactly.
        out.push_back(std::round((from + static_cast<double>(i) * step) * 1e10) / 1e10);
    }
    return out;
}

double boxcox(double z, BoxCoxParam p) {
    if (!(z > 0.0)) fail(ErrorCode::Positivity, "Box-Cox needs strictly positive data");
    if (p.lambda == 0.0) return std::log(z);
    return std::expm1(p.lambda * std::log(z)) / p.lambda;
}

double boxcox_inverse(double y, BoxCoxParam p) {
    if (p.lambda == 0.0) return std::exp(y);
    const double base = p.lambda * y + 1.0;
    if (!(base > 0.0)) {
        fail(ErrorCode::Inversion, "Box-Cox inverse undefined: lambda * y + 1 = " + std::to_string(base));
    }
    return std::exp(std::log1p(p.lambda * y) / p.lambda);
}

std::vector<double> transform(std::span<const double> z, BoxCoxParam p) {
    if (!std::isfinite(p.lambda)) fail(ErrorCode::InvalidArgument, "lambda must be finite");
    require_positive(z);
    std::vector<double> out;
    out.reserve(z.size());
    for (double v : z) out.push_back(boxcox(v, p));
    return out;
}

Series transform(const Series& s, BoxCoxParam p) { return s.with_values(transform(s.values(), p)); }

double boxcox_log_likelihood(std::span<const double> z, double lambda) {
    require_positive(z);
    const auto y = transform(z, BoxCoxParam{lambda});
    const double n = static_cast<double>(y.size());
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= n;
    double ss = 0.0;
    double log_sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss += (y[i] - mean) * (y[i] - mean);
        log_sum += std::log(z[i]);
    }
    const double sigma2 = ss / n;
    if (!(sigma2 > 0.0)) return -std::numeric_limits<double>::infinity();
    return -0.5 * n * std::log(sigma2) + (lambda - 1.0) * log_sum;
}

LambdaSelection select_lambda(const Series& s, const LambdaGrid& grid) {
    require_positive(s.values());
    const auto points = grid.points();
    if (points.empty()) fail(ErrorCode::InvalidArgument, "lambda grid is empty");

    LambdaSelection out;
    out.profile.reserve(points.size());
    double best = -std::numeric_limits<double>::infinity();
    out.best.lambda = points.front();
    for (double lambda : points) {
        const double ll = boxcox_log_likelihood(s.values(), lambda);
        out.profile.push_back({lambda, ll});
        if (ll > best) {
            best = ll;
            out.best.lambda = lambda;
        }
    }
    if (!std::isfinite(best)) fail(ErrorCode::DegenerateSeries, "profile likelihood undefined for constant data");
    return out;
}

}  // namespace demandfc
