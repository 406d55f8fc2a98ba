#pragma once

#include <span>
#include <vector>

#include "demandfc/series.hpp"

namespace demandfc {

struct BoxCoxParam {
    double lambda = 1.0;
};

struct LambdaGrid {
    double from = -3.5;
    double to = 2.0;
    double step = 0.1;

    [[nodiscard]] std::vector<double> points() const;
};

struct LambdaProfilePoint {
    double lambda;
    double log_likelihood;
};

struct LambdaSelection {
    BoxCoxParam best;
    std::vector<LambdaProfilePoint> profile;
};

/// (z^lambda - 1) / lambda, or ln z at lambda == 0. Requires z > 0.
double boxcox(double z, BoxCoxParam p);
/// Exact inverse of boxcox. Requires lambda * y + 1 > 0 when lambda != 0.
double boxcox_inverse(double y, BoxCoxParam p);

Series transform(const Series& s, BoxCoxParam p);
std::vector<double> transform(std::span<const double> z, BoxCoxParam p);

/// Gaussian profile log-likelihood of the transformed data, Jacobian included.
double boxcox_log_likelihood(std::span<const double> z, double lambda);

/// Grid argmax of the profile log-likelihood, plus the whole curve.
LambdaSelection select_lambda(const Series& s, const LambdaGrid& grid = {});

}  // namespace demandfc
