#pragma once

#include <Eigen/Dense>

#include "demandfc/error.hpp"

namespace demandfc::detail {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd std_errors;
    double ssr = 0.0;
    double sst = 0.0;  // centered total sum of squares
    [[nodiscard]] double r_squared() const { return sst > 0.0 ? 1.0 - ssr / sst : 0.0; }
};

inline OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const auto n = x.rows();
    const auto k = x.cols();
    if (n <= k) fail(ErrorCode::InsufficientData, "regression needs more rows than regressors");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < k) fail(ErrorCode::Rank, "regressors are collinear");

    OlsFit out;
    out.beta = qr.solve(y);
    const Eigen::VectorXd resid = y - x * out.beta;
    out.ssr = resid.squaredNorm();
    out.sst = (y.array() - y.mean()).matrix().squaredNorm();
    const double s2 = out.ssr / static_cast<double>(n - k);
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    out.std_errors = (s2 * xtx_inv.diagonal()).cwiseSqrt();
    return out;
}

}  // namespace demandfc::detail
