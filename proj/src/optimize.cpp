#include "optimize.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace demandfc::detail {

namespace {

using Objective = std::function<double(const std::vector<double>&)>;

std::vector<double> numeric_gradient(const Objective& f, std::vector<double> x, double fx) {
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double h = 6e-6 * std::max(1.0, std::abs(xi));
        x[i] = xi + h;
        const double fp = f(x);
        x[i] = xi - h;
        const double fm = f(x);
        x[i] = xi;
        if (std::isfinite(fp) && std::isfinite(fm)) {
            g[i] = (fp - fm) / (2.0 * h);
        } else if (std::isfinite(fp)) {
            g[i] = (fp - fx) / h;
        } else if (std::isfinite(fm)) {
            g[i] = (fx - fm) / h;
        } else {
            g[i] = 0.0;
        }
    }
    return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

MinimizeResult minimize_bfgs(const Objective& objective, std::vector<double> x0, int max_iterations,
                             double tolerance, double max_step) {
    const std::size_t n = x0.size();
    MinimizeResult out;
    out.x = std::move(x0);
    out.value = objective(out.x);
    if (n == 0) {
        out.converged = std::isfinite(out.value);
        return out;
    }
    if (!std::isfinite(out.value)) return out;

    // Inverse Hessian approximation, row-major.
    std::vector<double> inv_h(n * n, 0.0);
    auto reset = [&] {
        std::fill(inv_h.begin(), inv_h.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) inv_h[i * n + i] = 1.0;
    };
    reset();
    bool fresh = true;

    auto grad = numeric_gradient(objective, out.x, out.value);
    std::vector<double> dir(n), x_new(n);

    for (int iter = 1; iter <= max_iterations; ++iter) {
        out.iterations = iter;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s -= inv_h[i * n + j] * grad[j];
            dir[i] = s;
        }
        double slope = dot(grad, dir);
        if (!(slope < 0.0)) {
            reset();
            fresh = true;
            for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
            slope = dot(grad, dir);
        }
        if (!(slope < 0.0)) {
            out.converged = true;  // zero gradient
            return out;
        }

        double longest = 0.0;
        for (double v : dir) longest = std::max(longest, std::abs(v));
        double step = longest > max_step ? max_step / longest : 1.0;

        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int k = 0; k < 50; ++k) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = out.x[i] + step * dir[i];
            f_new = objective(x_new);
            if (std::isfinite(f_new) && f_new <= out.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!fresh) {
                reset();
                fresh = true;
                continue;
            }
            // No descent along the steepest direction at working precision.
            out.converged = true;
            return out;
        }

        const double improvement = out.value - f_new;
        auto grad_new = numeric_gradient(objective, x_new, f_new);
        std::vector<double> s(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = x_new[i] - out.x[i];
            y[i] = grad_new[i] - grad[i];
        }
        out.x = x_new;
        out.value = f_new;
        grad = std::move(grad_new);

        if (improvement < tolerance) {
            out.converged = true;
            return out;
        }

        const double sy = dot(s, y);
        if (sy > 1e-12) {
            std::vector<double> hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) hy[i] += inv_h[i * n + j] * y[j];
            const double yhy = dot(y, hy);
            const double rho = 1.0 / sy;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    inv_h[i * n + j] += (1.0 + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
            fresh = false;
        }
    }
    return out;
}

std::vector<double> polish_newton(const Objective& objective, std::vector<double> x, int max_steps) {
    const std::size_t n = x.size();
    if (n == 0) return x;
    double fx = objective(x);
    if (!std::isfinite(fx)) return x;
    auto grad = numeric_gradient(objective, x, fx);
    const auto norm = [](const std::vector<double>& g) { return std::sqrt(dot(g, g)); };

    for (int step = 0; step < max_steps; ++step) {
        Eigen::MatrixXd hess(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t j = 0; j < n; ++j) {
            const double h = 1e-4 * std::max(1.0, std::abs(x[j]));
            auto xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double fp = objective(xp), fm = objective(xm);
            if (!std::isfinite(fp) || !std::isfinite(fm)) return x;
            const auto gp = numeric_gradient(objective, xp, fp);
            const auto gm = numeric_gradient(objective, xm, fm);
            for (std::size_t i = 0; i < n; ++i) hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (2.0 * h);
        }
        hess = 0.5 * (hess + hess.transpose()).eval();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return x;
        const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(grad.data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd delta = ldlt.solve(g);

        auto x_new = x;
        for (std::size_t i = 0; i < n; ++i) x_new[i] -= delta(static_cast<Eigen::Index>(i));
        const double f_new = objective(x_new);
        if (!std::isfinite(f_new) || f_new > fx + 1e-9 * std::max(1.0, std::abs(fx))) return x;
        auto grad_new = numeric_gradient(objective, x_new, f_new);
        if (!(norm(grad_new) < norm(grad))) return x;
        x = std::move(x_new);
        fx = f_new;
        grad = std::move(grad_new);
    }
    return x;
}

}  // namespace demandfc::detail
