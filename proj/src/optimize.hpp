#pragma once

#include <functional>
#include <vector>

namespace demandfc::detail {

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Quasi-Newton (BFGS) minimization with central-difference gradients and a
/// backtracking Armijo line search. Converges when an accepted step improves
/// the objective by less than `tolerance`, or when no descent step exists.
/// The objective may return +inf to reject a point.
MinimizeResult minimize_bfgs(const std::function<double(const std::vector<double>&)>& objective,
                             std::vector<double> x0, int max_iterations, double tolerance,
                             double max_step = 2.0);

/// Newton refinement of a minimum using finite-difference gradients and
/// Hessians. Steps are kept while they reduce the gradient norm, which locates
/// the optimum far more precisely than a test on objective values.
std::vector<double> polish_newton(const std::function<double(const std::vector<double>&)>& objective,
                                  std::vector<double> x, int max_steps = 6);

}  // namespace demandfc::detail
