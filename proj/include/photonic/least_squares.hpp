#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

// Shared damped Gauss-Newton least-squares engine used by every fitter.
// Fully deterministic: fixed tolerances, fixed damping schedule, central
// finite-difference Jacobians, no randomness.
namespace photonic::calib {

/// Maps a parameter vector to the residual vector r(p); the engine
/// minimizes sum r_i^2. The residual length must not change between calls.
/// A NaN residual at a trial point makes the engine reject that step.
using ResidualFn = std::function<std::vector<double>(const std::vector<double>&)>;

struct FitOptions {
    int max_iterations = 500;
    double step_tolerance = 1e-10;      // relative parameter step
    double gradient_tolerance = 1e-12;  // infinity norm of J^T r
    double initial_damping = 1e-3;
    double max_damping = 1e12;
    double finite_difference_rel_step = 1e-6;
};

struct FitResult {
    std::vector<std::string> parameter_names;
    std::vector<double> parameters;
    std::vector<double> uncertainties;  // sqrt(diag cov); NaN when unavailable
    double residual_norm = 0.0;         // sqrt(sum of squared residuals)
    bool converged = false;
    int iterations = 0;
    std::string message;

    double value(std::string_view name) const;        // std::out_of_range on miss
    double uncertainty(std::string_view name) const;  // std::out_of_range on miss
};

/// Levenberg-Marquardt minimization. Convergence when the relative step
/// drops below step_tolerance or the gradient infinity-norm below
/// gradient_tolerance; singular normal equations or a damping blow-up are
/// reported through converged = false and the message, never by throwing.
/// A non-finite residual at the initial guess throws std::invalid_argument.
FitResult least_squares(const ResidualFn& residuals, std::vector<double> initial_guess,
                        std::vector<std::string> parameter_names, const FitOptions& options = {});

nlohmann::json to_json(const FitResult& result);

}  // namespace photonic::calib
