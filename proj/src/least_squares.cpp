#include "photonic/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace photonic::calib {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double squared_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

/// Central-difference Jacobian; the step scales with the parameter
/// magnitude and bottoms out at the relative step itself.
Eigen::MatrixXd jacobian(const ResidualFn& f, const std::vector<double>& p, std::size_t n_res,
                         double rel_step) {
    Eigen::MatrixXd j(n_res, p.size());
    std::vector<double> lo = p;
    std::vector<double> hi = p;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const double h = rel_step * std::max(std::abs(p[c]), 1.0);
        hi[c] = p[c] + h;
        lo[c] = p[c] - h;
        const std::vector<double> r_hi = f(hi);
        const std::vector<double> r_lo = f(lo);
        if (r_hi.size() != n_res || r_lo.size() != n_res) {
            throw std::invalid_argument("residual length changed during fitting");
        }
        for (std::size_t r = 0; r < n_res; ++r) j(r, c) = (r_hi[r] - r_lo[r]) / (2.0 * h);
        hi[c] = p[c];
        lo[c] = p[c];
    }
    return j;
}

}  // namespace

double FitResult::value(std::string_view name) const {
    for (std::size_t i = 0; i < parameter_names.size(); ++i) {
        if (parameter_names[i] == name) return parameters[i];
    }
    throw std::out_of_range("unknown fit parameter: " + std::string(name));
}

double FitResult::uncertainty(std::string_view name) const {
    for (std::size_t i = 0; i < parameter_names.size(); ++i) {
        if (parameter_names[i] == name) return uncertainties[i];
    }
    throw std::out_of_range("unknown fit parameter: " + std::string(name));
}

FitResult least_squares(const ResidualFn& residuals, std::vector<double> initial_guess,
                        std::vector<std::string> parameter_names, const FitOptions& options) {
    if (initial_guess.empty()) throw std::invalid_argument("need at least one parameter");
    if (parameter_names.size() != initial_guess.size()) {
        throw std::invalid_argument("parameter name count must match the guess length");
    }
    if (!all_finite(initial_guess)) throw std::invalid_argument("initial guess must be finite");

    const std::size_t n_par = initial_guess.size();
    std::vector<double> p = std::move(initial_guess);
    std::vector<double> r = residuals(p);
    if (r.empty()) throw std::invalid_argument("residual vector is empty");
    if (!all_finite(r)) throw std::invalid_argument("residual is not finite at the initial guess");
    const std::size_t n_res = r.size();
    double cost = squared_norm(r);

    FitResult out;
    out.parameter_names = std::move(parameter_names);
    double damping = options.initial_damping;
    Eigen::MatrixXd j;
    bool have_jacobian = false;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (!have_jacobian) {
            j = jacobian(residuals, p, n_res, options.finite_difference_rel_step);
            have_jacobian = true;
        }
        Eigen::VectorXd rv(n_res);
        for (std::size_t i = 0; i < n_res; ++i) rv(i) = r[i];
        const Eigen::VectorXd gradient = j.transpose() * rv;
        if (gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
            out.converged = true;
            out.message = "gradient below tolerance";
            break;
        }
        const Eigen::MatrixXd jtj = j.transpose() * j;

        // Marquardt scaling: damp along the diagonal of J^T J so poorly
        // scaled parameters are damped in their own units.
        bool stepped = false;
        while (damping <= options.max_damping) {
            Eigen::MatrixXd a = jtj;
            for (std::size_t d = 0; d < n_par; ++d) {
                a(d, d) += damping * std::max(jtj(d, d), 1e-12);
            }
            const Eigen::VectorXd delta = a.ldlt().solve(-gradient);
            if (!delta.allFinite()) {
                damping *= 10.0;
                continue;
            }
            std::vector<double> trial(n_par);
            for (std::size_t d = 0; d < n_par; ++d) trial[d] = p[d] + delta(d);
            std::vector<double> r_trial = residuals(trial);
            if (r_trial.size() != n_res) {
                throw std::invalid_argument("residual length changed during fitting");
            }
            const double trial_cost = all_finite(r_trial)
                                          ? squared_norm(r_trial)
                                          : std::numeric_limits<double>::infinity();
            double rel_step = 0.0;
            for (std::size_t d = 0; d < n_par; ++d) {
                rel_step = std::max(rel_step, std::abs(delta(d)) / std::max(std::abs(p[d]), 1.0));
            }
            if (trial_cost < cost) {
                p = std::move(trial);
                r = std::move(r_trial);
                cost = trial_cost;
                damping = std::max(damping / 10.0, 1e-15);
                have_jacobian = false;
                stepped = true;
                if (rel_step < options.step_tolerance) {
                    out.converged = true;
                    out.message = "relative step below tolerance";
                }
                break;
            }
            // A rejected step that is already below the step tolerance means
            // the surface cannot improve at parameter resolution: converged.
            if (std::isfinite(trial_cost) && rel_step < options.step_tolerance) {
                out.converged = true;
                out.message = "relative step below tolerance";
                stepped = true;
                break;
            }
            damping *= 10.0;
        }
        if (!stepped) {
            out.message = "damping limit reached; normal equations singular or at a local minimum";
            break;
        }
        if (out.converged) {
            ++iter;
            break;
        }
    }
    if (!out.converged && out.message.empty()) out.message = "iteration limit reached";

    out.parameters = p;
    out.residual_norm = std::sqrt(cost);
    out.iterations = iter;

    // Uncertainties from the usual linearized covariance; left NaN when the
    // problem has no degrees of freedom or the normal matrix is singular.
    out.uncertainties.assign(n_par, std::numeric_limits<double>::quiet_NaN());
    if (n_res > n_par) {
        const Eigen::MatrixXd jf = jacobian(residuals, p, n_res, options.finite_difference_rel_step);
        const Eigen::MatrixXd jtj = jf.transpose() * jf;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
        if (lu.isInvertible()) {
            const double variance = cost / static_cast<double>(n_res - n_par);
            const Eigen::MatrixXd cov = variance * lu.inverse();
            for (std::size_t d = 0; d < n_par; ++d) {
                if (cov(d, d) >= 0.0) out.uncertainties[d] = std::sqrt(cov(d, d));
            }
        }
    }
    return out;
}

nlohmann::json to_json(const FitResult& result) {
    nlohmann::json parameters = nlohmann::json::object();
    nlohmann::json uncertainties = nlohmann::json::object();
    for (std::size_t i = 0; i < result.parameter_names.size(); ++i) {
        parameters[result.parameter_names[i]] = result.parameters[i];
        const double u = result.uncertainties[i];
        uncertainties[result.parameter_names[i]] =
            std::isfinite(u) ? nlohmann::json(u) : nlohmann::json(nullptr);
    }
    return nlohmann::json{
        {"parameters", parameters},
        {"uncertainties", uncertainties},
        {"residual_norm", result.residual_norm},
        {"converged", result.converged},
        {"iterations", result.iterations},
        {"message", result.message},
    };
}

}  // namespace photonic::calib
