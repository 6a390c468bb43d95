#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

namespace epp {

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresOptions {
    double tol = 1e-2;  // relative residual ||rhs - op x|| / ||rhs||
    int restart = 50;
    int max_iter = 200;
};

struct GmresResult {
    Eigen::VectorXd solution;
    int iterations = 0;
    double residual = 0.0;            // true relative residual, recomputed at exit
    double estimated_residual = 0.0;  // Arnoldi/Givens estimate at exit
    bool converged = false;
    bool breakdown = false;           // Arnoldi broke down before reaching tol
};

/// Restarted GMRES on (op o precond) t = rhs; returns x = x0 + precond(t).
/// Running out of iterations is reported through `converged`, not thrown.
GmresResult gmres_right(const LinearMap& op, const LinearMap& precond, const Eigen::VectorXd& rhs,
                        const GmresOptions& options = {}, const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

}  // namespace epp
