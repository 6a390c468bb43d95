#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "epp/basis.hpp"
#include "epp/multigrid.hpp"
#include "epp/operators.hpp"

namespace epp {

struct IrlsOptions {
    double p = 1.01;
    int max_outer = 30;
    double outer_tol = 1e-3;    // relative step norm
    double inner_tol = 1e-2;    // GMRES relative residual
    int gmres_restart = 50;
    int gmres_max = 200;
    double weight_floor = 1e-8;  // relative to ||r||_inf
    bool warm_start = true;      // solve for the step from z = 0 (q = current y_0)
    MgOptions multigrid;

    /// Throws InvalidParameter unless 1 < p <= 2 and all budgets are positive.
    /// p = 2 is accepted so the least-squares case runs through the same code.
    void validate() const;
};

struct IrlsRecord {
    double objective = 0.0;  // ||L x||_p after the step
    double step_norm = 0.0;  // ||alpha z|| / ||y_0||
    double alpha = 0.0;
    int gmres_iterations = 0;
    double gmres_residual = 0.0;
    bool gmres_converged = false;
};

struct IrlsTrace {
    double initial_objective = 0.0;
    std::vector<IrlsRecord> records;
    bool converged = false;

    [[nodiscard]] int total_gmres_iterations() const;
    [[nodiscard]] double final_objective() const {
        return records.empty() ? initial_objective : records.back().objective;
    }
};

struct IrlsWeights {
    Eigen::VectorXd weights;  // diagonal of D
    Eigen::VectorXd squared;  // diagonal of D^2
};

/// w_i = max(|r_i|, floor * ||r||_inf)^((p-2)/2). A zero residual uses
/// floor itself as the clamp.
IrlsWeights irls_weights(const Eigen::VectorXd& residual, double p, double floor);

/// Golden-section search for the minimizer of a convex f on [lo, hi] down to
/// an interval of `width`. Returns the best sampled point, and never one with
/// f above f(lo).
double line_search(const std::function<double(double)>& f, double lo = 0.0, double hi = 2.0, double width = 1e-4);

/// Scaled p-norm, safe against overflow for tiny p-1.
double pnorm(const Eigen::VectorXd& v, double p);

struct CorrectionResult {
    Eigen::VectorXd y0;
    IrlsTrace trace;
};

/// y_0 = argmin ||L W_0 y + L W_k y_k||_p via IRLS on the projected normal
/// equations W_0^T (L^T D^2 L) W_0 q = -W_0^T (L^T D^2 L) W_k y_k, solved by
/// GMRES with the right preconditioner v -> W_0^T V-cycle(W_0 v).
CorrectionResult solve_correction(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k,
                                  const Eigen::VectorXd& y_k, const IrlsOptions& options);

}  // namespace epp
