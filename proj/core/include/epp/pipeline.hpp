#pragma once

#include <optional>

#include <Eigen/Core>

#include "epp/basis.hpp"
#include "epp/operators.hpp"
#include "epp/pnorm.hpp"
#include "epp/select.hpp"

namespace epp {

struct EppOptions {
    IrlsOptions irls;
    double shrink = kDefaultShrink;
    /// Upper end of the GCV search; defaults to n/2.
    std::optional<Eigen::Index> gcv_max_k;
};

struct ProjectedSolution {
    Eigen::VectorXd y_k;
    bool direct = true;         // solved by spectral division rather than CGLS
    Eigen::Index dropped = 0;   // head coordinates with vanishing spectral value
    int iterations = 0;         // CGLS iterations when not direct
};

struct EppResult {
    Image x_k;  // W_k y_k
    Image x_0;  // W_0 y_0
    Image x;    // x_k + x_0
    Eigen::Index k = 0;
    double p = 0.0;

    std::optional<Eigen::Index> gcv_argmin;
    std::optional<double> gcv_min;
    ProjectedSolution projected;
    IrlsTrace trace;
    bool degraded = false;  // IRLS hit its iteration budget

    double seconds_select = 0.0;
    double seconds_projected = 0.0;
    double seconds_correction = 0.0;
};

/// True iff ||A W_k W_k^T e|| > 1e-10 ||e||, the condition under which the
/// modified projection problem has a unique minimizer.
bool check_uniqueness(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k);

/// y_k = argmin ||A W_k y - b||_2.
ProjectedSolution solve_projected(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k, const Image& b);

EppResult epp_solve(const BlurOperator& blur, const SpectralBasis& basis, const Image& b, const EppOptions& options,
                    std::optional<Eigen::Index> k = std::nullopt);

}  // namespace epp
