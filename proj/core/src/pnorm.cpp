#include "epp/pnorm.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "epp/gmres.hpp"

namespace epp {

void IrlsOptions::validate() const {
    if (!(p > 1.0 && p <= 2.0)) throw InvalidParameter("p must satisfy 1 < p <= 2, got " + std::to_string(p));
    if (max_outer < 1 || gmres_restart < 1 || gmres_max < 1) {
        throw InvalidParameter("iteration budgets must be positive");
    }
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0) || !(weight_floor > 0.0)) {
        throw InvalidParameter("tolerances and weight floor must be positive");
    }
}

int IrlsTrace::total_gmres_iterations() const {
    return std::accumulate(records.begin(), records.end(), 0,
                           [](int acc, const IrlsRecord& r) { return acc + r.gmres_iterations; });
}

IrlsWeights irls_weights(const Eigen::VectorXd& residual, double p, double floor) {
    if (!(floor > 0.0)) throw InvalidParameter("weight floor must be positive");
    const double top = residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0;
    const double clamp = floor * (top > 0.0 ? top : 1.0);
    const double exponent = (p - 2.0) / 2.0;
    IrlsWeights w;
    w.weights = residual.cwiseAbs().cwiseMax(clamp).array().pow(exponent).matrix();
    w.squared = w.weights.cwiseAbs2();
    return w;
}

double line_search(const std::function<double(double)>& f, double lo, double hi, double width) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double best_x = lo;
    double best_f = f(lo);
    auto sample = [&](double x) {
        const double v = f(x);
        if (v < best_f) {
            best_f = v;
            best_x = x;
        }
        return v;
    };

    double a = lo, b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = sample(c), fd = sample(d);
    while (b - a > width) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = sample(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = sample(d);
        }
    }
    sample(0.5 * (a + b));
    return best_x;
}

double pnorm(const Eigen::VectorXd& v, double p) {
    if (v.size() == 0) return 0.0;
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    return scale * std::pow((v.cwiseAbs() / scale).array().pow(p).sum(), 1.0 / p);
}

CorrectionResult solve_correction(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k,
                                  const Eigen::VectorXd& y_k, const IrlsOptions& options) {
    options.validate();
    const Eigen::Index m = basis.side();
    const Eigen::Index n = basis.dimension();
    if (blur.side() != m) throw DimensionMismatch("blur operator and basis sizes differ");
    if (k < 1 || k >= n) throw InvalidParameter("subspace dimension k must satisfy 1 <= k < n");
    if (y_k.size() != k) throw DimensionMismatch("y_k must have length k");

    const Image x_k = basis.synthesize_head(y_k);
    CorrectionResult out;
    out.y0 = Eigen::VectorXd::Zero(n - k);

    Eigen::VectorXd grad = apply_gradient(x_k);
    double objective = pnorm(grad, options.p);
    out.trace.initial_objective = objective;
    if (grad.cwiseAbs().maxCoeff() == 0.0) {
        out.trace.converged = true;
        return out;
    }

    GmresOptions inner{options.inner_tol, options.gmres_restart, options.gmres_max};

    for (int iter = 0; iter < options.max_outer; ++iter) {
        // r = b_hat - A_hat y_0 = -L x, so |r| = |L x|.
        const IrlsWeights w = irls_weights(grad, options.p, options.weight_floor);
        const WeightedDiffusion diffusion(m, w.squared);
        const MgHierarchy hierarchy = mg_setup(diffusion, options.multigrid);

        const LinearMap op = [&](const Eigen::VectorXd& v) {
            return basis.analyze_tail(k, diffusion.apply(basis.synthesize_tail(k, v)));
        };
        const LinearMap precond = [&](const Eigen::VectorXd& v) {
            return basis.analyze_tail(k, mg_vcycle(hierarchy, basis.synthesize_tail(k, v)));
        };
        // Warm start solves for the step z = q - y_0 directly, so the GMRES
        // tolerance is relative to the current residual rather than to the
        // full right-hand side, which the previous iterate may already meet.
        Eigen::VectorXd rhs = -basis.analyze_tail(k, diffusion.apply(x_k));
        if (options.warm_start) rhs -= op(out.y0);

        const GmresResult q = gmres_right(op, precond, rhs, inner);
        const Eigen::VectorXd z = options.warm_start ? q.solution : Eigen::VectorXd(q.solution - out.y0);

        const Eigen::VectorXd dgrad = apply_gradient(basis.synthesize_tail(k, z));
        const double alpha = line_search([&](double a) { return pnorm(grad + a * dgrad, options.p); });

        const Eigen::VectorXd step = alpha * z;
        out.y0 += step;
        apply_gradient(x_k + basis.synthesize_tail(k, out.y0), grad);
        objective = pnorm(grad, options.p);

        IrlsRecord rec;
        rec.objective = objective;
        rec.alpha = alpha;
        rec.step_norm = step.norm() / std::max(out.y0.norm(), std::numeric_limits<double>::min());
        rec.gmres_iterations = q.iterations;
        rec.gmres_residual = q.residual;
        rec.gmres_converged = q.converged;
        out.trace.records.push_back(rec);

        if (rec.step_norm < options.outer_tol) {
            out.trace.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace epp
