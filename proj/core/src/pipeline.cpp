#include "epp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <string>

namespace epp {

namespace {

constexpr double kUniquenessTol = 1e-10;
constexpr double kSpectralDropTol = 1e-14;
constexpr double kCglsTol = 1e-8;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool basis_diagonalizes(const BlurOperator& blur, const SpectralBasis& basis) {
    if (!blur.exact()) return false;
    return basis.kind() == BasisKind::svd || blur.symmetric();
}

// CGLS on min ||A W_k y - b||, stopping on the normal-equation residual.
ProjectedSolution cgls_projected(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k, const Image& b) {
    auto forward = [&](const Eigen::VectorXd& y) { return apply_blur(blur, basis.synthesize_head(y)); };
    auto adjoint = [&](const Image& r) { return basis.analyze_head(k, apply_blur(blur, r, true)); };

    ProjectedSolution out;
    out.direct = false;
    out.y_k = Eigen::VectorXd::Zero(k);
    Image r = b;
    Eigen::VectorXd s = adjoint(r);
    Eigen::VectorXd d = s;
    const double s0 = s.norm();
    if (s0 == 0.0) return out;
    double gamma = s.squaredNorm();
    const int max_iter = int(std::min<Eigen::Index>(10 * k, 10000));
    for (int it = 0; it < max_iter; ++it) {
        const Image q = forward(d);
        const double alpha = gamma / q.dot(q);
        out.y_k += alpha * d;
        r -= alpha * q;
        s = adjoint(r);
        out.iterations = it + 1;
        if (s.norm() <= kCglsTol * s0) break;
        const double next = s.squaredNorm();
        d = s + (next / gamma) * d;
        gamma = next;
    }
    return out;
}

}  // namespace

bool check_uniqueness(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k) {
    const Eigen::Index m = basis.side();
    if (blur.side() != m) throw DimensionMismatch("blur operator and basis sizes differ");
    const Image e(m, 1.0);
    const Image projected = basis.synthesize_head(basis.analyze_head(k, e));
    return apply_blur(blur, projected).norm() > kUniquenessTol * e.norm();
}

ProjectedSolution solve_projected(const BlurOperator& blur, const SpectralBasis& basis, Eigen::Index k, const Image& b) {
    const Eigen::Index n = basis.dimension();
    if (k < 1 || k >= n) throw InvalidParameter("subspace dimension k must satisfy 1 <= k < n");
    if (b.side() != basis.side()) throw DimensionMismatch("image and basis sizes differ");
    if (!basis_diagonalizes(blur, basis)) return cgls_projected(blur, basis, k, b);

    // A W_k = Q_k diag(lambda_k): y_i = beta_i / lambda_i.
    const Eigen::MatrixXd grid = basis.forward_left(b.matrix());
    const auto& order = basis.ordering();
    const double top = basis.spectral_values().maxCoeff();
    ProjectedSolution out;
    out.y_k.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double lambda = basis.signed_values()(i);
        if (std::abs(lambda) <= kSpectralDropTol * top) {
            out.y_k(i) = 0.0;
            ++out.dropped;
        } else {
            out.y_k(i) = grid.data()[order[std::size_t(i)]] / lambda;
        }
    }
    return out;
}

EppResult epp_solve(const BlurOperator& blur, const SpectralBasis& basis, const Image& b, const EppOptions& options,
                    std::optional<Eigen::Index> k) {
    options.irls.validate();
    const Eigen::Index n = basis.dimension();
    EppResult result;
    result.p = options.irls.p;

    auto start = std::chrono::steady_clock::now();
    if (!k) {
        const Eigen::VectorXd beta = spectral_coefficients(basis, blur, b);
        const GcvCurve curve = gcv_curve(beta, options.gcv_max_k.value_or(std::max<Eigen::Index>(n / 2, 1)));
        result.gcv_argmin = curve.argmin;
        result.gcv_min = curve.values(curve.argmin - 1);
        k = choose_k(curve, options.shrink, n);
    }
    result.k = *k;
    result.seconds_select = seconds_since(start);

    if (!check_uniqueness(blur, basis, result.k)) {
        throw UniquenessError(
            "no unique solution: N(A W_k W_k^T) and N(L) = span{e} intersect nontrivially "
            "(A annihilates the projection of the constant image onto the signal subspace)");
    }

    start = std::chrono::steady_clock::now();
    result.projected = solve_projected(blur, basis, result.k, b);
    result.x_k = basis.synthesize_head(result.projected.y_k);
    result.seconds_projected = seconds_since(start);

    start = std::chrono::steady_clock::now();
    CorrectionResult correction = solve_correction(blur, basis, result.k, result.projected.y_k, options.irls);
    result.x_0 = basis.synthesize_tail(result.k, correction.y0);
    result.trace = std::move(correction.trace);
    result.degraded = !result.trace.converged;
    result.seconds_correction = seconds_since(start);

    result.x = result.x_k + result.x_0;
    return result;
}

}  // namespace epp
