#include <gtest/gtest.h>

#include <cmath>

#include "epp/basis.hpp"
#include "epp/pnorm.hpp"
#include "support/oracles.hpp"

namespace epp {
namespace {

struct Problem {
    Eigen::Index m;
    Eigen::Index k;
    BlurOperator blur;
    SpectralBasis basis;
    Eigen::VectorXd y_k;
    Eigen::MatrixXd lw0;  // dense L W_0
    Eigen::VectorXd lxk;  // dense L W_k y_k
};

// DCT problems use a symmetric Gaussian; SVD problems an asymmetric random
// separable kernel, whose singular vectors are not cosines.
Problem make_problem(Eigen::Index m, Eigen::Index k, std::uint64_t seed, BasisKind kind = BasisKind::dct) {
    const BlurOperator blur = kind == BasisKind::dct ? blur_from_psf(make_gaussian_psf(1.0, 5), m)
                                                     : blur_from_psf(oracle::random_smooth_psf(5, seed), m);
    SpectralBasis basis = kind == BasisKind::dct ? build_dct_basis(blur) : build_svd_basis(blur);
    Eigen::VectorXd y_k = basis.analyze_head(k, oracle::random_image(m, seed));
    const Eigen::MatrixXd w = oracle::reorder_columns(
        kind == BasisKind::dct ? oracle::dense_dct_basis(m)
                               : Eigen::MatrixXd(Eigen::kroneckerProduct(basis.v_row(), basis.v_col())),
        basis.ordering());
    const Eigen::MatrixXd l = oracle::dense_gradient(m);
    Eigen::MatrixXd lw0 = l * w.rightCols(m * m - k);
    Eigen::VectorXd lxk = l * (w.leftCols(k) * y_k);
    return {m, k, blur, std::move(basis), std::move(y_k), std::move(lw0), std::move(lxk)};
}

IrlsOptions tight(double p) {
    IrlsOptions o;
    o.p = p;
    o.inner_tol = 1e-10;
    o.outer_tol = 1e-9;
    o.max_outer = 200;
    return o;
}

TEST(IrlsWeights, ExamplesFromDefinition) {
    const IrlsWeights w = irls_weights((Eigen::VectorXd(2) << 1.0, 4.0).finished(), 1.5, 1e-8);
    EXPECT_NEAR(w.weights(0), 1.0, 1e-15);
    EXPECT_NEAR(w.weights(1), std::pow(4.0, -0.25), 1e-15);
    EXPECT_NEAR(w.squared(1), 0.5, 1e-15);
}

TEST(IrlsWeights, ZeroResidualIsClamped) {
    const IrlsWeights w = irls_weights((Eigen::VectorXd(3) << 0.0, 2.0, -1.0).finished(), 1.2, 1e-6);
    EXPECT_NEAR(w.weights(0), std::pow(2e-6, -0.4), 1e-9 * std::pow(2e-6, -0.4));
    EXPECT_NEAR(w.weights(2), 1.0, 1e-15);
    const IrlsWeights z = irls_weights(Eigen::VectorXd::Zero(4), 1.2, 1e-6);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(z.weights(i), std::pow(1e-6, -0.4), 1e-6);
    EXPECT_TRUE(z.weights.allFinite());
}

TEST(IrlsWeights, UnitForPTwo) {
    const IrlsWeights w = irls_weights(oracle::random_vector(30, 1), 2.0, 1e-8);
    EXPECT_EQ(w.weights, Eigen::VectorXd::Ones(30));
}

TEST(LineSearch, FindsQuadraticMinimum) {
    EXPECT_NEAR(line_search([](double a) { return (a - 0.7) * (a - 0.7); }), 0.7, 1e-4);
    EXPECT_NEAR(line_search([](double a) { return std::abs(a - 1.3); }), 1.3, 1e-4);
}

TEST(LineSearch, IncreasingFunctionStaysAtZero) {
    EXPECT_EQ(line_search([](double a) { return a; }), 0.0);
}

TEST(LineSearch, DecreasingFunctionReachesUpperEnd) {
    EXPECT_NEAR(line_search([](double a) { return -a; }), 2.0, 1e-4);
}

TEST(Pnorm, MatchesDirectFormula) {
    const Eigen::VectorXd v = oracle::random_vector(50, 2);
    for (double p : {1.01, 1.3, 2.0}) {
        EXPECT_NEAR(pnorm(v, p), std::pow(oracle::power_sum(v, p), 1.0 / p), 1e-12 * pnorm(v, p));
    }
    EXPECT_NEAR(pnorm(Eigen::VectorXd::Constant(4, 1e200), 1.5), 1e200 * std::pow(4.0, 1.0 / 1.5), 1e188);
    EXPECT_EQ(pnorm(Eigen::VectorXd::Zero(3), 1.2), 0.0);
}

TEST(IrlsOptions, ValidatesP) {
    IrlsOptions o;
    o.p = 1.0;
    EXPECT_THROW(o.validate(), InvalidParameter);
    o.p = 2.5;
    EXPECT_THROW(o.validate(), InvalidParameter);
    o.p = 2.0;
    EXPECT_NO_THROW(o.validate());
    o.p = 1.5;
    o.max_outer = 0;
    EXPECT_THROW(o.validate(), InvalidParameter);
}

TEST(SolveCorrection, ConstantSubspaceImageStopsImmediately) {
    const Eigen::Index m = 8;
    const BlurOperator blur = blur_from_psf(make_gaussian_psf(1.0, 3), m);
    const SpectralBasis basis = build_dct_basis(blur);
    Eigen::VectorXd y_k = Eigen::VectorXd::Zero(5);
    y_k(0) = 3.0;  // DC only
    const CorrectionResult r = solve_correction(blur, basis, 5, y_k, IrlsOptions{});
    EXPECT_TRUE(r.trace.records.empty());
    EXPECT_TRUE(r.trace.converged);
    EXPECT_EQ(r.trace.initial_objective, 0.0);
    EXPECT_EQ(r.y0.norm(), 0.0);
}

TEST(SolveCorrection, DctCorrectionVanishesForPTwo) {
    // The DCT also diagonalizes L^T L, so the cross term W_0^T L^T L W_k is zero.
    const Problem pr = make_problem(8, 12, 3);
    EXPECT_LE((pr.lw0.transpose() * pr.lxk).norm(), 1e-12 * pr.lxk.norm());
    const CorrectionResult r = solve_correction(pr.blur, pr.basis, pr.k, pr.y_k, tight(2.0));
    EXPECT_LE(r.y0.norm(), 1e-12 * pr.y_k.norm());
}

TEST(SolveCorrection, PTwoMatchesDenseLeastSquares) {
    const Problem pr = make_problem(8, 12, 3, BasisKind::svd);
    const CorrectionResult r = solve_correction(pr.blur, pr.basis, pr.k, pr.y_k, tight(2.0));
    const Eigen::VectorXd ls = oracle::least_squares(pr.lw0, pr.lxk);
    EXPECT_LE((r.y0 - ls).norm(), 1e-7 * ls.norm());
    EXPECT_TRUE(r.trace.converged);
}

TEST(SolveCorrection, MatchesFirstOrderMinimizer) {
    const Problem pr = make_problem(6, 6, 4, BasisKind::svd);
    for (double p : {1.3, 1.6}) {
        const CorrectionResult r = solve_correction(pr.blur, pr.basis, pr.k, pr.y_k, tight(p));
        const Eigen::VectorXd y0 = oracle::least_squares(pr.lw0, pr.lxk);
        const Eigen::VectorXd gd = oracle::gradient_descent_pnorm(pr.lw0, pr.lxk, p, 50000, y0);
        const double f_gd = std::pow(oracle::power_sum(pr.lw0 * gd + pr.lxk, p), 1.0 / p);
        const double f_irls = r.trace.final_objective();
        EXPECT_LE(f_irls, f_gd * (1.0 + 1e-6)) << "p=" << p;
        EXPECT_NEAR(f_irls, f_gd, 1e-4 * f_gd) << "p=" << p;
    }
}

TEST(SolveCorrection, ObjectiveIsMonotone) {
    for (double p : {1.01, 1.1, 1.5}) {
        const Problem pr = make_problem(16, 30, 5);
        IrlsOptions o;
        o.p = p;
        const CorrectionResult r = solve_correction(pr.blur, pr.basis, pr.k, pr.y_k, o);
        double prev = r.trace.initial_objective;
        for (const IrlsRecord& rec : r.trace.records) {
            EXPECT_LE(rec.objective, prev + 1e-12 * prev);
            prev = rec.objective;
        }
        EXPECT_LE(r.trace.final_objective(), r.trace.initial_objective);
    }
}

TEST(SolveCorrection, CorrectionLivesInComplement) {
    const Problem pr = make_problem(16, 40, 6);
    IrlsOptions o;
    o.p = 1.2;
    const CorrectionResult r = solve_correction(pr.blur, pr.basis, pr.k, pr.y_k, o);
    const Image x0 = pr.basis.synthesize_tail(pr.k, r.y0);
    EXPECT_LE(pr.basis.analyze_head(pr.k, x0).norm(), 1e-10 * x0.norm());
}

TEST(SolveCorrection, ProjectedOperatorIsSelfAdjoint) {
    const Problem pr = make_problem(8, 10, 7);
    const WeightedDiffusion w(8, oracle::random_vector(gradient_length(8), 8).cwiseAbs());
    auto op = [&](const Eigen::VectorXd& v) {
        return pr.basis.analyze_tail(pr.k, w.apply(pr.basis.synthesize_tail(pr.k, v)));
    };
    const Eigen::VectorXd u = oracle::random_vector(64 - 10, 9);
    const Eigen::VectorXd v = oracle::random_vector(64 - 10, 10);
    EXPECT_NEAR(op(u).dot(v), u.dot(op(v)), 1e-12 * std::abs(u.dot(op(v))));
}

TEST(SolveCorrection, RejectsBadArguments) {
    const Problem pr = make_problem(8, 10, 11);
    EXPECT_THROW(solve_correction(pr.blur, pr.basis, 0, Eigen::VectorXd(), IrlsOptions{}), InvalidParameter);
    EXPECT_THROW(solve_correction(pr.blur, pr.basis, 10, Eigen::VectorXd::Zero(9), IrlsOptions{}), DimensionMismatch);
    IrlsOptions bad;
    bad.p = 1.0;
    EXPECT_THROW(solve_correction(pr.blur, pr.basis, 10, pr.y_k, bad), InvalidParameter);
}

}  // namespace
}  // namespace epp
