#include "epp/metrics.hpp"

#include <cmath>
#include <limits>

namespace epp {

namespace {

constexpr Eigen::Index kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

void check_pair(const Image& x, const Image& truth) {
    if (x.side() != truth.side()) throw DimensionMismatch("images differ in size");
}

Eigen::VectorXd gaussian_window() {
    Eigen::VectorXd w(kWindow);
    const double c = double(kWindow - 1) / 2.0;
    for (Eigen::Index i = 0; i < kWindow; ++i) {
        w(i) = std::exp(-(double(i) - c) * (double(i) - c) / (2.0 * kWindowSigma * kWindowSigma));
    }
    return w / w.sum();
}

// Separable "valid" filtering: out(i,j) = sum_{a,b} w_a w_b in(i+a, j+b).
Eigen::MatrixXd filter_valid(const Eigen::MatrixXd& in, const Eigen::VectorXd& w) {
    const Eigen::Index m = in.rows();
    const Eigen::Index out_side = m - kWindow + 1;
    Eigen::MatrixXd rows_done(out_side, m);
    for (Eigen::Index i = 0; i < out_side; ++i) {
        rows_done.row(i) = w.transpose() * in.middleRows(i, kWindow);
    }
    Eigen::MatrixXd out(out_side, out_side);
    for (Eigen::Index j = 0; j < out_side; ++j) {
        out.col(j) = rows_done.middleCols(j, kWindow) * w;
    }
    return out;
}

}  // namespace

double relative_error(const Image& x, const Image& truth) {
    check_pair(x, truth);
    const double denom = truth.norm();
    if (denom == 0.0) throw UndefinedMetric("relative error is undefined for a zero reference image");
    return (x - truth).norm() / denom;
}

double mssim(const Image& x, const Image& truth, double range) {
    check_pair(x, truth);
    if (x.side() < kWindow) throw UndefinedMetric("MSSIM needs images of at least 11x11 pixels");
    if (!(range > 0.0)) throw InvalidParameter("dynamic range must be positive");
    const double c1 = (kK1 * range) * (kK1 * range);
    const double c2 = (kK2 * range) * (kK2 * range);
    const Eigen::VectorXd w = gaussian_window();

    const Eigen::MatrixXd& a = x.matrix();
    const Eigen::MatrixXd& b = truth.matrix();
    const Eigen::ArrayXXd mu_a = filter_valid(a, w).array();
    const Eigen::ArrayXXd mu_b = filter_valid(b, w).array();
    const Eigen::ArrayXXd var_a = filter_valid(a.cwiseProduct(a), w).array() - mu_a.square();
    const Eigen::ArrayXXd var_b = filter_valid(b.cwiseProduct(b), w).array() - mu_b.square();
    const Eigen::ArrayXXd cov = filter_valid(a.cwiseProduct(b), w).array() - mu_a * mu_b;

    const Eigen::ArrayXXd ssim = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                                 ((mu_a.square() + mu_b.square() + c1) * (var_a + var_b + c2));
    return ssim.mean();
}

double psnr(const Image& x, const Image& truth, double range) {
    check_pair(x, truth);
    if (!(range > 0.0)) throw InvalidParameter("dynamic range must be positive");
    const double mse = (x - truth).matrix().squaredNorm() / double(x.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(range * range / mse);
}

QualityReport evaluate(const Image& x, const Image& truth, double range) {
    QualityReport r;
    r.relative_error = relative_error(x, truth);
    r.psnr = psnr(x, truth, range);
    r.mssim = mssim(x, truth, range);
    return r;
}

}  // namespace epp
