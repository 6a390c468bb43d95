#include "epp/operators.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

namespace epp {

namespace {

// Kernel second singular value below this fraction of the first counts as rank 1.
constexpr double kSeparableRankTol = 1e-10;

Eigen::Index reflect(Eigen::Index idx, Eigen::Index m) {
    if (idx < 0) return -idx - 1;
    if (idx >= m) return 2 * m - idx - 1;
    return idx;
}

void check_odd_size(Eigen::Index size) {
    if (size < 1 || size % 2 == 0) {
        throw InvalidParameter("PSF size must be a positive odd integer, got " + std::to_string(size));
    }
}

Psf normalized(Eigen::MatrixXd kernel, PsfKind kind) {
    const double total = kernel.sum();
    if (!(total > 0.0)) throw InvalidParameter("PSF kernel must have positive sum");
    kernel /= total;
    Psf psf;
    psf.center_row = (kernel.rows() - 1) / 2;
    psf.center_col = (kernel.cols() - 1) / 2;
    psf.kernel = std::move(kernel);
    psf.kind = kind;
    return psf;
}

}  // namespace

Psf make_gaussian_psf(double sigma, Eigen::Index size, GaussianForm form) {
    check_odd_size(size);
    if (!(sigma > 0.0)) throw InvalidParameter("Gaussian sigma must be positive");
    const Eigen::Index c = (size - 1) / 2;
    Eigen::MatrixXd k(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        for (Eigen::Index i = 0; i < size; ++i) {
            const double d2 = double((i - c) * (i - c) + (j - c) * (j - c));
            k(i, j) = form == GaussianForm::standard ? std::exp(-d2 / (2.0 * sigma * sigma))
                                                     : std::exp(-0.5 * sigma * sigma * d2);
        }
    }
    return normalized(std::move(k), PsfKind::gaussian);
}

Psf make_out_of_focus_psf(double radius, Eigen::Index size) {
    check_odd_size(size);
    if (!(radius > 0.0)) throw InvalidParameter("out-of-focus radius must be positive");
    if (double(size) < 2.0 * radius + 1.0) {
        throw InvalidParameter("out-of-focus disk of radius " + std::to_string(radius) +
                               " is clipped by a support of size " + std::to_string(size));
    }
    const Eigen::Index c = (size - 1) / 2;
    const double r2 = radius * radius;
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        for (Eigen::Index i = 0; i < size; ++i) {
            const double d2 = double((i - c) * (i - c) + (j - c) * (j - c));
            if (d2 <= r2) k(i, j) = 1.0 / (M_PI * r2);
        }
    }
    return normalized(std::move(k), PsfKind::out_of_focus);
}

Psf make_custom_psf(Eigen::MatrixXd kernel) {
    if (kernel.rows() != kernel.cols()) throw InvalidParameter("PSF kernel must be square");
    check_odd_size(kernel.rows());
    if ((kernel.array() < 0.0).any()) throw InvalidParameter("PSF kernel must be nonnegative");
    return normalized(std::move(kernel), PsfKind::custom);
}

Eigen::Index default_gaussian_size(double sigma) { return 4 * Eigen::Index(std::ceil(sigma)) + 1; }

Eigen::Index default_disk_size(double radius) { return 2 * Eigen::Index(std::ceil(radius)) + 1; }

BlurOperator::BlurOperator(Eigen::MatrixXd factor_row, Eigen::MatrixXd factor_col, bool exact)
    : factor_row_(std::move(factor_row)), factor_col_(std::move(factor_col)), exact_(exact) {
    if (factor_row_.rows() != factor_row_.cols() || factor_col_.rows() != factor_col_.cols() ||
        factor_row_.rows() != factor_col_.rows()) {
        throw DimensionMismatch("blur factors must be square and of equal size");
    }
    if (factor_row_.rows() < 2) throw InvalidParameter("blur operator needs m >= 2");
}

bool BlurOperator::symmetric() const {
    auto sym = [](const Eigen::MatrixXd& f) {
        return (f - f.transpose()).norm() <= 1e-12 * std::max(1.0, f.norm());
    };
    return sym(factor_row_) && sym(factor_col_);
}

Eigen::MatrixXd reflexive_convolution_matrix(const Eigen::VectorXd& taps, Eigen::Index center, Eigen::Index m) {
    if (taps.size() > m) throw InvalidParameter("kernel support exceeds image size");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index t = 0; t < taps.size(); ++t) {
            a(i, reflect(i - (t - center), m)) += taps(t);
        }
    }
    return a;
}

BlurOperator blur_from_psf(const Psf& psf, Eigen::Index m) {
    if (psf.size() > m) throw InvalidParameter("image side must be at least the PSF size");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(psf.kernel, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const bool exact = s.size() < 2 || s(1) < kSeparableRankTol * s(0);

    // Dominant singular pair. Each factor is rescaled to unit sum so the
    // operator still maps constants to constants.
    Eigen::VectorXd along_rows = svd.matrixU().col(0);
    Eigen::VectorXd along_cols = svd.matrixV().col(0);
    along_rows /= along_rows.sum();
    along_cols /= along_cols.sum();

    return BlurOperator(reflexive_convolution_matrix(along_cols, psf.center_col, m),
                        reflexive_convolution_matrix(along_rows, psf.center_row, m), exact);
}

Image apply_blur(const BlurOperator& op, const Image& x, bool adjoint) {
    if (x.side() != op.side()) throw DimensionMismatch("image side does not match blur operator");
    if (adjoint) return Image(Eigen::MatrixXd(op.factor_col().transpose() * x.matrix() * op.factor_row()));
    return Image(Eigen::MatrixXd(op.factor_col() * x.matrix() * op.factor_row().transpose()));
}

Image convolve_reflexive(const Psf& psf, const Image& x) {
    const Eigen::Index m = x.side();
    const Eigen::Index s = psf.size();
    if (s > m) throw InvalidParameter("image side must be at least the PSF size");
    Image out(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            double acc = 0.0;
            for (Eigen::Index b = 0; b < s; ++b) {
                const Eigen::Index jj = reflect(j - (b - psf.center_col), m);
                for (Eigen::Index a = 0; a < s; ++a) {
                    acc += psf.kernel(a, b) * x(reflect(i - (a - psf.center_row), m), jj);
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

void apply_gradient(const Image& x, Eigen::VectorXd& out) {
    const Eigen::Index m = x.side();
    const Eigen::Index half = m * (m - 1);
    out.resize(2 * half);
    const auto& X = x.matrix();
    Eigen::Map<Eigen::MatrixXd> across_cols(out.data(), m, m - 1);
    Eigen::Map<Eigen::MatrixXd> across_rows(out.data() + half, m - 1, m);
    across_cols = X.rightCols(m - 1) - X.leftCols(m - 1);
    across_rows = X.bottomRows(m - 1) - X.topRows(m - 1);
}

Eigen::VectorXd apply_gradient(const Image& x) {
    Eigen::VectorXd out;
    apply_gradient(x, out);
    return out;
}

Image apply_gradient_adjoint(const Eigen::VectorXd& g, Eigen::Index m) {
    const Eigen::Index half = m * (m - 1);
    if (g.size() != 2 * half) {
        throw DimensionMismatch("gradient vector length " + std::to_string(g.size()) + " != 2m(m-1) = " +
                                std::to_string(2 * half));
    }
    Eigen::Map<const Eigen::MatrixXd> across_cols(g.data(), m, m - 1);
    Eigen::Map<const Eigen::MatrixXd> across_rows(g.data() + half, m - 1, m);
    Image out(m);
    auto& X = out.matrix();
    X.rightCols(m - 1) += across_cols;
    X.leftCols(m - 1) -= across_cols;
    X.bottomRows(m - 1) += across_rows;
    X.topRows(m - 1) -= across_rows;
    return out;
}

}  // namespace epp
