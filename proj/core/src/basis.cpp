#include "epp/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

#include "epp/dct.hpp"

namespace epp {

namespace {

void check_k(Eigen::Index k, Eigen::Index n) {
    if (k < 1 || k >= n) {
        throw InvalidParameter("subspace dimension k must satisfy 1 <= k < n, got k=" + std::to_string(k) +
                               ", n=" + std::to_string(n));
    }
}

// Largest-magnitude entry of each V column made positive; U follows so
// that A v = sigma u still holds.
void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        Eigen::Index at = 0;
        v.col(j).cwiseAbs().maxCoeff(&at);
        if (v(at, j) < 0.0) {
            v.col(j) = -v.col(j);
            u.col(j) = -u.col(j);
        }
    }
}

}  // namespace

void SpectralBasis::set_ordering(const Eigen::MatrixXd& magnitude, const Eigen::MatrixXd& signed_grid, bool dc_first) {
    const Eigen::Index m = side_;
    const Eigen::Index n = m * m;
    ordering_.resize(std::size_t(n));
    std::iota(ordering_.begin(), ordering_.end(), Eigen::Index{0});

    // Snap to a 2^-40 relative grid so values equal up to rounding noise
    // tie exactly and fall back to the frequency tie-break.
    const double top = magnitude.maxCoeff();
    const double quantum = top > 0.0 ? top * std::ldexp(1.0, -40) : 1.0;
    auto snap = [quantum](double v) { return std::round(v / quantum) * quantum; };
    const Eigen::MatrixXd snapped = magnitude.unaryExpr(snap);
    const Eigen::MatrixXd snapped_signed = signed_grid.unaryExpr(snap);
    const double* mag = snapped.data();
    // Ties go to ascending (row frequency, column frequency).
    std::sort(ordering_.begin(), ordering_.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (mag[a] != mag[b]) return mag[a] > mag[b];
        const Eigen::Index ra = a % m, ca = a / m, rb = b % m, cb = b / m;
        return ra != rb ? ra < rb : ca < cb;
    });
    if (dc_first && ordering_.front() != 0) {
        auto it = std::find(ordering_.begin(), ordering_.end(), Eigen::Index{0});
        std::rotate(ordering_.begin(), it, it + 1);
    }
    spectral_values_.resize(n);
    signed_values_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        spectral_values_(i) = mag[ordering_[std::size_t(i)]];
        signed_values_(i) = snapped_signed.data()[ordering_[std::size_t(i)]];
    }
}

SpectralBasis build_dct_basis(const BlurOperator& blur) {
    if (!blur.symmetric()) {
        throw UnsupportedOperator("DCT basis requires symmetric blur factors (doubly symmetric PSF)");
    }
    const Eigen::Index m = blur.side();
    SpectralBasis basis;
    basis.kind_ = BasisKind::dct;
    basis.side_ = m;
    basis.exact_ = blur.exact();

    // Eigenvalues of A in the DCT basis: transform of A applied to the
    // (0,0) impulse, divided by the transform of the impulse itself.
    Image impulse(m);
    impulse(0, 0) = 1.0;
    const Eigen::MatrixXd response = dct2(apply_blur(blur, impulse)).matrix();
    Eigen::VectorXd first_column(m);
    for (Eigen::Index p = 0; p < m; ++p) {
        const double w = p == 0 ? std::sqrt(1.0 / double(m)) : std::sqrt(2.0 / double(m));
        first_column(p) = w * std::cos(double(p) * M_PI / (2.0 * double(m)));
    }
    const Eigen::MatrixXd eigen = response.array() / (first_column * first_column.transpose()).array();
    basis.set_ordering(eigen.cwiseAbs(), eigen, true);
    return basis;
}

SpectralBasis build_svd_basis(const BlurOperator& blur) {
    const Eigen::Index m = blur.side();
    SpectralBasis basis;
    basis.kind_ = BasisKind::svd;
    basis.side_ = m;
    basis.exact_ = blur.exact();

    auto factor_svd = [](const Eigen::MatrixXd& f, Eigen::MatrixXd& u, Eigen::MatrixXd& v, Eigen::VectorXd& s) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(f, Eigen::ComputeFullU | Eigen::ComputeFullV);
        if (svd.info() != Eigen::Success) throw Error("SVD of a blur factor failed");
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
        fix_signs(u, v);
    };
    factor_svd(blur.factor_row(), basis.u_row_, basis.v_row_, basis.sigma_row_);
    factor_svd(blur.factor_col(), basis.u_col_, basis.v_col_, basis.sigma_col_);

    // Grid entry (i, j) pairs column-factor vector i with row-factor vector j.
    const Eigen::MatrixXd products = basis.sigma_col_ * basis.sigma_row_.transpose();
    basis.set_ordering(products, products, false);
    return basis;
}

Eigen::MatrixXd SpectralBasis::forward(const Eigen::MatrixXd& x) const {
    if (x.rows() != side_ || x.cols() != side_) throw DimensionMismatch("grid size does not match basis");
    if (kind_ == BasisKind::dct) {
        Eigen::MatrixXd buf = x;
        dct2_inplace(buf, false);
        return buf;
    }
    return v_col_.transpose() * x * v_row_;
}

Eigen::MatrixXd SpectralBasis::inverse(const Eigen::MatrixXd& coeffs) const {
    if (coeffs.rows() != side_ || coeffs.cols() != side_) throw DimensionMismatch("grid size does not match basis");
    if (kind_ == BasisKind::dct) {
        Eigen::MatrixXd buf = coeffs;
        dct2_inplace(buf, true);
        return buf;
    }
    return v_col_ * coeffs * v_row_.transpose();
}

Eigen::MatrixXd SpectralBasis::forward_left(const Eigen::MatrixXd& b) const {
    if (kind_ == BasisKind::dct) return forward(b);
    if (b.rows() != side_ || b.cols() != side_) throw DimensionMismatch("grid size does not match basis");
    return u_col_.transpose() * b * u_row_;
}

Eigen::VectorXd SpectralBasis::analyze_ordered(const Image& x) const {
    const Eigen::MatrixXd grid = forward(x.matrix());
    Eigen::VectorXd out(dimension());
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = grid.data()[ordering_[std::size_t(i)]];
    return out;
}

Image SpectralBasis::synthesize_ordered(const Eigen::VectorXd& coeffs) const {
    if (coeffs.size() > dimension()) throw DimensionMismatch("too many coefficients for basis");
    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(side_, side_);
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) grid.data()[ordering_[std::size_t(i)]] = coeffs(i);
    return Image(inverse(grid));
}

Image SpectralBasis::synthesize_tail(Eigen::Index k, const Eigen::VectorXd& tail) const {
    if (tail.size() != dimension() - k) throw DimensionMismatch("tail length must be n - k");
    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(side_, side_);
    for (Eigen::Index i = 0; i < tail.size(); ++i) grid.data()[ordering_[std::size_t(k + i)]] = tail(i);
    return Image(inverse(grid));
}

Eigen::VectorXd SpectralBasis::analyze_tail(Eigen::Index k, const Image& x) const {
    const Eigen::MatrixXd grid = forward(x.matrix());
    Eigen::VectorXd out(dimension() - k);
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = grid.data()[ordering_[std::size_t(k + i)]];
    return out;
}

Image SpectralBasis::synthesize_head(const Eigen::VectorXd& head) const { return synthesize_ordered(head); }

Eigen::VectorXd SpectralBasis::analyze_head(Eigen::Index k, const Image& x) const {
    const Eigen::MatrixXd grid = forward(x.matrix());
    Eigen::VectorXd out(k);
    for (Eigen::Index i = 0; i < k; ++i) out(i) = grid.data()[ordering_[std::size_t(i)]];
    return out;
}

Image synthesize(const SpectralBasis& basis, const CoeffSplit& split, BasisPart part) {
    const Eigen::Index n = basis.dimension();
    check_k(split.k, n);
    if (split.head.size() != split.k || split.tail.size() != n - split.k) {
        throw DimensionMismatch("coefficient split sizes inconsistent with n and k");
    }
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n);
    if (part != BasisPart::tail) full.head(split.k) = split.head;
    if (part != BasisPart::head) full.tail(n - split.k) = split.tail;
    return basis.synthesize_ordered(full);
}

CoeffSplit analyze(const SpectralBasis& basis, const Image& x, Eigen::Index k) {
    const Eigen::Index n = basis.dimension();
    check_k(k, n);
    const Eigen::VectorXd full = basis.analyze_ordered(x);
    return CoeffSplit{k, full.head(k), full.tail(n - k)};
}

}  // namespace epp
