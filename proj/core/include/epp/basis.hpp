#pragma once

#include <vector>

#include <Eigen/Core>

#include "epp/image.hpp"
#include "epp/operators.hpp"

namespace epp {

enum class BasisKind { dct, svd };

/// Orthonormal basis of image space, ordered so that the first k vectors
/// span the signal subspace. W_k and W_0 are never formed: synthesis
/// scatters coefficients into a grid and applies the inverse transform.
///
/// Coefficient grids use the same column-major indexing as images; an
/// ordered position i refers to grid entry ordering()[i].
class SpectralBasis {
public:
    [[nodiscard]] BasisKind kind() const { return kind_; }
    [[nodiscard]] Eigen::Index side() const { return side_; }
    [[nodiscard]] Eigen::Index dimension() const { return side_ * side_; }

    [[nodiscard]] const std::vector<Eigen::Index>& ordering() const { return ordering_; }

    /// Nonnegative, non-increasing along the ordering.
    [[nodiscard]] const Eigen::VectorXd& spectral_values() const { return spectral_values_; }

    /// Signed counterpart of spectral_values: DCT eigenvalues of A, or the
    /// singular value products for the SVD kind.
    [[nodiscard]] const Eigen::VectorXd& signed_values() const { return signed_values_; }

    /// False when built from a nearest-Kronecker approximation.
    [[nodiscard]] bool exact() const { return exact_; }

    /// Grid of transform coefficients of x (C X C^T, or V_col^T X V_row).
    [[nodiscard]] Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
    /// Inverse of forward.
    [[nodiscard]] Eigen::MatrixXd inverse(const Eigen::MatrixXd& coeffs) const;

    /// Grid of left-singular-vector coefficients U_col^T B U_row (svd kind);
    /// same as forward for the dct kind.
    [[nodiscard]] Eigen::MatrixXd forward_left(const Eigen::MatrixXd& b) const;

    /// Ordered coefficients [W_k W_0]^T x.
    [[nodiscard]] Eigen::VectorXd analyze_ordered(const Image& x) const;
    /// Inverse of analyze_ordered; missing trailing coefficients are zero.
    [[nodiscard]] Image synthesize_ordered(const Eigen::VectorXd& coeffs) const;

    /// W_0 y_0 for tail coefficients y_0 of length n - k.
    [[nodiscard]] Image synthesize_tail(Eigen::Index k, const Eigen::VectorXd& tail) const;
    /// W_0^T x.
    [[nodiscard]] Eigen::VectorXd analyze_tail(Eigen::Index k, const Image& x) const;
    /// W_k y_k.
    [[nodiscard]] Image synthesize_head(const Eigen::VectorXd& head) const;
    /// W_k^T x.
    [[nodiscard]] Eigen::VectorXd analyze_head(Eigen::Index k, const Image& x) const;

    [[nodiscard]] const Eigen::MatrixXd& v_row() const { return v_row_; }
    [[nodiscard]] const Eigen::MatrixXd& v_col() const { return v_col_; }
    [[nodiscard]] const Eigen::MatrixXd& u_row() const { return u_row_; }
    [[nodiscard]] const Eigen::MatrixXd& u_col() const { return u_col_; }
    [[nodiscard]] const Eigen::VectorXd& sigma_row() const { return sigma_row_; }
    [[nodiscard]] const Eigen::VectorXd& sigma_col() const { return sigma_col_; }

private:
    friend SpectralBasis build_dct_basis(const BlurOperator& blur);
    friend SpectralBasis build_svd_basis(const BlurOperator& blur);

    void set_ordering(const Eigen::MatrixXd& magnitude, const Eigen::MatrixXd& signed_grid, bool dc_first);

    BasisKind kind_ = BasisKind::dct;
    Eigen::Index side_ = 0;
    bool exact_ = true;
    std::vector<Eigen::Index> ordering_;
    Eigen::VectorXd spectral_values_;
    Eigen::VectorXd signed_values_;

    Eigen::MatrixXd v_row_, v_col_, u_row_, u_col_;
    Eigen::VectorXd sigma_row_, sigma_col_;
};

/// Split of ordered coefficients at the subspace dimension k.
struct CoeffSplit {
    Eigen::Index k = 0;
    Eigen::VectorXd head;  // y_k
    Eigen::VectorXd tail;  // y_0
};

enum class BasisPart { head, tail, both };

SpectralBasis build_dct_basis(const BlurOperator& blur);
SpectralBasis build_svd_basis(const BlurOperator& blur);

Image synthesize(const SpectralBasis& basis, const CoeffSplit& split, BasisPart part = BasisPart::both);
CoeffSplit analyze(const SpectralBasis& basis, const Image& x, Eigen::Index k);

}  // namespace epp
