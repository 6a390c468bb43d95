#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "epp/image.hpp"

namespace epp {

enum class PsfKind { gaussian, out_of_focus, custom };

/// Point-spread function on an odd-sized square support, normalized to unit sum.
struct Psf {
    Eigen::MatrixXd kernel;
    Eigen::Index center_row = 0;
    Eigen::Index center_col = 0;
    PsfKind kind = PsfKind::custom;

    [[nodiscard]] Eigen::Index size() const { return kernel.rows(); }
};

/// Which exponent to use for the Gaussian kernel.
///
/// `standard` is exp(-d^2 / (2 sigma^2)). `verbatim` is exp(-sigma^2 d^2 / 2),
/// where a larger sigma gives a narrower kernel; it exists for comparison only.
enum class GaussianForm { standard, verbatim };

Psf make_gaussian_psf(double sigma, Eigen::Index size, GaussianForm form = GaussianForm::standard);
Psf make_out_of_focus_psf(double radius, Eigen::Index size);

/// Wraps an arbitrary nonnegative kernel (odd square, centered) and normalizes it.
Psf make_custom_psf(Eigen::MatrixXd kernel);

/// Default support sizes: 4*ceil(sigma)+1 for Gaussian, 2*ceil(r)+1 for the disk.
Eigen::Index default_gaussian_size(double sigma);
Eigen::Index default_disk_size(double radius);

/// Matrix-free blur A = factor_row (x) factor_col, applied as
/// factor_col * X * factor_row^T.
class BlurOperator {
public:
    BlurOperator() = default;
    BlurOperator(Eigen::MatrixXd factor_row, Eigen::MatrixXd factor_col, bool exact);

    [[nodiscard]] Eigen::Index side() const { return factor_row_.rows(); }
    [[nodiscard]] const Eigen::MatrixXd& factor_row() const { return factor_row_; }
    [[nodiscard]] const Eigen::MatrixXd& factor_col() const { return factor_col_; }

    /// False when the factors come from a nearest-Kronecker approximation of
    /// a non-separable PSF.
    [[nodiscard]] bool exact() const { return exact_; }

    /// True when both factors are symmetric to working precision.
    [[nodiscard]] bool symmetric() const;

private:
    Eigen::MatrixXd factor_row_;
    Eigen::MatrixXd factor_col_;
    bool exact_ = true;
};

/// m x m matrix of 1D convolution with `taps` (centered at `center`) under
/// reflexive boundary conditions, i.e. Toeplitz plus Hankel.
Eigen::MatrixXd reflexive_convolution_matrix(const Eigen::VectorXd& taps, Eigen::Index center, Eigen::Index m);

BlurOperator blur_from_psf(const Psf& psf, Eigen::Index m);

Image apply_blur(const BlurOperator& op, const Image& x, bool adjoint = false);

/// Direct 2D convolution with reflexive padding. Used to synthesize data
/// with non-separable kernels, where the Kronecker operator is only an
/// approximation.
Image convolve_reflexive(const Psf& psf, const Image& x);

/// Number of rows of the gradient operator L for an m x m image: 2m(m-1).
constexpr Eigen::Index gradient_length(Eigen::Index m) { return 2 * m * (m - 1); }

/// L x with L = [L1 (x) I ; I (x) L1]. The first m(m-1) entries are
/// vec(X L1^T) (differences along columns), the rest vec(L1 X).
Eigen::VectorXd apply_gradient(const Image& x);
void apply_gradient(const Image& x, Eigen::VectorXd& out);

Image apply_gradient_adjoint(const Eigen::VectorXd& g, Eigen::Index m);

}  // namespace epp
