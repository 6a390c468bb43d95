#pragma once

#include <Eigen/Core>

#include "epp/image.hpp"

namespace epp {

/// Orthonormal 2D DCT-II, coefficients = C X C^T with
/// C(i,j) = sqrt(1/m) for i = 0 and sqrt(2/m) cos((2j+1) i pi / (2m)) otherwise.
/// The inverse applies C^T Y C. Both run in O(m^2 log m).
Image dct2(const Image& x, bool inverse = false);

/// In-place variant on a column-major m x m buffer.
void dct2_inplace(Eigen::MatrixXd& x, bool inverse);

}  // namespace epp
