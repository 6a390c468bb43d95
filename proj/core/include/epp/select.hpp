#pragma once

#include <optional>

#include <Eigen/Core>

#include "epp/basis.hpp"
#include "epp/operators.hpp"

namespace epp {

/// G(k) = sum_{i>k} beta_i^2 / (n-k)^2 for k = 1..K, stored at values[k-1].
struct GcvCurve {
    Eigen::VectorXd values;
    Eigen::Index argmin = 1;
};

/// beta_i = w_i^T b in basis order: left singular vectors for the svd
/// kind, DCT vectors for the dct kind.
Eigen::VectorXd spectral_coefficients(const SpectralBasis& basis, const BlurOperator& blur, const Image& b);

/// Evaluates G for k = 1..max_k (default n-1) with one reverse cumulative
/// sum. The argmin is the smallest k attaining the minimum.
GcvCurve gcv_curve(const Eigen::VectorXd& beta, std::optional<Eigen::Index> max_k = std::nullopt);

inline constexpr double kDefaultShrink = 2.0 / 3.0;

/// k = round_half_even(shrink * argmin), clamped to [1, n-1] where n is
/// the length of the full curve plus one.
Eigen::Index choose_k(const GcvCurve& curve, double shrink = kDefaultShrink,
                      std::optional<Eigen::Index> n = std::nullopt);

}  // namespace epp
