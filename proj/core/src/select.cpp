#include "epp/select.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <string>

namespace epp {

Eigen::VectorXd spectral_coefficients(const SpectralBasis& basis, const BlurOperator& blur, const Image& b) {
    if (b.side() != basis.side() || blur.side() != basis.side()) {
        throw DimensionMismatch("basis, blur operator and image sizes differ");
    }
    const Eigen::MatrixXd grid = basis.forward_left(b.matrix());
    const auto& order = basis.ordering();
    Eigen::VectorXd beta(basis.dimension());
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta(i) = grid.data()[order[std::size_t(i)]];
    return beta;
}

GcvCurve gcv_curve(const Eigen::VectorXd& beta, std::optional<Eigen::Index> max_k) {
    const Eigen::Index n = beta.size();
    if (n < 2) throw InvalidParameter("GCV needs at least two coefficients");
    const Eigen::Index last = std::clamp<Eigen::Index>(max_k.value_or(n - 1), 1, n - 1);

    // tail_energy = sum_{i >= k} beta[i]^2 (0-based), built from the back.
    GcvCurve curve;
    curve.values.resize(last);
    double tail_energy = 0.0;
    for (Eigen::Index i = n - 1; i >= last; --i) tail_energy += beta(i) * beta(i);
    for (Eigen::Index k = last; k >= 1; --k) {
        const double denom = double(n - k);
        curve.values(k - 1) = tail_energy / (denom * denom);
        tail_energy += beta(k - 1) * beta(k - 1);
    }
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < last; ++i) {
        if (curve.values(i) < curve.values(best)) best = i;
    }
    curve.argmin = best + 1;
    return curve;
}

Eigen::Index choose_k(const GcvCurve& curve, double shrink, std::optional<Eigen::Index> n) {
    if (!(shrink > 0.0 && shrink <= 1.0)) throw InvalidParameter("shrink factor must lie in (0, 1]");
    const Eigen::Index upper = n ? *n - 1 : std::max<Eigen::Index>(curve.argmin, 1);
    // nearbyint honours the current rounding mode, which is to-nearest-even
    // unless the caller changed it.
    const int saved = std::fegetround();
    std::fesetround(FE_TONEAREST);
    const auto k = Eigen::Index(std::nearbyint(shrink * double(curve.argmin)));
    std::fesetround(saved);
    return std::clamp<Eigen::Index>(k, 1, std::max<Eigen::Index>(upper, 1));
}

}  // namespace epp
