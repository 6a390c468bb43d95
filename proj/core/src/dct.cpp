#include "epp/dct.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace epp {

namespace {

// The FFTW planner is not reentrant; execution with new-array calls is.
std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
}

struct PlanPair {
    fftw_plan forward = nullptr;
    fftw_plan inverse = nullptr;
};

// Plans live for the program lifetime; one pair per side length.
const PlanPair& plans_for(int m) {
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;

    double* scratch = fftw_alloc_real(std::size_t(m) * std::size_t(m));
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    PlanPair p;
    p.forward = fftw_plan_r2r_2d(m, m, scratch, scratch, FFTW_REDFT10, FFTW_REDFT10, flags);
    p.inverse = fftw_plan_r2r_2d(m, m, scratch, scratch, FFTW_REDFT01, FFTW_REDFT01, flags);
    fftw_free(scratch);
    return cache.emplace(m, p).first->second;
}

}  // namespace

void dct2_inplace(Eigen::MatrixXd& x, bool inverse) {
    const auto m = x.rows();
    if (m != x.cols()) throw DimensionMismatch("dct2 needs a square grid");
    const PlanPair& plans = plans_for(int(m));

    // FFTW's unnormalized DCT-II is 2 * sum x_j cos(...); the per-index
    // scales below make the transform orthonormal.
    const double dc = std::sqrt(1.0 / (4.0 * double(m)));
    const double ac = std::sqrt(1.0 / (2.0 * double(m)));
    Eigen::VectorXd scale = Eigen::VectorXd::Constant(m, ac);
    scale(0) = dc;

    if (inverse) {
        // REDFT01 computes X_0 + 2 sum_{k>0} X_k cos(...): prescale so that
        // the result is C^T Y C.
        Eigen::VectorXd pre = Eigen::VectorXd::Constant(m, ac);
        pre(0) = std::sqrt(1.0 / double(m));
        x = pre.asDiagonal() * x * pre.asDiagonal();
        fftw_execute_r2r(plans.inverse, x.data(), x.data());
    } else {
        fftw_execute_r2r(plans.forward, x.data(), x.data());
        x = scale.asDiagonal() * x * scale.asDiagonal();
    }
}

Image dct2(const Image& x, bool inverse) {
    Eigen::MatrixXd buf = x.matrix();
    dct2_inplace(buf, inverse);
    return Image(std::move(buf));
}

}  // namespace epp
