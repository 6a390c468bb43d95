#pragma once

// Dense, deliberately naive reference constructions. Nothing here calls into
// the library's fast paths; each object is built straight from its
// defining formula.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>
#include <unsupported/Eigen/KroneckerProduct>

#include "epp/image.hpp"
#include "epp/operators.hpp"

namespace epp::oracle {

/// Reflect-pad by `pad` pixels (half-sample symmetric), then correlate with
/// the flipped kernel.
inline Eigen::MatrixXd padded_convolution(const Eigen::MatrixXd& kernel, const Eigen::MatrixXd& x) {
    const Eigen::Index m = x.rows();
    const Eigen::Index s = kernel.rows();
    const Eigen::Index c = (s - 1) / 2;
    const Eigen::Index pad = c;
    Eigen::MatrixXd padded(m + 2 * pad, m + 2 * pad);
    for (Eigen::Index j = 0; j < padded.cols(); ++j) {
        for (Eigen::Index i = 0; i < padded.rows(); ++i) {
            Eigen::Index si = i - pad, sj = j - pad;
            if (si < 0) si = -si - 1;
            if (si >= m) si = 2 * m - si - 1;
            if (sj < 0) sj = -sj - 1;
            if (sj >= m) sj = 2 * m - sj - 1;
            padded(i, j) = x(si, sj);
        }
    }
    Eigen::MatrixXd out(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) {
            double acc = 0.0;
            for (Eigen::Index b = 0; b < s; ++b) {
                for (Eigen::Index a = 0; a < s; ++a) {
                    // out(i,j) = sum P(a,b) x(i - (a-c), j - (b-c))
                    acc += kernel(a, b) * padded(i + pad - (a - c), j + pad - (b - c));
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

/// n x n matrix of the 2D reflexive convolution, column by column.
inline Eigen::MatrixXd dense_blur(const Eigen::MatrixXd& kernel, Eigen::Index m) {
    const Eigen::Index n = m * m;
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(m, m);
        unit.data()[col] = 1.0;
        const Eigen::MatrixXd y = padded_convolution(kernel, unit);
        a.col(col) = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    }
    return a;
}

/// L = [L1 (x) I ; I (x) L1] from the Kronecker definition.
inline Eigen::MatrixXd dense_gradient(Eigen::Index m) {
    Eigen::MatrixXd l1 = Eigen::MatrixXd::Zero(m - 1, m);
    for (Eigen::Index i = 0; i + 1 < m; ++i) {
        l1(i, i) = -1.0;
        l1(i, i + 1) = 1.0;
    }
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd l(2 * m * (m - 1), m * m);
    l.topRows(m * (m - 1)) = Eigen::kroneckerProduct(l1, eye);
    l.bottomRows(m * (m - 1)) = Eigen::kroneckerProduct(eye, l1);
    return l;
}

/// 1D orthogonal DCT matrix from the cosine formula; rows are basis vectors.
inline Eigen::MatrixXd dense_dct(Eigen::Index m) {
    Eigen::MatrixXd c(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            c(i, j) = i == 0 ? std::sqrt(1.0 / double(m))
                             : std::sqrt(2.0 / double(m)) * std::cos(double((2 * j + 1) * i) * M_PI / (2.0 * double(m)));
        }
    }
    return c;
}

inline Image random_image(Eigen::Index m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Image img(m);
    for (Eigen::Index i = 0; i < img.size(); ++i) img.matrix().data()[i] = u(rng);
    return img;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
    return v;
}

inline Eigen::VectorXd vec(const Image& x) { return x.vec(); }

/// Dense n x n matrix whose columns are the 2D DCT basis images, built from
/// the cosine formula; column p + q*m holds the (p, q) frequency.
inline Eigen::MatrixXd dense_dct_basis(Eigen::Index m) {
    const Eigen::MatrixXd ct = dense_dct(m).transpose();
    return Eigen::kroneckerProduct(ct, ct);
}

/// Columns of `full` permuted into the given order.
inline Eigen::MatrixXd reorder_columns(const Eigen::MatrixXd& full, const std::vector<Eigen::Index>& order) {
    Eigen::MatrixXd out(full.rows(), Eigen::Index(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) out.col(Eigen::Index(i)) = full.col(order[i]);
    return out;
}

/// Separable, asymmetric, strictly positive size x size kernel.
inline Psf random_smooth_psf(Eigen::Index size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Eigen::VectorXd a(size), b(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        a(i) = u(rng);
        b(i) = u(rng);
    }
    return make_custom_psf(a * b.transpose());
}

/// Closed-form minimizer of ||M y + c||_2.
inline Eigen::VectorXd least_squares(const Eigen::MatrixXd& mat, const Eigen::VectorXd& c) {
    return mat.completeOrthogonalDecomposition().solve(-c);
}

/// sum |r_i|^p.
inline double power_sum(const Eigen::VectorXd& r, double p) { return r.cwiseAbs().array().pow(p).sum(); }

/// Plain gradient descent on sum |M y + c|^p with an Armijo backtracking
/// step, run for a fixed number of steps. Returns the best iterate.
inline Eigen::VectorXd gradient_descent_pnorm(const Eigen::MatrixXd& mat, const Eigen::VectorXd& c, double p,
                                              long steps, Eigen::VectorXd y) {
    double lip = 1.0;
    Eigen::VectorXd r = mat * y + c;
    double f = power_sum(r, p);
    for (long it = 0; it < steps; ++it) {
        const Eigen::VectorXd dr = p * r.cwiseAbs().array().pow(p - 1.0).matrix().cwiseProduct(r.cwiseSign());
        const Eigen::VectorXd g = mat.transpose() * dr;
        const double gg = g.squaredNorm();
        if (gg == 0.0) break;
        for (int tries = 0; tries < 200; ++tries) {
            const Eigen::VectorXd y_try = y - g / lip;
            const Eigen::VectorXd r_try = mat * y_try + c;
            const double f_try = power_sum(r_try, p);
            if (f_try <= f - 0.5 * gg / lip) {
                y = y_try;
                r = r_try;
                f = f_try;
                lip *= 0.5;
                break;
            }
            lip *= 2.0;
        }
    }
    return y;
}

// Plain IRLS with dense weighted least-squares solves; each step minimizes a
// quadratic majorizer, so it needs no line search. Only used near p = 2
// where it contracts quickly.
inline Eigen::VectorXd dense_irls(const Eigen::MatrixXd& mat, const Eigen::VectorXd& c, double p, int steps) {
    Eigen::VectorXd y = least_squares(mat, c);
    for (int it = 0; it < steps; ++it) {
        const Eigen::VectorXd r = mat * y + c;
        const Eigen::VectorXd w = r.cwiseAbs().cwiseMax(1e-300).array().pow(0.5 * (p - 2.0)).matrix();
        y = least_squares(w.asDiagonal() * mat, w.cwiseProduct(c));
    }
    return y;
}

}  // namespace epp::oracle
