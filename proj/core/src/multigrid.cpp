#include "epp/multigrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "epp/operators.hpp"

namespace epp {

namespace {

using Triplet = Eigen::Triplet<double>;

void gauss_seidel(const SparseRowMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x, int sweeps) {
    for (int s = 0; s < sweeps; ++s) {
        for (Eigen::Index row = 0; row < a.outerSize(); ++row) {
            double diag = 0.0;
            double acc = b(row);
            for (SparseRowMatrix::InnerIterator it(a, row); it; ++it) {
                if (it.col() == row) {
                    diag = it.value();
                } else {
                    acc -= it.value() * x(it.col());
                }
            }
            if (diag != 0.0) x(row) = acc / diag;
        }
    }
}

void remove_mean(Eigen::VectorXd& v) { v.array() -= v.mean(); }

Eigen::VectorXd cycle(const MgHierarchy& h, std::size_t level, const Eigen::VectorXd& rhs) {
    const auto& levels = h.levels();
    if (level + 1 == levels.size()) return h.coarse_solve(rhs);

    const MgLevel& lv = levels[level];
    const MgLevel& coarse = levels[level + 1];
    Eigen::VectorXd x = Eigen::VectorXd::Zero(rhs.size());
    gauss_seidel(lv.op, rhs, x, h.options().pre_sweeps);
    const Eigen::VectorXd residual = rhs - lv.op * x;
    const Eigen::VectorXd coarse_rhs = coarse.restriction * residual;
    x += coarse.prolongation * cycle(h, level + 1, coarse_rhs);
    gauss_seidel(lv.op, rhs, x, h.options().post_sweeps);
    return x;
}

}  // namespace

WeightedDiffusion::WeightedDiffusion(Eigen::Index m, Eigen::VectorXd d_squared) : m_(m), d_squared_(std::move(d_squared)) {
    if (m < 2) throw InvalidParameter("weighted diffusion needs m >= 2");
    if (d_squared_.size() != gradient_length(m)) {
        throw DimensionMismatch("diffusion weights must have length 2m(m-1)");
    }
    if (!d_squared_.allFinite()) throw InvalidParameter("diffusion weights must be finite");
    const double top = d_squared_.maxCoeff();
    if (!(top > 0.0)) throw InvalidParameter("diffusion weights must not all vanish");
    d_squared_ = d_squared_.cwiseMax(kDiffusionWeightFloor * top);
}

WeightedDiffusion WeightedDiffusion::uniform(Eigen::Index m) {
    return WeightedDiffusion(m, Eigen::VectorXd::Ones(gradient_length(m)));
}

Image WeightedDiffusion::apply(const Image& x) const {
    if (x.side() != m_) throw DimensionMismatch("image side does not match diffusion operator");
    Eigen::VectorXd g = apply_gradient(x);
    g.array() *= d_squared_.array();
    return apply_gradient_adjoint(g, m_);
}

SparseRowMatrix WeightedDiffusion::assemble() const {
    const Eigen::Index m = m_;
    const Eigen::Index half = m * (m - 1);
    std::vector<Triplet> t;
    t.reserve(std::size_t(4 * 2 * half));
    auto edge = [&](Eigen::Index p, Eigen::Index q, double w) {
        t.emplace_back(p, p, w);
        t.emplace_back(q, q, w);
        t.emplace_back(p, q, -w);
        t.emplace_back(q, p, -w);
    };
    for (Eigen::Index j = 0; j + 1 < m; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) edge(i + j * m, i + (j + 1) * m, d_squared_(i + j * m));
    }
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i + 1 < m; ++i) edge(i + j * m, i + 1 + j * m, d_squared_(half + i + j * (m - 1)));
    }
    SparseRowMatrix a(m * m, m * m);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseRowMatrix cell_centered_prolongation(Eigen::Index fine_side) {
    const Eigen::Index coarse_side = (fine_side + 1) / 2;
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < fine_side; ++i) {
        const Eigen::Index home = i / 2;
        const Eigen::Index other = i % 2 == 0 ? home - 1 : home + 1;
        if (other >= 0 && other < coarse_side) {
            t.emplace_back(i, home, 0.75);
            t.emplace_back(i, other, 0.25);
        } else {
            t.emplace_back(i, home, 1.0);
        }
    }
    SparseRowMatrix p(fine_side, coarse_side);
    p.setFromTriplets(t.begin(), t.end());
    return p;
}

namespace {

using Row = std::vector<std::pair<Eigen::Index, double>>;

// Rescales a row of weights to sum to one; falls back to equal weights when
// the stencil gives something unusable (nonpositive or non-finite).
void normalize_row(Row& row) {
    double total = 0.0;
    bool ok = true;
    for (const auto& [col, w] : row) {
        ok = ok && std::isfinite(w) && w >= 0.0;
        total += w;
    }
    if (!ok || !(total > 0.0)) {
        for (auto& entry : row) entry.second = 1.0 / double(row.size());
        return;
    }
    for (auto& entry : row) entry.second /= total;
}

}  // namespace

SparseRowMatrix operator_dependent_prolongation(const SparseRowMatrix& op, Eigen::Index s) {
    if (op.rows() != s * s || op.cols() != s * s) throw DimensionMismatch("operator does not match level side");
    const Eigen::Index sc = (s + 1) / 2;
    auto coarse = [sc](Eigen::Index i, Eigen::Index j) { return i / 2 + (j / 2) * sc; };
    std::vector<Row> rows(std::size_t(s * s));

    // Coarse points and points between two coarse points.
    for (Eigen::Index j = 0; j < s; ++j) {
        for (Eigen::Index i = 0; i < s; ++i) {
            const Eigen::Index idx = i + j * s;
            const bool odd_i = i % 2 == 1, odd_j = j % 2 == 1;
            Row& row = rows[std::size_t(idx)];
            if (!odd_i && !odd_j) {
                row.emplace_back(coarse(i, j), 1.0);
                continue;
            }
            if (odd_i && odd_j) continue;
            // Collapse the stencil across the axis that does not interpolate.
            double before = 0.0, after = 0.0, center = 0.0;
            for (SparseRowMatrix::InnerIterator it(op, idx); it; ++it) {
                const Eigen::Index d = odd_i ? it.col() % s - i : it.col() / s - j;
                (d < 0 ? before : d > 0 ? after : center) += it.value();
            }
            const Eigen::Index ib = odd_i ? i - 1 : i, jb = odd_i ? j : j - 1;
            const Eigen::Index ia = odd_i ? i + 1 : i, ja = odd_i ? j : j + 1;
            row.emplace_back(coarse(ib, jb), -before / center);
            if (ia < s && ja < s) row.emplace_back(coarse(ia, ja), -after / center);
            normalize_row(row);
        }
    }

    // Points between four coarse points: every stencil neighbor is already
    // interpolated, so combine their rows with the stencil weights.
    for (Eigen::Index j = 1; j < s; j += 2) {
        for (Eigen::Index i = 1; i < s; i += 2) {
            const Eigen::Index idx = i + j * s;
            double diag = 0.0;
            std::vector<std::pair<Eigen::Index, double>> neighbors;
            for (SparseRowMatrix::InnerIterator it(op, idx); it; ++it) {
                if (it.col() == idx) {
                    diag = it.value();
                } else {
                    neighbors.emplace_back(it.col(), it.value());
                }
            }
            Row combined;
            for (const auto& [nb, v] : neighbors) {
                for (const auto& [col, w] : rows[std::size_t(nb)]) {
                    auto hit = std::find_if(combined.begin(), combined.end(), [c = col](const auto& e) { return e.first == c; });
                    if (hit == combined.end()) {
                        combined.emplace_back(col, -v / diag * w);
                    } else {
                        hit->second += -v / diag * w;
                    }
                }
            }
            normalize_row(combined);
            rows[std::size_t(idx)] = std::move(combined);
        }
    }

    std::vector<Triplet> t;
    for (Eigen::Index idx = 0; idx < s * s; ++idx) {
        for (const auto& [col, w] : rows[std::size_t(idx)]) t.emplace_back(idx, col, w);
    }
    SparseRowMatrix p(s * s, sc * sc);
    p.setFromTriplets(t.begin(), t.end());
    p.prune(0.0);
    return p;
}

MgHierarchy mg_setup(const WeightedDiffusion& weights, const MgOptions& options) {
    MgHierarchy h;
    h.options_ = options;
    MgLevel finest;
    finest.side = weights.side();
    finest.op = weights.assemble();
    h.levels_.push_back(std::move(finest));

    while (h.levels_.back().side >= 4) {
        const MgLevel& fine = h.levels_.back();
        const Eigen::Index mf = fine.side;
        const Eigen::Index mc = (mf + 1) / 2;
        MgLevel coarse;
        coarse.side = mc;
        if (options.transfer == MgTransfer::operator_dependent) {
            coarse.prolongation = operator_dependent_prolongation(fine.op, mf);
        } else {
            // P = P1 (x) P1 acting on column-major vec.
            const SparseRowMatrix p1 = cell_centered_prolongation(mf);
            std::vector<Triplet> t;
            t.reserve(std::size_t(p1.nonZeros() * p1.nonZeros()));
            for (Eigen::Index j = 0; j < mf; ++j) {
                for (SparseRowMatrix::InnerIterator bj(p1, j); bj; ++bj) {
                    for (Eigen::Index i = 0; i < mf; ++i) {
                        for (SparseRowMatrix::InnerIterator ai(p1, i); ai; ++ai) {
                            t.emplace_back(i + j * mf, ai.col() + bj.col() * mc, ai.value() * bj.value());
                        }
                    }
                }
            }
            coarse.prolongation.resize(mf * mf, mc * mc);
            coarse.prolongation.setFromTriplets(t.begin(), t.end());
        }
        coarse.restriction = coarse.prolongation.transpose();
        const SparseRowMatrix tmp = fine.op * coarse.prolongation;
        coarse.op = coarse.restriction * tmp;
        coarse.op.prune(0.0);
        h.levels_.push_back(std::move(coarse));
    }

    // Deflate the constant null space: for rhs orthogonal to e, the solution
    // of (A + g e e^T / n) u = rhs satisfies A u = rhs and e^T u = 0.
    const MgLevel& last = h.levels_.back();
    Eigen::MatrixXd dense = Eigen::MatrixXd(last.op);
    const double n = double(dense.rows());
    const double shift = std::max(dense.diagonal().mean(), std::numeric_limits<double>::min());
    dense.array() += shift / n;
    h.coarsest_.compute(dense);
    if (h.coarsest_.info() != Eigen::Success) throw Error("coarsest multigrid factorization failed");
    return h;
}

Eigen::VectorXd MgHierarchy::coarse_solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd b = rhs;
    remove_mean(b);
    Eigen::VectorXd u = coarsest_.solve(b);
    remove_mean(u);
    return u;
}

Image mg_vcycle(const MgHierarchy& hierarchy, const Image& rhs) {
    const Eigen::Index m = hierarchy.side();
    if (rhs.side() != m) throw DimensionMismatch("right-hand side does not match multigrid hierarchy");
    Eigen::VectorXd b = rhs.vec();
    remove_mean(b);

    const auto& op = hierarchy.levels().front().op;
    Eigen::VectorXd x = cycle(hierarchy, 0, b);
    for (int c = 1; c < hierarchy.options().cycles; ++c) {
        const Eigen::VectorXd r = b - op * x;
        x += cycle(hierarchy, 0, r);
    }
    remove_mean(x);
    return Image::from_vec(x, m);
}

}  // namespace epp
