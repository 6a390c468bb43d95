#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "epp/image.hpp"

namespace epp {

/// L^T diag(d2) L on an m x m pixel grid. Weights below
/// kDiffusionWeightFloor * max(d2) are raised to that floor.
class WeightedDiffusion {
public:
    static constexpr double kDiffusionWeightFloor = 1e-8;

    WeightedDiffusion(Eigen::Index m, Eigen::VectorXd d_squared);

    /// Unit weights: the 5-point graph Laplacian.
    static WeightedDiffusion uniform(Eigen::Index m);

    [[nodiscard]] Eigen::Index side() const { return m_; }
    [[nodiscard]] const Eigen::VectorXd& d_squared() const { return d_squared_; }

    [[nodiscard]] Image apply(const Image& x) const;

    /// Assembled sparse matrix, for setup and dense checks.
    [[nodiscard]] Eigen::SparseMatrix<double, Eigen::RowMajor> assemble() const;

private:
    Eigen::Index m_;
    Eigen::VectorXd d_squared_;
};

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct MgLevel {
    Eigen::Index side = 0;
    SparseRowMatrix op;
    SparseRowMatrix prolongation;  // from the next coarser level; empty on the coarsest
    SparseRowMatrix restriction;   // prolongation^T
};

enum class MgTransfer {
    bilinear,            // cell-centered linear interpolation, independent of the operator
    operator_dependent,  // vertex-centered, weights taken from the collapsed fine stencil
};

struct MgOptions {
    MgTransfer transfer = MgTransfer::operator_dependent;
    int pre_sweeps = 1;
    int post_sweeps = 1;
    int cycles = 1;
};

/// Immutable multigrid hierarchy. Level 0 is the finest grid.
class MgHierarchy {
public:
    [[nodiscard]] const std::vector<MgLevel>& levels() const { return levels_; }
    [[nodiscard]] std::size_t level_count() const { return levels_.size(); }
    [[nodiscard]] Eigen::Index side() const { return levels_.front().side; }
    [[nodiscard]] const MgOptions& options() const { return options_; }

    /// Solves the coarsest system for a right-hand side orthogonal to the
    /// constants; the result is also orthogonal to the constants.
    [[nodiscard]] Eigen::VectorXd coarse_solve(const Eigen::VectorXd& rhs) const;

private:
    friend MgHierarchy mg_setup(const WeightedDiffusion& weights, const MgOptions& options);

    std::vector<MgLevel> levels_;
    Eigen::LLT<Eigen::MatrixXd> coarsest_;
    MgOptions options_;
};

/// 1D cell-centered linear interpolation from ceil(m/2) coarse cells to m
/// fine cells (weights 3/4, 1/4; rows sum to one).
SparseRowMatrix cell_centered_prolongation(Eigen::Index fine_side);

/// Prolongation from the ceil(s/2)^2 coarse points (even row and column
/// indices) to an s x s level whose operator is `op`. Points between two
/// coarse points use the stencil collapsed across the other axis; points
/// between four use the full stencil. Rows sum to one.
SparseRowMatrix operator_dependent_prolongation(const SparseRowMatrix& op, Eigen::Index side);

/// Coarsens by two per side while the grid side is at least 4.
MgHierarchy mg_setup(const WeightedDiffusion& weights, const MgOptions& options = {});

/// V(pre, post) cycle(s) from a zero initial guess. The right-hand side and
/// the result are projected off the constant null space.
Image mg_vcycle(const MgHierarchy& hierarchy, const Image& rhs);

}  // namespace epp
