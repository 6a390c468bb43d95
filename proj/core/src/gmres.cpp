#include "epp/gmres.hpp"

#include <cmath>
#include <vector>

#include "epp/error.hpp"

namespace epp {

GmresResult gmres_right(const LinearMap& op, const LinearMap& precond, const Eigen::VectorXd& rhs,
                        const GmresOptions& options, const std::optional<Eigen::VectorXd>& x0) {
    if (options.restart < 1 || options.max_iter < 1 || !(options.tol > 0.0)) {
        throw InvalidParameter("GMRES needs restart >= 1, max_iter >= 1 and tol > 0");
    }
    const Eigen::Index n = rhs.size();
    GmresResult out;
    out.solution = x0 ? *x0 : Eigen::VectorXd::Zero(n);
    if (out.solution.size() != n) throw DimensionMismatch("GMRES initial guess has wrong length");

    const double bnorm = rhs.norm();
    if (bnorm == 0.0) {
        out.solution.setZero();
        out.converged = true;
        return out;
    }

    const int restart = options.restart;
    std::vector<Eigen::VectorXd> basis(std::size_t(restart + 1));
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(restart + 1, restart);
    Eigen::VectorXd cs(restart), sn(restart), g(restart + 1);
    bool happy = false;

    for (;;) {
        Eigen::VectorXd r = rhs - op(out.solution);
        const double beta = r.norm();
        out.residual = beta / bnorm;
        if (out.residual <= options.tol || out.iterations >= options.max_iter || happy) break;

        basis[0] = r / beta;
        hess.setZero();
        g.setZero();
        g(0) = beta;
        int used = 0;
        for (int j = 0; j < restart && out.iterations < options.max_iter; ++j) {
            Eigen::VectorXd w = op(precond(basis[std::size_t(j)]));
            ++out.iterations;
            for (int i = 0; i <= j; ++i) {
                hess(i, j) = w.dot(basis[std::size_t(i)]);
                w -= hess(i, j) * basis[std::size_t(i)];
            }
            hess(j + 1, j) = w.norm();

            for (int i = 0; i < j; ++i) {
                const double t = cs(i) * hess(i, j) + sn(i) * hess(i + 1, j);
                hess(i + 1, j) = -sn(i) * hess(i, j) + cs(i) * hess(i + 1, j);
                hess(i, j) = t;
            }
            const double sub = hess(j + 1, j);
            const double diag = hess(j, j);
            const double rho = std::hypot(diag, sub);
            cs(j) = rho == 0.0 ? 1.0 : diag / rho;
            sn(j) = rho == 0.0 ? 0.0 : sub / rho;
            hess(j, j) = rho;
            hess(j + 1, j) = 0.0;
            g(j + 1) = -sn(j) * g(j);
            g(j) = cs(j) * g(j);
            used = j + 1;
            out.estimated_residual = std::abs(g(j + 1)) / bnorm;

            if (sub <= 1e-14 * rho) {
                happy = true;
                break;
            }
            basis[std::size_t(j + 1)] = w / sub;
            if (out.estimated_residual <= options.tol) break;
        }
        if (used == 0) break;

        const Eigen::VectorXd y =
            hess.topLeftCorner(used, used).triangularView<Eigen::Upper>().solve(g.head(used));
        Eigen::VectorXd combo = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < used; ++i) combo += y(i) * basis[std::size_t(i)];
        out.solution += precond(combo);
    }

    out.converged = out.residual <= options.tol;
    out.breakdown = happy && !out.converged;
    return out;
}

}  // namespace epp
