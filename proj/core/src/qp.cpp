#include <algorithm>
#include <cmath>
#include <limits>

#include "netmod/errors.hpp"
#include "netmod/solver.hpp"

namespace netmod {
namespace {

// A violation smaller than this (relative to 1) is round-off, not a constraint to add.
constexpr double kViolationTol = 1e-13;
// z^T n below this fraction of n^T G^-1 n means n lies in the span of the active rows.
constexpr double kDependenceTol = 1e-11;

}  // namespace

QuadraticSubproblem::QuadraticSubproblem(EdgeVector sigma, Tolerances tol)
    : sigma_(std::move(sigma)), tol_(tol) {
    if ((sigma_.array() <= 0.0).any()) throw ValidationError("weights must be positive");
    ginv_ = (2.0 * sigma_.array()).inverse().matrix();
    rho_ = EdgeVector::Zero(sigma_.size());
}

std::size_t QuadraticSubproblem::add_row(const EdgeVector& usage) {
    if (usage.size() != sigma_.size()) throw ContractViolation("row length does not match |E|");
    if (!(usage.array() > 0.0).any()) throw ContractViolation("zero usage row");
    rows_.push_back(usage);
    return rows_.size() - 1;
}

double QuadraticSubproblem::slack(std::size_t row) const {
    return rows_[row].dot(rho_) - 1.0;
}

Eigen::MatrixXd QuadraticSubproblem::active_matrix() const {
    Eigen::MatrixXd A(static_cast<Eigen::Index>(active_.size()), sigma_.size());
    for (std::size_t j = 0; j < active_.size(); ++j) A.row(static_cast<Eigen::Index>(j)) = rows_[active_[j]];
    return A;
}

void QuadraticSubproblem::solve() {
    const std::size_t max_steps = 50 * (rows_.size() + static_cast<std::size_t>(sigma_.size())) + 100;
    std::vector<bool> is_active(rows_.size(), false);
    for (std::size_t a : active_) is_active[a] = true;

    for (std::size_t step = 0; step < max_steps;) {
        std::size_t p = rows_.size();
        double s = -kViolationTol;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (is_active[i]) continue;
            const double si = slack(i);
            if (si < s) {
                s = si;
                p = i;
            }
        }
        if (p == rows_.size()) return;

        const EdgeVector& np = rows_[p];
        double u_p = 0.0;
        while (step++ < max_steps) {
            ++iterations_;
            const auto k = static_cast<Eigen::Index>(active_.size());
            Eigen::VectorXd r = Eigen::VectorXd::Zero(k);
            EdgeVector z = ginv_.cwiseProduct(np);
            if (k > 0) {
                const Eigen::MatrixXd A = active_matrix();
                const Eigen::MatrixXd M = A * ginv_.asDiagonal() * A.transpose();
                Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
                const Eigen::VectorXd d = ldlt.vectorD();
                if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-14 * d.cwiseAbs().maxCoeff()) {
                    std::vector<std::size_t> offending = active_;
                    offending.push_back(p);
                    throw DegenerateActiveSetError("active block is numerically singular", std::move(offending));
                }
                r = ldlt.solve(A * z);
                z -= ginv_.cwiseProduct(A.transpose() * r);
            }

            constexpr double inf = std::numeric_limits<double>::infinity();
            double t1 = inf;
            std::size_t drop = active_.size();
            for (std::size_t j = 0; j < active_.size(); ++j) {
                if (r(static_cast<Eigen::Index>(j)) > 0.0) {
                    const double ratio = u_[j] / r(static_cast<Eigen::Index>(j));
                    if (ratio < t1) {
                        t1 = ratio;
                        drop = j;
                    }
                }
            }
            const double zn = z.dot(np);
            const double scale = np.dot(ginv_.cwiseProduct(np));
            const double t2 = zn > kDependenceTol * scale ? -s / zn : inf;
            if (t1 == inf && t2 == inf) throw Error("quadratic subproblem is infeasible");

            const double t = std::min(t1, t2);
            if (t2 < inf) rho_ += t * z;
            for (std::size_t j = 0; j < active_.size(); ++j) u_[j] -= t * r(static_cast<Eigen::Index>(j));
            u_p += t;

            if (t2 <= t1) {
                active_.push_back(p);
                u_.push_back(u_p);
                is_active[p] = true;
                // Re-derive rho from stationarity 2 sigma rho = N_A^T u to stop drift.
                EdgeVector fresh = EdgeVector::Zero(sigma_.size());
                for (std::size_t j = 0; j < active_.size(); ++j) fresh += u_[j] * rows_[active_[j]];
                rho_ = ginv_.cwiseProduct(fresh);
                break;
            }
            is_active[active_[drop]] = false;
            active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(drop));
            u_.erase(u_.begin() + static_cast<std::ptrdiff_t>(drop));
            s = slack(p);
        }
    }
    throw Error("quadratic subproblem exceeded its step budget");
}

SubproblemSolution QuadraticSubproblem::solution() const {
    SubproblemSolution out;
    out.rho = rho_;
    out.lambda = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t j = 0; j < active_.size(); ++j)
        out.lambda(static_cast<Eigen::Index>(active_[j])) = std::max(0.0, u_[j]);
    out.energy = sigma_.dot(rho_.cwiseAbs2());
    out.iterations = iterations_;
    if (!rows_.empty()) {
        Eigen::MatrixXd N(static_cast<Eigen::Index>(rows_.size()), sigma_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) N.row(static_cast<Eigen::Index>(i)) = rows_[i];
        out.dual_value = dual_objective(N, out.lambda, sigma_, 2.0);
        out.kkt_residual = stationarity_residual(N, out.lambda, rho_, sigma_, 2.0);
    }
    return out;
}

SubproblemSolution solve_qp(const Eigen::MatrixXd& N, const EdgeVector& sigma, Tolerances tol) {
    if (N.cols() != sigma.size()) throw ContractViolation("solve_qp: N and sigma disagree on |E|");
    if (N.rows() == 0) throw ContractViolation("solve_qp: no rows");
    QuadraticSubproblem qp(sigma, tol);
    for (Eigen::Index i = 0; i < N.rows(); ++i) qp.add_row(N.row(i).transpose());
    qp.solve();
    return qp.solution();
}

}  // namespace netmod
