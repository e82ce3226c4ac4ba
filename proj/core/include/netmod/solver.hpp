#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "netmod/family.hpp"

namespace netmod {

/// Numerical cutoffs shared by the inner solvers and the post-solve analysis.
struct Tolerances {
    double feas = 1e-9;       ///< |l_rho(gamma) - 1| counted as "tight"
    double stat_rel = 1e-7;   ///< stationarity: residual <= stat_rel * (1 + |lambda|_1)
    double gap_rel = 1e-10;   ///< duality gap: gap <= gap_rel * (1 + |energy|)
    double act = 1e-9;        ///< multipliers above this are "positive"

    double stat_tol(double lambda_l1) const noexcept { return stat_rel * (1.0 + lambda_l1); }
    double gap_tol(double energy) const noexcept;
};

/// Optimum of the p-energy over a finite active subfamily.
///
/// Multipliers follow the Lagrangian convention
/// p sigma(e) rho(e)^(p-1) = (N^T lambda)(e), so for p = 2 and sigma = 1,
/// lambda = 2 C^-1 1 on a nondegenerate active block.
struct SubproblemSolution {
    EdgeVector rho;
    Eigen::VectorXd lambda;  ///< one entry per row of N
    double energy = 0.0;     ///< sum_e sigma(e) rho(e)^p
    double dual_value = 0.0; ///< dual objective g(lambda)
    double kkt_residual = 0.0;
    std::size_t iterations = 0;

    double gap() const noexcept { return energy - dual_value; }
};

/// sum_e sigma(e) |rho(e)|^p
double p_energy(const EdgeVector& rho, const EdgeVector& sigma, double p);

/// Dual objective g(lambda) = sum lambda - (p-1) sum_e sigma(e) ((N^T lambda)(e) / (p sigma(e)))^(p/(p-1)).
double dual_objective(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda, const EdgeVector& sigma,
                      double p);

/// Minimizer of the Lagrangian for fixed lambda >= 0:
/// rho(e) = ((N^T lambda)(e) / (p sigma(e)))^(1/(p-1)).
EdgeVector density_from_duals(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda,
                              const EdgeVector& sigma, double p);

/// || p sigma rho^(p-1) - N^T lambda ||_inf
double stationarity_residual(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda, const EdgeVector& rho,
                             const EdgeVector& sigma, double p);

/// Incremental p = 2 solver: minimize sum sigma rho^2 subject to N rho >= 1.
///
/// A dual active-set method in the style of Goldfarb and Idnani. It starts
/// from the unconstrained minimizer rho = 0, repeatedly adds the most
/// violated row and keeps the active rows linearly independent: a row that is
/// dependent on the active block trades multiplier mass with it until some
/// active row can be dropped. Rows may be appended between solves; the
/// previous active set and multipliers are kept, new rows enter at 0.
class QuadraticSubproblem {
public:
    explicit QuadraticSubproblem(EdgeVector sigma, Tolerances tol = {});

    std::size_t add_row(const EdgeVector& usage);
    /// Throws DegenerateActiveSetError if the active block loses definiteness.
    void solve();

    std::size_t num_rows() const noexcept { return rows_.size(); }
    const std::vector<std::size_t>& active() const noexcept { return active_; }
    SubproblemSolution solution() const;

private:
    Eigen::MatrixXd active_matrix() const;
    double slack(std::size_t row) const;

    EdgeVector sigma_;
    EdgeVector ginv_;  // 1 / (2 sigma)
    Tolerances tol_;
    std::vector<EdgeVector> rows_;
    std::vector<std::size_t> active_;
    std::vector<double> u_;  // multipliers of active_
    EdgeVector rho_;
    std::size_t iterations_ = 0;
};

SubproblemSolution solve_qp(const Eigen::MatrixXd& N, const EdgeVector& sigma, Tolerances tol = {});

struct DualAscentOptions {
    std::size_t max_iter = 2000;
    Tolerances tol;
};

/// Maximizes the concave dual g over lambda >= 0 for any p in (1, inf).
///
/// Projected Newton steps with an Armijo backtracking search along the
/// projection arc; exact coordinate maximization is used to start from
/// lambda = 0 and whenever the Newton step stalls. Stops once
/// E(rho / l_min) - g(lambda) <= gap_tol, where l_min is the smallest row
/// length under rho = rho_lambda; the returned density is rho / l_min, which
/// is admissible for every row. Throws IterationLimitError otherwise.
SubproblemSolution solve_dual_ascent(const Eigen::MatrixXd& N, const EdgeVector& sigma, double p,
                                     const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                                     const DualAscentOptions& opts = {});

struct InfinityModulus {
    double value;
    ObjectRow witness;
};

/// Mod_inf = 1 / l(Gamma) with l the shortest-object length at rho = 1.
InfinityModulus solve_mod_infinity(const Family& f);

}  // namespace netmod
