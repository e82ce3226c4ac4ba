#pragma once

#include <span>
#include <string>
#include <vector>

#include "netmod/laplacian.hpp"
#include "netmod/modulus.hpp"

namespace netmod {

/// Numerical rank of N via column-pivoted Householder QR of N^T; pivots below
/// 1e-8 times the largest pivot count as zero.
std::size_t numerical_rank(const Eigen::MatrixXd& N);

/// A certified minimal subfamily: strictly positive multipliers on linearly
/// independent rows, each tight under rho*.
struct MinimalSubfamily {
    std::vector<ObjectRow> rows;
    Eigen::VectorXd lambdas;
    bool rank_certified = false;
    std::size_t rank = 0;
    double modulus = 0.0;        ///< Mod(subfamily), re-solved
    double modulus_match = 0.0;  ///< |Mod(subfamily) - Mod(Gamma)|
    /// Filled by the strict probe: Mod(subfamily) - Mod(subfamily minus row i).
    std::vector<double> leave_one_out_drop;
    bool strict_minimality_checked = false;
};

/// Takes the support of lambda, drops dependent rows (most recently added
/// first) while confirming that the modulus does not move, and certifies the
/// result. With `strict_probe`, additionally re-solves without each row and
/// requires the modulus to drop by more than the gap tolerance. Throws
/// CertificationError naming the violated property.
MinimalSubfamily extract_minimal_subfamily(const ModulusSolution& sol, const SolveConfig& cfg,
                                           bool strict_probe = false);

struct BeurlingReport {
    bool precondition_ok = false;  ///< every row tight: |l_rho - 1| <= feas
    bool certified = false;
    double max_length_error = 0.0;
    double residual = 0.0;   ///< || N^T lambda - p sigma rho^(p-1) ||_inf
    Eigen::VectorXd lambda;  ///< nonnegative combination found by NNLS
    std::string reason;
};

/// Checks that p sigma rho^(p-1) lies in the cone spanned by the rows, which
/// by Farkas' lemma is equivalent to the Beurling extremality criterion for
/// this subfamily. Never throws for a failed certificate; see `reason`.
BeurlingReport verify_beurling(std::span<const ObjectRow> rows, const EdgeVector& rho, double p,
                               const EdgeVector& sigma, const Tolerances& tol = {});

/// Lawson-Hanson nonnegative least squares: argmin_{x >= 0} ||A x - b||_2.
Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct Pmf {
    Eigen::VectorXd mu;  ///< sums to 1
    double nu = 0.0;     ///< lambda = nu * mu
};

/// Optimal pmf mu* = lambda / |lambda|_1 for p = 2; checks nu = 2 / (mu^T C_sigma mu).
/// Throws UnsupportedError for other p.
Pmf optimal_pmf(const ModulusSolution& sol);
/// lambda / |lambda|_1 for any finite p. Only the p = 2 case has the overlap interpretation.
Pmf dual_pmf(const ModulusSolution& sol);

/// C(i, j) = sum_e N(i, e) N(j, e).
Eigen::MatrixXd overlap_matrix(std::span<const ObjectRow> rows);
/// Weighted variant sum_e N(i, e) N(j, e) / sigma(e), the quadratic form of the p = 2 dual.
Eigen::MatrixXd overlap_matrix(std::span<const ObjectRow> rows, const EdgeVector& sigma);

/// N^T mu: expected usage of each edge by an object drawn from mu.
EdgeVector expected_usage(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu);
/// mu^T C mu: expected overlap of two independent draws.
double expected_overlap(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu);
double expected_overlap(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu, const EdgeVector& sigma);

struct SandwichBounds {
    double upper;  ///< sum sigma rho^2
    double lower;  ///< 1 / (mu^T C_sigma mu)
};

/// Brackets Mod_2 between the energy of an admissible density and the
/// inverse expected overlap of any pmf. Throws ContractViolation if rho is
/// not admissible for the rows.
SandwichBounds sandwich_bounds(const EdgeVector& rho, std::span<const ObjectRow> rows, const Eigen::VectorXd& mu,
                               const EdgeVector& sigma, const Tolerances& tol = {});

/// Lower bound on Mod_2 of the spanning-tree family from the edge effective
/// resistances: (sum_e sigma(e) R_eff(e)^2)^-1. For unit weights this is the
/// bound obtained from the uniform spanning-tree distribution.
double spanning_tree_lower_bound(const Graph& g);

}  // namespace netmod
