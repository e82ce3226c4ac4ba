#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "netmod/family.hpp"
#include "netmod/solver.hpp"

namespace netmod {

inline constexpr double kInfiniteP = std::numeric_limits<double>::infinity();

struct SolveConfig {
    double p = 2.0;  ///< in (1, inf), or kInfiniteP
    double eps_tol = 1e-8;
    std::size_t max_outer_iter = 10000;
    Tolerances tol;
    std::size_t max_inner_iter = 2000;
    /// Route p = 2 through dual ascent instead of the active-set QP (cross-checks).
    bool force_dual_ascent = false;

    /// Throws UnsupportedError for p <= 1, ContractViolation for eps_tol outside (0, 1).
    void validate() const;
};

struct ModulusSolution {
    double p = 2.0;
    double modulus = 0.0;  ///< energy of the inner optimum on the active rows
    EdgeVector density;
    Eigen::VectorXd lambda;               ///< aligned with active_rows
    std::vector<ObjectRow> active_rows;   ///< Gamma', in insertion order
    EdgeVector sigma;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    double shortest_length = 0.0;  ///< l_rho(Gamma) at exit
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;

    double relative_gap() const noexcept {
        return upper_bound > 0.0 ? (upper_bound - lower_bound) / upper_bound : 0.0;
    }
};

/// Mod_{p,sigma}(Gamma) by constraint generation: start from Gamma' = {} and
/// rho = 0, ask the oracle for the rho-shortest object, stop once its length
/// reaches (1 - eps_tol)^(1/p), otherwise add it to Gamma' and re-solve on Gamma'.
///
/// Both bounds are reported: the lower bound is Mod(Gamma') (monotonicity),
/// the upper bound is the energy of the admissible rescaling rho / l_rho(Gamma).
/// Throws NonConvergenceError after max_outer_iter additions.
ModulusSolution compute_modulus(const Family& f, const SolveConfig& cfg);

struct CurvePoint {
    double p;
    std::optional<double> modulus;
    std::string error;  ///< set when the solve at this p failed
};

std::vector<CurvePoint> modulus_curve(const Family& f, const std::vector<double>& p_values, SolveConfig cfg);

struct Sensitivity {
    double analytic;     ///< rho*(e)^p
    double finite_diff;  ///< central difference of Mod in sigma(e)
};

/// d Mod / d sigma(e). `h` defaults to 1e-5 sigma(e).
Sensitivity sensitivity(const Family& f, const SolveConfig& cfg, EdgeId e, std::optional<double> h = std::nullopt);

}  // namespace netmod
