#include "netmod/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "netmod/errors.hpp"

namespace netmod {
namespace {

constexpr double kRankCutoff = 1e-8;

SubproblemSolution resolve(const std::vector<ObjectRow>& rows, const EdgeVector& sigma, const SolveConfig& cfg) {
    const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(rows));
    if (cfg.p == 2.0 && !cfg.force_dual_ascent) return solve_qp(N, sigma, cfg.tol);
    return solve_dual_ascent(N, sigma, cfg.p, std::nullopt, {cfg.max_inner_iter, cfg.tol});
}

}  // namespace

std::size_t numerical_rank(const Eigen::MatrixXd& N) {
    if (N.rows() == 0 || N.cols() == 0) return 0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(N.transpose());
    const Eigen::VectorXd diag = qr.matrixR().diagonal().cwiseAbs();
    const double largest = diag.size() ? diag.maxCoeff() : 0.0;
    if (largest == 0.0) return 0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < diag.size(); ++i)
        if (diag(i) > kRankCutoff * largest) ++rank;
    return rank;
}

MinimalSubfamily extract_minimal_subfamily(const ModulusSolution& sol, const SolveConfig& cfg, bool strict_probe) {
    if (std::isinf(sol.p)) throw UnsupportedError("minimal subfamilies are defined for finite p");
    if (!sol.converged) throw CertificationError("solution did not converge");
    if (static_cast<std::size_t>(sol.lambda.size()) != sol.active_rows.size())
        throw ContractViolation("solution multipliers do not match its active rows");
    SolveConfig local = cfg;
    local.p = sol.p;
    const Tolerances& tol = local.tol;

    std::vector<std::size_t> support;  // indices into sol.active_rows, insertion order
    for (std::size_t i = 0; i < sol.active_rows.size(); ++i)
        if (sol.lambda(static_cast<Eigen::Index>(i)) > tol.act) support.push_back(i);
    if (support.empty()) throw CertificationError("no positive multiplier");

    auto rows_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<ObjectRow> r;
        for (std::size_t i : idx) r.push_back(sol.active_rows[i]);
        return r;
    };

    std::vector<ObjectRow> rows = rows_of(support);
    Eigen::VectorXd lam;
    const double mod_tol = 10.0 * tol.gap_tol(sol.modulus) + 1e-12 * sol.modulus;

    auto erase_at = [&](std::size_t k) {
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(k));
        const Eigen::Index n = lam.size();
        Eigen::VectorXd next(n - 1);
        next << lam.head(static_cast<Eigen::Index>(k)), lam.tail(n - 1 - static_cast<Eigen::Index>(k));
        lam = std::move(next);
    };

    SubproblemSolution inner = resolve(rows, sol.sigma, local);
    lam = inner.lambda;
    while (true) {
        // zero multipliers first, latest row first
        bool dropped = false;
        for (std::size_t k = rows.size(); k-- > 0 && rows.size() > 1;) {
            if (lam(static_cast<Eigen::Index>(k)) <= tol.act) {
                erase_at(k);
                dropped = true;
            }
        }
        const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(rows));
        const std::size_t rank = numerical_rank(N);
        if (!dropped && rank == rows.size()) break;

        if (rank < rows.size()) {
            // shift lambda along a kernel direction of N^T until one multiplier vanishes;
            // N^T lambda, hence rho*, is unchanged
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(N.transpose(), Eigen::ComputeFullV);
            Eigen::VectorXd z = svd.matrixV().col(svd.matrixV().cols() - 1);
            if (z.maxCoeff() < -z.minCoeff()) z = -z;
            const double zmax = z.maxCoeff();
            double step = std::numeric_limits<double>::infinity();
            for (Eigen::Index k = 0; k < z.size(); ++k)
                if (z(k) > 1e-12 * zmax) step = std::min(step, lam(k) / z(k));
            std::size_t drop = 0;
            for (Eigen::Index k = 0; k < z.size(); ++k)
                if (z(k) > 1e-12 * zmax && lam(k) / z(k) <= step * (1.0 + 1e-9) + 1e-300) drop = static_cast<std::size_t>(k);
            lam = (lam - step * z).cwiseMax(0.0);
            erase_at(drop);
        }
        if (rows.empty()) throw CertificationError("support reduction removed every row");
        inner = resolve(rows, sol.sigma, local);
        lam = inner.lambda;
        if (std::abs(inner.energy - sol.modulus) > mod_tol)
            throw CertificationError("dropping a dependent row changed the modulus by " +
                                     std::to_string(std::abs(inner.energy - sol.modulus)));
    }

    MinimalSubfamily out;
    out.rows = std::move(rows);
    out.lambdas = inner.lambda;
    out.modulus = inner.energy;
    out.modulus_match = std::abs(inner.energy - sol.modulus);
    const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(out.rows));
    out.rank = numerical_rank(N);
    out.rank_certified = out.rank == out.rows.size();

    if (out.rows.size() > static_cast<std::size_t>(N.cols()))
        throw CertificationError("subfamily has more rows than the graph has edges");
    if (!out.rank_certified) throw CertificationError("subfamily rows are linearly dependent");
    if ((out.lambdas.array() <= tol.act).any()) throw CertificationError("a multiplier is not strictly positive");
    const Eigen::VectorXd len = N * sol.density;
    if ((len.array() - 1.0).abs().maxCoeff() > tol.feas)
        throw CertificationError("a subfamily row is not tight under the extremal density");

    if (strict_probe) {
        out.strict_minimality_checked = true;
        for (std::size_t k = 0; k < out.rows.size(); ++k) {
            double reduced = 0.0;
            if (out.rows.size() > 1) {
                std::vector<ObjectRow> rest = out.rows;
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(k));
                reduced = resolve(rest, sol.sigma, local).energy;
            }
            const double drop = out.modulus - reduced;
            out.leave_one_out_drop.push_back(drop);
            if (!(drop > tol.gap_tol(out.modulus)))
                throw CertificationError("removing '" + out.rows[k].label + "' does not lower the modulus");
        }
    }
    return out;
}

Eigen::VectorXd nonnegative_least_squares(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    const Eigen::Index n = A.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()) * std::max(1.0, b.cwiseAbs().maxCoeff());

    auto solve_passive = [&](Eigen::VectorXd& s) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
        const Eigen::VectorXd sp = Ap.colPivHouseholderQr().solve(b);
        s.setZero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) s(idx[k]) = sp(static_cast<Eigen::Index>(k));
    };

    for (Eigen::Index outer = 0; outer < 3 * n + 10; ++outer) {
        const Eigen::VectorXd w = A.transpose() * (b - A * x);
        Eigen::Index best = -1;
        double wmax = tol;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[static_cast<std::size_t>(j)] && w(j) > wmax) {
                wmax = w(j);
                best = j;
            }
        if (best < 0) break;
        passive[static_cast<std::size_t>(best)] = true;

        Eigen::VectorXd s;
        for (Eigen::Index inner = 0; inner <= n; ++inner) {
            solve_passive(s);
            double alpha = 1.0;
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && s(j) <= 0.0) {
                    feasible = false;
                    const double denom = x(j) - s(j);
                    if (denom > 0.0) alpha = std::min(alpha, x(j) / denom);
                }
            }
            if (feasible) break;
            x += alpha * (s - x);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[static_cast<std::size_t>(j)] && x(j) <= 1e-15) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x(j) = 0.0;
                }
        }
        x = s.cwiseMax(0.0);
    }
    return x;
}

BeurlingReport verify_beurling(std::span<const ObjectRow> rows, const EdgeVector& rho, double p,
                               const EdgeVector& sigma, const Tolerances& tol) {
    if (!(p > 1.0) || std::isinf(p)) throw UnsupportedError("the Beurling criterion needs p in (1, inf)");
    if (rho.size() != sigma.size()) throw ContractViolation("density and weights differ in length");
    BeurlingReport rep;
    const Eigen::MatrixXd N = usage_matrix(rows);
    const Eigen::VectorXd len = N * rho;
    rep.max_length_error = (len.array() - 1.0).abs().maxCoeff();
    rep.precondition_ok = rep.max_length_error <= tol.feas;
    if (!rep.precondition_ok) {
        rep.reason = "some row is not tight: max |l_rho - 1| = " + std::to_string(rep.max_length_error);
        rep.residual = std::numeric_limits<double>::infinity();
        return rep;
    }
    const Eigen::VectorXd target = (p * sigma.array() * rho.array().abs().pow(p - 1.0)).matrix();
    rep.lambda = nonnegative_least_squares(N.transpose(), target);
    rep.residual = (N.transpose() * rep.lambda - target).cwiseAbs().maxCoeff();
    rep.certified = rep.residual <= tol.stat_tol(rep.lambda.sum());
    if (!rep.certified) rep.reason = "p sigma rho^(p-1) is not in the cone of the rows";
    return rep;
}

Pmf dual_pmf(const ModulusSolution& sol) {
    if (std::isinf(sol.p)) throw UnsupportedError("no dual pmf for p = inf");
    const double total = sol.lambda.sum();
    if (!(total > 0.0)) throw ContractViolation("multipliers vanish identically");
    return {sol.lambda / total, total};
}

Pmf optimal_pmf(const ModulusSolution& sol) {
    if (sol.p != 2.0) throw UnsupportedError("the optimal pmf interpretation holds for p = 2 only");
    Pmf pmf = dual_pmf(sol);
    const double alpha = expected_overlap(sol.active_rows, pmf.mu, sol.sigma);
    if (std::abs(pmf.nu - 2.0 / alpha) > 1e-7 * pmf.nu)
        throw CertificationError("nu = |lambda|_1 disagrees with 2 / (mu^T C mu)");
    return pmf;
}

Eigen::MatrixXd overlap_matrix(std::span<const ObjectRow> rows) {
    const Eigen::MatrixXd N = usage_matrix(rows);
    return N * N.transpose();
}

Eigen::MatrixXd overlap_matrix(std::span<const ObjectRow> rows, const EdgeVector& sigma) {
    const Eigen::MatrixXd N = usage_matrix(rows);
    if (N.cols() != sigma.size()) throw ContractViolation("weights do not match the rows");
    return N * sigma.cwiseInverse().asDiagonal() * N.transpose();
}

EdgeVector expected_usage(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu) {
    const Eigen::MatrixXd N = usage_matrix(rows);
    if (mu.size() != N.rows()) throw ContractViolation("pmf length does not match the rows");
    return N.transpose() * mu;
}

double expected_overlap(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu) {
    const EdgeVector u = expected_usage(rows, mu);
    return u.squaredNorm();
}

double expected_overlap(std::span<const ObjectRow> rows, const Eigen::VectorXd& mu, const EdgeVector& sigma) {
    const EdgeVector u = expected_usage(rows, mu);
    if (u.size() != sigma.size()) throw ContractViolation("weights do not match the rows");
    return u.cwiseAbs2().dot(sigma.cwiseInverse());
}

SandwichBounds sandwich_bounds(const EdgeVector& rho, std::span<const ObjectRow> rows, const Eigen::VectorXd& mu,
                               const EdgeVector& sigma, const Tolerances& tol) {
    const Eigen::MatrixXd N = usage_matrix(rows);
    if ((rho.array() < 0.0).any() || ((N * rho).array() < 1.0 - tol.feas).any())
        throw ContractViolation("density is not admissible for the rows");
    return {sigma.dot(rho.cwiseAbs2()), 1.0 / expected_overlap(rows, mu, sigma)};
}

double spanning_tree_lower_bound(const Graph& g) {
    double sum = 0.0;
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        if (g.edge(e).tail == g.edge(e).head) continue;
        const double r = effective_resistance(g, e);
        sum += g.weight(e) * r * r;
    }
    return 1.0 / sum;
}

}  // namespace netmod
