#include "netmod/modulus.hpp"

#include <cmath>
#include <unordered_set>

#include "netmod/errors.hpp"

namespace netmod {

void SolveConfig::validate() const {
    if (p == 1.0)
        throw UnsupportedError(
            "p = 1 is not supported: Mod_1 of a connecting family is the minimum cut size, which needs an LP "
            "solver");
    if (!(p > 1.0)) throw UnsupportedError("p must lie in (1, inf]");
    if (!(eps_tol > 0.0 && eps_tol < 1.0)) throw ContractViolation("eps_tol must lie in (0, 1)");
    if (max_outer_iter == 0) throw ContractViolation("max_outer_iter must be positive");
}

namespace {

ModulusSolution infinity_modulus(const Family& f) {
    InfinityModulus inf = solve_mod_infinity(f);
    ModulusSolution out;
    out.p = kInfiniteP;
    out.modulus = inf.value;
    out.lower_bound = out.upper_bound = inf.value;
    out.density = EdgeVector::Constant(static_cast<Eigen::Index>(f.num_edges()), inf.value);
    out.sigma = f.graph().weights();
    out.lambda = Eigen::VectorXd::Zero(1);
    out.active_rows.push_back(std::move(inf.witness));
    out.shortest_length = 1.0;
    out.iterations = 1;
    out.converged = true;
    return out;
}

Eigen::MatrixXd stack(const std::vector<ObjectRow>& rows) {
    return usage_matrix(std::span<const ObjectRow>(rows));
}

}  // namespace

ModulusSolution compute_modulus(const Family& f, const SolveConfig& cfg) {
    cfg.validate();
    if (std::isinf(cfg.p)) return infinity_modulus(f);

    const EdgeVector& sigma = f.graph().weights();
    const double p = cfg.p;
    const bool use_qp = p == 2.0 && !cfg.force_dual_ascent;

    ModulusSolution out;
    out.p = p;
    out.sigma = sigma;
    if (p < 1.05) out.warnings.push_back("p close to 1: the dual problem is poorly conditioned");

    std::optional<QuadraticSubproblem> qp;
    if (use_qp) qp.emplace(sigma, cfg.tol);
    DualAscentOptions da{cfg.max_inner_iter, cfg.tol};

    EdgeVector rho = EdgeVector::Zero(sigma.size());
    SubproblemSolution inner;
    inner.rho = rho;
    std::unordered_set<std::string> seen;
    // l >= (1 - eps)^(1/p) keeps (upper - lower) / upper <= eps; it implies l >= 1 - eps
    const double stop = std::pow(1.0 - cfg.eps_tol, 1.0 / p);

    while (true) {
        ShortestObject next = shortest_object(f, rho);
        out.shortest_length = next.length;
        if (next.length >= stop) {
            out.converged = true;
            break;
        }
        if (seen.contains(next.row.key)) {
            // The oracle returned a row already in Gamma': the inner solve cannot tighten it further.
            out.converged = next.length >= std::min(stop, 1.0 - cfg.tol.feas);
            if (!out.converged) out.warnings.push_back("constraint generation stalled on a repeated row");
            break;
        }
        if (out.iterations >= cfg.max_outer_iter) {
            const double lower = out.active_rows.empty() ? 0.0 : std::min(inner.energy, inner.dual_value);
            const double ell = std::min(next.length, 1.0);
            const double upper = ell > 0.0 ? inner.energy / std::pow(ell, p) : std::numeric_limits<double>::infinity();
            throw NonConvergenceError("constraint generation hit max_outer_iter = " +
                                          std::to_string(cfg.max_outer_iter),
                                      lower, upper);
        }

        seen.insert(next.row.key);
        out.active_rows.push_back(std::move(next.row));
        ++out.iterations;
        if (use_qp) {
            qp->add_row(out.active_rows.back().usage);
            qp->solve();
            inner = qp->solution();
        } else {
            std::optional<Eigen::VectorXd> warm;
            if (inner.lambda.size() > 0) {
                warm = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out.active_rows.size()));
                warm->head(inner.lambda.size()) = inner.lambda;
            }
            inner = solve_dual_ascent(stack(out.active_rows), sigma, p, warm, da);
        }
        rho = inner.rho.cwiseMax(0.0);
    }

    out.modulus = inner.energy;
    out.density = rho;
    out.lambda = inner.lambda;
    out.lower_bound = std::min(inner.energy, inner.dual_value);
    const double ell = std::min(out.shortest_length, 1.0);
    out.upper_bound = ell > 0.0 ? inner.energy / std::pow(ell, p) : std::numeric_limits<double>::infinity();
    return out;
}

std::vector<CurvePoint> modulus_curve(const Family& f, const std::vector<double>& p_values, SolveConfig cfg) {
    std::vector<CurvePoint> out;
    out.reserve(p_values.size());
    for (double p : p_values) {
        cfg.p = p;
        CurvePoint pt{p, std::nullopt, {}};
        try {
            pt.modulus = compute_modulus(f, cfg).modulus;
        } catch (const Error& e) {
            pt.error = e.what();
        }
        out.push_back(std::move(pt));
    }
    return out;
}

Sensitivity sensitivity(const Family& f, const SolveConfig& cfg, EdgeId e, std::optional<double> h) {
    if (std::isinf(cfg.p)) throw UnsupportedError("sensitivity needs a finite p");
    if (e >= f.num_edges()) throw ContractViolation("edge index out of range");
    const ModulusSolution base = compute_modulus(f, cfg);
    if (!base.converged) throw Error("base solve did not converge");

    const auto ei = static_cast<Eigen::Index>(e);
    const EdgeVector& sigma = f.graph().weights();
    const double step = h.value_or(1e-5 * sigma(ei));
    if (!(step > 0.0) || step >= sigma(ei)) throw ContractViolation("finite-difference step must lie in (0, sigma(e))");

    EdgeVector up = sigma, down = sigma;
    up(ei) += step;
    down(ei) -= step;
    const double mod_up = compute_modulus(f.with_weights(up), cfg).modulus;
    const double mod_down = compute_modulus(f.with_weights(down), cfg).modulus;
    return {std::pow(base.density(ei), cfg.p), (mod_up - mod_down) / (2.0 * step)};
}

}  // namespace netmod
