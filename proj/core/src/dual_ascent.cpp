#include <algorithm>
#include <cmath>
#include <limits>

#include "netmod/errors.hpp"
#include "netmod/solver.hpp"

namespace netmod {
namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr std::size_t kMaxPolish = 20;

// Dual of the p-energy problem restricted to the rows of N. Works with
// f = -g so that the iteration is a bound-constrained minimization.
class DualProblem {
public:
    DualProblem(const Eigen::MatrixXd& N, const EdgeVector& sigma, double p)
        : N_(N), psigma_(p * sigma.array()), sigma_(sigma.array()), p_(p), a_(1.0 / (p - 1.0)),
          q_(p / (p - 1.0)) {}

    Eigen::ArrayXd loads(const Eigen::VectorXd& lambda) const {
        return (N_.transpose() * lambda).array().max(0.0);
    }
    Eigen::ArrayXd density(const Eigen::ArrayXd& y) const { return (y / psigma_).pow(a_); }
    double energy_of(const Eigen::ArrayXd& rho) const { return (sigma_ * rho.pow(p_)).sum(); }
    double f(const Eigen::VectorXd& lambda) const {
        const Eigen::ArrayXd y = loads(lambda);
        return -lambda.sum() + (p_ - 1.0) * (sigma_ * (y / psigma_).pow(q_)).sum();
    }

    // d rho_e / d y_e; edges carrying no load get the value at a small floor.
    Eigen::ArrayXd curvature(const Eigen::ArrayXd& y) const {
        const double floor = 1e-10 * std::max(1e-300, y.maxCoeff());
        const Eigen::ArrayXd ye = y.max(floor);
        Eigen::ArrayXd w = a_ / psigma_ * (ye / psigma_).pow(a_ - 1.0);
        if (p_ < 2.0) w = (y > 0.0).select(w, 0.0);
        return w;
    }

    // Exact maximization of g along coordinate i; updates lambda and y in place.
    void coordinate_step(Eigen::Index i, Eigen::VectorXd& lambda, Eigen::ArrayXd& y) const {
        const Eigen::ArrayXd row = N_.row(i).transpose().array();
        auto phi = [&](double t) {
            const Eigen::ArrayXd yt = (y + t * row).max(0.0);
            return (row * (yt / psigma_).pow(a_)).sum() - 1.0;
        };
        const double lo_bound = -lambda(i);
        double t;
        if (phi(lo_bound) >= 0.0) {
            t = lo_bound;
        } else {
            double lo = lo_bound, hi;
            double f0 = phi(0.0);
            if (f0 >= 0.0) {
                hi = 0.0;
            } else {
                lo = 0.0;
                hi = std::max(1e-6, lambda(i));
                while (phi(hi) < 0.0) {
                    lo = hi;
                    hi *= 2.0;
                    if (!std::isfinite(hi)) throw Error("coordinate search diverged");
                }
            }
            // phi is increasing; bisection on a bracket [lo, hi] with phi(lo) < 0 <= phi(hi).
            for (int k = 0; k < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++k) {
                const double mid = 0.5 * (lo + hi);
                (phi(mid) < 0.0 ? lo : hi) = mid;
            }
            t = hi;
        }
        lambda(i) += t;
        if (lambda(i) < 0.0) lambda(i) = 0.0;
        y = (y + t * row).max(0.0);
    }

    void sweep(Eigen::VectorXd& lambda) const {
        Eigen::ArrayXd y = loads(lambda);
        for (Eigen::Index i = 0; i < N_.rows(); ++i) coordinate_step(i, lambda, y);
    }

    const Eigen::MatrixXd& N() const noexcept { return N_; }
    double p() const noexcept { return p_; }

private:
    const Eigen::MatrixXd& N_;
    Eigen::ArrayXd psigma_;
    Eigen::ArrayXd sigma_;
    double p_, a_, q_;
};

struct Snapshot {
    Eigen::ArrayXd rho;
    Eigen::VectorXd grad;  // of f = -g, i.e. N rho - 1
    double fval;
    double lmin;
    double energy;
    double gap;
    double slack;  // max |l/lmin - 1| over rows carrying a multiplier
};

Snapshot evaluate(const DualProblem& dp, const Eigen::VectorXd& lambda, double act) {
    Snapshot s;
    const Eigen::ArrayXd y = dp.loads(lambda);
    s.rho = dp.density(y);
    const Eigen::VectorXd len = dp.N() * s.rho.matrix();
    s.grad = len.array() - 1.0;
    s.energy = dp.energy_of(s.rho);
    s.fval = -lambda.sum() + (dp.p() - 1.0) * s.energy;
    s.lmin = len.minCoeff();
    constexpr double inf = std::numeric_limits<double>::infinity();
    s.gap = s.lmin > 0.0 ? s.energy / std::pow(s.lmin, dp.p()) + s.fval : inf;
    s.slack = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
        if (lambda(i) > act) s.slack = std::max(s.slack, std::abs(len(i) / s.lmin - 1.0));
    return s;
}

double projected_gradient(const Eigen::VectorXd& lambda, const Eigen::VectorXd& grad) {
    return (lambda - (lambda - grad).cwiseMax(0.0)).cwiseAbs().maxCoeff();
}

// One projected Newton step. Returns false when no decrease could be found.
// When polishing, f is flat to rounding: accept by projected gradient instead.
bool newton_step(const DualProblem& dp, Eigen::VectorXd& lambda, const Snapshot& s, bool polishing) {
    const Eigen::Index r = lambda.size();
    const Eigen::VectorXd& grad = s.grad;
    const double proj = projected_gradient(lambda, grad);
    const double eps_bind = std::min(1e-6, proj);

    std::vector<Eigen::Index> free, bound;
    for (Eigen::Index i = 0; i < r; ++i) {
        if (lambda(i) <= eps_bind && grad(i) > 0.0)
            bound.push_back(i);
        else
            free.push_back(i);
    }

    const Eigen::ArrayXd w = dp.curvature(dp.loads(lambda));
    Eigen::VectorXd d = Eigen::VectorXd::Zero(r);
    if (!free.empty()) {
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd NF(nf, dp.N().cols());
        Eigen::VectorXd gF(nf);
        for (Eigen::Index k = 0; k < nf; ++k) {
            NF.row(k) = dp.N().row(free[static_cast<std::size_t>(k)]);
            gF(k) = grad(free[static_cast<std::size_t>(k)]);
        }
        // H = A A^T with A = NF W^(1/2); work with the thin SVD of A (rank <= |E|).
        const Eigen::MatrixXd A = NF * w.sqrt().matrix().asDiagonal();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double cutoff = 1e-6 * std::max(sv.size() ? sv.maxCoeff() : 0.0, 1e-150);
        Eigen::VectorXd newton = Eigen::VectorXd::Zero(nf);
        Eigen::VectorXd range = Eigen::VectorXd::Zero(nf);
        for (Eigen::Index j = 0; j < sv.size(); ++j) {
            if (sv(j) > cutoff) {
                const auto u = svd.matrixU().col(j);
                const double c = u.dot(gF);
                newton -= (c / (sv(j) * sv(j))) * u;
                range += c * u;
            }
        }
        // Along the kernel of H the objective is (locally) linear: follow the gradient there.
        const Eigen::VectorXd kernel = -(gF - range);
        for (Eigen::Index k = 0; k < nf; ++k) d(free[static_cast<std::size_t>(k)]) = newton(k) + kernel(k);
    }
    for (Eigen::Index i : bound) {
        const double hii = (dp.N().row(i).array().square() * w.transpose()).sum();
        d(i) = -grad(i) / (hii > 0.0 ? hii : 1.0);
    }

    if (polishing) {
        for (double alpha = 1.0; alpha > 1e-3; alpha *= 0.5) {
            const Eigen::VectorXd trial = (lambda + alpha * d).cwiseMax(0.0);
            const Eigen::ArrayXd rho = dp.density(dp.loads(trial));
            const Eigen::VectorXd g = (dp.N() * rho.matrix()).array() - 1.0;
            if (projected_gradient(trial, g) < proj) {
                lambda = trial;
                return true;
            }
        }
        return false;
    }

    double alpha = 1.0;
    for (int k = 0; k < kMaxBacktracks; ++k, alpha *= 0.5) {
        const Eigen::VectorXd trial = (lambda + alpha * d).cwiseMax(0.0);
        const double decrease = grad.dot(trial - lambda);
        const double ft = dp.f(trial);
        if (ft < s.fval && ft <= s.fval + kArmijo * std::min(0.0, decrease)) {
            lambda = trial;
            return alpha == 1.0;
        }
    }
    return false;
}

}  // namespace

SubproblemSolution solve_dual_ascent(const Eigen::MatrixXd& N, const EdgeVector& sigma, double p,
                                     const std::optional<Eigen::VectorXd>& warm_start,
                                     const DualAscentOptions& opts) {
    if (!(p > 1.0) || !std::isfinite(p)) throw UnsupportedError("dual ascent needs p in (1, inf)");
    if (N.rows() == 0 || N.cols() != sigma.size()) throw ContractViolation("solve_dual_ascent: bad dimensions");
    if ((sigma.array() <= 0.0).any()) throw ValidationError("weights must be positive");
    for (Eigen::Index i = 0; i < N.rows(); ++i)
        if (!(N.row(i).array() > 0.0).any()) throw ContractViolation("zero usage row");

    DualProblem dp(N, sigma, p);
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(N.rows());
    if (warm_start) {
        const Eigen::Index k = std::min(warm_start->size(), N.rows());
        lambda.head(k) = warm_start->head(k).cwiseMax(0.0);
    }
    if (lambda.isZero()) dp.sweep(lambda);

    Snapshot s = evaluate(dp, lambda, opts.tol.act);
    std::size_t it = 0;
    std::size_t polish = 0;
    for (; it < opts.max_iter; ++it) {
        if (s.gap <= opts.tol.gap_tol(s.energy)) {
            if (s.slack <= 0.1 * opts.tol.feas || polish >= kMaxPolish) break;
            ++polish;
        }
        const Eigen::VectorXd prev = lambda;
        const bool full = newton_step(dp, lambda, s, polish > 0);
        if (!full) {
            if (polish) break;
            dp.sweep(lambda);
        }
        const Snapshot next = evaluate(dp, lambda, opts.tol.act);
        if (polish && next.gap > opts.tol.gap_tol(next.energy)) {
            lambda = prev;
            break;
        }
        s = next;
    }
    if (s.gap > opts.tol.gap_tol(s.energy))
        throw IterationLimitError("dual ascent did not close the duality gap (gap " + std::to_string(s.gap) + ")",
                                  s.gap);

    SubproblemSolution out;
    out.rho = (s.rho / s.lmin).matrix();
    out.lambda = lambda;
    out.energy = s.energy / std::pow(s.lmin, p);
    out.dual_value = -s.fval;
    out.kkt_residual = stationarity_residual(N, lambda, out.rho, sigma, p);
    out.iterations = it;
    return out;
}

}  // namespace netmod
