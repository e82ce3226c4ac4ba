#include "netmod/solver.hpp"

#include <cmath>

#include "netmod/errors.hpp"

namespace netmod {

double Tolerances::gap_tol(double energy) const noexcept {
    return gap_rel * (1.0 + std::abs(energy));
}

double p_energy(const EdgeVector& rho, const EdgeVector& sigma, double p) {
    if (rho.size() != sigma.size()) throw ContractViolation("density and weights differ in length");
    if (p == 2.0) return sigma.dot(rho.cwiseAbs2());
    return sigma.dot(rho.cwiseAbs().array().pow(p).matrix());
}

double dual_objective(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda, const EdgeVector& sigma,
                      double p) {
    if (N.rows() != lambda.size() || N.cols() != sigma.size())
        throw ContractViolation("dual_objective: dimension mismatch");
    const double q = p / (p - 1.0);
    const Eigen::ArrayXd y = (N.transpose() * lambda).array().max(0.0) / (p * sigma.array());
    return lambda.sum() - (p - 1.0) * (sigma.array() * y.pow(q)).sum();
}

EdgeVector density_from_duals(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda, const EdgeVector& sigma,
                              double p) {
    if (N.rows() != lambda.size() || N.cols() != sigma.size())
        throw ContractViolation("density_from_duals: dimension mismatch");
    const Eigen::ArrayXd y = (N.transpose() * lambda).array().max(0.0) / (p * sigma.array());
    return y.pow(1.0 / (p - 1.0)).matrix();
}

double stationarity_residual(const Eigen::MatrixXd& N, const Eigen::VectorXd& lambda, const EdgeVector& rho,
                             const EdgeVector& sigma, double p) {
    const Eigen::ArrayXd lhs = p * sigma.array() * rho.array().abs().pow(p - 1.0);
    const Eigen::ArrayXd rhs = (N.transpose() * lambda).array();
    return (lhs - rhs).abs().maxCoeff();
}

InfinityModulus solve_mod_infinity(const Family& f) {
    const EdgeVector ones = EdgeVector::Ones(static_cast<Eigen::Index>(f.num_edges()));
    ShortestObject s = shortest_object(f, ones);
    if (!(s.length > 0.0)) throw NoObjectError("shortest object has zero length");
    return {1.0 / s.length, std::move(s.row)};
}

}  // namespace netmod
