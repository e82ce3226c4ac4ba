#pragma once

#include <span>
#include <vector>

#include "netmod/family.hpp"
#include "netmod/solver.hpp"

namespace netmod {

inline constexpr std::size_t kDefaultPathCap = 12;
inline constexpr std::size_t kDefaultTreeCap = 9;

/// Every simple s-t path, found by depth-first search over incident edges in
/// index order. Follows edge direction on directed graphs. Throws
/// CapExceededError when |V| > cap and ContractViolation when s == t.
std::vector<ObjectRow> enumerate_paths(const Graph& g, VertexId s, VertexId t, std::size_t cap = kDefaultPathCap);

/// Every spanning tree by contraction-deletion over edges in index order.
/// The count is checked against the matrix-tree theorem.
std::vector<ObjectRow> enumerate_spanning_trees(const Graph& g, std::size_t cap = kDefaultTreeCap);

/// Enumerates an implicit family (or returns the rows of an explicit one).
std::vector<ObjectRow> enumerate_family(const Family& f, std::size_t cap);

struct FullMatrixResult {
    double modulus;
    EdgeVector rho;
    Eigen::VectorXd lambda;  ///< one entry per input row
};

/// Solves the modulus problem with every row present at once.
FullMatrixResult full_matrix_modulus(std::span<const ObjectRow> rows, const EdgeVector& sigma, double p,
                                     const Tolerances& tol = {});

}  // namespace netmod
