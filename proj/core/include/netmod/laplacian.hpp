#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "netmod/graph.hpp"

namespace netmod {

/// Vertex-indexed values (injections, potentials).
using VertexVector = Eigen::VectorXd;

/// Solves L v = injection for the weighted Laplacian L of an undirected,
/// connected graph, grounded so that v(0) = 0.
///
/// The injection must sum to zero (relative tolerance 1e-12). Throws
/// UnsupportedError for directed graphs and SingularError when the graph is
/// disconnected.
VertexVector laplacian_solve(const Graph& g, const VertexVector& injection);

/// Effective resistance between two vertices under conductances sigma.
double effective_resistance(const Graph& g, VertexId s, VertexId t);
/// Effective resistance across edge e. Lies in (0, 1/sigma(e)].
double effective_resistance(const Graph& g, EdgeId e);
/// Effective conductance C_eff(s, t) = 1 / R_eff(s, t).
double effective_conductance(const Graph& g, VertexId s, VertexId t);

/// Number of spanning trees of the underlying multigraph (weights ignored,
/// self-loops dropped), by an exact fraction-free determinant. Returns 0 for
/// disconnected graphs.
boost::multiprecision::cpp_int count_spanning_trees(const Graph& g);

}  // namespace netmod
