#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netmod/graph.hpp"

namespace netmod {

/// One object gamma of a family, represented by its usage row N(gamma, .).
struct ObjectRow {
    EdgeVector usage;
    std::string label;
    /// Usage quantized at 1e-12; two rows with equal keys impose the same constraint.
    std::string key;
};

/// Validates usage (finite, nonnegative, at least one positive entry) and fills in the key.
ObjectRow make_row(EdgeVector usage, std::string label);
std::string usage_key(const EdgeVector& usage);

enum class FamilyKind { explicit_rows, connecting, spanning_trees };

/// A family of objects on a graph: either a finite list of rows, or an
/// implicit family (s-t connecting walks, spanning trees) that is only ever
/// touched through its shortest-object oracle.
class Family {
public:
    static Family explicit_rows(std::shared_ptr<const Graph> g, std::vector<ObjectRow> rows);
    /// All walks from s to t. Requires s != t and t reachable from s.
    static Family connecting(std::shared_ptr<const Graph> g, VertexId s, VertexId t);
    /// All spanning trees. Requires an undirected connected graph; self-loops never enter a tree.
    static Family spanning_trees(std::shared_ptr<const Graph> g);

    FamilyKind kind() const noexcept { return kind_; }
    const Graph& graph() const noexcept { return *graph_; }
    std::shared_ptr<const Graph> graph_ptr() const noexcept { return graph_; }
    std::size_t num_edges() const noexcept { return graph_->num_edges(); }
    const std::vector<ObjectRow>& rows() const noexcept { return rows_; }
    VertexId source() const noexcept { return s_; }
    VertexId target() const noexcept { return t_; }
    /// Smallest nonzero usage entry; 1 for walk and tree families.
    double n_min() const noexcept { return n_min_; }
    std::string describe() const;

    /// Same family on the same topology with new edge weights.
    Family with_weights(const EdgeVector& sigma) const;

private:
    Family() = default;

    FamilyKind kind_ = FamilyKind::explicit_rows;
    std::shared_ptr<const Graph> graph_;
    std::vector<ObjectRow> rows_;
    VertexId s_ = 0;
    VertexId t_ = 0;
    double n_min_ = 1.0;
};

/// l_rho(gamma) = sum_e N(gamma, e) rho(e).
double rho_length(const ObjectRow& row, const EdgeVector& rho);

struct ShortestObject {
    ObjectRow row;
    double length;
};

/// Global minimizer of l_rho over the family.
///
/// Connecting families run Dijkstra with costs rho(e); ties are broken by
/// (length, hop count, predecessor index, edge index), so the result is
/// always a simple path and runs are reproducible. Spanning-tree families run
/// Kruskal over edges ordered by (rho(e), e). Explicit families return the
/// first row attaining the minimum. Throws NoObjectError if nothing connects.
ShortestObject shortest_object(const Family& f, const EdgeVector& rho);

/// Stacks rows into a |rows| x |E| matrix, preserving order.
Eigen::MatrixXd usage_matrix(std::span<const ObjectRow> rows);

/// Row for a vertex sequence (walk) on g; usage counts traversals.
ObjectRow path_row(const Graph& g, std::span<const EdgeId> edges, std::span<const VertexId> vertices);
/// Indicator row for an edge set (e.g. a spanning tree).
ObjectRow edge_set_row(const Graph& g, std::span<const EdgeId> edges);

/// The two-edge path family Gamma_n (n odd) whose essential subfamily is all
/// of Gamma_n but whose minimal subfamily is the single row (n, n).
Family fixture_two_edge_family(int n);

/// Explicit family from a CSV/TSV matrix: a header of edge keys (optionally
/// preceded by a `label` column), then one row per object. Edges absent from
/// the header get usage 0.
Family parse_explicit_family(std::shared_ptr<const Graph> g, std::string_view text);
Family load_explicit_family(std::shared_ptr<const Graph> g, const std::string& path);

}  // namespace netmod
