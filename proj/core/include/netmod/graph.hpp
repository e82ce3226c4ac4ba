#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace netmod {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// Dense per-edge values (densities, usage rows, weights). Length is |E|.
using EdgeVector = Eigen::VectorXd;

struct Edge {
    VertexId tail;
    VertexId head;
};

/// Finite weighted graph G = (V, E, sigma). Immutable once built.
///
/// Vertices carry string names mapped to dense indices in first-appearance
/// order. Parallel edges and self-loops are kept as distinct edge indices.
class Graph {
public:
    class Builder;

    bool directed() const noexcept { return directed_; }
    std::size_t num_vertices() const noexcept { return names_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }

    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    double weight(EdgeId e) const { return sigma_(static_cast<Eigen::Index>(e)); }
    const EdgeVector& weights() const noexcept { return sigma_; }
    double total_weight() const noexcept { return sigma_.sum(); }

    const std::string& vertex_name(VertexId v) const { return names_.at(v); }
    /// Throws ContractViolation for unknown names.
    VertexId vertex(std::string_view name) const;
    bool has_vertex(std::string_view name) const;

    /// Stable key `tail->head#k`, k being the ordinal among edges with the same (tail, head).
    std::string edge_key(EdgeId e) const;
    /// Inverse of edge_key; also accepts `tail->head` for ordinal 0.
    EdgeId edge_by_key(std::string_view key) const;

    /// Edge indices incident to v (outgoing only for directed graphs). Self-loops appear once.
    const std::vector<EdgeId>& incident(VertexId v) const { return incident_.at(v); }
    /// Endpoint of e opposite to v (for directed graphs, v must be the tail).
    VertexId other_end(EdgeId e, VertexId v) const;

    bool has_self_loops() const noexcept;
    /// Connectivity ignoring edge direction.
    bool is_connected() const;
    /// Directed reachability when directed(), plain connectivity otherwise.
    bool reachable(VertexId from, VertexId to) const;

    /// Same topology with a different weight vector.
    Graph with_weights(const EdgeVector& sigma) const;

private:
    Graph() = default;
    void index();

    bool directed_ = false;
    std::vector<std::string> names_;
    std::unordered_map<std::string, VertexId> ids_;
    std::vector<Edge> edges_;
    EdgeVector sigma_;
    std::vector<std::vector<EdgeId>> incident_;
};

class Graph::Builder {
public:
    explicit Builder(bool directed = false) { g_.directed_ = directed; }

    VertexId add_vertex(std::string_view name);
    /// Throws ValidationError unless weight is positive and finite.
    EdgeId add_edge(std::string_view tail, std::string_view head, double weight = 1.0);
    Graph build() &&;

private:
    Graph g_;
    std::vector<double> w_;
};

/// Parses the whitespace-separated edge-list format (`tail head [weight]`,
/// `#` comments). Throws ParseError (with line number) or ValidationError.
Graph parse_graph(std::string_view text, bool directed = false);
Graph load_graph(const std::string& path, bool directed = false);

/// Writes the graph back in edge-list form; parse_graph(to_edge_list(g)) reproduces g.
std::string to_edge_list(const Graph& g);

}  // namespace netmod
