#include "netmod/oracle.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include "netmod/errors.hpp"
#include "netmod/laplacian.hpp"

namespace netmod {
namespace {

void check_cap(const Graph& g, std::size_t cap, const char* what) {
    if (g.num_vertices() > cap)
        throw CapExceededError(std::string(what) + ": graph has " + std::to_string(g.num_vertices()) +
                               " vertices, cap is " + std::to_string(cap));
}

struct Dsu {
    std::vector<std::size_t> parent;
    explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) const {
        while (parent[x] != x) x = parent[x];
        return x;
    }
};

}  // namespace

std::vector<ObjectRow> enumerate_paths(const Graph& g, VertexId s, VertexId t, std::size_t cap) {
    check_cap(g, cap, "path enumeration");
    if (s >= g.num_vertices() || t >= g.num_vertices()) throw ContractViolation("endpoint out of range");
    if (s == t) throw ContractViolation("connecting family needs distinct endpoints");

    std::vector<ObjectRow> out;
    std::vector<bool> on_path(g.num_vertices(), false);
    std::vector<VertexId> verts{s};
    std::vector<EdgeId> edges;
    on_path[s] = true;

    std::function<void(VertexId)> dfs = [&](VertexId v) {
        if (v == t) {
            out.push_back(path_row(g, edges, verts));
            return;
        }
        for (EdgeId e : g.incident(v)) {
            const VertexId w = g.other_end(e, v);
            if (w == v || on_path[w]) continue;
            on_path[w] = true;
            verts.push_back(w);
            edges.push_back(e);
            dfs(w);
            edges.pop_back();
            verts.pop_back();
            on_path[w] = false;
        }
    };
    dfs(s);
    return out;
}

std::vector<ObjectRow> enumerate_spanning_trees(const Graph& g, std::size_t cap) {
    check_cap(g, cap, "spanning-tree enumeration");
    if (g.directed()) throw UnsupportedError("spanning trees are enumerated on undirected graphs only");
    const std::size_t n = g.num_vertices();
    const std::size_t m = g.num_edges();

    std::vector<ObjectRow> out;
    std::vector<EdgeId> chosen;

    // Can the current contraction still be connected using edges [from, m)?
    auto completable = [&](const Dsu& dsu, EdgeId from) {
        Dsu d = dsu;
        std::size_t comps = 0;
        for (std::size_t v = 0; v < n; ++v)
            if (d.find(v) == v) ++comps;
        for (EdgeId e = from; e < m && comps > 1; ++e) {
            const auto a = d.find(g.edge(e).tail), b = d.find(g.edge(e).head);
            if (a != b) {
                d.parent[a] = b;
                --comps;
            }
        }
        return comps == 1;
    };

    std::function<void(Dsu&, EdgeId)> rec = [&](Dsu& dsu, EdgeId e) {
        if (chosen.size() + 1 == n) {
            out.push_back(edge_set_row(g, chosen));
            return;
        }
        if (e >= m) return;
        const auto a = dsu.find(g.edge(e).tail), b = dsu.find(g.edge(e).head);
        if (a != b) {
            // contract
            Dsu next = dsu;
            next.parent[a] = b;
            chosen.push_back(e);
            rec(next, e + 1);
            chosen.pop_back();
        }
        // delete
        if (completable(dsu, e + 1)) rec(dsu, e + 1);
    };

    if (n == 1) throw NoObjectError("single vertex: no edge can form a spanning tree");
    Dsu root(n);
    if (completable(root, 0)) rec(root, 0);
    if (out.empty()) throw NoObjectError("graph is disconnected");

    const auto expected = count_spanning_trees(g);
    if (expected != out.size())
        throw Error("spanning-tree enumeration found " + std::to_string(out.size()) + " trees, matrix-tree count is " +
                    expected.str());
    return out;
}

std::vector<ObjectRow> enumerate_family(const Family& f, std::size_t cap) {
    switch (f.kind()) {
        case FamilyKind::explicit_rows:
            return f.rows();
        case FamilyKind::connecting:
            return enumerate_paths(f.graph(), f.source(), f.target(), cap);
        case FamilyKind::spanning_trees:
            return enumerate_spanning_trees(f.graph(), cap);
    }
    throw ContractViolation("unknown family kind");
}

FullMatrixResult full_matrix_modulus(std::span<const ObjectRow> rows, const EdgeVector& sigma, double p,
                                     const Tolerances& tol) {
    if (rows.empty()) throw ContractViolation("full-matrix solve needs at least one row");
    if (!(p > 1.0) || std::isinf(p)) throw UnsupportedError("full-matrix solve needs p in (1, inf)");
    const Eigen::MatrixXd N = usage_matrix(rows);
    if (p == 2.0) {
        const SubproblemSolution s = solve_qp(N, sigma, tol);
        return {s.energy, s.rho, s.lambda};
    }
    DualAscentOptions opts;
    opts.tol = tol;
    opts.max_iter = 20000;
    const SubproblemSolution s = solve_dual_ascent(N, sigma, p, std::nullopt, opts);
    return {s.energy, s.rho, s.lambda};
}

}  // namespace netmod
