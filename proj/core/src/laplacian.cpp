#include "netmod/laplacian.hpp"

#include <cmath>
#include <vector>

#include "netmod/errors.hpp"

namespace netmod {
namespace {

void require_undirected(const Graph& g, const char* what) {
    if (g.directed()) throw UnsupportedError(std::string(what) + " is undefined on directed graphs");
}

// Weighted Laplacian with row/column 0 removed.
Eigen::MatrixXd grounded_laplacian(const Graph& g) {
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const auto [u, v] = g.edge(e);
        if (u == v) continue;
        const double w = g.weight(e);
        const auto a = static_cast<Eigen::Index>(u), b = static_cast<Eigen::Index>(v);
        L(a, a) += w;
        L(b, b) += w;
        L(a, b) -= w;
        L(b, a) -= w;
    }
    return L.bottomRightCorner(n - 1, n - 1);
}

}  // namespace

VertexVector laplacian_solve(const Graph& g, const VertexVector& injection) {
    require_undirected(g, "laplacian_solve");
    const auto n = static_cast<Eigen::Index>(g.num_vertices());
    if (injection.size() != n) throw ContractViolation("injection length does not match |V|");
    const double scale = injection.cwiseAbs().sum();
    if (std::abs(injection.sum()) > 1e-12 * std::max(1.0, scale))
        throw ContractViolation("injection must sum to zero");
    if (!g.is_connected()) throw SingularError("grounded Laplacian is singular: graph is disconnected");

    VertexVector v = VertexVector::Zero(n);
    if (n == 1) return v;
    Eigen::LLT<Eigen::MatrixXd> llt(grounded_laplacian(g));
    if (llt.info() != Eigen::Success) throw SingularError("grounded Laplacian is not positive definite");
    v.tail(n - 1) = llt.solve(injection.tail(n - 1));
    return v;
}

double effective_resistance(const Graph& g, VertexId s, VertexId t) {
    if (s == t) return 0.0;
    VertexVector inj = VertexVector::Zero(static_cast<Eigen::Index>(g.num_vertices()));
    inj(static_cast<Eigen::Index>(s)) = 1.0;
    inj(static_cast<Eigen::Index>(t)) = -1.0;
    const VertexVector v = laplacian_solve(g, inj);
    return v(static_cast<Eigen::Index>(s)) - v(static_cast<Eigen::Index>(t));
}

double effective_resistance(const Graph& g, EdgeId e) {
    const auto [u, v] = g.edge(e);
    return effective_resistance(g, u, v);
}

double effective_conductance(const Graph& g, VertexId s, VertexId t) {
    if (s == t) throw ContractViolation("effective conductance needs distinct endpoints");
    return 1.0 / effective_resistance(g, s, t);
}

boost::multiprecision::cpp_int count_spanning_trees(const Graph& g) {
    using boost::multiprecision::cpp_int;
    require_undirected(g, "count_spanning_trees");
    const std::size_t n = g.num_vertices();
    if (!g.is_connected()) return 0;
    if (n == 1) return 1;

    // Combinatorial Laplacian minor, then Bareiss elimination (exact over the integers).
    const std::size_t m = n - 1;
    std::vector<std::vector<cpp_int>> a(m, std::vector<cpp_int>(m, 0));
    for (const Edge& e : g.edges()) {
        if (e.tail == e.head) continue;
        const std::size_t u = e.tail, v = e.head;
        if (u > 0) a[u - 1][u - 1] += 1;
        if (v > 0) a[v - 1][v - 1] += 1;
        if (u > 0 && v > 0) {
            a[u - 1][v - 1] -= 1;
            a[v - 1][u - 1] -= 1;
        }
    }
    cpp_int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < m; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < m && a[r][k] == 0) ++r;
            if (r == m) return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < m; ++i) {
            for (std::size_t j = k + 1; j < m; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        }
        prev = a[k][k];
    }
    cpp_int det = a[m - 1][m - 1];
    return sign < 0 ? cpp_int(-det) : det;
}

}  // namespace netmod
