#include "netmod/family.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <tuple>

#include "netmod/errors.hpp"

namespace netmod {
namespace {

constexpr double kKeyQuantum = 1e-12;

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

ShortestObject shortest_path(const Family& f, const EdgeVector& rho) {
    const Graph& g = f.graph();
    const std::size_t n = g.num_vertices();
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<double> dist(n, inf);
    std::vector<std::size_t> hops(n, none), pred_v(n, none), pred_e(n, none);
    std::vector<bool> settled(n, false);

    using Label = std::tuple<double, std::size_t, VertexId>;
    std::priority_queue<Label, std::vector<Label>, std::greater<>> pq;
    dist[f.source()] = 0.0;
    hops[f.source()] = 0;
    pq.emplace(0.0, 0, f.source());
    while (!pq.empty()) {
        const auto [d, h, u] = pq.top();
        pq.pop();
        if (settled[u] || d != dist[u] || h != hops[u]) continue;
        settled[u] = true;
        if (u == f.target()) break;
        for (EdgeId e : g.incident(u)) {
            const VertexId w = g.other_end(e, u);
            if (w == u || settled[w]) continue;
            const double nd = d + rho(static_cast<Eigen::Index>(e));
            const std::size_t nh = h + 1;
            const bool better = nd < dist[w] ||
                                (nd == dist[w] && std::tie(nh, u, e) < std::tie(hops[w], pred_v[w], pred_e[w]));
            if (better) {
                dist[w] = nd;
                hops[w] = nh;
                pred_v[w] = u;
                pred_e[w] = e;
                pq.emplace(nd, nh, w);
            }
        }
    }
    if (!settled[f.target()]) throw NoObjectError("target is unreachable from source");

    std::vector<EdgeId> edges;
    std::vector<VertexId> verts{f.target()};
    for (VertexId v = f.target(); v != f.source(); v = pred_v[v]) {
        edges.push_back(pred_e[v]);
        verts.push_back(pred_v[v]);
    }
    std::reverse(edges.begin(), edges.end());
    std::reverse(verts.begin(), verts.end());
    ObjectRow row = path_row(g, edges, verts);
    const double len = rho_length(row, rho);
    return {std::move(row), len};
}

ShortestObject minimum_spanning_tree(const Family& f, const EdgeVector& rho) {
    const Graph& g = f.graph();
    std::vector<EdgeId> order(g.num_edges());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
        return rho(static_cast<Eigen::Index>(a)) < rho(static_cast<Eigen::Index>(b));
    });
    DisjointSets dsu(g.num_vertices());
    std::vector<EdgeId> tree;
    for (EdgeId e : order) {
        const auto [u, v] = g.edge(e);
        if (u != v && dsu.unite(u, v)) tree.push_back(e);
    }
    if (tree.size() + 1 != g.num_vertices()) throw NoObjectError("graph has no spanning tree");
    std::sort(tree.begin(), tree.end());
    ObjectRow row = edge_set_row(g, tree);
    const double len = rho_length(row, rho);
    return {std::move(row), len};
}

}  // namespace

std::string usage_key(const EdgeVector& usage) {
    std::string key;
    for (Eigen::Index e = 0; e < usage.size(); ++e) {
        const long long q = std::llround(usage(e) / kKeyQuantum);
        if (q == 0) continue;
        key += std::to_string(e);
        key += ':';
        key += std::to_string(q);
        key += ';';
    }
    return key;
}

ObjectRow make_row(EdgeVector usage, std::string label) {
    bool positive = false;
    for (Eigen::Index e = 0; e < usage.size(); ++e) {
        if (!std::isfinite(usage(e)) || usage(e) < 0.0)
            throw ValidationError("usage entries must be finite and nonnegative (object '" + label + "')");
        positive = positive || usage(e) > 0.0;
    }
    if (!positive) throw ValidationError("object '" + label + "' uses no edge");
    std::string key = usage_key(usage);
    return {std::move(usage), std::move(label), std::move(key)};
}

ObjectRow path_row(const Graph& g, std::span<const EdgeId> edges, std::span<const VertexId> vertices) {
    EdgeVector usage = EdgeVector::Zero(static_cast<Eigen::Index>(g.num_edges()));
    for (EdgeId e : edges) usage(static_cast<Eigen::Index>(e)) += 1.0;
    std::string label;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (i) label += ' ';
        label += g.vertex_name(vertices[i]);
    }
    return make_row(std::move(usage), std::move(label));
}

ObjectRow edge_set_row(const Graph& g, std::span<const EdgeId> edges) {
    EdgeVector usage = EdgeVector::Zero(static_cast<Eigen::Index>(g.num_edges()));
    std::string label = "{";
    for (std::size_t i = 0; i < edges.size(); ++i) {
        usage(static_cast<Eigen::Index>(edges[i])) = 1.0;
        if (i) label += ' ';
        label += g.edge_key(edges[i]);
    }
    label += '}';
    return make_row(std::move(usage), std::move(label));
}

Family Family::explicit_rows(std::shared_ptr<const Graph> g, std::vector<ObjectRow> rows) {
    if (!g) throw ContractViolation("family needs a graph");
    if (rows.empty()) throw ContractViolation("explicit family must be nonempty");
    Family f;
    f.kind_ = FamilyKind::explicit_rows;
    double n_min = std::numeric_limits<double>::infinity();
    for (const ObjectRow& r : rows) {
        if (static_cast<std::size_t>(r.usage.size()) != g->num_edges())
            throw ContractViolation("row '" + r.label + "' has the wrong length");
        for (Eigen::Index e = 0; e < r.usage.size(); ++e)
            if (r.usage(e) > 0.0) n_min = std::min(n_min, r.usage(e));
    }
    f.graph_ = std::move(g);
    f.rows_ = std::move(rows);
    f.n_min_ = n_min;
    return f;
}

Family Family::connecting(std::shared_ptr<const Graph> g, VertexId s, VertexId t) {
    if (!g) throw ContractViolation("family needs a graph");
    if (s >= g->num_vertices() || t >= g->num_vertices()) throw ContractViolation("vertex out of range");
    if (s == t) throw ContractViolation("connecting family requires s != t");
    if (!g->reachable(s, t)) throw NoObjectError("target is unreachable from source");
    Family f;
    f.kind_ = FamilyKind::connecting;
    f.graph_ = std::move(g);
    f.s_ = s;
    f.t_ = t;
    return f;
}

Family Family::spanning_trees(std::shared_ptr<const Graph> g) {
    if (!g) throw ContractViolation("family needs a graph");
    if (g->directed()) throw UnsupportedError("spanning-tree families need an undirected graph");
    if (g->num_vertices() < 2) throw ContractViolation("spanning-tree family needs at least two vertices");
    if (!g->is_connected()) throw NoObjectError("graph is disconnected: no spanning tree");
    Family f;
    f.kind_ = FamilyKind::spanning_trees;
    f.graph_ = std::move(g);
    return f;
}

std::string Family::describe() const {
    switch (kind_) {
    case FamilyKind::explicit_rows:
        return "explicit(" + std::to_string(rows_.size()) + " rows)";
    case FamilyKind::connecting:
        return "connecting(" + graph_->vertex_name(s_) + "," + graph_->vertex_name(t_) + ")";
    case FamilyKind::spanning_trees:
        return "spanning-trees";
    }
    return {};
}

Family Family::with_weights(const EdgeVector& sigma) const {
    Family f = *this;
    f.graph_ = std::make_shared<const Graph>(graph_->with_weights(sigma));
    return f;
}

double rho_length(const ObjectRow& row, const EdgeVector& rho) {
    if (row.usage.size() != rho.size()) throw ContractViolation("density length does not match usage row");
    return row.usage.dot(rho);
}

ShortestObject shortest_object(const Family& f, const EdgeVector& rho) {
    if (static_cast<std::size_t>(rho.size()) != f.num_edges())
        throw ContractViolation("density length does not match |E|");
    if ((rho.array() < 0.0).any()) throw ContractViolation("density must be nonnegative");
    switch (f.kind()) {
    case FamilyKind::connecting:
        return shortest_path(f, rho);
    case FamilyKind::spanning_trees:
        return minimum_spanning_tree(f, rho);
    case FamilyKind::explicit_rows:
        break;
    }
    std::size_t best = 0;
    double best_len = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.rows().size(); ++i) {
        const double len = rho_length(f.rows()[i], rho);
        if (len < best_len) {
            best_len = len;
            best = i;
        }
    }
    return {f.rows()[best], best_len};
}

Eigen::MatrixXd usage_matrix(std::span<const ObjectRow> rows) {
    if (rows.empty()) throw ContractViolation("usage matrix needs at least one row");
    const Eigen::Index m = rows.front().usage.size();
    Eigen::MatrixXd N(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].usage.size() != m) throw ContractViolation("usage rows have inconsistent lengths");
        N.row(static_cast<Eigen::Index>(i)) = rows[i].usage.transpose();
    }
    return N;
}

Family fixture_two_edge_family(int n) {
    if (n < 1 || n % 2 == 0) throw ContractViolation("fixture_two_edge_family needs an odd n >= 1");
    Graph::Builder b;
    b.add_edge("x0", "x1");
    b.add_edge("x1", "x2");
    auto g = std::make_shared<const Graph>(std::move(b).build());

    std::vector<ObjectRow> rows;
    double f = n;  // f_n(n - 2k), starting at f_n(n) = n
    for (int k = 0; k <= (n - 1) / 2; ++k) {
        EdgeVector u(2);
        u << n - 2 * k, f;
        rows.push_back(make_row(std::move(u), "gamma_" + std::to_string(n) + "," + std::to_string(k)));
        f += 2.0 * (k + 2);
    }
    return Family::explicit_rows(std::move(g), std::move(rows));
}

Family parse_explicit_family(std::shared_ptr<const Graph> g, std::string_view text) {
    if (!g) throw ContractViolation("family needs a graph");
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    std::vector<EdgeId> columns;
    bool has_label = false, have_header = false;
    char delim = ',';
    std::vector<ObjectRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!have_header) {
            delim = t.find('\t') != std::string_view::npos ? '\t' : ',';
            auto fields = split(t, delim);
            if (!fields.empty() && fields.front() == "label") {
                has_label = true;
                fields.erase(fields.begin());
            }
            if (fields.empty()) throw ParseError("header names no edges", line_no);
            for (std::string_view key : fields) {
                try {
                    columns.push_back(g->edge_by_key(key));
                } catch (const ContractViolation& e) {
                    throw ParseError(e.what(), line_no);
                }
            }
            have_header = true;
            continue;
        }
        auto fields = split(t, delim);
        std::string label = "row" + std::to_string(rows.size());
        if (has_label) {
            if (fields.empty()) throw ParseError("missing label", line_no);
            label = std::string(fields.front());
            fields.erase(fields.begin());
        }
        if (fields.size() != columns.size())
            throw ParseError("expected " + std::to_string(columns.size()) + " usage values, got " +
                                 std::to_string(fields.size()),
                             line_no);
        EdgeVector usage = EdgeVector::Zero(static_cast<Eigen::Index>(g->num_edges()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(fields[j].data(), fields[j].data() + fields[j].size(), v);
            if (ec != std::errc() || ptr != fields[j].data() + fields[j].size())
                throw ParseError("usage '" + std::string(fields[j]) + "' is not a number", line_no);
            usage(static_cast<Eigen::Index>(columns[j])) += v;
        }
        try {
            rows.push_back(make_row(std::move(usage), std::move(label)));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw ParseError("explicit family file has no header", line_no);
    if (rows.empty()) throw ValidationError("explicit family file has no rows");
    return Family::explicit_rows(std::move(g), std::move(rows));
}

Family load_explicit_family(std::shared_ptr<const Graph> g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open family file '" + path + "'", 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_explicit_family(std::move(g), buf.str());
}

}  // namespace netmod
