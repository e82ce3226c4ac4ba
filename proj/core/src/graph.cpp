#include "netmod/graph.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <queue>
#include <sstream>

#include "netmod/errors.hpp"

namespace netmod {

VertexId Graph::vertex(std::string_view name) const {
    auto it = ids_.find(std::string(name));
    if (it == ids_.end()) throw ContractViolation("unknown vertex '" + std::string(name) + "'");
    return it->second;
}

bool Graph::has_vertex(std::string_view name) const {
    return ids_.contains(std::string(name));
}

std::string Graph::edge_key(EdgeId e) const {
    const Edge& ed = edge(e);
    std::size_t ordinal = 0;
    for (EdgeId f = 0; f < e; ++f)
        if (edges_[f].tail == ed.tail && edges_[f].head == ed.head) ++ordinal;
    return names_[ed.tail] + "->" + names_[ed.head] + "#" + std::to_string(ordinal);
}

EdgeId Graph::edge_by_key(std::string_view key) const {
    const auto arrow = key.find("->");
    if (arrow == std::string_view::npos)
        throw ContractViolation("edge key '" + std::string(key) + "' lacks '->'");
    std::string_view tail = key.substr(0, arrow);
    std::string_view rest = key.substr(arrow + 2);
    std::size_t ordinal = 0;
    if (const auto hash = rest.rfind('#'); hash != std::string_view::npos) {
        std::string_view num = rest.substr(hash + 1);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), ordinal);
        if (ec != std::errc() || ptr != num.data() + num.size())
            throw ContractViolation("bad edge ordinal in '" + std::string(key) + "'");
        rest = rest.substr(0, hash);
    }
    if (!has_vertex(tail) || !has_vertex(rest))
        throw ContractViolation("edge key '" + std::string(key) + "' names an unknown vertex");
    const VertexId t = vertex(tail), h = vertex(rest);
    std::size_t seen = 0;
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        if (edges_[e].tail == t && edges_[e].head == h) {
            if (seen == ordinal) return e;
            ++seen;
        }
    }
    throw ContractViolation("no edge '" + std::string(key) + "'");
}

VertexId Graph::other_end(EdgeId e, VertexId v) const {
    const Edge& ed = edge(e);
    if (ed.tail == v) return ed.head;
    if (!directed_ && ed.head == v) return ed.tail;
    throw ContractViolation("vertex is not the tail of edge " + edge_key(e));
}

bool Graph::has_self_loops() const noexcept {
    for (const Edge& e : edges_)
        if (e.tail == e.head) return true;
    return false;
}

bool Graph::is_connected() const {
    const std::size_t n = num_vertices();
    if (n == 0) return false;
    std::vector<std::vector<VertexId>> adj(n);
    for (const Edge& e : edges_) {
        adj[e.tail].push_back(e.head);
        adj[e.head].push_back(e.tail);
    }
    std::vector<bool> seen(n, false);
    std::queue<VertexId> q;
    q.push(0);
    seen[0] = true;
    std::size_t count = 1;
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        for (VertexId w : adj[u])
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                q.push(w);
            }
    }
    return count == n;
}

bool Graph::reachable(VertexId from, VertexId to) const {
    std::vector<bool> seen(num_vertices(), false);
    std::queue<VertexId> q;
    q.push(from);
    seen.at(from) = true;
    while (!q.empty()) {
        VertexId u = q.front();
        q.pop();
        if (u == to) return true;
        for (EdgeId e : incident_[u]) {
            VertexId w = other_end(e, u);
            if (!seen[w]) {
                seen[w] = true;
                q.push(w);
            }
        }
    }
    return false;
}

Graph Graph::with_weights(const EdgeVector& sigma) const {
    if (static_cast<std::size_t>(sigma.size()) != num_edges())
        throw ContractViolation("weight vector length does not match |E|");
    for (Eigen::Index e = 0; e < sigma.size(); ++e)
        if (!(sigma(e) > 0.0) || !std::isfinite(sigma(e)))
            throw ValidationError("edge weights must be positive and finite");
    Graph g = *this;
    g.sigma_ = sigma;
    return g;
}

void Graph::index() {
    incident_.assign(names_.size(), {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        incident_[edges_[e].tail].push_back(e);
        if (!directed_ && edges_[e].head != edges_[e].tail) incident_[edges_[e].head].push_back(e);
    }
}

VertexId Graph::Builder::add_vertex(std::string_view name) {
    std::string key(name);
    auto [it, inserted] = g_.ids_.emplace(key, g_.names_.size());
    if (inserted) g_.names_.push_back(std::move(key));
    return it->second;
}

EdgeId Graph::Builder::add_edge(std::string_view tail, std::string_view head, double weight) {
    if (!(weight > 0.0) || !std::isfinite(weight))
        throw ValidationError("edge weight must be positive and finite");
    const VertexId t = add_vertex(tail);
    const VertexId h = add_vertex(head);
    g_.edges_.push_back({t, h});
    w_.push_back(weight);
    return g_.edges_.size() - 1;
}

Graph Graph::Builder::build() && {
    if (g_.edges_.empty()) throw ValidationError("graph has no edges");
    g_.sigma_ = Eigen::Map<const EdgeVector>(w_.data(), static_cast<Eigen::Index>(w_.size()));
    g_.index();
    return std::move(g_);
}

Graph parse_graph(std::string_view text, bool directed) {
    Graph::Builder builder(directed);
    std::size_t line_no = 0;
    std::size_t edges = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            // Only whole-line comments; '#' inside a field would be ambiguous with edge keys.
            const auto first = line.find_first_not_of(" \t\r");
            if (first == hash) continue;
        }
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.empty()) continue;
        if (tok.size() < 2 || tok.size() > 3)
            throw ParseError("expected 'tail head [weight]', got " + std::to_string(tok.size()) + " fields",
                             line_no);
        double w = 1.0;
        if (tok.size() == 3) {
            const std::string& s = tok[2];
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), w);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw ParseError("weight '" + s + "' is not a number", line_no);
            if (!(w > 0.0) || !std::isfinite(w))
                throw ValidationError("line " + std::to_string(line_no) + ": weight must be positive and finite");
        }
        builder.add_edge(tok[0], tok[1], w);
        ++edges;
    }
    if (edges == 0) throw ValidationError("empty graph: no edges in input");
    return std::move(builder).build();
}

Graph load_graph(const std::string& path, bool directed) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file '" + path + "'", 0);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str(), directed);
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        out << g.vertex_name(g.edge(e).tail) << ' ' << g.vertex_name(g.edge(e).head) << ' ' << g.weight(e) << '\n';
    return out.str();
}

}  // namespace netmod
