#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <netmod/errors.hpp>
#include <netmod/laplacian.hpp>
#include <netmod/oracle.hpp>

#include "netmod_cli/cli.hpp"

namespace netmod::cli {
namespace {

json num(double x) {
    if (std::isnan(x)) return nullptr;
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return stable(x);
}

json p_json(double p) { return std::isinf(p) ? json("inf") : num(p); }

json row_json(const Graph& g, const ObjectRow& row, const std::string& label) {
    json usage = json::object();
    for (EdgeId e = 0; e < g.num_edges(); ++e)
        if (row.usage(static_cast<Eigen::Index>(e)) != 0.0)
            usage[g.edge_key(e)] = num(row.usage(static_cast<Eigen::Index>(e)));
    return {{"label", label}, {"usage", usage}};
}

json keyed(const std::vector<std::string>& labels, const Eigen::VectorXd& v) {
    json out = json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) out[labels[i]] = num(v(static_cast<Eigen::Index>(i)));
    return out;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

double stable(double x) {
    if (!std::isfinite(x)) return x;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;  // no negative zero
}

std::vector<std::string> unique_labels(const std::vector<ObjectRow>& rows) {
    std::map<std::string, int> seen;
    std::vector<std::string> out;
    for (const auto& r : rows) {
        const int k = ++seen[r.label];
        out.push_back(k == 1 ? r.label : r.label + " (" + std::to_string(k) + ")");
    }
    return out;
}

json edge_map(const Graph& g, const EdgeVector& values) {
    json out = json::object();
    for (EdgeId e = 0; e < g.num_edges(); ++e) out[g.edge_key(e)] = num(values(static_cast<Eigen::Index>(e)));
    return out;
}

json solution_json(const Family& f, const ModulusSolution& sol, double tol) {
    const Graph& g = f.graph();
    const auto labels = unique_labels(sol.active_rows);
    json active = json::array();
    for (std::size_t i = 0; i < labels.size(); ++i) active.push_back(row_json(g, sol.active_rows[i], labels[i]));
    json out = {
        {"family", f.describe()},
        {"modulus", num(sol.modulus)},
        {"lower_bound", num(sol.lower_bound)},
        {"upper_bound", num(sol.upper_bound)},
        {"p", p_json(sol.p)},
        {"tol", num(tol)},
        {"iterations", sol.iterations},
        {"converged", sol.converged},
        {"rho", edge_map(g, sol.density)},
        {"active_family", active},
        {"warnings", sol.warnings},
    };
    if (std::isinf(sol.p)) {
        out["lambda"] = json::object();
        out["witness"] = labels.empty() ? json(nullptr) : json(labels.front());
    } else {
        out["lambda"] = keyed(labels, sol.lambda);
    }
    return out;
}

json bounds_json(const Family& f, double p, double tol, double lower, double upper) {
    return {{"family", f.describe()}, {"p", p_json(p)},           {"tol", num(tol)},
            {"converged", false},     {"lower_bound", num(lower)}, {"upper_bound", num(upper)}};
}

json analysis_json(const Family& f, const ModulusSolution& sol, const SolveConfig& cfg, const AnalyzeRequest& req) {
    const Graph& g = f.graph();
    json out = solution_json(f, sol, cfg.eps_tol);
    if ((req.pmf || req.overlap) && sol.p != 2.0)
        throw UnsupportedError("--pmf and --overlap are defined for p = 2 only");
    if ((req.minimal || req.usage || req.beurling) && std::isinf(sol.p))
        throw UnsupportedError("analysis needs a finite p");

    std::optional<MinimalSubfamily> minimal;
    if (req.minimal || req.strict) {
        minimal = extract_minimal_subfamily(sol, cfg, req.strict);
        const auto labels = unique_labels(minimal->rows);
        json m = {{"labels", labels},
                  {"lambdas", keyed(labels, minimal->lambdas)},
                  {"rank", minimal->rank},
                  {"rank_certified", minimal->rank_certified},
                  {"size", minimal->rows.size()},
                  {"modulus", num(minimal->modulus)},
                  {"modulus_match", num(minimal->modulus_match)}};
        if (minimal->strict_minimality_checked)
            m["leave_one_out_drop"] = keyed(labels, Eigen::Map<const Eigen::VectorXd>(
                                                        minimal->leave_one_out_drop.data(),
                                                        static_cast<Eigen::Index>(minimal->leave_one_out_drop.size())));
        out["minimal_subfamily"] = m;
    }

    const auto labels = unique_labels(sol.active_rows);
    std::optional<Pmf> pmf;
    if (req.pmf || req.overlap || req.usage) pmf = sol.p == 2.0 ? optimal_pmf(sol) : dual_pmf(sol);
    if (req.pmf) out["pmf"] = {{"mu", keyed(labels, pmf->mu)}, {"nu", num(pmf->nu)}};
    if (req.usage) {
        out["expected_usage"] = edge_map(g, expected_usage(sol.active_rows, pmf->mu));
        if (sol.p != 2.0) out["expected_usage_note"] = "mu = lambda / |lambda|_1; the overlap interpretation holds at p = 2 only";
    }
    if (req.overlap) {
        out["expected_overlap"] = num(expected_overlap(sol.active_rows, pmf->mu, sol.sigma));
        const auto sw = sandwich_bounds(sol.density, sol.active_rows, pmf->mu, sol.sigma, cfg.tol);
        out["sandwich"] = {{"upper", num(sw.upper)}, {"lower", num(sw.lower)}};
    }
    if (req.beurling) {
        std::vector<ObjectRow> rows;
        if (minimal) {
            rows = minimal->rows;
        } else {
            for (std::size_t i = 0; i < sol.active_rows.size(); ++i)
                if (sol.lambda(static_cast<Eigen::Index>(i)) > cfg.tol.act) rows.push_back(sol.active_rows[i]);
        }
        const auto rep = verify_beurling(rows, sol.density, sol.p, sol.sigma, cfg.tol);
        json b = {{"certified", rep.certified},
                  {"precondition_ok", rep.precondition_ok},
                  {"max_length_error", num(rep.max_length_error)},
                  {"residual", num(rep.residual)},
                  {"reason", rep.reason}};
        if (rep.precondition_ok) b["lambda_over_p"] = keyed(unique_labels(rows), rep.lambda / sol.p);
        out["beurling"] = b;
    }
    return out;
}

std::string to_dot(const Family& f, const ModulusSolution& sol) {
    const Graph& g = f.graph();
    const bool finite = std::isfinite(sol.p);
    std::ostringstream out;
    out << (g.directed() ? "digraph" : "graph") << " modulus {\n";
    out << "  label=\"" << f.describe() << "  p=" << (finite ? fmt(sol.p) : "inf") << "  Mod=" << fmt(sol.modulus)
        << "\";\n";
    for (VertexId v = 0; v < g.num_vertices(); ++v) out << "  \"" << g.vertex_name(v) << "\";\n";
    const char* arrow = g.directed() ? " -> " : " -- ";
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        const double rho = sol.density(static_cast<Eigen::Index>(e));
        const double shown = finite && sol.modulus > 0.0 ? rho / sol.modulus : rho;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", shown);
        out << "  \"" << g.vertex_name(g.edge(e).tail) << '"' << arrow << '"' << g.vertex_name(g.edge(e).head)
            << "\" [label=\"" << buf << "\", penwidth=" << fmt(stable(1.0 + 4.0 * std::min(1.0, shown))) << "];\n";
    }
    out << "}\n";
    return out.str();
}

VerifyOutcome verify(const Family& f, const SolveConfig& cfg, std::optional<std::size_t> cap) {
    const Graph& g = f.graph();
    std::ostringstream out;
    bool pass = true;
    auto verdict = [&](bool ok) {
        pass = pass && ok;
        return ok ? "PASS" : "FAIL";
    };

    const std::size_t path_cap = cap.value_or(kDefaultPathCap);
    const std::size_t tree_cap = cap.value_or(kDefaultTreeCap);
    const auto rows = enumerate_family(f, f.kind() == FamilyKind::spanning_trees ? tree_cap : path_cap);
    out << "family: " << f.describe() << "\n";
    out << "p: " << (std::isinf(cfg.p) ? std::string("inf") : fmt(cfg.p)) << "\n";
    out << "enumerated objects: " << rows.size() << "\n";

    const auto sol = compute_modulus(f, cfg);
    double oracle;
    if (std::isinf(cfg.p)) {
        double shortest = std::numeric_limits<double>::infinity();
        for (const auto& r : rows) shortest = std::min(shortest, r.usage.sum());
        oracle = 1.0 / shortest;
    } else {
        oracle = full_matrix_modulus(rows, g.weights(), cfg.p, cfg.tol).modulus;
    }
    const double delta = std::abs(sol.modulus - oracle);
    const double allowed = std::max(1e-7, 2.0 * cfg.eps_tol * oracle);
    out << "compute_modulus: " << fmt(sol.modulus) << "\n";
    out << "full_matrix_modulus: " << fmt(oracle) << "\n";
    out << "oracle delta: " << fmt(delta) << " (allowed " << fmt(allowed) << ") " << verdict(delta <= allowed) << "\n";

    if (!g.directed() && g.is_connected()) {
        const auto trees = enumerate_spanning_trees(g, tree_cap);
        // weighted tree measure proportional to prod sigma; reduces to the uniform measure for unit weights
        double total = 0.0;
        std::vector<double> weight(trees.size());
        EdgeVector hit = EdgeVector::Zero(static_cast<Eigen::Index>(g.num_edges()));
        for (std::size_t i = 0; i < trees.size(); ++i) {
            double w = 1.0;
            for (EdgeId e = 0; e < g.num_edges(); ++e)
                if (trees[i].usage(static_cast<Eigen::Index>(e)) > 0.0) w *= g.weight(e);
            weight[i] = w;
            total += w;
        }
        for (std::size_t i = 0; i < trees.size(); ++i) hit += (weight[i] / total) * trees[i].usage;
        double worst = 0.0;
        for (EdgeId e = 0; e < g.num_edges(); ++e) {
            const auto ei = static_cast<Eigen::Index>(e);
            const double expect = g.edge(e).tail == g.edge(e).head ? 0.0 : g.weight(e) * effective_resistance(g, e);
            worst = std::max(worst, std::abs(hit(ei) - expect));
        }
        out << "kirchhoff: max |P[e in T] - sigma(e) R_eff(e)| = " << fmt(worst) << " " << verdict(worst <= 1e-9)
            << "\n";

        SolveConfig tcfg = cfg;
        tcfg.p = 2.0;
        const double mod_spt = compute_modulus(Family::spanning_trees(f.graph_ptr()), tcfg).modulus;
        const double bound = spanning_tree_lower_bound(g);
        out << "spanning-tree bound: " << fmt(bound) << " <= Mod_2(spanning trees) = " << fmt(mod_spt) << " "
            << verdict(bound <= mod_spt + 1e-9) << "\n";
    } else {
        out << "kirchhoff: skipped (" << (g.directed() ? "directed graph" : "disconnected graph") << ")\n";
    }
    out << "overall: " << (pass ? "PASS" : "FAIL") << "\n";
    return {out.str(), pass};
}

}  // namespace netmod::cli
