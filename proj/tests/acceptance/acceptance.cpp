#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <netmod/analysis.hpp>
#include <netmod/errors.hpp>
#include <netmod/laplacian.hpp>
#include <netmod/modulus.hpp>
#include <netmod/oracle.hpp>

#include "corpus.hpp"

using namespace netmod;
using namespace netmod::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the worst observed value against a limit, and the first offender.
class Check {
public:
    Check(std::string what, double limit) : what_(std::move(what)), limit_(limit) {}
    void observe(double value, const std::string& where) {
        if (!(value <= limit_) && first_bad_.empty()) first_bad_ = where;
        if (!(value <= worst_)) {
            worst_ = value;
            at_ = where;
        }
        ++count_;
    }
    bool ok() const { return first_bad_.empty(); }
    std::string summary() const {
        std::ostringstream s;
        s << what_ << " worst " << fmt(worst_) << " (limit " << fmt(limit_) << ", n=" << count_ << ")";
        if (!ok()) s << " first violation at " << first_bad_;
        return s.str();
    }
    static std::string fmt(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", x);
        return buf;
    }

private:
    std::string what_;
    double limit_;
    double worst_ = 0.0;
    std::string at_;
    std::string first_bad_;
    std::size_t count_ = 0;
};

Outcome combine(std::initializer_list<const Check*> checks) {
    Outcome o;
    for (const Check* c : checks) {
        o.pass = o.pass && c->ok();
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += c->summary();
    }
    return o;
}

SolveConfig cfg_at(double p, double eps = 1e-8) {
    SolveConfig c;
    c.p = p;
    c.eps_tol = eps;
    return c;
}

// 1 ---------------------------------------------------------------------------
Outcome worked_example() {
    const auto start = std::chrono::steady_clock::now();
    auto g = fork_graph();
    const auto f = Family::connecting(g, g->vertex("a"), g->vertex("b"));
    const auto sol = compute_modulus(f, cfg_at(2.0, 1e-12));
    const auto pmf = optimal_pmf(sol);
    const double overlap = expected_overlap(sol.active_rows, pmf.mu);
    const EdgeVector usage = expected_usage(sol.active_rows, pmf.mu);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Check c("abs error", 1e-9);
    c.observe(std::abs(sol.modulus - 0.6), "modulus");
    const double rho[] = {0.6, 0.4, 0.2, 0.2};
    const double use[] = {1.0, 2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    for (int e = 0; e < 4; ++e) {
        c.observe(std::abs(sol.density(e) - rho[e]), "rho[" + std::to_string(e) + "]");
        c.observe(std::abs(usage(e) - use[e]), "usage[" + std::to_string(e) + "]");
    }
    if (sol.lambda.size() != 2 || pmf.mu.size() != 2) return {false, "expected two active walks"};
    c.observe(std::abs(sol.lambda(0) - 0.8), "lambda[0]");
    c.observe(std::abs(sol.lambda(1) - 0.4), "lambda[1]");
    c.observe(std::abs(pmf.mu(0) - 2.0 / 3.0), "mu[0]");
    c.observe(std::abs(pmf.mu(1) - 1.0 / 3.0), "mu[1]");
    c.observe(std::abs(overlap - 5.0 / 3.0), "overlap");
    Check t("runtime s", 1.0);
    t.observe(secs, "pipeline");
    return combine({&c, &t});
}

// 2 ---------------------------------------------------------------------------
Outcome spanning_tree_example() {
    auto g = fork_graph();
    const auto sol = compute_modulus(Family::spanning_trees(g), cfg_at(2.0, 1e-12));
    const auto trees = enumerate_spanning_trees(*g);
    Eigen::VectorXd rho(4);
    rho << 3.0 / 7, 2.0 / 7, 2.0 / 7, 2.0 / 7;
    const Eigen::VectorXd mu = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(trees.size()), 1.0 / trees.size());
    const auto b = sandwich_bounds(rho, trees, mu, g->weights());
    Check c("abs error vs 3/7", 1e-9);
    c.observe(std::abs(sol.modulus - 3.0 / 7.0), "modulus");
    c.observe(std::abs(b.upper - 3.0 / 7.0), "sandwich upper");
    c.observe(std::abs(b.lower - 3.0 / 7.0), "sandwich lower");
    return combine({&c});
}

// 3 ---------------------------------------------------------------------------
Outcome parallel_paths_closed_form() {
    Check rel("relative error", 1e-6);
    Check inf("Mod_inf - 1/l", 0.0);
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l) {
            auto g = parallel_paths(k, l);
            const auto f = Family::connecting(g, g->vertex("s"), g->vertex("t"));
            const std::string where = "k=" + std::to_string(k) + ",l=" + std::to_string(l);
            for (double p : {1.5, 2.0, 3.0}) {
                const double expect = k / std::pow(l, p - 1.0);
                rel.observe(std::abs(compute_modulus(f, cfg_at(p)).modulus - expect) / expect,
                            where + ",p=" + Check::fmt(p));
            }
            inf.observe(std::abs(compute_modulus(f, cfg_at(kInfiniteP)).modulus - 1.0 / l), where);
        }
    return combine({&rel, &inf});
}

// 4 ---------------------------------------------------------------------------
Outcome effective_conductance_equivalence() {
    Check rel("|Mod_2 - C_eff| / C_eff", 1e-6);
    std::mt19937_64 rng(20240);
    for (std::uint64_t i = 0; i < 30; ++i) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
        const std::size_t extra = std::uniform_int_distribution<std::size_t>(0, n)(rng);
        auto g = random_connected_graph(7000 + i, n, extra, true, i % 5 == 0);
        const VertexId s = std::uniform_int_distribution<VertexId>(0, n - 1)(rng);
        VertexId t = std::uniform_int_distribution<VertexId>(0, n - 2)(rng);
        if (t >= s) ++t;
        const double ceff = 1.0 / pinv_resistance(*g, s, t);
        const double mod = compute_modulus(Family::connecting(g, s, t), cfg_at(2.0)).modulus;
        rel.observe(std::abs(mod - ceff) / ceff, "graph " + std::to_string(i));
    }
    return combine({&rel});
}

// 5 ---------------------------------------------------------------------------
Outcome oracle_equivalence() {
    const SolveConfig base = cfg_at(2.0);
    Check diff("|compute - full| / allowed", 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& inst : small_corpus()) {
            SolveConfig cfg = base;
            cfg.p = p;
            const double mod = compute_modulus(inst.family, cfg).modulus;
            const auto rows = enumerate_family(inst.family, kDefaultPathCap);
            const double full = full_matrix_modulus(rows, inst.graph->weights(), p).modulus;
            const double allowed = std::max(1e-7, 2.0 * cfg.eps_tol * full);
            diff.observe(std::abs(mod - full) / allowed, inst.name + ",p=" + Check::fmt(p));
        }
    }
    return combine({&diff});
}

// 6 ---------------------------------------------------------------------------
Outcome minimal_subfamily_certification() {
    Check size("|G~| - |E|", 0.0), rank("|G~| - rank", 0.0), lam("act - min lambda", 0.0),
        tight("max |l - 1|", 1e-9), drop("1e-9 - min drop", 0.0), fixture("fixture mismatch", 0.0);
    std::size_t probed = 0, failures = 0;
    for (double p : {1.5, 2.0, 3.0}) {
        for (const auto& inst : small_corpus()) {
            const std::string where = inst.name + ",p=" + Check::fmt(p);
            const auto cfg = cfg_at(p);
            const auto sol = compute_modulus(inst.family, cfg);
            const bool probe = p == 2.0 && probed < 10 && (&inst - small_corpus().data()) % 6 == 0;
            try {
                const auto m = extract_minimal_subfamily(sol, cfg, probe);
                const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(m.rows));
                size.observe(static_cast<double>(m.rows.size()) - static_cast<double>(inst.graph->num_edges()), where);
                rank.observe(static_cast<double>(m.rows.size()) - static_cast<double>(numerical_rank(N)), where);
                lam.observe(1e-9 - m.lambdas.minCoeff(), where);
                tight.observe(((N * sol.density).array() - 1.0).abs().maxCoeff(), where);
                if (probe) {
                    ++probed;
                    for (double d : m.leave_one_out_drop) drop.observe(1e-9 - d, where);
                }
            } catch (const CertificationError& e) {
                ++failures;
                size.observe(1.0, where + " (" + e.what() + ")");
            }
        }
    }
    for (int n : {1, 3, 5, 7}) {
        const auto cfg = cfg_at(2.0);
        const auto m = extract_minimal_subfamily(compute_modulus(fixture_two_edge_family(n), cfg), cfg, true);
        const bool ok = m.rows.size() == 1 && m.rows[0].usage(0) == n && m.rows[0].usage(1) == n;
        fixture.observe(ok ? 0.0 : 1.0, "n=" + std::to_string(n));
    }
    Outcome o = combine({&size, &rank, &lam, &tight, &drop, &fixture});
    o.detail += "; probed " + std::to_string(probed) + ", certification errors " + std::to_string(failures);
    o.pass = o.pass && probed == 10;
    return o;
}

// 7 ---------------------------------------------------------------------------
Outcome probabilistic_identities() {
    Check usage("|sigma rho*/Mod - N^T mu*|_inf", 1e-7), overlap("|Mod mu*^T C mu* - 1|", 1e-7);
    for (const auto& inst : small_corpus()) {
        const auto sol = compute_modulus(inst.family, cfg_at(2.0));
        const auto pmf = optimal_pmf(sol);
        const EdgeVector scaled = (sol.sigma.array() * sol.density.array()).matrix() / sol.modulus;
        usage.observe((scaled - expected_usage(sol.active_rows, pmf.mu)).cwiseAbs().maxCoeff(), inst.name);
        overlap.observe(std::abs(sol.modulus * expected_overlap(sol.active_rows, pmf.mu, sol.sigma) - 1.0), inst.name);
    }
    return combine({&usage, &overlap});
}

// 8 ---------------------------------------------------------------------------
Outcome kirchhoff_and_tree_bound() {
    Check prob("|P[e in T] - R_eff(e)|", 1e-9), bound("bound - Mod_2", 1e-9), pinch("|bound - Mod_2| on fork", 1e-9);
    std::vector<GraphPtr> graphs;
    for (const auto& inst : small_corpus())
        if (inst.graph->num_vertices() <= 7) graphs.push_back(inst.graph);
    for (std::uint64_t i = 0; i < 10; ++i) graphs.push_back(random_connected_graph(8100 + i, 2 + i % 6, i % 5, false, i % 3 == 0));
    std::size_t idx = 0;
    for (const auto& weighted : graphs) {
        const auto g = std::make_shared<const Graph>(
            weighted->with_weights(EdgeVector::Ones(static_cast<Eigen::Index>(weighted->num_edges()))));
        const std::string where = "graph " + std::to_string(idx++);
        const auto trees = brute_force_trees(*g);
        for (EdgeId e = 0; e < g->num_edges(); ++e) {
            double hits = 0.0;
            for (const auto& t : trees) hits += static_cast<double>(std::count(t.begin(), t.end(), e));
            const double r = g->edge(e).tail == g->edge(e).head ? 0.0 : effective_resistance(*g, e);
            prob.observe(std::abs(hits / static_cast<double>(trees.size()) - r), where);
        }
        const double mod = compute_modulus(Family::spanning_trees(g), cfg_at(2.0, 1e-12)).modulus;
        bound.observe(spanning_tree_lower_bound(*g) - mod, where);
    }
    auto fork = fork_graph();
    pinch.observe(std::abs(spanning_tree_lower_bound(*fork) -
                           compute_modulus(Family::spanning_trees(fork), cfg_at(2.0, 1e-12)).modulus),
                  "fork");
    return combine({&prob, &bound, &pinch});
}

// 9 ---------------------------------------------------------------------------
Outcome sensitivity_check() {
    Check rel("|FD - rho^p| / rho^p", 1e-4);
    std::size_t edges = 0;
    for (std::size_t k = 0; k < 10; ++k) {
        const auto& inst = small_corpus()[k * 6];
        const auto cfg = cfg_at(2.0, 1e-12);
        const auto sol = compute_modulus(inst.family, cfg);
        for (EdgeId e = 0; e < inst.graph->num_edges(); ++e) {
            if (!(sol.density(static_cast<Eigen::Index>(e)) > 1e-3)) continue;
            const auto s = sensitivity(inst.family, cfg, e);
            rel.observe(std::abs(s.finite_diff - s.analytic) / s.analytic, inst.name + ",e=" + std::to_string(e));
            ++edges;
        }
    }
    Outcome o = combine({&rel});
    o.detail += "; edges " + std::to_string(edges);
    return o;
}

// 10 --------------------------------------------------------------------------
Outcome approximation_bounds() {
    Check mod("relative modulus error / eps", 1.0), rho("rho error / bound", 1.0);
    for (double p : {1.5, 2.0, 3.0})
        for (double eps : {1e-2, 1e-4})
            for (std::size_t k = 0; k < 10; ++k) {
                const auto& inst = small_corpus()[k * 6 + 1];
                const std::string where = inst.name + ",p=" + Check::fmt(p) + ",eps=" + Check::fmt(eps);
                const auto sol = compute_modulus(inst.family, cfg_at(p, eps));
                const auto full = full_matrix_modulus(enumerate_family(inst.family, kDefaultPathCap), sol.sigma, p);
                mod.observe((full.modulus - sol.modulus) / full.modulus / eps, where);
                const double num = (full.rho - sol.density).array().abs().pow(p).sum();
                const double den = full.rho.array().abs().pow(p).sum();
                const double bound = p >= 2.0 ? std::pow(2.0, 1.0 - 1.0 / p) * std::pow(eps, 1.0 / p)
                                              : std::pow(2.0 * eps / (p - 1.0), 1.0 - 1.0 / p);
                rho.observe(std::pow(num / den, 1.0 / p) / bound, where);
            }
    return combine({&mod, &rho});
}

// 11 --------------------------------------------------------------------------
Outcome exponent_map() {
    const std::vector<double> grid{1.2, 1.5, 2.0, 3.0, 4.0, 8.0};
    Check down("increase of N_min^p Mod_p", 1e-7), up("decrease of (Mod_p/sigma(E))^(1/p)", 1e-7);
    for (std::size_t k = 0; k < 5; ++k) {
        const auto& inst = small_corpus()[k * 12 + 3];
        const double nmin = inst.family.n_min();
        const double total = inst.graph->total_weight();
        std::vector<double> mods;
        for (double p : grid) mods.push_back(compute_modulus(inst.family, cfg_at(p, 1e-12)).modulus);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const std::string where = inst.name + ",p=" + Check::fmt(grid[i]);
            down.observe(std::pow(nmin, grid[i + 1]) * mods[i + 1] - std::pow(nmin, grid[i]) * mods[i], where);
            up.observe(std::pow(mods[i] / total, 1.0 / grid[i]) - std::pow(mods[i + 1] / total, 1.0 / grid[i + 1]),
                       where);
        }
    }
    // Mod_p^(1/p) -> Mod_inf on the parallel-path family
    Check trend("increase of |Mod_p^(1/p)/Mod_inf - 1| along the grid", 0.0), at8("|Mod_8^(1/8)/Mod_inf - 1|", 0.05);
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l) {
            auto g = parallel_paths(k, l);
            const auto f = Family::connecting(g, g->vertex("s"), g->vertex("t"));
            const double inf = compute_modulus(f, cfg_at(kInfiniteP)).modulus;
            const std::string where = "k=" + std::to_string(k) + ",l=" + std::to_string(l);
            double prev = std::numeric_limits<double>::infinity();
            for (double p : grid) {
                const double dev = std::abs(std::pow(compute_modulus(f, cfg_at(p, 1e-12)).modulus, 1.0 / p) / inf - 1.0);
                trend.observe(dev - prev - 1e-12, where + ",p=" + Check::fmt(p));
                prev = dev;
            }
            at8.observe(prev, where);
        }
    return combine({&down, &up, &trend, &at8});
}

struct Criterion {
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"worked example, connecting family", worked_example},
        {"worked example, spanning trees", spanning_tree_example},
        {"parallel-path closed form", parallel_paths_closed_form},
        {"Mod_2 equals effective conductance", effective_conductance_equivalence},
        {"incremental vs full-matrix oracle", oracle_equivalence},
        {"minimal subfamily certification", minimal_subfamily_certification},
        {"probabilistic identities", probabilistic_identities},
        {"Kirchhoff and spanning-tree bound", kirchhoff_and_tree_bound},
        {"sensitivity", sensitivity_check},
        {"approximation error bounds", approximation_bounds},
        {"exponent map properties", exponent_map},
    };
    std::vector<std::size_t> which;
    for (int i = 1; i < argc; ++i) which.push_back(static_cast<std::size_t>(std::stoul(argv[i])));
    if (which.empty())
        for (std::size_t i = 1; i <= criteria.size(); ++i) which.push_back(i);

    bool all = true;
    for (std::size_t id : which) {
        if (id < 1 || id > criteria.size()) {
            std::cerr << "no criterion " << id << "\n";
            return 2;
        }
        const auto& c = criteria[id - 1];
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << (id < 10 ? " " : "") << id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
                  << c.title << "  [" << o.detail << "]" << std::endl;
    }
    return all ? 0 : 1;
}
