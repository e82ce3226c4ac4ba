#include "netmod_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>

#include <CLI11.hpp>

#include <netmod/errors.hpp>

#include "report.hpp"

namespace netmod::cli {
namespace {

struct Options {
    std::string graph;
    std::string family;
    std::string p = "2";
    double tol = 1e-8;
    bool directed = false;
    std::string out = "-";
    std::string dot;
    AnalyzeRequest analyze;
    std::optional<std::size_t> cap;
};

double parse_p(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    if (text == "inf" || text == "infinity") return kInfiniteP;
    std::size_t used = 0;
    double p = 0.0;
    try {
        p = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || std::isnan(p)) throw ParseError("--p expects a real number or 'inf'", 0);
    return p;
}

Family load_family(const Options& o) {
    auto g = std::make_shared<const Graph>(load_graph(o.graph, o.directed));
    const std::string& spec = o.family;
    if (spec == "spanning-trees") return Family::spanning_trees(g);
    if (spec.rfind("connecting:", 0) == 0) {
        const std::string ends = spec.substr(11);
        const auto comma = ends.find(',');
        if (comma == std::string::npos) throw ParseError("--family connecting:<s>,<t> needs two vertices", 0);
        return Family::connecting(g, g->vertex(ends.substr(0, comma)), g->vertex(ends.substr(comma + 1)));
    }
    if (spec.rfind("explicit:", 0) == 0) return load_explicit_family(g, spec.substr(9));
    throw ParseError("unknown --family '" + spec + "' (connecting:<s>,<t> | spanning-trees | explicit:<path>)", 0);
}

SolveConfig make_config(const Options& o) {
    SolveConfig cfg;
    cfg.p = parse_p(o.p);
    cfg.eps_tol = o.tol;
    if (const char* env = std::getenv("MODULUS_MAX_OUTER"); env && *env) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (*end != '\0' || v <= 0) throw ParseError("MODULUS_MAX_OUTER must be a positive integer", 0);
        cfg.max_outer_iter = static_cast<std::size_t>(v);
    }
    cfg.validate();
    return cfg;
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty() || o.out == "-") {
        out << text;
        return;
    }
    std::ofstream f(o.out);
    if (!f) throw Error("cannot write '" + o.out + "'");
    f << text;
}

void write_dot(const Options& o, const Family& f, const ModulusSolution& sol) {
    if (o.dot.empty()) return;
    std::ofstream d(o.dot);
    if (!d) throw Error("cannot write '" + o.dot + "'");
    d << to_dot(f, sol);
}

int cmd_solve(const Options& o, bool analyze, std::ostream& out) {
    const Family f = load_family(o);
    const SolveConfig cfg = make_config(o);
    ModulusSolution sol;
    try {
        sol = compute_modulus(f, cfg);
    } catch (const NonConvergenceError& e) {
        emit(o, bounds_json(f, cfg.p, cfg.eps_tol, e.lower_bound(), e.upper_bound()).dump(2) + "\n", out);
        throw;
    }
    const json doc = analyze && sol.converged ? analysis_json(f, sol, cfg, o.analyze) : solution_json(f, sol, cfg.eps_tol);
    emit(o, doc.dump(2) + "\n", out);
    write_dot(o, f, sol);
    return sol.converged ? kOk : kNonConvergence;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const Family f = load_family(o);
    const SolveConfig cfg = make_config(o);
    const auto outcome = verify(f, cfg, o.cap);
    emit(o, outcome.report, out);
    return outcome.pass ? kOk : kVerifyFailed;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--graph", o.graph, "edge-list file: 'tail head [weight]' per line")->required();
    sub->add_option("--family", o.family, "connecting:<s>,<t> | spanning-trees | explicit:<path>")->required();
    sub->add_option("--p", o.p, "exponent p > 1, or 'inf'")->capture_default_str();
    sub->add_option("--tol", o.tol, "stopping tolerance eps_tol in (0, 1)")->capture_default_str();
    sub->add_flag("--directed", o.directed, "read the graph as directed");
    sub->add_option("--out", o.out, "output file, '-' for stdout")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"netmod: p-modulus of families of objects on graphs"};
    app.require_subcommand(1);
    Options o;

    auto* compute = app.add_subcommand("compute", "compute the modulus and emit JSON");
    add_common(compute, o);
    compute->add_option("--dot", o.dot, "also write a Graphviz file annotated with rho*/Mod");

    auto* analyze = app.add_subcommand("analyze", "compute, then run post-solve analyses");
    add_common(analyze, o);
    analyze->add_option("--dot", o.dot, "also write a Graphviz file annotated with rho*/Mod");
    analyze->add_flag("--minimal", o.analyze.minimal, "extract and certify a minimal subfamily");
    analyze->add_flag("--strict-minimality", o.analyze.strict, "leave-one-out probe of the minimal subfamily");
    analyze->add_flag("--pmf", o.analyze.pmf, "optimal pmf mu* and nu (p = 2)");
    analyze->add_flag("--expected-usage", o.analyze.usage, "expected edge usage N^T mu");
    analyze->add_flag("--overlap", o.analyze.overlap, "expected overlap and sandwich bounds (p = 2)");
    analyze->add_flag("--beurling", o.analyze.beurling, "Beurling certificate for the support of lambda");

    auto* verify_cmd = app.add_subcommand("verify", "compare against brute-force oracles");
    add_common(verify_cmd, o);
    verify_cmd->add_option("--cap", o.cap, "vertex cap for exhaustive enumeration");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        err << "netmod: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (compute->parsed()) return cmd_solve(o, false, out);
        if (analyze->parsed()) return cmd_solve(o, true, out);
        return cmd_verify(o, out);
    } catch (const NonConvergenceError& e) {
        err << "netmod: " << e.what() << " (lower " << e.lower_bound() << ", upper " << e.upper_bound() << ")\n";
        return kNonConvergence;
    } catch (const IterationLimitError& e) {
        err << "netmod: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const DegenerateActiveSetError& e) {
        err << "netmod: " << e.what() << "\n";
        return kNonConvergence;
    } catch (const UnsupportedError& e) {
        err << "netmod: unsupported: " << e.what() << "\n";
        return kUnsupported;
    } catch (const CapExceededError& e) {
        err << "netmod: refused: " << e.what() << "\n";
        return kCapRefused;
    } catch (const CertificationError& e) {
        err << "netmod: certification failed: " << e.what() << "\n";
        return kVerifyFailed;
    } catch (const std::exception& e) {
        err << "netmod: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace netmod::cli
