#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <netmod/analysis.hpp>
#include <netmod/modulus.hpp>

namespace netmod::cli {

using nlohmann::json;

struct AnalyzeRequest {
    bool minimal = false;
    bool strict = false;
    bool pmf = false;
    bool usage = false;
    bool overlap = false;
    bool beurling = false;
};

/// Labels made unique by suffixing repeats with " (2)", " (3)", ...
std::vector<std::string> unique_labels(const std::vector<ObjectRow>& rows);

json edge_map(const Graph& g, const EdgeVector& values);
json solution_json(const Family& f, const ModulusSolution& sol, double tol);
json bounds_json(const Family& f, double p, double tol, double lower, double upper);
json analysis_json(const Family& f, const ModulusSolution& sol, const SolveConfig& cfg, const AnalyzeRequest& req);

/// Graphviz rendering with rho*/Mod (or rho* for p = inf) as edge labels.
std::string to_dot(const Family& f, const ModulusSolution& sol);

struct VerifyOutcome {
    std::string report;
    bool pass;
};

VerifyOutcome verify(const Family& f, const SolveConfig& cfg, std::optional<std::size_t> cap);

}  // namespace netmod::cli
