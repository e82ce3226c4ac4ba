#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include <netmod/errors.hpp>
#include <netmod/laplacian.hpp>
#include <netmod/modulus.hpp>
#include <netmod/oracle.hpp>

#include "corpus.hpp"

using namespace netmod;
using namespace netmod::testing;

namespace {

std::set<std::string> keys_of(const std::vector<ObjectRow>& rows) {
    std::set<std::string> out;
    for (const auto& r : rows) out.insert(r.key);
    return out;
}

std::set<std::string> keys_of(const Graph& g, const std::vector<std::vector<EdgeId>>& sets) {
    std::set<std::string> out;
    for (const auto& s : sets) {
        EdgeVector u = EdgeVector::Zero(static_cast<Eigen::Index>(g.num_edges()));
        for (EdgeId e : s) u(static_cast<Eigen::Index>(e)) += 1.0;
        out.insert(usage_key(u));
    }
    return out;
}

}  // namespace

TEST(EnumeratePaths, ForkHasTwoWalks) {
    auto g = fork_graph();
    const auto rows = enumerate_paths(*g, g->vertex("a"), g->vertex("b"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].label, "a c b");
    EXPECT_EQ(rows[1].label, "a c d b");
}

TEST(EnumeratePaths, RejectsEqualEndpointsAndCap) {
    auto g = fork_graph();
    EXPECT_THROW(enumerate_paths(*g, 0, 0), ContractViolation);
    auto big = random_connected_graph(3, 13, 2, false);
    EXPECT_THROW(enumerate_paths(*big, 0, 1), CapExceededError);
    EXPECT_NO_THROW(enumerate_paths(*big, 0, 1, 13));
}

TEST(EnumeratePaths, ParallelPathsCount) {
    for (int k = 1; k <= 4; ++k) {
        auto g = parallel_paths(k, 3);
        EXPECT_EQ(enumerate_paths(*g, g->vertex("s"), g->vertex("t")).size(), static_cast<std::size_t>(k));
    }
}

TEST(EnumeratePaths, DirectedFollowsOrientation) {
    auto g = make_graph("a b\nb c\nc a\na c\n", true);
    const auto rows = enumerate_paths(*g, g->vertex("a"), g->vertex("c"));
    EXPECT_EQ(rows.size(), 2u);
    EXPECT_TRUE(enumerate_paths(*g, g->vertex("c"), g->vertex("b")).size() == 1u);
}

TEST(EnumeratePaths, AgreesWithBreadthFirstBruteForce) {
    for (const auto& inst : small_corpus()) {
        if (inst.family.kind() != FamilyKind::connecting) continue;
        const Graph& g = *inst.graph;
        const auto rows = enumerate_paths(g, inst.family.source(), inst.family.target());
        EXPECT_EQ(keys_of(rows), keys_of(g, brute_force_paths(g, inst.family.source(), inst.family.target())))
            << inst.name;
    }
}

TEST(EnumerateSpanningTrees, KnownCounts) {
    EXPECT_EQ(enumerate_spanning_trees(*fork_graph()).size(), 3u);
    auto k4 = make_graph("a b\na c\na d\nb c\nb d\nc d\n");
    EXPECT_EQ(enumerate_spanning_trees(*k4).size(), 16u);
    auto tree = make_graph("a b\nb c\nb d\n");
    const auto only = enumerate_spanning_trees(*tree);
    ASSERT_EQ(only.size(), 1u);
    EXPECT_EQ(only[0].usage, EdgeVector::Ones(3));
}

TEST(EnumerateSpanningTrees, AgreesWithSubsetBruteForceAndMatrixTree) {
    for (const auto& inst : small_corpus()) {
        if (inst.family.kind() != FamilyKind::spanning_trees) continue;
        const Graph& g = *inst.graph;
        const auto rows = enumerate_spanning_trees(g);
        EXPECT_EQ(keys_of(rows), keys_of(g, brute_force_trees(g))) << inst.name;
        EXPECT_EQ(count_spanning_trees(g), rows.size()) << inst.name;
    }
}

TEST(EnumerateSpanningTrees, RefusesLargeAndDirected) {
    auto big = random_connected_graph(4, 10, 1, false);
    EXPECT_THROW(enumerate_spanning_trees(*big), CapExceededError);
    EXPECT_THROW(enumerate_spanning_trees(*make_graph("a b\n", true)), UnsupportedError);
}

TEST(FullMatrixModulus, WorkedValues) {
    auto g = fork_graph();
    const auto rows = enumerate_paths(*g, g->vertex("a"), g->vertex("b"));
    EXPECT_NEAR(full_matrix_modulus(rows, g->weights(), 2.0).modulus, 0.6, 1e-12);

    const Family fix = fixture_two_edge_family(5);
    const auto res = full_matrix_modulus(fix.rows(), fix.graph().weights(), 2.0);
    EXPECT_NEAR(res.modulus, 1.0 / 50.0, 1e-12);
    const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(fix.rows()));
    EXPECT_GE((N * res.rho).minCoeff(), 1.0 - 1e-9);
}

TEST(FullMatrixModulus, K4TreesMatchIncremental) {
    auto k4 = make_graph("a b\na c\na d\nb c\nb d\nc d\n");
    const auto rows = enumerate_spanning_trees(*k4);
    const double v = full_matrix_modulus(rows, k4->weights(), 2.0).modulus;
    SolveConfig cfg;
    cfg.eps_tol = 1e-10;
    EXPECT_NEAR(compute_modulus(Family::spanning_trees(k4), cfg).modulus, v, 1e-7);
    // 16 trees of 3 edges over 6 symmetric edges: rho = 1/3 on every edge
    EXPECT_NEAR(v, 6.0 / 9.0, 1e-9);
}

class CorpusEquivalence : public ::testing::TestWithParam<double> {};

TEST_P(CorpusEquivalence, IncrementalMatchesFullMatrix) {
    const double p = GetParam();
    for (const auto& inst : small_corpus()) {
        SolveConfig cfg;
        cfg.p = p;
        const auto sol = compute_modulus(inst.family, cfg);
        const auto rows = enumerate_family(inst.family, kDefaultPathCap);
        const auto full = full_matrix_modulus(rows, inst.graph->weights(), p);
        EXPECT_LE(std::abs(sol.modulus - full.modulus), std::max(1e-7, 2.0 * cfg.eps_tol * full.modulus))
            << inst.name << " p=" << p;
        // active rows come from the enumeration, and rho* is nearly admissible for all of it
        const auto all = keys_of(rows);
        for (const auto& r : sol.active_rows) EXPECT_TRUE(all.count(r.key)) << inst.name;
        const Eigen::MatrixXd N = usage_matrix(std::span<const ObjectRow>(rows));
        EXPECT_GE((N * sol.density).minCoeff(), 1.0 - cfg.eps_tol) << inst.name;
    }
}

INSTANTIATE_TEST_SUITE_P(Exponents, CorpusEquivalence, ::testing::Values(1.5, 2.0, 3.0));
