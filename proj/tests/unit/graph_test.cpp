#include <fstream>

#include <gtest/gtest.h>

#include <netmod/errors.hpp>
#include <netmod/graph.hpp>

using namespace netmod;

TEST(ParseGraph, ForkEdgeList) {
    const Graph g = parse_graph("a c\nc b\nc d\nd b");
    EXPECT_EQ(g.num_vertices(), 4u);
    EXPECT_EQ(g.num_edges(), 4u);
    EXPECT_FALSE(g.directed());
    EXPECT_EQ(g.vertex_name(0), "a");
    EXPECT_EQ(g.vertex_name(1), "c");
    EXPECT_EQ(g.edge(2).tail, g.vertex("c"));
    EXPECT_EQ(g.edge(2).head, g.vertex("d"));
    EXPECT_EQ(g.weights(), EdgeVector::Ones(4));
}

TEST(ParseGraph, EmptyRejected) {
    EXPECT_THROW(parse_graph(""), ValidationError);
    EXPECT_THROW(parse_graph("# only a comment\n\n"), ValidationError);
}

TEST(ParseGraph, WeightReadBack) {
    const Graph g = parse_graph("a b 2.5");
    EXPECT_EQ(g.num_edges(), 1u);
    EXPECT_DOUBLE_EQ(g.weight(0), 2.5);
    EXPECT_DOUBLE_EQ(g.total_weight(), 2.5);
}

TEST(ParseGraph, ErrorsCarryLineNumbers) {
    try {
        parse_graph("a b\nb c x\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    try {
        parse_graph("a b\nlonely\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(parse_graph("a b c d\n"), ParseError);
    EXPECT_THROW(parse_graph("a b 0\n"), ValidationError);
    EXPECT_THROW(parse_graph("a b -1\n"), ValidationError);
    EXPECT_THROW(parse_graph("a b nan\n"), ValidationError);
    EXPECT_THROW(parse_graph("a b 1x\n"), ParseError);
}

TEST(ParseGraph, CommentsAndBlankLines) {
    const Graph g = parse_graph("# header\n\na b\n   \n# mid\nb c 3\n");
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_DOUBLE_EQ(g.weight(1), 3.0);
}

TEST(Graph, ParallelEdgesAndKeys) {
    const Graph g = parse_graph("a b\na b 2\nb a\n");
    EXPECT_EQ(g.num_edges(), 3u);
    EXPECT_EQ(g.edge_key(0), "a->b#0");
    EXPECT_EQ(g.edge_key(1), "a->b#1");
    EXPECT_EQ(g.edge_key(2), "b->a#0");
    for (EdgeId e = 0; e < 3; ++e) EXPECT_EQ(g.edge_by_key(g.edge_key(e)), e);
    EXPECT_EQ(g.edge_by_key("a->b"), 0u);
    EXPECT_THROW(g.edge_by_key("a->z#0"), ContractViolation);
    EXPECT_THROW(g.vertex("z"), ContractViolation);
}

TEST(Graph, SelfLoopsKept) {
    const Graph g = parse_graph("a a\na b\n");
    EXPECT_TRUE(g.has_self_loops());
    EXPECT_EQ(g.incident(g.vertex("a")).size(), 2u);
}

TEST(Graph, IncidenceRespectsDirection) {
    const Graph u = parse_graph("a b\nc a\n");
    EXPECT_EQ(u.incident(u.vertex("a")).size(), 2u);
    const Graph d = parse_graph("a b\nc a\n", true);
    EXPECT_EQ(d.incident(d.vertex("a")).size(), 1u);
    EXPECT_TRUE(d.reachable(d.vertex("c"), d.vertex("b")));
    EXPECT_FALSE(d.reachable(d.vertex("b"), d.vertex("c")));
    EXPECT_TRUE(d.is_connected());
}

TEST(Graph, Connectivity) {
    EXPECT_FALSE(parse_graph("a b\nc d\n").is_connected());
    EXPECT_TRUE(parse_graph("a b\nb c\n").is_connected());
}

TEST(Graph, RoundTripThroughEdgeList) {
    const Graph g = parse_graph("x y 0.125\ny z 3\nz x\nx y\n");
    const Graph h = parse_graph(to_edge_list(g));
    ASSERT_EQ(h.num_edges(), g.num_edges());
    for (EdgeId e = 0; e < g.num_edges(); ++e) {
        EXPECT_EQ(h.edge_key(e), g.edge_key(e));
        EXPECT_DOUBLE_EQ(h.weight(e), g.weight(e));
    }
}

TEST(Graph, WithWeights) {
    const Graph g = parse_graph("a b\nb c\n");
    const Graph h = g.with_weights(EdgeVector::Constant(2, 4.0));
    EXPECT_DOUBLE_EQ(h.weight(1), 4.0);
    EXPECT_DOUBLE_EQ(g.weight(1), 1.0);
    EXPECT_THROW(g.with_weights(EdgeVector::Constant(3, 1.0)), ContractViolation);
    EXPECT_THROW(g.with_weights(EdgeVector::Constant(2, 0.0)), ValidationError);
}

TEST(Builder, ValidatesWeights) {
    Graph::Builder b;
    EXPECT_THROW(b.add_edge("a", "b", 0.0), ValidationError);
    EXPECT_THROW(b.add_edge("a", "b", std::numeric_limits<double>::infinity()), ValidationError);
    b.add_edge("a", "b", 1.0);
    EXPECT_EQ(std::move(b).build().num_edges(), 1u);
}

TEST(LoadGraph, ReadsFile) {
    const Graph g = load_graph(std::string(NETMOD_DATA_DIR) + "/fork.edges");
    EXPECT_EQ(g.num_edges(), 4u);
    EXPECT_THROW(load_graph("/nonexistent/graph.txt"), Error);
}
