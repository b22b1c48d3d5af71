#include <gtest/gtest.h>

#include <tracelab/graphs.hpp>

using namespace tracelab;

TEST(Graphs, IntervalLineIsOneEdge)
{
    const auto g = build_graph({FamilyTag::interval_line}, Window(4.0));
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_DOUBLE_EQ(g.edges[0].length, 8.0);
    EXPECT_EQ(g.edges[0].start, (Point{-4.0, 0.0}));
    EXPECT_TRUE(validate(g).empty());
}

TEST(Graphs, HalfLinePairSharesOrigin)
{
    const auto g = build_graph({FamilyTag::half_line_pair}, Window(3.0));
    ASSERT_EQ(g.edges.size(), 2u);
    ASSERT_EQ(g.junctions.size(), 1u);
    EXPECT_EQ(g.junction_point(g.junctions[0].first, 0.0), (Point{0.0, 0.0}));
    EXPECT_EQ(g.junction_point(g.junctions[0].second, 1.0), (Point{-1.0, 0.0}));
}

TEST(Graphs, IntegerGraphJunctionsAreInterior)
{
    const auto g = build_graph({FamilyTag::integer_graph, 1.0}, Window(2.5));
    EXPECT_EQ(g.vertices.size(), 5u);
    EXPECT_EQ(g.edges.size(), 4u);
    EXPECT_EQ(g.junctions.size(), 3u);
    for (const auto& j : g.junctions) {
        const Point a = g.junction_point(j.first, 0.5), b = g.junction_point(j.second, 0.5);
        EXPECT_NEAR(a.x - b.x, 1.0, 1e-15);
    }
}

TEST(Graphs, SquareCornersMeetAtVertices)
{
    const auto g = build_graph({FamilyTag::square, 1.0}, Window(0.5, {0.5, 0.5}));
    ASSERT_EQ(g.edges.size(), 4u);
    ASSERT_EQ(g.junctions.size(), 4u);
    for (const auto& j : g.junctions) {
        EXPECT_EQ(g.junction_point(j.first, 0.0), g.vertices[j.vertex]);
        EXPECT_EQ(g.junction_point(j.second, 0.0), g.vertices[j.vertex]);
        EXPECT_EQ(j.role, JunctionRole::corner_primary);
    }
    EXPECT_TRUE(validate(g).empty());
}

TEST(Graphs, GraphPaperCounts)
{
    // 3x3 lattice points, 12 edges; the centre vertex has 4 edges -> 6 pairs.
    const auto g = build_graph({FamilyTag::graph_paper, 1.0}, Window(1.0));
    EXPECT_EQ(g.vertices.size(), 9u);
    EXPECT_EQ(g.edges.size(), 12u);
    std::size_t at_centre = 0, straight = 0, primary = 0;
    for (const auto& j : g.junctions) {
        if (g.vertices[j.vertex] == Point{0.0, 0.0}) ++at_centre;
        straight += j.role == JunctionRole::straight;
        primary += j.role == JunctionRole::corner_primary;
    }
    EXPECT_EQ(at_centre, 6u);
    // boundary mid vertices: one straight pair each; centre: two
    EXPECT_EQ(straight, 6u);
    EXPECT_GT(primary, 0u);
    EXPECT_TRUE(validate(g).empty());
}

TEST(Graphs, RestrictionKeepsContainedEdges)
{
    const auto g = build_graph({FamilyTag::graph_paper, 1.0}, Window(2.0));
    const auto sub = restrict_graph(g, Window(1.0));
    EXPECT_EQ(sub.edges.size(), 12u);
    for (const auto& e : sub.edges) EXPECT_EQ(g.edges[e.parent].start, e.start);
    EXPECT_TRUE(validate(sub).empty());
}

TEST(Graphs, CircleArcClosesExactly)
{
    const auto g = build_graph({FamilyTag::circle, 1.0, 2.0}, Window(3.0));
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_NEAR(g.edges[0].length, 4.0 * pi, 1e-14);
    EXPECT_EQ(g.edges[0].at_fraction(1.0), g.edges[0].at_fraction(0.0));
    EXPECT_NEAR(g.edges[0].at_fraction(0.25).y, 2.0, 1e-14);
}

TEST(Graphs, PencilNeedsTwoLines)
{
    EXPECT_THROW(build_graph({FamilyTag::pencil, 1.0}, Window(0.4)), Rejection);
    const auto g = build_graph({FamilyTag::pencil, 0.5}, Window(1.0));
    EXPECT_EQ(g.edges.size(), 5u);
}

TEST(Graphs, InvalidInputsRejected)
{
    EXPECT_THROW(Window(0.0), Rejection);
    EXPECT_THROW(build_graph({FamilyTag::square, 3.0}, Window(1.0)), Rejection);
    EXPECT_THROW(build_graph({FamilyTag::custom}, Window(1.0)), Rejection);
}

TEST(Graphs, JsonExport)
{
    const auto j = to_json(build_graph({FamilyTag::half_line_pair}, Window(1.0)));
    EXPECT_EQ(j["family"], "half-line-pair");
    EXPECT_EQ(j["edges"].size(), 2u);
    EXPECT_EQ(j["junctions"].size(), 1u);
}
