#include <gtest/gtest.h>

#include <random>

#include <graphkms/builtins.hpp>
#include <graphkms/kms.hpp>

#include "oracles.hpp"

using namespace graphkms;

namespace {

GraphPtr share(DiscreteGraph g)
{
    return std::make_shared<const DiscreteGraph>(std::move(g));
}

VertexMeasure vertex_measure(const GraphPtr& g, const std::map<VertexId, Rational>& w)
{
    return VertexMeasure(g->vertex_space(), w);
}

std::map<std::string, Rational> path_weights(const PathMeasure& mu)
{
    std::map<std::string, Rational> out;
    for (const auto& [p, m] : mu.weights())
        out.emplace(p.label(), m);
    return out;
}

// Rays as vectors in vertex order, for comparison with the oracle.
std::vector<oracle::Vec> as_vectors(const SolutionCone& cone, const DiscreteGraph& g)
{
    std::vector<oracle::Vec> out;
    for (const auto& r : cone.rays) {
        oracle::Vec x;
        for (const auto& v : g.vertices())
            x.push_back(r.weight(v));
        out.push_back(std::move(x));
    }
    std::sort(out.begin(), out.end());
    return out;
}

oracle::RawGraph all_regular(std::mt19937& rng, std::size_t max_vertices, std::size_t extra_edges)
{
    oracle::RawGraph g;
    g.vertices = std::uniform_int_distribution<std::size_t>(1, max_vertices)(rng);
    std::uniform_int_distribution<std::size_t> pick(0, g.vertices - 1);
    for (std::size_t v = 0; v < g.vertices; ++v)
        g.edges.emplace_back(pick(rng), v);
    const auto m = std::uniform_int_distribution<std::size_t>(0, extra_edges)(rng);
    for (std::size_t k = 0; k < m; ++k)
        g.edges.emplace_back(pick(rng), pick(rng));
    return g;
}

const std::vector<Rational> kTestQs{Rational(1, 2), Rational(1), Rational(2), Rational(3)};

} // namespace

// ---------------------------------------------------------------------------
// Transfer operator

TEST(Transfer, Examples)
{
    const auto two = share(two_vertex_graph());
    const auto t2 = transfer_matrix(*two);
    EXPECT_EQ(t2.apply(VertexMeasure::dirac(two->vertex_space(), "v")),
              vertex_measure(two, {{"u", 1}}));

    const auto three = share(three_vertex_flow_graph());
    EXPECT_EQ(transfer_matrix(*three).apply(VertexMeasure::dirac(three->vertex_space(), "v")),
              vertex_measure(three, {{"u", 1}, {"w", 1}}));

    for (std::size_t n : {1u, 2u, 5u}) {
        const auto b = share(bouquet_graph(n));
        EXPECT_EQ(transfer_matrix(*b).apply(VertexMeasure::dirac(b->vertex_space(), "v")),
                  vertex_measure(b, {{"v", Rational(static_cast<long>(n))}}));
    }
}

TEST(Transfer, FactorsThroughPullbackAndPushforward)
{
    std::mt19937 rng(23);
    for (int trial = 0; trial < 150; ++trial) {
        const auto raw = oracle::random_graph(rng, 5, 12);
        const auto g = oracle::to_graph(raw);
        const auto t = transfer_matrix(g);
        for (std::size_t w = 0; w < raw.vertices; ++w) {
            const auto delta = VertexMeasure::dirac(g.vertex_space(), g.vertices()[w]);
            std::map<VertexId, Rational> counted;
            for (auto [s, r] : raw.edges)
                if (s == w)
                    counted[g.vertices()[r]] += 1;
            const VertexMeasure expected(g.vertex_space(), counted);
            EXPECT_EQ(transfer_via_sheaf(g, delta), expected);
            EXPECT_EQ(t.apply(delta), expected);
        }
    }
}

// ---------------------------------------------------------------------------
// Sub-invariant cone

TEST(SolveCone, Examples)
{
    const auto two = share(two_vertex_graph());
    auto cone = solve_cone(two, 2);
    EXPECT_EQ(cone.dimension, 1u);
    ASSERT_EQ(cone.rays.size(), 1u);
    EXPECT_EQ(cone.rays[0], vertex_measure(two, {{"u", 1}, {"v", 2}}));
    EXPECT_FALSE(cone.window_relaxed);

    const auto b2 = share(bouquet_graph(2));
    cone = solve_cone(b2, 2);
    ASSERT_EQ(cone.rays.size(), 1u);
    EXPECT_EQ(cone.rays[0], vertex_measure(b2, {{"v", 1}}));
    cone = solve_cone(b2, 3);
    EXPECT_EQ(cone.dimension, 0u);
    EXPECT_TRUE(cone.rays.empty());
}

TEST(SolveCone, DoubleLineWindowIsGeometric)
{
    const auto g = share(double_line_graph(3));
    for (const auto& q : {Rational(1, 2), Rational(1), Rational(2), Rational(5, 3)}) {
        const auto cone = solve_cone(g, q);
        EXPECT_TRUE(cone.window_relaxed);
        ASSERT_EQ(cone.dimension, 1u);
        ASSERT_EQ(cone.rays.size(), 1u);
        const auto& ray = cone.rays[0];
        for (long n = -2; n <= 3; ++n)
            EXPECT_EQ(ray.weight("v" + std::to_string(n)), q * ray.weight("v" + std::to_string(n - 1)));
        EXPECT_EQ(ray.weight("v-3"), 1);
    }
}

TEST(SolveCone, Errors)
{
    const auto two = share(two_vertex_graph());
    EXPECT_THROW(solve_cone(two, 0), InvalidParameter);
    EXPECT_THROW(solve_cone(two, -1), InvalidParameter);
    // Radius 1 with a rule whose every in-edge comes from three steps away.
    const auto thin = share(DiscreteGraph::integer_line(1, WindowRules{"v{n}", {{"e{n}", 0, -3}}}));
    EXPECT_THROW(solve_cone(thin, 1), WindowTooSmall);
    const auto unruled = share(DiscreteGraph::unruled_window({"v0"}, {}, 1));
    EXPECT_THROW(solve_cone(unruled, 1), WindowRuleMissing);
}

TEST(SolveCone, RaysAndCombinationsSatisfyConstraints)
{
    std::mt19937 rng(31);
    for (int trial = 0; trial < 120; ++trial) {
        const auto g = oracle::to_graph_ptr(oracle::random_graph(rng, 5, 8));
        for (const auto& q : kTestQs) {
            const SubInvarianceProblem problem(g, q);
            const auto cone = solve_cone(problem);
            for (const auto& r : cone.rays) {
                EXPECT_FALSE(problem.violation(r)) << *problem.violation(r);
                EXPECT_FALSE(r.is_zero());
            }
            if (cone.rays.empty())
                continue;
            for (int k = 0; k < 5; ++k) {
                VertexMeasure mix(g->vertex_space());
                for (const auto& r : cone.rays)
                    mix = mix + r.scaled(Rational(std::uniform_int_distribution<int>(0, 6)(rng),
                                                  std::uniform_int_distribution<int>(1, 4)(rng)));
                EXPECT_FALSE(problem.violation(mix));
            }
        }
    }
}

TEST(SolveCone, MatchesBruteForceOnSmallGraphs)
{
    std::mt19937 rng(37);
    for (int trial = 0; trial < 200; ++trial) {
        const auto raw = oracle::random_graph(rng, 4, 7);
        const auto g = oracle::to_graph_ptr(raw);
        for (const auto& q : kTestQs) {
            const auto constraints = oracle::sub_invariance_rows(raw, q);
            const auto expected = oracle::brute_force_rays(constraints);
            const auto cone = solve_cone(g, q);
            auto sorted = expected;
            std::sort(sorted.begin(), sorted.end());
            EXPECT_EQ(as_vectors(cone, *g), sorted);
            EXPECT_EQ(cone.dimension, oracle::span_dimension(expected, raw.vertices));
        }
    }
}

TEST(SolveCone, ScalingEquivariance)
{
    std::mt19937 rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        const auto raw = oracle::random_graph(rng, 4, 6);
        for (std::size_t k : {2u, 3u}) {
            oracle::RawGraph dup{raw.vertices, {}};
            for (const auto& e : raw.edges)
                for (std::size_t i = 0; i < k; ++i)
                    dup.edges.push_back(e);
            for (const auto& q : kTestQs) {
                const auto a = solve_cone(oracle::to_graph_ptr(raw), q);
                const auto b = solve_cone(oracle::to_graph_ptr(dup), q * static_cast<long>(k));
                EXPECT_EQ(as_vectors(a, oracle::to_graph(raw)), as_vectors(b, oracle::to_graph(dup)));
            }
        }
    }
}

TEST(SolveCone, CycleAtQOneIsUniform)
{
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto g = share(cycle_graph(n));
        const auto cone = solve_cone(g, 1);
        ASSERT_EQ(cone.rays.size(), 1u);
        for (const auto& v : g->vertices())
            EXPECT_EQ(cone.rays[0].weight(v), 1);
        EXPECT_EQ(solve_cone(g, 2).dimension, 0u);
    }
}

// ---------------------------------------------------------------------------
// Spectrum

TEST(Spectrum, Examples)
{
    auto s = exact_spectrum(share(bouquet_graph(4)));
    ASSERT_EQ(s.entries.size(), 1u);
    EXPECT_EQ(*s.entries[0].q.rational(), 4);
    EXPECT_EQ(s.entries[0].dimension, 1u);
    EXPECT_FALSE(s.entries[0].tracial);

    s = exact_spectrum(share(cycle_graph(3)));
    ASSERT_EQ(s.entries.size(), 1u);
    EXPECT_EQ(*s.entries[0].q.rational(), 1);
    EXPECT_TRUE(s.entries[0].tracial);

    const auto grid = scan_grid(Rational(1, 2), 4, 8);
    ASSERT_EQ(grid.size(), 8u);
    EXPECT_EQ(grid.front(), Rational(1, 2));
    EXPECT_EQ(grid.back(), 4);
    s = scan_spectrum(share(two_vertex_graph()), grid, 2);
    EXPECT_EQ(s.mode, "scan");
    ASSERT_EQ(s.entries.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(*s.entries[i].q.rational(), grid[i]);
        EXPECT_EQ(s.entries[i].dimension, 1u);
    }
}

TEST(Spectrum, ExactModeNeedsAllRegularFiniteGraph)
{
    EXPECT_THROW(exact_spectrum(share(two_vertex_graph())), ExactModeUnavailable);
    EXPECT_THROW(exact_spectrum(share(double_line_graph())), ExactModeUnavailable);
    EXPECT_THROW(scan_grid(0, 1, 3), InvalidParameter);
}

TEST(Spectrum, GoldenMeanGraphHasIrrationalPerronRoot)
{
    // A = [[1, 1], [1, 0]]: loop at a, one edge each way between a and b.
    const auto g = share(DiscreteGraph({"a", "b"}, {{"l", "a", "a"}, {"x", "a", "b"}, {"y", "b", "a"}}));
    const auto s = exact_spectrum(g);
    ASSERT_EQ(s.entries.size(), 1u);
    const auto& e = s.entries[0];
    EXPECT_FALSE(e.q.is_rational());
    EXPECT_EQ(e.method, "perron-classes");
    EXPECT_EQ(e.dimension, 1u);
    EXPECT_NEAR(e.q.approx(), (1 + std::sqrt(5.0)) / 2, 1e-9);
    // No rational q near φ carries a solution.
    for (const auto& q : {Rational(8, 5), Rational(13, 8), Rational(21, 13)})
        EXPECT_EQ(solve_cone(g, q).dimension, 0u);
}

TEST(Spectrum, ClassCriterionAgreesWithConeOnRationalRoots)
{
    std::mt19937 rng(53);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = oracle::to_graph_ptr(all_regular(rng, 5, 4));
        const TransferMatrix t(*g);
        const auto classes = spectral_classes(t.matrix());
        for (auto& root : positive_real_roots(characteristic_polynomial(t.matrix()))) {
            if (!root.is_rational())
                continue;
            std::size_t distinguished = 0;
            for (const auto& c : classes)
                if (c.distinguished && c.radius == root)
                    ++distinguished;
            EXPECT_EQ(solve_cone(g, *root.rational()).dimension, distinguished);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(Spectrum, ScanIsIndependentOfThreadCount)
{
    const auto g = share(three_vertex_flow_graph());
    const auto grid = scan_grid(Rational(1, 3), 5, 13);
    const auto one = scan_spectrum(g, grid, 1);
    const auto four = scan_spectrum(g, grid, 4);
    ASSERT_EQ(one.entries.size(), four.entries.size());
    for (std::size_t i = 0; i < one.entries.size(); ++i) {
        EXPECT_TRUE(one.entries[i].q == four.entries[i].q);
        EXPECT_EQ(one.entries[i].dimension, four.entries[i].dimension);
    }
}

// ---------------------------------------------------------------------------
// Normalization

TEST(Normalization, FiniteAndWindowed)
{
    const auto two = share(two_vertex_graph());
    auto rep = normalization(two, vertex_measure(two, {{"u", 1}, {"v", 2}}), 2);
    ASSERT_TRUE(rep.normalizable);
    EXPECT_EQ(rep.probability->weight("u"), Rational(1, 3));
    EXPECT_EQ(rep.probability->total_mass(), 1);

    const auto line = share(double_line_graph(3));
    for (const auto& q : {Rational(1, 2), Rational(2), Rational(1)}) {
        rep = normalization(line, solve_cone(line, q).rays.at(0), q);
        EXPECT_FALSE(rep.normalizable);
        EXPECT_NE(rep.note.find("no probability normalization within window"), std::string::npos);
    }
}

// ---------------------------------------------------------------------------
// Towers

TEST(Tower, TwoVertexExample)
{
    const auto two = share(two_vertex_graph());
    const auto t = build_tower(two, vertex_measure(two, {{"u", 1}, {"v", 2}}), 2, 1);
    ASSERT_EQ(t.depth(), 1u);
    EXPECT_EQ(path_weights(t.measures[1]), (std::map<std::string, Rational>{{"e", 1}, {"v", 2}}));
    EXPECT_TRUE(t.certificates.at(0).holds);
    EXPECT_TRUE(verify_quasi_invariance(t).passed);
    EXPECT_EQ(pushforward_to_vertices(t), vertex_measure(two, {{"u", 1}, {"v", 2}}));
    EXPECT_EQ(weight_eval(t, CylinderBase(0, {FinitePath::vertex("v")})), 2);
    EXPECT_EQ(weight_eval(t, CylinderBase(0, {FinitePath::vertex("u"), FinitePath::vertex("v")})), 3);
    EXPECT_EQ(weight_eval(t, CylinderBase(1, {})), 0);
    EXPECT_THROW(weight_eval(t, CylinderBase(2, {})), DepthExceeded);
}

TEST(Tower, ZeroAndLoop)
{
    for (const auto& name : builtin_names()) {
        const auto g = builtin_graph(name);
        const auto t = build_tower(g, VertexMeasure(g->vertex_space()), 2, 3);
        for (const auto& mu : t.measures)
            EXPECT_TRUE(mu.is_zero());
        EXPECT_TRUE(verify_quasi_invariance(t).passed);
        EXPECT_TRUE(pushforward_to_vertices(t).is_zero());
    }

    const auto loop = share(loop_graph());
    const auto t = build_tower(loop, vertex_measure(loop, {{"v", 1}}), 1, 3);
    for (std::size_t n = 0; n <= 3; ++n) {
        ASSERT_EQ(t.measures[n].weights().size(), 1u);
        EXPECT_EQ(t.measures[n].weights().begin()->first.length(), n);
        EXPECT_EQ(t.measures[n].total_mass(), 1);
    }
    EXPECT_EQ(pushforward_to_vertices(t), vertex_measure(loop, {{"v", 1}}));
}

TEST(Tower, RejectsNonMembers)
{
    const auto two = share(two_vertex_graph());
    EXPECT_THROW(build_tower(two, vertex_measure(two, {{"u", 1}, {"v", 1}}), 2, 2), NotSubInvariant);
    const auto b = share(bouquet_graph(2));
    EXPECT_THROW(build_tower(b, vertex_measure(b, {{"v", 1}}), 3, 1), NotSubInvariant);
}

TEST(Tower, CorruptedTowerFailsWithWitness)
{
    const auto two = share(two_vertex_graph());
    auto t = build_tower(two, vertex_measure(two, {{"u", 1}, {"v", 2}}), 2, 2);
    auto w = t.measures[1].weights();
    w[two->path({"e"})] += 1;
    t.measures[1] = PathMeasure(t.spaces[1].space(), w);
    const auto rep = verify_quasi_invariance(t);
    EXPECT_FALSE(rep.passed);
    ASSERT_FALSE(rep.depths.at(0).passed);
    EXPECT_EQ(rep.depths.at(0).witness->label(), "e");
}

TEST(Tower, SoundForEveryConeMember)
{
    std::mt19937 rng(61);
    int towers = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const auto g = oracle::to_graph_ptr(oracle::random_graph(rng, 4, 6));
        for (const auto& q : kTestQs) {
            const auto cone = solve_cone(g, q);
            VertexMeasure seed(g->vertex_space());
            for (const auto& r : cone.rays)
                seed = seed + r.scaled(std::uniform_int_distribution<int>(0, 3)(rng));
            const auto t = build_tower(g, seed, q, 3);
            for (const auto& c : t.certificates) {
                EXPECT_TRUE(c.holds);
                EXPECT_TRUE(c.relaxed_points.empty());
            }
            EXPECT_TRUE(verify_quasi_invariance(t).passed);
            EXPECT_EQ(pushforward_to_vertices(t), seed);
            EXPECT_FALSE(pushforward_mismatch(t));
            ++towers;
        }
    }
    EXPECT_GT(towers, 200);
}

TEST(Tower, WindowedTowerIsRelaxedOnlyAtCutPoints)
{
    for (long radius : {3L, 5L})
        for (const auto& q : {Rational(1, 2), Rational(2)}) {
            const auto g = share(double_line_graph(radius));
            const auto seed = solve_cone(g, q).rays.at(0);
            const auto t = build_tower(g, seed, q, 4);
            EXPECT_TRUE(t.window_relaxed);
            for (const auto& c : t.certificates) {
                EXPECT_TRUE(c.holds);
                for (const auto& b : c.relaxed_points)
                    EXPECT_TRUE(is_cut_point(*g, b, c.depth - 1)) << b.label();
            }
            EXPECT_TRUE(verify_quasi_invariance(t).passed);
            EXPECT_FALSE(pushforward_mismatch(t));
            EXPECT_FALSE(interior_vertices(*g, 4).empty());
        }
}

TEST(Tower, DistinctRaysGiveDistinctTowers)
{
    // Two disjoint loops: two independent rays at q = 1.
    const auto g = share(DiscreteGraph({"a", "b"}, {{"la", "a", "a"}, {"lb", "b", "b"}}));
    const auto cone = solve_cone(g, 1);
    ASSERT_EQ(cone.rays.size(), 2u);
    const auto t0 = build_tower(g, cone.rays[0], 1, 2);
    const auto t1 = build_tower(g, cone.rays[1], 1, 2);
    EXPECT_FALSE(t0.measures[0] == t1.measures[0]);
    for (std::size_t n = 0; n <= 2; ++n)
        EXPECT_FALSE(t0.measures[n] == t1.measures[n]);
}
