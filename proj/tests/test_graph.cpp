/*
 * test_graph.cpp
 */

#include <carpet/function_io.hpp>
#include <carpet/level_graph.hpp>
#include <carpet/random.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <sstream>

using namespace carpet;

namespace {

GraphFunction randomFunction(Level n, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
    Rng rng(seed);
    GraphFunction f(n);
    for (double& v : f.values())
        v = rng.uniform(lo, hi);
    return f;
}

// 0 disjoint, 1 corner, 2 side, from the closed grid squares.
int touching(const Word& a, const Word& b) {
    const CellBox x = wordToBox(a), y = wordToBox(b);
    const std::int64_t lx = std::min(x.col, y.col) + 1 - std::max(x.col, y.col);
    const std::int64_t ly = std::min(x.row, y.row) + 1 - std::max(x.row, y.row);
    if (lx < 0 || ly < 0)
        return 0;
    return lx == 0 && ly == 0 ? 1 : 2;
}

// All-pairs distances by Floyd-Warshall.
std::vector<std::vector<std::uint32_t>> allPairs(const LevelGraph& G) {
    const std::size_t N = G.numberOfVertices();
    const std::uint32_t inf = 1u << 30;
    std::vector<std::vector<std::uint32_t>> d(N, std::vector<std::uint32_t>(N, inf));
    for (std::size_t i = 0; i < N; ++i) {
        d[i][i] = 0;
        for (Vertex j : G.neighbors(static_cast<Vertex>(i)))
            d[i][j] = 1;
    }
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j)
                d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    return d;
}

} // namespace

TEST(LevelGraph, LevelOne) {
    const LevelGraph G = LevelGraph::build(1);
    EXPECT_EQ(G.numberOfVertices(), 8u);
    EXPECT_EQ(G.numberOfEdges(), 12u);
    std::size_t sharing = 0;
    G.forEdges([&](Vertex, Vertex, bool s) { sharing += s; });
    EXPECT_EQ(sharing, 8u);
    std::vector<std::size_t> deg;
    for (Vertex v = 0; v < 8; ++v)
        deg.push_back(G.degree(v));
    EXPECT_EQ(deg, (std::vector<std::size_t>{2, 4, 2, 4, 2, 4, 2, 4}));
    EXPECT_EQ(G.maxDegree(), 4u);
}

TEST(LevelGraph, EdgesMatchBruteForce) {
    for (Level n = 1; n <= 3; ++n) {
        const LevelGraph G = LevelGraph::build(n);
        const LevelGraph S = LevelGraph::build(n, GraphFlavor::EdgeSharing);
        std::size_t edges = 0, sides = 0;
        for (std::uint64_t a = 0; a < pow8(n); ++a)
            for (std::uint64_t b = a + 1; b < pow8(n); ++b) {
                const int t = touching(Word(n, a), Word(n, b));
                edges += t > 0;
                sides += t == 2;
                EXPECT_EQ(G.hasEdge(static_cast<Vertex>(a), static_cast<Vertex>(b)), t > 0);
                EXPECT_EQ(S.hasEdge(static_cast<Vertex>(a), static_cast<Vertex>(b)), t == 2);
            }
        EXPECT_EQ(G.numberOfEdges(), edges);
        EXPECT_EQ(S.numberOfEdges(), sides);
        for (Vertex v = 0; v < G.numberOfVertices(); ++v) {
            const auto nb = G.neighbors(v);
            EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
            for (std::size_t k = 0; k < nb.size(); ++k)
                EXPECT_EQ(G.sharesSide(v)[k] != 0, touching(Word(n, v), Word(n, nb[k])) == 2);
        }
    }
}

TEST(LevelGraph, ForEdgesOrder) {
    const LevelGraph G = LevelGraph::build(2);
    std::vector<std::pair<Vertex, Vertex>> seen;
    G.forEdges([&](Vertex u, Vertex v, bool) { seen.emplace_back(u, v); });
    EXPECT_EQ(seen.size(), G.numberOfEdges());
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
    for (const auto& [u, v] : seen)
        EXPECT_LT(u, v);
}

TEST(LevelGraph, FeasibilityCap) {
    EXPECT_THROW(LevelGraph::build(0), std::out_of_range);
    EXPECT_THROW(LevelGraph::build(kDefaultMaxLevel + 1), std::out_of_range);
    setenv("CARPET_ENERGY_MAX_LEVEL", "3", 1);
    EXPECT_EQ(maxFeasibleLevel(), 3);
    EXPECT_THROW(LevelGraph::build(4), std::out_of_range);
    unsetenv("CARPET_ENERGY_MAX_LEVEL");
    EXPECT_EQ(maxFeasibleLevel(), kDefaultMaxLevel);
}

TEST(Energy, MatchesPairSum) {
    const LevelGraph G = LevelGraph::build(2);
    const GraphFunction f = randomFunction(2, 3);
    for (double p : {1.5, 2.0, 3.0}) {
        double brute = 0.0;
        for (Vertex a = 0; a < 64; ++a)
            for (Vertex b = a + 1; b < 64; ++b)
                if (touching(Word(2, a), Word(2, b)))
                    brute += std::pow(std::fabs(f[a] - f[b]), p);
        EXPECT_NEAR(pEnergy(G, f, p), brute, 1e-12 * brute);
        EXPECT_NEAR(pEnergyPairing(G, f, f, p), brute, 1e-12 * brute);
    }
}

TEST(Energy, RestrictedToSet) {
    const LevelGraph G = LevelGraph::build(2);
    const GraphFunction f = randomFunction(2, 4);
    VertexSet A;
    for (Vertex v = 0; v < 64; v += 3)
        A.push_back(v);
    const auto in = membershipMask(64, A);
    double brute = 0.0;
    G.forEdges([&](Vertex u, Vertex v, bool) {
        if (in[u] && in[v])
            brute += std::pow(std::fabs(f[u] - f[v]), 2.5);
    });
    EXPECT_NEAR(pEnergy(G, f, 2.5, A), brute, 1e-13);
}

TEST(Energy, GreenFormula) {
    // sum_x deg(x) Delta_p f(x) g(x) = -E_p(f; g)
    const LevelGraph G = LevelGraph::build(3);
    const GraphFunction f = randomFunction(3, 5), g = randomFunction(3, 6);
    for (double p : {1.3, 2.0, 3.5}) {
        const GraphFunction L = pLaplacian(G, f, p);
        double lhs = 0.0;
        for (Vertex x = 0; x < G.numberOfVertices(); ++x) {
            lhs += static_cast<double>(G.degree(x)) * L[x] * g[x];
            EXPECT_DOUBLE_EQ(L[x], pLaplacian(G, f, p, x));
        }
        const double rhs = -pEnergyPairing(G, f, g, p);
        EXPECT_NEAR(lhs, rhs, 1e-10 * (1.0 + std::fabs(rhs)));
    }
}

TEST(Energy, Homogeneity) {
    const LevelGraph G = LevelGraph::build(3);
    GraphFunction f = randomFunction(3, 7);
    const double e = pEnergy(G, f, 2.7);
    for (double& v : f.values())
        v = -3.0 * v + 11.0;
    EXPECT_NEAR(pEnergy(G, f, 2.7), std::pow(3.0, 2.7) * e, 1e-10 * e * std::pow(3.0, 2.7));
}

TEST(Energy, SymmetryInvariance) {
    const LevelGraph G = LevelGraph::build(3);
    const GraphFunction f = randomFunction(3, 8);
    const double e = pEnergy(G, f, 1.7);
    for (const auto& phi : SymmetryElement::all())
        EXPECT_NEAR(pEnergy(G, composeWithSymmetry(f, phi), 1.7), e, 1e-12 * e);
}

TEST(Functions, CoarsenRefine) {
    const GraphFunction f = randomFunction(3, 9);
    const GraphFunction up = refine(f, 5);
    EXPECT_EQ(up.level(), 5);
    const GraphFunction back = coarsen(up, 3);
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_NEAR(back[i], f[i], 1e-14);
    const GraphFunction g = coarsen(f, 1);
    for (std::size_t w = 0; w < 8; ++w) {
        double s = 0.0;
        for (std::size_t k = 0; k < 64; ++k)
            s += f[w * 64 + k];
        EXPECT_NEAR(g[w], s / 64.0, 1e-15);
    }
}

TEST(Distances, BfsMatchesFloydWarshall) {
    for (Level n = 1; n <= 2; ++n) {
        const LevelGraph G = LevelGraph::build(n);
        const auto d = allPairs(G);
        std::uint32_t diam = 0;
        for (Vertex s = 0; s < G.numberOfVertices(); ++s) {
            const auto b = bfsDistances(G, s);
            for (Vertex t = 0; t < G.numberOfVertices(); ++t) {
                EXPECT_EQ(b[t], d[s][t]);
                diam = std::max(diam, d[s][t]);
            }
        }
        EXPECT_EQ(diameter(G), diam);
    }
}

TEST(Distances, DiameterLevelThree) {
    const LevelGraph G = LevelGraph::build(3);
    std::uint32_t diam = 0;
    for (Vertex s = 0; s < G.numberOfVertices(); ++s) {
        const auto b = bfsDistances(G, s);
        diam = std::max(diam, *std::max_element(b.begin(), b.end()));
    }
    EXPECT_EQ(diameter(G), diam);
}

TEST(Distances, BallsAndBoundary) {
    const LevelGraph G = LevelGraph::build(3);
    BallScanner scanner(G);
    for (Vertex c : {0u, 77u, 300u, 511u}) {
        const auto d = bfsDistances(G, c);
        for (double R : {0.0, 0.5, 1.0, 2.5, 4.0}) {
            VertexSet open, closed;
            for (Vertex v = 0; v < G.numberOfVertices(); ++v) {
                if (d[v] < R)
                    open.push_back(v);
                if (d[v] <= R)
                    closed.push_back(v);
            }
            EXPECT_EQ(graphBall(G, c, R), open);
            EXPECT_EQ(closedGraphBall(G, c, R), closed);
            const auto s = scanner.scan(c, R, true);
            VertexSet sorted(s.begin(), s.end());
            std::sort(sorted.begin(), sorted.end());
            EXPECT_EQ(sorted, closed);
            for (Vertex v : s)
                EXPECT_EQ(scanner.distance(v), d[v]);
        }
        const VertexSet ball = graphBall(G, c, 3.0);
        VertexSet expect;
        for (Vertex v = 0; v < G.numberOfVertices(); ++v)
            if (d[v] == 3)
                expect.push_back(v);
        EXPECT_EQ(exteriorBoundary(G, ball), expect);
        EXPECT_TRUE(isConnected(G, ball));
    }
}

TEST(Distances, Connectivity) {
    const LevelGraph G = LevelGraph::build(2);
    EXPECT_FALSE(isConnected(G, VertexSet{}));
    EXPECT_TRUE(isConnected(G, VertexSet{5}));
    EXPECT_FALSE(isConnected(G, VertexSet{0, 63}));
    VertexSet all(64);
    std::iota(all.begin(), all.end(), 0u);
    EXPECT_TRUE(isConnected(G, all));
}

TEST(Distances, Cache) {
    const LevelGraph G = LevelGraph::build(3);
    DistanceCache cache(G);
    EXPECT_EQ(cache.distance(0, 511), bfsDistances(G, 0)[511]);
    EXPECT_EQ(cache.distance(0, 100), bfsDistances(G, 0)[100]);
    EXPECT_EQ(cache.cachedSources(), 1u);
    EXPECT_EQ(sharedGraph(2).get(), sharedGraph(2).get());
}

TEST(FunctionIO, TextRoundTrip) {
    const GraphFunction f = randomFunction(2, 10, -1e6, 1e6);
    std::stringstream s;
    writeText(s, f);
    const GraphFunction g = readFunction(s);
    ASSERT_EQ(g.level(), 2);
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_EQ(g[i], f[i]);
}

TEST(FunctionIO, BinaryRoundTrip) {
    const GraphFunction f = randomFunction(3, 11);
    std::stringstream s;
    writeBinary(s, f);
    EXPECT_EQ(s.str().substr(0, 4), "CEF1");
    EXPECT_EQ(s.str().size(), 8u + 8u * 512u);
    const GraphFunction g = readFunction(s);
    for (std::size_t i = 0; i < f.size(); ++i)
        EXPECT_EQ(g[i], f[i]);
}

TEST(FunctionIO, Errors) {
    std::stringstream bad("level=2 count=5\n1\n");
    EXPECT_ANY_THROW(readFunction(bad));
    std::stringstream truncated("level=1 count=8\n1\n2\n");
    EXPECT_ANY_THROW(readFunction(truncated));
    EXPECT_ANY_THROW(loadFunction("/nonexistent/file"));
    EXPECT_EQ(formatReal(0.1), "0.10000000000000001");
}

TEST(Laplacian, IndicatorOnLevelOne) {
    const LevelGraph G = LevelGraph::build(1);
    GraphFunction f(1);
    f[0] = 1.0;
    for (double p : {1.5, 2.0, 3.0}) {
        EXPECT_DOUBLE_EQ(pLaplacian(G, f, p, 0), -1.0);
        EXPECT_DOUBLE_EQ(pEnergy(G, f, p), 2.0);
    }
}

TEST(Laplacian, LinearCaseMatchesMatrix) {
    for (Level n = 1; n <= 2; ++n) {
        const LevelGraph G = LevelGraph::build(n);
        const std::size_t N = G.numberOfVertices();
        // Dense D^{-1} A - I, built from the pair test.
        std::vector<double> M(N * N, 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            double deg = 0.0;
            for (std::size_t j = 0; j < N; ++j)
                if (i != j && touching(G.word(static_cast<Vertex>(i)), G.word(static_cast<Vertex>(j))) > 0) {
                    M[i * N + j] = 1.0;
                    deg += 1.0;
                }
            for (std::size_t j = 0; j < N; ++j)
                M[i * N + j] /= deg;
            M[i * N + i] = -1.0;
        }
        const GraphFunction f = randomFunction(n, 40 + n);
        const GraphFunction L = pLaplacian(G, f, 2.0);
        for (std::size_t i = 0; i < N; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < N; ++j)
                s += M[i * N + j] * f[j];
            EXPECT_NEAR(L[i], s, 1e-14);
        }
    }
}
