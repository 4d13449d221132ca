/*
 * test_sobolev.cpp
 */

#include <carpet/random.hpp>
#include <carpet/sobolev.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <deque>

using namespace carpet;

namespace {

CellFunction randomFunction(Level m, std::uint64_t seed) {
    Rng rng(seed);
    CellFunction f(m);
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = rng.uniform(-1.0, 1.0);
    return f;
}

// Plain BFS from one vertex, no library helpers.
std::vector<int> hops(const LevelGraph& G, Vertex s) {
    std::vector<int> d(G.numberOfVertices(), -1);
    std::deque<Vertex> q{s};
    d[s] = 0;
    while (!q.empty()) {
        const Vertex u = q.front();
        q.pop_front();
        for (Vertex w : G.neighbors(u))
            if (d[w] < 0) {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
    }
    return d;
}

} // namespace

TEST(Averaging, MatchesSubtreeMeans) {
    const CellFunction f = randomFunction(4, 3);
    for (Level n = 0; n <= 4; ++n) {
        const GraphFunction g = averageToLevel(f, n);
        ASSERT_EQ(g.level(), n);
        const std::size_t block = static_cast<std::size_t>(pow8(4 - n));
        for (std::size_t w = 0; w < g.size(); ++w) {
            double s = 0.0;
            for (std::size_t k = 0; k < block; ++k)
                s += f[w * block + k];
            EXPECT_NEAR(g[w], s / static_cast<double>(block), 1e-14);
        }
    }
    EXPECT_THROW(averageToLevel(f, 5), std::invalid_argument);
}

TEST(Averaging, TowerProperty) {
    const CellFunction f = randomFunction(5, 9);
    for (Level k = 0; k <= 3; ++k) {
        const GraphFunction a = averageToLevel(averageToLevel(f, 4), k);
        const GraphFunction b = averageToLevel(f, k);
        for (std::size_t i = 0; i < a.size(); ++i)
            EXPECT_NEAR(a[i], b[i], 1e-14);
    }
}

TEST(Averaging, CoordinateAveragesToParentCenter) {
    const CellFunction x = sampleCellCenters(4, [](double a, double) { return a; });
    const GraphFunction g = averageToLevel(x, 2);
    for (std::size_t w = 0; w < g.size(); ++w)
        EXPECT_NEAR(g[w], cellCenter(Word(2, w))[0], 1e-14);
}

TEST(Restriction, ComposesAlongWords) {
    const CellFunction f = randomFunction(4, 17);
    const Word a = Word::parse("3"), b = Word::parse("58");
    const CellFunction ab = restrictToCell(restrictToCell(f, a), b);
    const CellFunction direct = restrictToCell(f, a.concat(b));
    ASSERT_EQ(ab.level(), 1);
    for (std::size_t i = 0; i < ab.size(); ++i)
        EXPECT_EQ(ab[i], direct[i]);
    EXPECT_EQ(direct[4], f[a.concat(b).child(5).code()]);
    EXPECT_THROW(restrictToCell(f, Word::parse("12345")), std::invalid_argument);
}

TEST(NormalizedEnergy, IndicatorOfCornerCell) {
    CellFunction f(1);
    f[0] = 1.0;
    for (double p : {1.5, 2.0, 3.0}) {
        const double rho = 1.25;
        EXPECT_NEAR(normalizedEnergy(f, 1, p, rho), 2.0 * rho, 1e-14);
        EXPECT_NEAR(normalizedEnergy(f, 1, p, 2.0 * rho), 4.0 * rho, 1e-14);
        EXPECT_EQ(normalizedEnergy(f, 0, p, rho), 0.0);
    }
}

TEST(NormalizedEnergy, CellSplitBookkeeping) {
    // Edges of G_{n} split into edges inside one level-1 subtree and edges
    // between subtrees; the inside part is the sum of the restricted energies.
    const CellFunction f = randomFunction(3, 23);
    const double p = 2.5, rho = 1.2;
    const auto G = LevelGraph::build(3);
    double inside = 0.0, across = 0.0;
    G.forEdges([&](Vertex u, Vertex v, bool) {
        const double e = std::pow(std::fabs(f[u] - f[v]), p);
        ((u >> 6) == (v >> 6) ? inside : across) += e;
    });
    double restricted = 0.0;
    for (int d = 1; d <= 8; ++d)
        restricted += normalizedEnergy(restrictToCell(f, Word::parse(std::to_string(d))), 2, p, rho);
    EXPECT_NEAR(rho * restricted, std::pow(rho, 3) * inside, 1e-12 * restricted);
    EXPECT_NEAR(normalizedEnergy(f, 3, p, rho), std::pow(rho, 3) * (inside + across), 1e-12 * (inside + across));
}

TEST(Seminorm, ConstantsAndShifts) {
    const CellFunction c(4, 3.5);
    const SeminormReport z = seminormReport(c, 2.0, 1.25);
    EXPECT_EQ(z.seminorm, 0.0);
    EXPECT_EQ(z.weakMonotonicity, 1.0);

    CellFunction f = randomFunction(4, 1), g = f;
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] += 7.0;
    const SeminormReport a = seminormReport(f, 2.0, 1.25), b = seminormReport(g, 2.0, 1.25);
    ASSERT_EQ(a.energies.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i)
        EXPECT_NEAR(a.energies[i], b.energies[i], 1e-10 * a.energies[i]);
    EXPECT_NEAR(a.weakMonotonicity, b.weakMonotonicity, 1e-10);
    double mx = 0.0;
    for (double e : a.energies)
        mx = std::max(mx, e);
    EXPECT_EQ(a.seminorm, mx);
    EXPECT_GT(a.weakMonotonicity, 0.0);
    EXPECT_LT(a.wmLow, a.wmHigh);
}

TEST(Seminorm, HomogeneousAndSymmetric) {
    const CellFunction f = randomFunction(3, 44);
    const double p = 3.0, rho = 1.1;
    CellFunction g = f;
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] *= -2.0;
    EXPECT_NEAR(seminormReport(g, p, rho).seminorm, 8.0 * seminormReport(f, p, rho).seminorm,
                1e-10 * seminormReport(g, p, rho).seminorm);
    for (const auto& phi : SymmetryElement::all()) {
        const CellFunction h = composeWithSymmetry(f, phi);
        EXPECT_NEAR(seminormReport(h, p, rho).seminorm, seminormReport(f, p, rho).seminorm, 1e-10);
        EXPECT_NEAR(ksEnergy(h, p, 2.0, 2.1), ksEnergy(f, p, 2.0, 2.1), 1e-9 * ksEnergy(f, p, 2.0, 2.1));
    }
}

TEST(Seminorm, CoordinateSequenceIsTame) {
    const double rho = 1.2446;
    const CellFunction x = sampleCellCenters(5, [](double a, double) { return a; });
    const SeminormReport r = seminormReport(x, 2.0, rho);
    EXPECT_LT(r.weakMonotonicity, 5.0);
    EXPECT_GT(r.energies.front(), 0.0);
}

TEST(KorevaarSchoen, MatchesDirectSum) {
    const Level m = 2;
    const auto G = LevelGraph::build(m);
    const CellFunction f = randomFunction(m, 8);
    for (double p : {1.5, 2.0}) {
        for (double lambda : {1.0, 2.0, 3.5}) {
            const double dw = 2.1;
            double total = 0.0;
            for (Vertex x = 0; x < 64; ++x) {
                const auto d = hops(G, x);
                double s = 0.0;
                int count = 0;
                for (Vertex y = 0; y < 64; ++y)
                    if (d[y] <= lambda) {
                        s += std::pow(std::fabs(f[x] - f[y]), p);
                        ++count;
                    }
                total += s / count;
            }
            const double r = lambda / 9.0;
            const double expected = total / 64.0 / std::pow(r, dw);
            EXPECT_NEAR(ksEnergy(f, p, lambda, dw), expected, 1e-12 * expected);
        }
    }
    EXPECT_THROW(ksEnergy(f, 2.0, 0.5, 2.0), std::invalid_argument);
    EXPECT_EQ(ksEnergy(CellFunction(2, 1.0), 2.0, 2.0, 2.0), 0.0);
}

TEST(Suite, Contents) {
    const auto suite = defaultSuite(3, 2.0);
    ASSERT_EQ(suite.size(), 7u);
    EXPECT_EQ(suite[0].name, "x");
    EXPECT_EQ(suite.back().name, "face-potential");
    for (const auto& s : suite)
        EXPECT_EQ(s.f.level(), 3);
    // The face potential runs from 0 on the left face to 1 on the right face.
    const CellFunction& u = suite.back().f;
    for (const Word& w : faceWords(3, Face::Left))
        if (w.digit(1) == 8) {
            EXPECT_EQ(u[w.code()], 0.0);
        }
    // Same seed, same suite.
    const auto again = defaultSuite(3, 2.0);
    for (std::size_t i = 0; i < suite.size(); ++i)
        for (std::size_t k = 0; k < suite[i].f.size(); ++k)
            ASSERT_EQ(suite[i].f[k], again[i].f[k]);
}

TEST(Balls, MatchedCentersNest) {
    const auto a = matchedBalls(3, 2, 3.0), b = matchedBalls(4, 2, 9.0);
    ASSERT_EQ(a.size(), 64u);
    ASSERT_EQ(b.size(), 64u);
    for (std::size_t i = 0; i < 64; ++i) {
        EXPECT_EQ(Word(3, a[i].center).prefix(2), Word(2, i));
        EXPECT_EQ(Word(4, b[i].center).prefix(2), Word(2, i));
        EXPECT_EQ(Word(4, b[i].center).digit(4), 1);
    }
    const auto s = sampleBalls(3, 2.0, 10, 5);
    EXPECT_EQ(s.size(), 10u);
    for (const Ball& bl : s)
        EXPECT_LT(bl.center, 512u);
}

TEST(Poincare, MatchesDirectComputation) {
    const Level n = 3;
    const auto G = LevelGraph::build(n);
    const double p = 2.0, dw = 2.09, R = 3.0;
    const std::vector<CellFunction> suite = {randomFunction(n, 2), sampleCellCenters(n, [](double a, double b) {
                                                 return a * b;
                                             })};
    const auto balls = sampleBalls(n, R, 12, 11);
    const PoincareReport rep = poincareConstant(n, p, dw, suite, balls, 2);
    double worst = 0.0;
    for (const CellFunction& f : suite)
        for (const Ball& b : balls) {
            const auto d = hops(G, b.center);
            double mean = 0.0;
            int count = 0;
            for (Vertex v = 0; v < 512; ++v)
                if (d[v] < R) {
                    mean += f[v];
                    ++count;
                }
            mean /= count;
            double lhs = 0.0;
            for (Vertex v = 0; v < 512; ++v)
                if (d[v] < R)
                    lhs += std::pow(std::fabs(f[v] - mean), p);
            double energy = 0.0;
            G.forEdges([&](Vertex u, Vertex v, bool) {
                if (d[u] < 2 * R && d[v] < 2 * R)
                    energy += std::pow(std::fabs(f[u] - f[v]), p);
            });
            if (energy > 0.0)
                worst = std::max(worst, lhs / (std::pow(R, dw) * energy));
        }
    EXPECT_NEAR(rep.constant, worst, 1e-12 * worst);
    EXPECT_GT(rep.constant, 0.0);
}

TEST(Poincare, DegenerateCases) {
    const Level n = 3;
    const auto balls = sampleBalls(n, 1.0, 8, 3);
    // R = 1: open balls are single vertices.
    EXPECT_EQ(poincareConstant(n, 2.0, 2.1, {randomFunction(n, 4)}, balls).constant, 0.0);
    EXPECT_EQ(poincareConstant(n, 2.0, 2.1, {CellFunction(n, 2.0)}, sampleBalls(n, 3.0, 8, 3)).constant, 0.0);
    EXPECT_THROW(poincareConstant(n, 2.0, 2.1, {}, balls), std::invalid_argument);
    EXPECT_THROW(poincareConstant(1, 2.0, 2.1, {randomFunction(1, 1)}, sampleBalls(1, 3.0, 1, 1)),
                 std::invalid_argument);
}
