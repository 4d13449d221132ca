/*
 * test_solve.cpp
 */

#include <carpet/dirichlet.hpp>
#include <carpet/random.hpp>
#include <carpet/scaling.hpp>

#include <Eigen/Sparse>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace carpet;

namespace {

// p = 2 capacity from a sparse Cholesky solve of the reduced Laplacian.
double harmonicOracle(const LevelGraph& G, const VertexSet& A0, const VertexSet& A1, GraphFunction* out = nullptr) {
    const std::size_t N = G.numberOfVertices();
    std::vector<double> fixed(N, 0.0);
    std::vector<int> index(N, -1);
    std::vector<char> isFixed(N, 0);
    for (Vertex v : A0)
        isFixed[v] = 1;
    for (Vertex v : A1) {
        isFixed[v] = 1;
        fixed[v] = 1.0;
    }
    int k = 0;
    for (std::size_t v = 0; v < N; ++v)
        if (!isFixed[v])
            index[v] = k++;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (std::size_t v = 0; v < N; ++v) {
        if (isFixed[v])
            continue;
        trip.emplace_back(index[v], index[v], static_cast<double>(G.degree(static_cast<Vertex>(v))));
        for (Vertex w : G.neighbors(static_cast<Vertex>(v))) {
            if (isFixed[w])
                b[index[v]] += fixed[w];
            else
                trip.emplace_back(index[v], index[w], -1.0);
        }
    }
    Eigen::SparseMatrix<double> L(k, k);
    L.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
    const Eigen::VectorXd x = solver.solve(b);
    GraphFunction u(G.level());
    for (std::size_t v = 0; v < N; ++v)
        u[v] = isFixed[v] ? fixed[v] : x[index[v]];
    if (out)
        *out = u;
    return pEnergy(G, u, 2.0);
}

// Golden-section minimum of a unimodal function on [lo, hi].
template <typename F>
double golden(F&& f, double lo, double hi) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    for (int i = 0; i < 200; ++i) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (f(c) < f(d))
            b = d;
        else
            a = c;
    }
    return 0.5 * (a + b);
}

} // namespace

TEST(Exponent, Clamp) {
    EXPECT_EQ(clampExponent(0.5), kMinExponent);
    EXPECT_EQ(clampExponent(40.0), kMaxExponent);
    EXPECT_EQ(clampExponent(2.5), 2.5);
}

TEST(LocalMinimizer, MatchesScan) {
    Rng rng(1);
    for (double p : {1.1, 1.5, 2.0, 3.0, 7.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> a(2 + rng.below(6));
            for (double& x : a)
                x = rng.uniform(-1.0, 1.0);
            auto phi = [&](double t) {
                double s = 0.0;
                for (double x : a)
                    s += std::pow(std::fabs(t - x), p);
                return s;
            };
            const double t = localMinimizer(a, p);
            const double ref = golden(phi, -1.0, 1.0);
            EXPECT_LE(phi(t), phi(ref) + 1e-12) << "p=" << p;
        }
    }
    const std::vector<double> two{0.0, 1.0};
    EXPECT_NEAR(localMinimizer(two, 2.0), 0.5, 1e-14);
}

TEST(Capacity, LevelOneClosedForm) {
    const LevelGraph G = LevelGraph::build(1);
    const VertexSet L{0, 6, 7}, R{2, 3, 4};
    for (double p : {1.5, 2.0, 2.5, 3.0}) {
        // The two free cells (letters 2 and 6) each see one left and one right
        // neighbor through a side and one of each through a corner.
        auto energy = [p](double a) { return 2.0 * (2.0 * std::pow(a, p) + 2.0 * std::pow(1.0 - a, p)); };
        const double a = golden(energy, 0.0, 1.0);
        const CapacityResult c = capacity(G, L, R, {}, p);
        EXPECT_NEAR(c.value, energy(a), 1e-8 * energy(a));
        EXPECT_NEAR(c.value, std::pow(2.0, 3.0 - p), 1e-8 * std::pow(2.0, 3.0 - p));
        EXPECT_NEAR(c.potential.values[1], 0.5, 1e-8);
        EXPECT_NEAR(c.potential.values[5], 0.5, 1e-8);
        EXPECT_TRUE(c.potential.converged);
    }
}

TEST(Capacity, HarmonicMatchesCholesky) {
    for (Level n = 2; n <= 4; ++n) {
        const LevelGraph G = LevelGraph::build(n);
        const auto [A0, A1] = facePlates(n, Face::Left, Face::Right);
        GraphFunction u;
        const double oracle = harmonicOracle(G, A0, A1, &u);
        const CapacityResult c = capacity(G, A0, A1, {}, 2.0);
        EXPECT_NEAR(c.value, oracle, 1e-9 * oracle) << "n=" << n;
        for (std::size_t v = 0; v < u.size(); ++v)
            EXPECT_NEAR(c.potential.values[v], u[v], 1e-8);
        const CapacityResult cd = capacity(G, A0, A1, {}, 2.0, {}, SolverMethod::CoordinateDescent);
        EXPECT_NEAR(cd.value, oracle, 1e-9 * oracle);
    }
}

TEST(Capacity, NewtonAndCoordinateDescentAgree) {
    const LevelGraph G = LevelGraph::build(3);
    const auto [A0, A1] = facePlates(3, Face::Left, Face::Right);
    for (double p : {1.5, 2.5, 4.0}) {
        const CapacityResult a = capacity(G, A0, A1, {}, p);
        const CapacityResult b = capacity(G, A0, A1, {}, p, {}, SolverMethod::CoordinateDescent);
        EXPECT_TRUE(a.potential.converged);
        EXPECT_TRUE(b.potential.converged);
        EXPECT_NEAR(a.value, b.value, 1e-9 * a.value) << "p=" << p;
    }
}

TEST(Capacity, FirstOrderOptimality) {
    const LevelGraph G = LevelGraph::build(3);
    const auto [A0, A1] = facePlates(3, Face::Left, Face::Right);
    Rng rng(2);
    for (double p : {1.5, 2.0, 3.0}) {
        const CapacityResult c = capacity(G, A0, A1, {}, p);
        const GraphFunction& u = c.potential.values;
        std::vector<char> fixed(G.numberOfVertices(), 0);
        for (Vertex v : A0)
            fixed[v] = 1;
        for (Vertex v : A1)
            fixed[v] = 1;
        double worst = 0.0;
        for (Vertex v = 0; v < G.numberOfVertices(); ++v)
            if (!fixed[v])
                worst = std::max(worst, std::fabs(pLaplacian(G, u, p, v)));
        if (p >= 2.0) {
            EXPECT_LE(worst, 1e-9) << "p=" << p;
        }
        // No random admissible perturbation lowers the energy.
        for (int t = 0; t < 20; ++t) {
            GraphFunction w = u;
            for (Vertex v = 0; v < G.numberOfVertices(); ++v)
                if (!fixed[v])
                    w[v] += 1e-3 * rng.uniform(-1.0, 1.0);
            EXPECT_GE(pEnergy(G, w, p), c.value * (1.0 - 1e-12));
        }
        for (double x : u.values()) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0);
        }
    }
}

TEST(Capacity, ReversedPlatesAndSymmetry) {
    const LevelGraph G = LevelGraph::build(3);
    const auto [A0, A1] = facePlates(3, Face::Left, Face::Right);
    for (double p : {1.5, 3.0}) {
        const CapacityResult a = capacity(G, A0, A1, {}, p);
        const CapacityResult b = capacity(G, A1, A0, {}, p);
        EXPECT_NEAR(a.value, b.value, 1e-10 * a.value);
        for (std::size_t v = 0; v < G.numberOfVertices(); ++v)
            EXPECT_NEAR(a.potential.values[v], 1.0 - b.potential.values[v], 1e-7);
        const double tb = faceCapacity(p, 3, Face::Bottom, Face::Top).value;
        EXPECT_NEAR(tb, a.value, 1e-10 * a.value);
    }
}

TEST(Capacity, EnergyHistoryMonotone) {
    const LevelGraph G = LevelGraph::build(3);
    const auto [A0, A1] = facePlates(3, Face::Left, Face::Right);
    DirichletProblem prob;
    prob.graph = &G;
    prob.recordHistory = true;
    for (Vertex v : A0)
        prob.boundary.emplace_back(v, 0.0);
    for (Vertex v : A1)
        prob.boundary.emplace_back(v, 1.0);
    const auto mask0 = membershipMask(G.numberOfVertices(), A0), mask1 = membershipMask(G.numberOfVertices(), A1);
    for (Vertex v = 0; v < G.numberOfVertices(); ++v)
        if (!mask0[v] && !mask1[v])
            prob.domain.push_back(v);
    for (double p : {1.5, 3.0}) {
        prob.p = p;
        prob.method = SolverMethod::CoordinateDescent;
        const PotentialSolution cd = solvePHarmonic(prob);
        ASSERT_FALSE(cd.energyHistory.empty());
        for (std::size_t i = 1; i < cd.energyHistory.size(); ++i)
            EXPECT_LE(cd.energyHistory[i], cd.energyHistory[i - 1] * (1.0 + 1e-14));
        if (p >= 2.0) {
            prob.method = SolverMethod::Newton;
            const PotentialSolution nt = solvePHarmonic(prob);
            for (std::size_t i = 1; i < nt.energyHistory.size(); ++i)
                EXPECT_LE(nt.energyHistory[i], nt.energyHistory[i - 1] * (1.0 + 1e-14));
        }
    }
}

TEST(Dirichlet, ComparisonAndHomogeneity) {
    const LevelGraph G = LevelGraph::build(3);
    const VertexSet ball = graphBall(G, 100, 5.0);
    const VertexSet bd = exteriorBoundary(G, ball);
    Rng rng(3);
    DirichletProblem lo, hi, scaled;
    for (auto* pr : {&lo, &hi, &scaled}) {
        pr->graph = &G;
        pr->p = 2.5;
        pr->domain = ball;
    }
    for (Vertex v : bd) {
        const double x = rng.uniform(0.1, 1.0);
        lo.boundary.emplace_back(v, x);
        hi.boundary.emplace_back(v, x + rng.uniform(0.0, 0.5));
        scaled.boundary.emplace_back(v, 3.0 * x - 2.0);
    }
    const PotentialSolution a = solvePHarmonic(lo), b = solvePHarmonic(hi), c = solvePHarmonic(scaled);
    double bmin = 1e300, bmax = -1e300;
    for (const auto& [v, x] : lo.boundary) {
        bmin = std::min(bmin, x);
        bmax = std::max(bmax, x);
    }
    for (Vertex v : ball) {
        EXPECT_LE(a.values[v], b.values[v] + 1e-9);
        EXPECT_NEAR(c.values[v], 3.0 * a.values[v] - 2.0, 1e-8);
        EXPECT_GE(a.values[v], bmin - 1e-12);
        EXPECT_LE(a.values[v], bmax + 1e-12);
    }
}

TEST(Dirichlet, ConstantData) {
    const LevelGraph G = LevelGraph::build(2);
    DirichletProblem prob;
    prob.graph = &G;
    prob.p = 1.7;
    prob.domain = graphBall(G, 20, 3.0);
    for (Vertex v : exteriorBoundary(G, prob.domain))
        prob.boundary.emplace_back(v, 0.25);
    const PotentialSolution s = solvePHarmonic(prob);
    for (Vertex v : prob.domain)
        EXPECT_NEAR(s.values[v], 0.25, 1e-12);
    EXPECT_NEAR(s.energy, 0.0, 1e-20);
}

TEST(Dirichlet, Errors) {
    const LevelGraph G = LevelGraph::build(2);
    const auto [A0, A1] = facePlates(2, Face::Left, Face::Right);
    EXPECT_THROW(capacity(G, {}, A1, {}, 2.0), std::invalid_argument);
    EXPECT_THROW(capacity(G, A0, A0, {}, 2.0), std::invalid_argument);
    const VertexSet small{0, 1};
    EXPECT_THROW(capacity(G, A0, A1, small, 2.0), std::invalid_argument);

    DirichletProblem prob;
    prob.graph = &G;
    prob.domain = {10};
    prob.boundary = {{63, 1.0}};
    EXPECT_THROW(solvePHarmonic(prob), std::invalid_argument);
    prob.boundary.clear();
    EXPECT_THROW(solvePHarmonic(prob), std::invalid_argument);
}

TEST(Capacity, MonotoneInPlates) {
    const LevelGraph G = LevelGraph::build(2);
    const auto [A0, A1] = facePlates(2, Face::Left, Face::Right);
    const VertexSet A0s(A0.begin(), A0.begin() + 4), A1s(A1.begin() + 2, A1.end());
    for (double p : {1.5, 2.0, 3.0}) {
        const double full = capacity(G, A0, A1, {}, p).value;
        EXPECT_LE(capacity(G, A0s, A1, {}, p).value, full * (1.0 + 1e-10));
        EXPECT_LE(capacity(G, A0s, A1s, {}, p).value, full * (1.0 + 1e-10));
    }
}

TEST(Capacity, SingleVertexBound) {
    const LevelGraph G = LevelGraph::build(3);
    Rng rng(12);
    for (int t = 0; t < 5; ++t) {
        const Vertex x = static_cast<Vertex>(rng.below(512));
        const VertexSet inner{x};
        const VertexSet ball = graphBall(G, x, 2.0);
        VertexSet outside;
        const auto in = membershipMask(512, ball);
        for (Vertex v = 0; v < 512; ++v)
            if (!in[v])
                outside.push_back(v);
        for (double p : {1.5, 2.0, 3.0})
            EXPECT_LE(capacity(G, outside, inner, {}, p).value, G.degree(x) * (1.0 + 1e-12));
    }
}
