/*
 * scaling.cpp
 */

#include <carpet/scaling.hpp>
#include <carpet/parallel.hpp>
#include <carpet/random.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carpet {

double fractalDimension() { return std::log(8.0) / std::log(3.0); }

double walkDimension(double rho) {
    if (!(rho > 0.0))
        throw std::invalid_argument("walk dimension needs rho > 0");
    return std::log(8.0 * rho) / std::log(3.0);
}

namespace {

VertexSet faceVertices(Level n, Face face) {
    VertexSet out;
    for (const Word& w : faceWords(n, face))
        out.push_back(static_cast<Vertex>(w.code()));
    return out;
}

} // namespace

std::pair<VertexSet, VertexSet> facePlates(Level n, Face a, Face b) {
    if (a == b)
        throw std::invalid_argument("face plates need two distinct faces");
    VertexSet A0 = faceVertices(n, a), A1 = faceVertices(n, b);
    const std::size_t N = pow8(n);
    const std::vector<char> inA0 = membershipMask(N, A0);
    const std::vector<char> inA1 = membershipMask(N, A1);
    std::erase_if(A0, [&](Vertex v) { return inA1[v] != 0; });
    std::erase_if(A1, [&](Vertex v) { return inA0[v] != 0; });
    return {std::move(A0), std::move(A1)};
}

CapacityResult faceCapacity(double p, Level n, Face a, Face b, const SolverTolerances& tol, SolverMethod method) {
    const auto G = sharedGraph(n);
    const auto [A0, A1] = facePlates(n, a, b);
    return capacity(*G, A0, A1, {}, p, tol, method);
}

CapacityResult annulusCapacity(double p, const Word& w, Level n, const SolverTolerances& tol) {
    const Level m = w.level();
    if (m < 1 || n < 1)
        throw std::invalid_argument("annulus capacity needs |w| >= 1 and depth >= 1");
    const LevelGraph coarse = LevelGraph::build(m);
    const VertexSet ball = graphBall(coarse, static_cast<Vertex>(w.code()), 2.0);
    if (ball.size() == coarse.numberOfVertices())
        throw std::invalid_argument("degenerate annulus: the ball covers every cell");

    const LevelGraph G = LevelGraph::build(m + n);
    const std::uint64_t block = pow8(n);
    VertexSet A0;
    for (std::uint64_t c = w.code() * block; c < (w.code() + 1) * block; ++c)
        A0.push_back(static_cast<Vertex>(c));
    std::vector<char> inBall(G.numberOfVertices(), 0);
    for (const Vertex b : ball)
        std::fill(inBall.begin() + static_cast<std::ptrdiff_t>(b * block),
                  inBall.begin() + static_cast<std::ptrdiff_t>((b + 1) * block), 1);
    VertexSet A1;
    for (std::size_t v = 0; v < G.numberOfVertices(); ++v)
        if (!inBall[v])
            A1.push_back(static_cast<Vertex>(v));
    return capacity(G, A0, A1, {}, p, tol);
}

ScalingReport estimateRho(double p, Level nMax, const ScalingOptions& opts) {
    if (nMax < 2)
        throw std::invalid_argument("estimateRho needs nMax >= 2");
    ScalingReport rep;
    rep.p = clampExponent(p);
    rep.df = fractalDimension();
    const auto count = static_cast<std::size_t>(nMax);
    rep.levels.resize(count);
    rep.faceCaps.resize(count);
    rep.faceResiduals.resize(count);
    rep.faceIterations.resize(count);
    std::vector<char> ok(count, 0);

    // Larger levels first so the slow solves start early.
    parallelFor(count, opts.threads, [&](std::size_t k) {
        const std::size_t i = count - 1 - k;
        const auto n = static_cast<Level>(i + 1);
        const CapacityResult c = faceCapacity(rep.p, n, Face::Left, Face::Right, opts.tol);
        rep.levels[i] = n;
        rep.faceCaps[i] = c.value;
        rep.faceResiduals[i] = c.potential.residual;
        rep.faceIterations[i] = c.potential.iterations;
        ok[i] = c.potential.converged;
    });
    rep.converged = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });

    for (std::size_t i = 0; i + 1 < count; ++i)
        rep.rhoEstimates.push_back(rep.faceCaps[i] / rep.faceCaps[i + 1]);
    rep.rho = rep.rhoEstimates.back();
    rep.dw = walkDimension(rep.rho);

    if (opts.annulusMaxDepth > 0) {
        std::vector<AnnulusSample> samples;
        for (Level d = 1; d <= opts.annulusMaxDepth; ++d)
            for (int letter = 1; letter <= 8; ++letter)
                samples.push_back({Word::fromDigits({letter}), d, 0.0});
        parallelFor(samples.size(), opts.threads, [&](std::size_t i) {
            samples[i].value = annulusCapacity(rep.p, samples[i].word, samples[i].depth, opts.tol).value;
        });
        rep.annulusCaps = std::move(samples);
    }
    return rep;
}

BallLoewnerReport ballLoewnerProbe(double p, Level n, double R, double kappa, std::size_t trials, std::uint64_t seed,
                                   double dw, const ModulusOptions& opts, unsigned threads) {
    if (!(R >= 1.0) || !(kappa > 0.0) || trials == 0)
        throw std::invalid_argument("ball probe needs R >= 1, kappa > 0 and trials >= 1");
    const double lowDist = 2.0 * std::ceil(R) - 1.0;
    if (kappa * R < lowDist)
        throw std::invalid_argument("no admissible ball pair: kappa R < 2R - 1");

    BallLoewnerReport rep;
    rep.p = clampExponent(p);
    rep.level = n;
    rep.R = R;
    rep.kappa = kappa;
    rep.dw = dw;
    const LevelGraph G = LevelGraph::build(n);
    const std::size_t N = G.numberOfVertices();

    Rng rng(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        bool found = false;
        for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
            const auto x = static_cast<Vertex>(rng.below(N));
            const auto dist = bfsDistances(G, x);
            VertexSet candidates;
            for (std::size_t v = 0; v < N; ++v)
                if (dist[v] != kUnreachable && dist[v] >= lowDist && dist[v] <= kappa * R)
                    candidates.push_back(static_cast<Vertex>(v));
            if (candidates.empty())
                continue;
            const Vertex y = candidates[rng.below(candidates.size())];
            rep.pairs.push_back({x, y, dist[y], 0.0, 0.0, 0.0});
            found = true;
        }
        if (!found)
            throw std::runtime_error("no admissible ball pair at these parameters");
    }

    const double factor = std::pow(R, dw - fractalDimension());
    parallelFor(rep.pairs.size(), threads, [&](std::size_t i) {
        BallPair& bp = rep.pairs[i];
        const VertexSet A0 = graphBall(G, bp.x, R);
        const VertexSet A1 = graphBall(G, bp.y, R);
        const VertexSet A2 = graphBall(G, bp.x, (kappa + 2.0) * R);
        const ModulusResult m = vertexModulus(G, A0, A1, A2, rep.p, opts);
        bp.modulus = m.value;
        bp.normalized = m.value * factor;
        bp.certificateGap = m.certificateGap;
    });
    rep.argmin = 0;
    for (std::size_t i = 1; i < rep.pairs.size(); ++i)
        if (rep.pairs[i].normalized < rep.pairs[rep.argmin].normalized)
            rep.argmin = i;
    rep.normalizedMin = rep.pairs[rep.argmin].normalized;
    return rep;
}

} // namespace carpet
