/*
 * regularity.cpp
 */

#include <carpet/regularity.hpp>
#include <carpet/parallel.hpp>
#include <carpet/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carpet {

BoundarySampler parseSampler(const std::string& name) {
    if (name == "uniform")
        return BoundarySampler::Uniform;
    if (name == "spike")
        return BoundarySampler::Spike;
    if (name == "ramp")
        return BoundarySampler::Ramp;
    if (name == "constant")
        return BoundarySampler::Constant;
    throw std::invalid_argument("unknown boundary sampler '" + name + "'");
}

std::string samplerName(BoundarySampler s) {
    switch (s) {
    case BoundarySampler::Uniform:
        return "uniform";
    case BoundarySampler::Spike:
        return "spike";
    case BoundarySampler::Ramp:
        return "ramp";
    case BoundarySampler::Constant:
        return "constant";
    }
    return "?";
}

std::vector<std::pair<Vertex, double>> sampleBoundary(const LevelGraph& G, std::span<const Vertex> boundary,
                                                      BoundarySampler sampler, double eps, std::uint64_t seed) {
    std::vector<std::pair<Vertex, double>> out;
    out.reserve(boundary.size());
    Rng rng(seed);
    switch (sampler) {
    case BoundarySampler::Uniform:
        for (const Vertex v : boundary)
            out.emplace_back(v, rng.uniform(eps, 1.0));
        break;
    case BoundarySampler::Spike: {
        const std::size_t hot = boundary.empty() ? 0 : rng.below(boundary.size());
        for (std::size_t i = 0; i < boundary.size(); ++i)
            out.emplace_back(boundary[i], i == hot ? 1.0 : eps);
        break;
    }
    case BoundarySampler::Ramp: {
        std::vector<double> xs;
        for (const Vertex v : boundary)
            xs.push_back(cellCenter(G.word(v))[0]);
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        for (std::size_t i = 0; i < boundary.size(); ++i) {
            const double t = *hi > *lo ? (xs[i] - *lo) / (*hi - *lo) : 1.0;
            out.emplace_back(boundary[i], eps + (1.0 - eps) * t);
        }
        break;
    }
    case BoundarySampler::Constant:
        for (const Vertex v : boundary)
            out.emplace_back(v, 1.0);
        break;
    }
    return out;
}

std::vector<HarnackReport> harnackReport(Level n, double p, Vertex center, double R, BoundarySampler sampler,
                                         std::size_t trials, std::uint64_t seed, const HarnackOptions& opts) {
    if (!(opts.deltaH > 0.0 && opts.deltaH < 1.0))
        throw std::invalid_argument("harnackReport needs deltaH in (0, 1)");
    const auto G = sharedGraph(n);
    if (center >= G->numberOfVertices())
        throw std::out_of_range("harnackReport: center out of range");
    const VertexSet ball = graphBall(*G, center, R);
    if (ball.size() == G->numberOfVertices())
        throw std::invalid_argument("harnackReport: the ball covers every vertex");
    const VertexSet boundary = exteriorBoundary(*G, ball);
    const VertexSet inner = graphBall(*G, center, opts.deltaH * R);

    std::vector<HarnackReport> reps(trials);
    parallelFor(trials, opts.threads, [&](std::size_t t) {
        DirichletProblem prob;
        prob.graph = G.get();
        prob.p = p;
        prob.domain = ball;
        prob.tol = opts.tol;
        prob.boundary = sampleBoundary(*G, boundary, sampler, opts.eps, seed + 0x9E3779B97F4A7C15ull * t);
        const PotentialSolution sol = solvePHarmonic(prob);

        HarnackReport& r = reps[t];
        r.level = n;
        r.p = clampExponent(p);
        r.center = center;
        r.R = R;
        r.deltaH = opts.deltaH;
        r.sampler = sampler;
        r.trial = t;
        r.hMin = std::numeric_limits<double>::infinity();
        r.hMax = -std::numeric_limits<double>::infinity();
        for (const Vertex v : inner) {
            r.hMin = std::min(r.hMin, sol.values[v]);
            r.hMax = std::max(r.hMax, sol.values[v]);
        }
        r.residual = sol.residual;
        r.converged = sol.converged;
        if (r.hMin > 0.0) {
            r.ratio = r.hMax / r.hMin;
        } else {
            r.ratio = std::numeric_limits<double>::infinity();
            r.anomaly = true;
        }
        r.anomaly = r.anomaly || !r.converged;
    });
    return reps;
}

LogCaccioppoliReport logCaccioppoliCheck(const LevelGraph& G, double p, const GraphFunction& h,
                                         const GraphFunction& phi, std::span<const Vertex> A) {
    const std::size_t N = G.numberOfVertices();
    if (h.size() != N || phi.size() != N)
        throw std::invalid_argument("logCaccioppoliCheck: function level mismatch");
    if (!(p > 1.0))
        throw std::invalid_argument("logCaccioppoliCheck needs p > 1");
    const std::vector<char> inA = membershipMask(N, A);
    for (std::size_t v = 0; v < N; ++v) {
        if (!(phi[v] >= 0.0 && phi[v] <= 1.0))
            throw std::invalid_argument("logCaccioppoliCheck: phi must take values in [0, 1]");
        if (phi[v] != 0.0 && !inA[v])
            throw std::invalid_argument("logCaccioppoliCheck: phi is not supported in A");
    }
    std::vector<char> inClosure = inA;
    for (const Vertex v : exteriorBoundary(G, A))
        inClosure[v] = 1;
    for (std::size_t v = 0; v < N; ++v)
        if (inClosure[v] && !(h[v] > 0.0))
            throw std::invalid_argument("logCaccioppoliCheck: h must be positive on the closure of A");

    LogCaccioppoliReport rep;
    rep.p = p;
    double edges = 0.0;
    G.forEdges([&](Vertex u, Vertex v, bool) {
        if (!inClosure[u] || !inClosure[v])
            return;
        const double w = std::min(powAbs(phi[u], p), powAbs(phi[v], p));
        if (w > 0.0)
            edges += w * powAbs(std::log(h[u]) - std::log(h[v]), p);
    });
    rep.logEnergy = 0.5 * edges;

    double eta = 0.0;
    for (std::size_t x = 0; x < N; ++x) {
        if (phi[x] == 0.0)
            continue;
        const double e = -pLaplacian(G, h, p, static_cast<Vertex>(x));
        eta += e * powAbs(phi[x], p) / std::pow(h[x], p - 1.0) * static_cast<double>(G.degree(static_cast<Vertex>(x)));
    }
    rep.etaTerm = eta / (2.0 * (p - 1.0));
    rep.bound = std::pow(2.0, p - 1.0) / (p * (p - 1.0)) * pEnergy(G, phi, p);
    rep.slack = rep.bound - rep.logEnergy - rep.etaTerm;
    return rep;
}

CutoffProfile cutoffProfile(Level n, double p, Vertex z, double R, double dw, const CutoffOptions& opts) {
    if (!(R > 0.0) || !(opts.outerFactor >= 1.0))
        throw std::invalid_argument("cutoffProfile needs R > 0 and an outer factor >= 1");
    const auto G = sharedGraph(n);
    const std::size_t N = G->numberOfVertices();
    if (z >= N)
        throw std::out_of_range("cutoffProfile: center out of range");
    const VertexSet inner = graphBall(*G, z, R);
    const VertexSet outer = graphBall(*G, z, opts.outerFactor * R);
    if (outer.size() == N)
        throw std::invalid_argument("cutoffProfile: degenerate annulus, the outer ball covers every vertex");

    const std::vector<char> inOuter = membershipMask(N, outer);
    VertexSet A0;
    for (std::size_t v = 0; v < N; ++v)
        if (!inOuter[v])
            A0.push_back(static_cast<Vertex>(v));
    const CapacityResult cap = capacity(*G, A0, inner, {}, p, opts.tol);

    CutoffProfile prof;
    prof.level = n;
    prof.p = clampExponent(p);
    prof.z = z;
    prof.R = R;
    prof.outerFactor = opts.outerFactor;
    prof.dw = dw;
    prof.energy = cap.value;
    prof.innerBallSize = inner.size();
    prof.energyBoundRatio = cap.value * std::pow(R, dw) / static_cast<double>(inner.size());
    prof.potential = cap.potential.values;
    prof.residual = cap.potential.residual;
    prof.converged = cap.potential.converged;

    // Pairs x in the transition region, y within R/2 of x.
    const std::vector<char> inInner = membershipMask(N, inner);
    VertexSet transition;
    for (const Vertex v : outer)
        if (!inInner[v])
            transition.push_back(v);
    Rng rng(opts.seed);
    BallScanner scanner(*G);
    if (!transition.empty() && R / 2.0 >= 1.0) {
        for (std::size_t k = 0; k < opts.maxPairs; ++k) {
            const Vertex x = transition[rng.below(transition.size())];
            const auto near = scanner.scan(x, R / 2.0, true);
            if (near.size() < 2)
                continue;
            const Vertex y = near[1 + rng.below(near.size() - 1)];
            prof.pairs.push_back({scanner.distance(y) / R, std::fabs(prof.potential[x] - prof.potential[y])});
        }
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t cnt = 0;
    for (const HoelderPair& hp : prof.pairs) {
        if (!(hp.oscillation > 0.0))
            continue;
        const double lx = std::log(hp.distanceRatio), ly = std::log(hp.oscillation);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    const double c = static_cast<double>(cnt);
    const double var = sxx - sx * sx / std::max(c, 1.0);
    prof.theta = cnt >= 2 && var > 1e-12 * std::max(sxx, 1.0) ? (sxy - sx * sy / c) / var
                                                              : std::numeric_limits<double>::quiet_NaN();
    return prof;
}

} // namespace carpet
