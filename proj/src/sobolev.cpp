/*
 * sobolev.cpp
 */

#include <carpet/sobolev.hpp>
#include <carpet/parallel.hpp>
#include <carpet/random.hpp>
#include <carpet/scaling.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace carpet {

GraphFunction averageToLevel(const CellFunction& f, Level n) {
    if (n < 0 || n > f.level())
        throw std::invalid_argument("averageToLevel needs 0 <= n <= resolution");
    return coarsen(f, n);
}

CellFunction restrictToCell(const CellFunction& f, const Word& w) {
    const Level m = f.level();
    if (w.level() > m)
        throw std::invalid_argument("restrictToCell: word " + w.toString() + " is longer than the resolution");
    const std::uint64_t block = pow8(m - w.level());
    const auto first = f.values().begin() + static_cast<std::ptrdiff_t>(w.code() * block);
    return CellFunction(m - w.level(), std::vector<double>(first, first + static_cast<std::ptrdiff_t>(block)));
}

double normalizedEnergy(const CellFunction& f, Level n, double p, double rho) {
    if (n < 0 || n > f.level())
        throw std::invalid_argument("normalizedEnergy needs 0 <= n <= resolution");
    if (n == 0)
        return 0.0;
    const auto G = sharedGraph(n);
    return std::pow(rho, n) * pEnergy(*G, averageToLevel(f, n), p);
}

SeminormReport seminormReport(const CellFunction& f, double p, double rho) {
    if (!(rho > 0.0))
        throw std::invalid_argument("seminormReport needs rho > 0");
    SeminormReport rep;
    rep.p = p;
    rep.rho = rho;
    rep.resolution = f.level();
    for (Level n = 1; n <= f.level(); ++n)
        rep.energies.push_back(normalizedEnergy(f, n, p, rho));
    for (const double e : rep.energies)
        rep.seminorm = std::max(rep.seminorm, e);

    bool any = false;
    for (std::size_t l = 0; l < rep.energies.size(); ++l) {
        if (rep.energies[l] <= 0.0)
            continue;
        for (std::size_t k = 0; k < l; ++k) {
            const double r = rep.energies[k] / rep.energies[l];
            if (!any || r > rep.weakMonotonicity) {
                rep.weakMonotonicity = r;
                rep.wmLow = static_cast<Level>(k + 1);
                rep.wmHigh = static_cast<Level>(l + 1);
                any = true;
            }
        }
    }
    if (!any)
        rep.weakMonotonicity = 1.0;
    return rep;
}

double ksEnergy(const CellFunction& f, double p, double lambda, double dw) {
    if (!(lambda >= 1.0))
        throw std::invalid_argument("ksEnergy needs lambda >= 1");
    const Level m = f.level();
    if (m < 1)
        throw std::invalid_argument("ksEnergy needs resolution >= 1");
    const auto G = sharedGraph(m);
    BallScanner scanner(*G);
    double total = 0.0;
    for (std::size_t x = 0; x < G->numberOfVertices(); ++x) {
        const auto ball = scanner.scan(static_cast<Vertex>(x), lambda, true);
        double s = 0.0;
        for (const Vertex y : ball)
            s += powAbs(f[x] - f[y], p);
        total += s / static_cast<double>(ball.size());
    }
    const double r = lambda / static_cast<double>(pow3(m));
    return total / static_cast<double>(pow8(m)) / std::pow(r, dw);
}

CellFunction sampleCellCenters(Level m, const std::function<double(double, double)>& g) {
    CellFunction f(m);
    for (std::uint64_t c = 0; c < pow8(m); ++c) {
        const auto xy = cellCenter(Word(m, c));
        f[c] = g(xy[0], xy[1]);
    }
    return f;
}

std::vector<SuiteMember> defaultSuite(Level m, double p, const SuiteOptions& opts) {
    if (m < 1)
        throw std::invalid_argument("defaultSuite needs m >= 1");
    std::vector<SuiteMember> suite;
    suite.push_back({"x", sampleCellCenters(m, [](double x, double) { return x; })});
    suite.push_back({"y", sampleCellCenters(m, [](double, double y) { return y; })});
    suite.push_back({"xy", sampleCellCenters(m, [](double x, double y) { return x * y; })});
    Rng rng(opts.seed);
    for (std::size_t i = 0; i < opts.randomCount; ++i) {
        CellFunction f(m);
        for (double& v : f.values())
            v = rng.uniform();
        suite.push_back({"random" + std::to_string(i), std::move(f)});
    }
    if (opts.withPotential) {
        const Level k = std::min(m, opts.potentialLevel);
        const CapacityResult c = faceCapacity(p, k);
        suite.push_back({"face-potential", refine(c.potential.values, m)});
    }
    return suite;
}

std::vector<Ball> sampleBalls(Level n, double R, std::size_t count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Ball> balls;
    for (std::size_t i = 0; i < count; ++i)
        balls.push_back({static_cast<Vertex>(rng.below(pow8(n))), R});
    return balls;
}

std::vector<Ball> matchedBalls(Level n, Level k, double R) {
    if (k > n)
        throw std::invalid_argument("matchedBalls needs k <= n");
    std::vector<Ball> balls;
    for (std::uint64_t w = 0; w < pow8(k); ++w)
        balls.push_back({static_cast<Vertex>(w * pow8(n - k)), R});
    return balls;
}

PoincareReport poincareConstant(Level n, double p, double dw, const std::vector<CellFunction>& suite,
                                const std::vector<Ball>& balls, unsigned threads) {
    if (suite.empty())
        throw std::invalid_argument("poincareConstant needs a nonempty suite");
    const auto G = sharedGraph(n);
    const std::size_t N = G->numberOfVertices();
    std::vector<GraphFunction> fs;
    for (const CellFunction& f : suite) {
        if (f.level() < n)
            throw std::invalid_argument("suite function coarser than the Poincare level");
        fs.push_back(averageToLevel(f, n));
    }
    for (const Ball& b : balls)
        if (b.center >= N)
            throw std::out_of_range("ball center out of range");

    // ratios[ball][function]
    std::vector<std::vector<double>> ratios(balls.size(), std::vector<double>(fs.size(), 0.0));
    const unsigned t = std::max(1u, std::min<unsigned>(resolveThreads(threads), static_cast<unsigned>(balls.size())));
    const std::size_t chunk = (balls.size() + t - 1) / t;
    parallelFor(t, t, [&](std::size_t worker) {
        BallScanner scanner(*G);
        for (std::size_t i = worker * chunk; i < std::min(balls.size(), (worker + 1) * chunk); ++i) {
            const Ball& b = balls[i];
            const auto outer = scanner.scan(b.center, 2.0 * b.R, false);
            if (outer.size() == N)
                throw std::invalid_argument("doubled ball covers all of G_n");
            for (std::size_t j = 0; j < fs.size(); ++j) {
                const GraphFunction& f = fs[j];
                double mean = 0.0;
                std::size_t count = 0;
                for (const Vertex v : outer)
                    if (scanner.distance(v) < b.R) {
                        mean += f[v];
                        ++count;
                    }
                mean /= static_cast<double>(count);
                double lhs = 0.0;
                for (const Vertex v : outer)
                    if (scanner.distance(v) < b.R)
                        lhs += powAbs(f[v] - mean, p);
                double energy = 0.0;
                for (const Vertex u : outer)
                    for (const Vertex w : G->neighbors(u))
                        if (w > u && scanner.distance(w) != kUnreachable)
                            energy += powAbs(f[u] - f[w], p);
                ratios[i][j] = energy > 0.0 ? lhs / (std::pow(b.R, dw) * energy) : 0.0;
            }
        }
    });

    PoincareReport rep;
    rep.level = n;
    rep.p = p;
    rep.dw = dw;
    rep.perFunction.assign(fs.size(), 0.0);
    for (std::size_t i = 0; i < balls.size(); ++i)
        for (std::size_t j = 0; j < fs.size(); ++j) {
            rep.perFunction[j] = std::max(rep.perFunction[j], ratios[i][j]);
            if (ratios[i][j] > rep.constant) {
                rep.constant = ratios[i][j];
                rep.suiteIndex = j;
                rep.ball = balls[i];
            }
        }
    return rep;
}

} // namespace carpet
