/*
 * modulus.cpp
 */

#include <carpet/modulus.hpp>
#include <carpet/dirichlet.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <tuple>

namespace carpet {

namespace {

/**
 * Inner problem: min sum rho^p over rho >= 0 with rho-length >= 1 on every
 * path of a finite family, vertices numbered 0..V-1. Primal-dual interior
 * point method; the path multipliers give the dual bound.
 */
class BarrierSolver {
public:
    BarrierSolver(std::size_t vertexCount, double p) : V_(vertexCount), p_(p) {}

    void addPath(VertexSet path) { paths_.push_back(std::move(path)); }
    const std::vector<VertexSet>& paths() const { return paths_; }

    /// Solves from a start point (made strictly feasible); returns whether the gap target was met.
    bool solve(std::vector<double> rho, double relGap) {
        const std::size_t V = V_, k = paths_.size();
        rho.resize(V, 0.0);
        double top = 0.0;
        for (double r : rho)
            top = std::max(top, r);
        if (top <= 0.0)
            top = 1.0;
        for (double& r : rho)
            r = std::max(r, 1e-2 * top);
        double shortest = std::numeric_limits<double>::infinity();
        for (const auto& path : paths_)
            shortest = std::min(shortest, length(rho, path));
        if (shortest < 1.1)
            for (double& r : rho)
                r *= 1.1 / shortest;

        // Primal-dual interior point: slack s = P rho - 1, multipliers lambda (paths) and z (rho >= 0).
        std::vector<double> s(k), lam(k), z(V);
        double mu0 = 0.0;
        for (std::size_t v = 0; v < V; ++v)
            mu0 += p_ * std::pow(rho[v], p_);
        mu0 /= static_cast<double>(k + V);
        for (std::size_t i = 0; i < k; ++i) {
            s[i] = length(rho, paths_[i]) - 1.0;
            lam[i] = mu0 / s[i];
        }
        for (std::size_t v = 0; v < V; ++v)
            z[v] = mu0 / rho[v];

        const auto n = static_cast<Eigen::Index>(V);
        Eigen::MatrixXd H(n, n);
        Eigen::VectorXd rhs(n);
        std::vector<double> dl(k), ds(k), dz(V), Pd(k);
        bool ok = false;
        lambda_.assign(k, 0.0);
        rho_ = rho;
        for (int it = 0; it < 300; ++it) {
            double comp = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                comp += s[i] * lam[i];
            for (std::size_t v = 0; v < V; ++v)
                comp += rho[v] * z[v];
            const double mu = 0.1 * comp / static_cast<double>(k + V);

            // Reduced Newton system in rho.
            H.setZero();
            for (std::size_t v = 0; v < V; ++v) {
                const auto e = static_cast<Eigen::Index>(v);
                const double grad = p_ * std::pow(rho[v], p_ - 1.0);
                H(e, e) = p_ * (p_ - 1.0) * std::pow(rho[v], p_ - 2.0) + z[v] / rho[v];
                // -r_d + (mu - z rho) / rho with r_d = grad - P^T lambda - z.
                rhs[e] = -(grad - z[v]) + (mu - z[v] * rho[v]) / rho[v];
            }
            for (std::size_t i = 0; i < k; ++i) {
                const double w = lam[i] / s[i];
                // The primal residual stays zero, so only the centering term remains.
                const double c = w * (mu - s[i] * lam[i]) / lam[i];
                for (const Vertex u : paths_[i]) {
                    rhs[u] += lam[i] + c;
                    for (const Vertex x : paths_[i])
                        H(u, x) += w;
                }
            }
            const Eigen::VectorXd d = H.llt().solve(rhs);
            if (!d.allFinite())
                break;
            for (std::size_t i = 0; i < k; ++i) {
                double a = 0.0;
                for (const Vertex u : paths_[i])
                    a += d[u];
                Pd[i] = a;
                ds[i] = a;
                dl[i] = (mu - s[i] * lam[i] - lam[i] * ds[i]) / s[i];
            }
            for (std::size_t v = 0; v < V; ++v)
                dz[v] = (mu - z[v] * rho[v] - z[v] * d[static_cast<Eigen::Index>(v)]) / rho[v];

            auto limit = [](double x, double dx, double a) { return dx < 0.0 ? std::min(a, -0.995 * x / dx) : a; };
            double ap = 1.0, ad = 1.0;
            for (std::size_t v = 0; v < V; ++v) {
                ap = limit(rho[v], d[static_cast<Eigen::Index>(v)], ap);
                ad = limit(z[v], dz[v], ad);
            }
            for (std::size_t i = 0; i < k; ++i) {
                ap = limit(s[i], ds[i], ap);
                ad = limit(lam[i], dl[i], ad);
            }
            for (std::size_t v = 0; v < V; ++v) {
                rho[v] += ap * d[static_cast<Eigen::Index>(v)];
                z[v] += ad * dz[v];
            }
            for (std::size_t i = 0; i < k; ++i) {
                lam[i] += ad * dl[i];
                s[i] = length(rho, paths_[i]) - 1.0;
            }

            const double f = objective(rho);
            const double previous = objective(rho_) - dual();
            const std::vector<double> savedLambda = lambda_;
            lambda_ = lam;
            const double gap = f - dual();
            if (gap < previous || it == 0)
                rho_ = rho;
            else
                lambda_ = savedLambda;
            if (objective(rho_) - dual() <= relGap * objective(rho_)) {
                ok = true;
                break;
            }
        }
        return ok;
    }

    const std::vector<double>& rho() const { return rho_; }

    double length(const std::vector<double>& rho, const VertexSet& path) const {
        double s = 0.0;
        for (const Vertex v : path)
            s += rho[v];
        return s;
    }

    double objective(const std::vector<double>& rho) const {
        double s = 0.0;
        for (double r : rho)
            s += powAbs(r, p_);
        return s;
    }

    /// sum lambda - (p-1) sum (Lambda/p)^(p/(p-1)).
    double dual() const {
        std::vector<double> Lambda(V_, 0.0);
        double s = 0.0;
        for (std::size_t i = 0; i < paths_.size(); ++i) {
            s += lambda_[i];
            for (const Vertex v : paths_[i])
                Lambda[v] += lambda_[i];
        }
        for (double L : Lambda)
            if (L > 0.0)
                s -= (p_ - 1.0) * std::pow(L / p_, p_ / (p_ - 1.0));
        return s;
    }

private:
    std::size_t V_;
    double p_;
    std::vector<VertexSet> paths_;
    std::vector<double> lambda_;
    std::vector<double> rho_;
};

std::vector<char> maskOrAll(std::size_t N, std::span<const Vertex> A) {
    if (A.empty())
        return std::vector<char>(N, 1);
    return membershipMask(N, A);
}

} // namespace

namespace {

constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

/// Vertex-weighted Dijkstra from A0 inside A2; A1 vertices are not expanded.
struct PathForest {
    std::vector<double> dist;
    std::vector<Vertex> pred;
    /// A1 vertices in settle order (nondecreasing distance, then code).
    VertexSet settledTargets;

    VertexSet pathTo(Vertex t) const {
        VertexSet path;
        for (Vertex v = t; v != kNoVertex; v = pred[v])
            path.push_back(v);
        std::reverse(path.begin(), path.end());
        return path;
    }
};

PathForest growForest(const LevelGraph& G, std::span<const double> rho, std::span<const Vertex> A0,
                      std::span<const Vertex> A1, std::span<const Vertex> A2, bool stopAtFirst) {
    const std::size_t N = G.numberOfVertices();
    if (rho.size() != N)
        throw std::invalid_argument("density size does not match the graph");
    for (double r : rho)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw std::invalid_argument("density must be finite and nonnegative");
    const auto inA2 = maskOrAll(N, A2);
    const auto inA1 = membershipMask(N, A1);
    for (const Vertex v : A1)
        if (v >= N || !inA2[v])
            throw std::invalid_argument("A1 not contained in A2");

    PathForest F;
    F.dist.assign(N, std::numeric_limits<double>::infinity());
    F.pred.assign(N, kNoVertex);
    std::vector<char> done(N, 0);
    using Item = std::pair<double, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (const Vertex a : A0) {
        if (a >= N || !inA2[a])
            throw std::invalid_argument("A0 not contained in A2");
        if (F.dist[a] > rho[a]) {
            F.dist[a] = rho[a];
            heap.emplace(F.dist[a], a);
        }
    }
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (done[u] || d > F.dist[u])
            continue;
        done[u] = 1;
        if (inA1[u]) {
            F.settledTargets.push_back(u);
            if (stopAtFirst)
                break;
            continue;
        }
        for (const Vertex y : G.neighbors(u)) {
            if (!inA2[y] || done[y])
                continue;
            const double nd = d + rho[y];
            if (nd < F.dist[y]) {
                F.dist[y] = nd;
                F.pred[y] = u;
                heap.emplace(nd, y);
            } else if (nd == F.dist[y] && u < F.pred[y]) {
                F.pred[y] = u;
            }
        }
    }
    if (F.settledTargets.empty())
        throw std::runtime_error("no path from A0 to A1 inside A2");
    return F;
}

} // namespace

WeightedPath shortestVertexWeightedPath(const LevelGraph& G, std::span<const double> rho, std::span<const Vertex> A0,
                                        std::span<const Vertex> A1, std::span<const Vertex> A2) {
    const PathForest F = growForest(G, rho, A0, A1, A2, true);
    const Vertex t = F.settledTargets.front();
    return {F.pathTo(t), F.dist[t]};
}

ModulusResult vertexModulus(const LevelGraph& G, std::span<const Vertex> A0, std::span<const Vertex> A1,
                            std::span<const Vertex> A2, double p, const ModulusOptions& opts) {
    p = clampExponent(p);
    const std::size_t N = G.numberOfVertices();
    if (A0.empty() || A1.empty())
        throw std::invalid_argument("modulus: A0 and A1 must be nonempty");
    const auto inA0 = membershipMask(N, A0);
    for (const Vertex v : A1)
        if (v < N && inA0[v])
            throw std::invalid_argument("modulus: A0 and A1 intersect");

    // Active paths live on a growing local numbering of their vertices.
    std::vector<std::int64_t> localOf(N, -1);
    VertexSet globalOf;
    std::vector<VertexSet> globalPaths;
    std::set<VertexSet> known;
    auto localize = [&](const VertexSet& path) {
        VertexSet lp;
        for (const Vertex v : path) {
            if (localOf[v] < 0) {
                localOf[v] = static_cast<std::int64_t>(globalOf.size());
                globalOf.push_back(v);
            }
            lp.push_back(static_cast<Vertex>(localOf[v]));
        }
        return lp;
    };

    const std::vector<double> unit(N, 1.0);
    std::vector<VertexSet> pending{shortestVertexWeightedPath(G, unit, A0, A1, A2).path};
    std::vector<double> rho(N, 0.0);
    std::vector<double> start;
    double ell = 0.0;
    double lower = 0.0;
    ModulusResult res;
    std::size_t round = 0;
    while (round < opts.maxRounds) {
        ++round;
        for (auto& path : pending)
            if (known.insert(path).second)
                globalPaths.push_back(std::move(path));
        pending.clear();
        std::vector<VertexSet> localPaths;
        for (const auto& path : globalPaths)
            localPaths.push_back(localize(path));
        BarrierSolver solver(globalOf.size(), p);
        for (auto& path : localPaths)
            solver.addPath(std::move(path));
        start.assign(globalOf.size(), 0.0);
        for (std::size_t k = 0; k < globalOf.size(); ++k)
            start[k] = rho[globalOf[k]];
        const bool innerOk = solver.solve(start, opts.innerTol);
        lower = solver.dual();
        std::fill(rho.begin(), rho.end(), 0.0);
        for (std::size_t k = 0; k < globalOf.size(); ++k)
            rho[globalOf[k]] = solver.rho()[k];

        const PathForest F = growForest(G, rho, A0, A1, A2, false);
        ell = F.dist[F.settledTargets.front()];
        if (ell >= 1.0 - opts.epsPath) {
            res.converged = innerOk;
            break;
        }
        for (const Vertex t : F.settledTargets) {
            if (F.dist[t] >= 1.0 - opts.epsPath)
                break;
            VertexSet path = F.pathTo(t);
            if (!known.count(path))
                pending.push_back(std::move(path));
        }
        if (pending.empty())
            break;
    }
    res.rounds = round;
    res.certificateGap = 1.0 - ell;
    res.rho = GraphFunction(G.level(), 0.0);
    double s = 0.0;
    for (std::size_t v = 0; v < N; ++v) {
        res.rho[v] = rho[v] / ell;
        s += powAbs(res.rho[v], p);
    }
    res.value = s;
    res.lowerBound = lower;
    res.activePaths = std::move(globalPaths);
    return res;
}

FamilyModulus familyModulus(const std::vector<VertexSet>& paths, double p, const ModulusOptions& opts) {
    p = clampExponent(p);
    if (paths.empty())
        throw std::invalid_argument("familyModulus: empty family");
    FamilyModulus out;
    for (const auto& path : paths) {
        if (path.empty())
            throw std::invalid_argument("familyModulus: empty path");
        out.vertices.insert(out.vertices.end(), path.begin(), path.end());
    }
    std::sort(out.vertices.begin(), out.vertices.end());
    out.vertices.erase(std::unique(out.vertices.begin(), out.vertices.end()), out.vertices.end());

    BarrierSolver solver(out.vertices.size(), p);
    for (const auto& path : paths) {
        VertexSet lp;
        for (const Vertex v : path)
            lp.push_back(static_cast<Vertex>(std::lower_bound(out.vertices.begin(), out.vertices.end(), v) -
                                             out.vertices.begin()));
        std::sort(lp.begin(), lp.end());
        lp.erase(std::unique(lp.begin(), lp.end()), lp.end());
        solver.addPath(std::move(lp));
    }
    out.converged = solver.solve({}, opts.innerTol);

    double ell = std::numeric_limits<double>::infinity();
    for (const auto& path : solver.paths())
        ell = std::min(ell, solver.length(solver.rho(), path));
    out.rho.resize(out.vertices.size());
    double s = 0.0;
    for (std::size_t k = 0; k < out.vertices.size(); ++k) {
        out.rho[k] = solver.rho()[k] / ell;
        s += powAbs(out.rho[k], p);
    }
    out.value = s;
    out.lowerBound = solver.dual();
    return out;
}

} // namespace carpet
