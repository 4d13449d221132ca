/*
 * dirichlet.cpp
 */

#include <carpet/dirichlet.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace carpet {

double clampExponent(double p) {
    if (!std::isfinite(p))
        throw std::invalid_argument("exponent p must be finite");
    return std::clamp(p, kMinExponent, kMaxExponent);
}

double localMinimizer(std::span<const double> a, double p) {
    if (a.empty())
        throw std::invalid_argument("localMinimizer: no neighbor values");
    double lo = *std::min_element(a.begin(), a.end());
    double hi = *std::max_element(a.begin(), a.end());
    if (lo == hi)
        return lo;
    if (p == 2.0) {
        double s = 0.0;
        for (double x : a)
            s += x;
        return std::clamp(s / static_cast<double>(a.size()), lo, hi);
    }

    const double q = p - 1.0;
    // d/dt sum |t - a_j|^p / p, strictly increasing, negative at lo, positive at hi.
    auto slope = [&](double t, double& curvature) {
        double s = 0.0, c = 0.0;
        for (double x : a) {
            const double d = t - x;
            const double m = std::fabs(d);
            if (m == 0.0) {
                if (q < 1.0)
                    c = std::numeric_limits<double>::infinity();
                continue;
            }
            const double mq = std::pow(m, q);
            s += d > 0 ? mq : -mq;
            c += mq / m;
        }
        curvature = q * c;
        return s;
    };

    const double scale = hi - lo;
    double t = 0.5 * (lo + hi);
    double curvature = 0.0;
    double f = slope(t, curvature);
    double previousStep = scale;
    for (int it = 0; it < 200; ++it) {
        if (f == 0.0)
            return t;
        if (f < 0.0)
            lo = t;
        else
            hi = t;
        if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max({std::fabs(lo), std::fabs(hi), scale}))
            break;
        double next = std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(curvature) && curvature > 0.0)
            next = t - f / curvature;
        const bool newtonOk = std::isfinite(next) && next > lo && next < hi &&
                              std::fabs(next - t) <= 0.5 * previousStep;
        if (!newtonOk)
            next = 0.5 * (lo + hi);
        previousStep = std::fabs(next - t);
        if (next == t)
            break;
        t = next;
        f = slope(t, curvature);
    }
    return t;
}

namespace {

constexpr std::int32_t kOutside = std::numeric_limits<std::int32_t>::min();

/**
 * The problem restricted to its variables. Neighbor entries are encoded as
 * e >= 0 for the variable e and e < 0 for boundary value -e-1.
 */
struct LocalProblem {
    double p = 2.0;
    VertexSet vars;
    std::vector<std::size_t> offsets{0};
    std::vector<std::int32_t> entries;
    std::vector<double> boundaryValues;
    std::vector<double> invDegree;
    double boundaryEnergy = 0.0;
    double lower = 0.0, upper = 0.0;

    std::size_t size() const { return vars.size(); }

    double value(std::int32_t e, const std::vector<double>& u) const {
        return e >= 0 ? u[static_cast<std::size_t>(e)] : boundaryValues[static_cast<std::size_t>(-e - 1)];
    }

    double energy(const std::vector<double>& u) const {
        double s = boundaryEnergy;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
                const std::int32_t e = entries[k];
                if (e >= 0 && static_cast<std::size_t>(e) < i)
                    continue;
                s += powAbs(u[i] - value(e, u), p);
            }
        return s;
    }

    double residual(const std::vector<double>& u) const {
        double r = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double s = 0.0;
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
                s += signedPow(value(entries[k], u) - u[i], p - 1.0);
            r = std::max(r, std::fabs(s) * invDegree[i]);
        }
        return r;
    }

    double localDisplacement(const std::vector<double>& u) const {
        std::vector<double> buf;
        double d = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            buf.clear();
            for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k)
                buf.push_back(value(entries[k], u));
            d = std::max(d, std::fabs(localMinimizer(buf, p) - u[i]));
        }
        return d;
    }
};

LocalProblem buildLocal(const DirichletProblem& prob, double p) {
    const LevelGraph& G = *prob.graph;
    const std::size_t N = G.numberOfVertices();
    LocalProblem L;
    L.p = p;
    std::vector<std::int32_t> id(N, kOutside);

    L.boundaryValues.reserve(prob.boundary.size());
    for (const auto& [v, value] : prob.boundary) {
        if (v >= N)
            throw std::out_of_range("boundary vertex out of range");
        if (id[v] != kOutside)
            throw std::invalid_argument("boundary vertex " + std::to_string(v) + " listed twice");
        if (!std::isfinite(value))
            throw std::invalid_argument("non-finite boundary value");
        L.boundaryValues.push_back(value);
        id[v] = -static_cast<std::int32_t>(L.boundaryValues.size());
    }
    L.vars = prob.domain;
    std::sort(L.vars.begin(), L.vars.end());
    if (std::adjacent_find(L.vars.begin(), L.vars.end()) != L.vars.end())
        throw std::invalid_argument("domain lists a vertex twice");
    for (std::size_t i = 0; i < L.vars.size(); ++i) {
        const Vertex v = L.vars[i];
        if (v >= N)
            throw std::out_of_range("domain vertex out of range");
        if (id[v] != kOutside)
            throw std::invalid_argument("domain and boundary intersect at vertex " + std::to_string(v));
        id[v] = static_cast<std::int32_t>(i);
    }

    L.offsets.reserve(L.vars.size() + 1);
    L.invDegree.reserve(L.vars.size());
    for (const Vertex v : L.vars) {
        for (const Vertex y : G.neighbors(v))
            if (id[y] != kOutside)
                L.entries.push_back(id[y]);
        L.offsets.push_back(L.entries.size());
        L.invDegree.push_back(1.0 / static_cast<double>(G.degree(v)));
    }
    for (const auto& [v, value] : prob.boundary)
        for (const Vertex y : G.neighbors(v))
            if (y > v && id[y] < 0 && id[y] != kOutside)
                L.boundaryEnergy += powAbs(value - L.boundaryValues[static_cast<std::size_t>(-id[y] - 1)], p);

    if (!L.boundaryValues.empty()) {
        auto [lo, hi] = std::minmax_element(L.boundaryValues.begin(), L.boundaryValues.end());
        L.lower = *lo;
        L.upper = *hi;
    }
    return L;
}

/**
 * Jacobi-preconditioned CG for (D - W) x = b, where W holds the weights of
 * variable-variable entries and D the full weighted degree. Stops when
 * done(r) holds or after maxIters iterations.
 */
template <typename Done>
std::size_t pcg(const LocalProblem& L, const std::vector<double>& weights, const std::vector<double>& diag,
                const std::vector<double>& b, std::vector<double>& x, std::size_t maxIters, Done done) {
    const std::size_t n = L.size();
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * in[i];
            for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k) {
                const std::int32_t e = L.entries[k];
                if (e >= 0)
                    s -= weights[k] * in[static_cast<std::size_t>(e)];
            }
            out[i] = s;
        }
    };
    std::vector<double> r(n), z(n), d(n), q(n);
    apply(x, q);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - q[i];
    if (done(r))
        return 0;
    double rz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
        d[i] = z[i];
        rz += r[i] * z[i];
    }
    std::size_t it = 0;
    while (it < maxIters) {
        ++it;
        apply(d, q);
        double dq = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            dq += d[i] * q[i];
        if (!(dq > 0.0))
            break;
        const double alpha = rz / dq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * d[i];
            r[i] -= alpha * q[i];
        }
        if (done(r))
            break;
        double rzNew = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
            rzNew += r[i] * z[i];
        }
        const double beta = rzNew / rz;
        rz = rzNew;
        for (std::size_t i = 0; i < n; ++i)
            d[i] = z[i] + beta * d[i];
    }
    return it;
}

/// Harmonic (p = 2) extension; residual measured as max |r_i| / D_i.
std::size_t harmonicSolve(const LocalProblem& L, std::vector<double>& u, double target, std::size_t maxIters) {
    const std::size_t n = L.size();
    std::vector<double> weights(L.entries.size(), 1.0), diag(n), b(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        diag[i] = static_cast<double>(L.offsets[i + 1] - L.offsets[i]);
        for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k)
            if (L.entries[k] < 0)
                b[i] += L.boundaryValues[static_cast<std::size_t>(-L.entries[k] - 1)];
    }
    std::size_t total = 0;
    // The recursive residual drifts slightly; restart from the true one until it agrees.
    for (int round = 0; round < 4 && total < maxIters; ++round) {
        auto done = [&](const std::vector<double>& r) {
            double m = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                m = std::max(m, std::fabs(r[i]) / diag[i]);
            return m <= target;
        };
        const std::size_t it = pcg(L, weights, diag, b, u, maxIters - total, done);
        total += it;
        if (it == 0)
            break;
    }
    return total;
}

double oscillation(const LocalProblem& L) { return L.upper - L.lower; }

void clampInto(const LocalProblem& L, std::vector<double>& u) {
    for (double& x : u)
        x = std::clamp(x, L.lower, L.upper);
}

struct Iterate {
    std::vector<double> u;
    double energy = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double lastStep = 0.0;
};

/// Cyclic sweeps of exact local minimization, in ascending vertex order.
void coordinateDescent(const LocalProblem& L, Iterate& st, double stepTol, double residualTol, double energyRelTol,
                       std::size_t maxIters, std::vector<double>* history) {
    std::vector<double> buf;
    const bool checkResidual = L.p >= 2.0;
    while (st.iterations < maxIters) {
        double disp = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i) {
            buf.clear();
            for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k)
                buf.push_back(L.value(L.entries[k], st.u));
            const double t = localMinimizer(buf, L.p);
            disp = std::max(disp, std::fabs(t - st.u[i]));
            st.u[i] = t;
        }
        ++st.iterations;
        const double e = L.energy(st.u);
        const double drop = st.energy - e;
        st.energy = std::min(st.energy, e);
        st.lastStep = disp;
        if (history)
            history->push_back(e);
        if (disp <= stepTol && std::fabs(drop) <= energyRelTol * std::max(e, 1e-300) &&
            (!checkResidual || L.residual(st.u) <= residualTol)) {
            st.converged = true;
            return;
        }
    }
}

/// Edge potential |d|^p, or (d^2 + eps^2)^(p/2) when smoothed.
struct EdgeModel {
    double p = 2.0;
    double eps = 0.0;
    double delta = 0.0;

    double value(double d) const {
        return eps > 0.0 ? std::pow(d * d + eps * eps, 0.5 * p) : powAbs(d, p);
    }
    double slope(double d) const {
        if (p == 2.0)
            return 2.0 * d;
        return eps > 0.0 ? p * d * std::pow(d * d + eps * eps, 0.5 * p - 1.0) : p * signedPow(d, p - 1.0);
    }
    double curvature(double d) const {
        if (p == 2.0)
            return 2.0;
        if (eps > 0.0) {
            const double s = d * d + eps * eps;
            return p * std::pow(s, 0.5 * p - 2.0) * ((p - 1.0) * d * d + eps * eps);
        }
        return p * (p - 1.0) * std::pow(std::max(std::fabs(d), delta), p - 2.0);
    }
};

double modelEnergy(const LocalProblem& L, const EdgeModel& M, const std::vector<double>& u) {
    if (M.eps == 0.0)
        return L.energy(u);
    double s = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i)
        for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k) {
            const std::int32_t e = L.entries[k];
            if (e >= 0 && static_cast<std::size_t>(e) < i)
                continue;
            s += M.value(u[i] - L.value(e, u));
        }
    return s;
}

/**
 * Damped Newton on the energy of model M: PCG on the Hessian, exact line
 * search along the step, truncation to the boundary range. Returns once the
 * largest value change drops to stepTol (and, for the unsmoothed model with
 * p >= 2, the residual to residualTol), or when the line search stalls.
 */
bool newton(const LocalProblem& L, const EdgeModel& M, Iterate& st, double stepTol, double residualTol,
            double energyRelTol, std::size_t maxIters, std::vector<double>* history) {
    const std::size_t n = L.size();
    const double p = L.p;
    const bool checkResidual = M.eps == 0.0 && p >= 2.0;

    std::vector<double> weights(L.entries.size()), diag(n), g(n), minusG(n), s(n);
    std::vector<double> ed, es;
    double gNorm0 = -1.0;
    double modelE = modelEnergy(L, M, st.u);
    int stalls = 0;

    while (st.iterations < maxIters) {
        double gNorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double gi = 0.0, di = 0.0;
            for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k) {
                const double d = st.u[i] - L.value(L.entries[k], st.u);
                gi += M.slope(d);
                const double w = M.curvature(d);
                weights[k] = w;
                di += w;
            }
            g[i] = gi;
            minusG[i] = -gi;
            diag[i] = di;
            gNorm += gi * gi;
        }
        gNorm = std::sqrt(gNorm);
        if (gNorm0 < 0.0)
            gNorm0 = std::max(gNorm, 1e-300);
        if (gNorm == 0.0)
            return true;

        const double eta = std::clamp(gNorm / gNorm0, 1e-10, 0.1);
        std::fill(s.begin(), s.end(), 0.0);
        const double stop = eta * gNorm;
        pcg(L, weights, diag, minusG, s, 4 * n + 100, [&](const std::vector<double>& r) {
            double m = 0.0;
            for (double x : r)
                m += x * x;
            return std::sqrt(m) <= stop;
        });

        double slope0 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            slope0 += g[i] * s[i];
        if (!(slope0 < 0.0)) {
            slope0 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] = -g[i] / diag[i];
                slope0 += g[i] * s[i];
            }
        }

        ed.clear();
        es.clear();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = L.offsets[i]; k < L.offsets[i + 1]; ++k) {
                const std::int32_t e = L.entries[k];
                if (e >= 0 && static_cast<std::size_t>(e) < i)
                    continue;
                const double ds = s[i] - (e >= 0 ? s[static_cast<std::size_t>(e)] : 0.0);
                if (ds == 0.0)
                    continue;
                ed.push_back(st.u[i] - L.value(e, st.u));
                es.push_back(ds);
            }
        auto slopeAt = [&](double t) {
            double v = 0.0;
            for (std::size_t k = 0; k < ed.size(); ++k)
                v += M.slope(ed[k] + t * es[k]) * es[k];
            return v;
        };

        double lo = 0.0, hi = 1.0;
        double fLo = slope0, fHi = slopeAt(1.0);
        for (int expand = 0; fHi < 0.0 && expand < 60; ++expand) {
            lo = hi;
            fLo = fHi;
            hi *= 2.0;
            fHi = slopeAt(hi);
        }
        if (fHi > 0.0) {
            // Illinois false position on the increasing slope.
            int side = 0;
            for (int it = 0; it < 100; ++it) {
                if (hi - lo <= 1e-10 * hi || -fLo <= 1e-6 * -slope0)
                    break;
                double t = (lo * fHi - hi * fLo) / (fHi - fLo);
                if (!(t > lo && t < hi))
                    t = 0.5 * (lo + hi);
                const double ft = slopeAt(t);
                if (ft <= 0.0) {
                    lo = t;
                    fLo = ft;
                    if (ft == 0.0)
                        break;
                    if (side == -1)
                        fHi *= 0.5;
                    side = -1;
                } else {
                    hi = t;
                    fHi = ft;
                    if (side == 1)
                        fLo *= 0.5;
                    side = 1;
                }
            }
        } else {
            lo = hi;
        }
        // The slope is nonpositive at lo, so the model energy decreases along [0, lo].
        const double t = lo;

        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double nv = std::clamp(st.u[i] + t * s[i], L.lower, L.upper);
            moved = std::max(moved, std::fabs(nv - st.u[i]));
            st.u[i] = nv;
        }
        ++st.iterations;
        const double e = modelEnergy(L, M, st.u);
        const double drop = modelE - e;
        modelE = std::min(modelE, e);
        st.lastStep = moved;
        if (history)
            history->push_back(M.eps == 0.0 ? e : L.energy(st.u));

        if (moved <= stepTol && std::fabs(drop) <= energyRelTol * std::max(e, 1e-300) &&
            (!checkResidual || L.residual(st.u) <= residualTol))
            return true;
        if (t == 0.0 || drop <= 0.0) {
            if (++stalls >= 3)
                return false;
        } else {
            stalls = 0;
        }
    }
    return false;
}

/**
 * Newton driver. For p < 2 the edge potential is smoothed with eps running
 * down to 1e-12 osc before the final unsmoothed polish; a stalled polish is
 * accepted when the smoothed sequence converged.
 */
void newtonSolve(const LocalProblem& L, Iterate& st, double stepTol, double residualTol, double energyRelTol,
                 std::size_t maxIters, std::vector<double>* history) {
    const double osc = std::max(oscillation(L), 1e-300);
    EdgeModel M{L.p, 0.0, osc * 1e-8};
    if (L.p < 2.0) {
        bool ok = true;
        for (double eps = 1e-2 * osc; eps >= 1e-12 * osc; eps *= 1e-2) {
            M.eps = eps;
            ok = newton(L, M, st, std::max(stepTol, 1e-3 * eps), residualTol, energyRelTol, maxIters, history);
        }
        M.eps = 0.0;
        st.energy = L.energy(st.u);
        const bool polished = newton(L, M, st, stepTol, residualTol, energyRelTol, maxIters, history);
        st.converged = polished || (ok && st.lastStep <= stepTol);
        return;
    }
    st.converged = newton(L, M, st, stepTol, residualTol, energyRelTol, maxIters, history);
}

} // namespace

PotentialSolution solvePHarmonic(const DirichletProblem& prob) {
    if (!prob.graph)
        throw std::invalid_argument("Dirichlet problem without a graph");
    const LevelGraph& G = *prob.graph;
    const double p = clampExponent(prob.p);
    LocalProblem L = buildLocal(prob, p);

    if (!L.vars.empty()) {
        if (L.boundaryValues.empty())
            throw std::invalid_argument("Dirichlet problem with an empty boundary");
        VertexSet all = L.vars;
        for (const auto& bv : prob.boundary)
            all.push_back(bv.first);
        std::sort(all.begin(), all.end());
        if (!isConnected(G, all))
            throw std::invalid_argument("domain union boundary is disconnected");
    }

    const double osc = oscillation(L);
    const double oscScale = osc > 0.0 ? osc : std::max(std::fabs(L.upper), 1.0);
    PotentialSolution sol;
    sol.residualTol = prob.tol.residualTol >= 0.0 ? prob.tol.residualTol : 1e-10 * oscScale;
    sol.stepTol = prob.tol.stepTol >= 0.0 ? prob.tol.stepTol : 1e-12 * oscScale;

    Iterate st;
    const std::size_t n = L.size();
    if (prob.initialGuess) {
        if (prob.initialGuess->level() != G.level())
            throw std::invalid_argument("initial guess level mismatch");
        st.u.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            st.u[i] = (*prob.initialGuess)[L.vars[i]];
        clampInto(L, st.u);
    } else if (n > 0) {
        double mean = 0.0;
        for (double b : L.boundaryValues)
            mean += b;
        mean /= static_cast<double>(L.boundaryValues.size());
        st.u.assign(n, mean);
        if (p != 2.0 || prob.method == SolverMethod::Newton) {
            const double target = p == 2.0 ? sol.stepTol * 1e-2 : 1e-6 * oscScale;
            harmonicSolve(L, st.u, target, 20 * n + 1000);
            clampInto(L, st.u);
        }
    }

    std::vector<double>* history = prob.recordHistory ? &sol.energyHistory : nullptr;
    if (n > 0 && osc == 0.0) {
        st.u.assign(n, L.upper);
        st.converged = true;
    } else if (n > 0) {
        st.energy = L.energy(st.u);
        if (history)
            history->push_back(st.energy);
        if (prob.method == SolverMethod::CoordinateDescent)
            coordinateDescent(L, st, sol.stepTol, sol.residualTol, prob.tol.energyRelTol, prob.tol.maxIters, history);
        else
            newtonSolve(L, st, sol.stepTol, sol.residualTol, prob.tol.energyRelTol, prob.tol.maxIters, history);
    } else {
        st.converged = true;
    }

    sol.values = GraphFunction(G.level(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        sol.values[L.vars[i]] = st.u[i];
    for (const auto& [v, value] : prob.boundary)
        sol.values[v] = value;
    sol.energy = n > 0 ? L.energy(st.u) : L.boundaryEnergy;
    sol.residual = n > 0 ? L.residual(st.u) : 0.0;
    sol.localDisplacement = n > 0 ? L.localDisplacement(st.u) : 0.0;
    sol.iterations = st.iterations;
    sol.converged = st.converged;
    return sol;
}

CapacityResult capacity(const LevelGraph& G, std::span<const Vertex> A0, std::span<const Vertex> A1,
                        std::span<const Vertex> A2, double p, const SolverTolerances& tol, SolverMethod method) {
    if (A0.empty() || A1.empty())
        throw std::invalid_argument("capacity: plates must be nonempty");
    const std::size_t N = G.numberOfVertices();
    std::vector<char> inA2(N, A2.empty() ? 1 : 0);
    for (const Vertex v : A2) {
        if (v >= N)
            throw std::out_of_range("capacity: vertex out of range");
        inA2[v] = 1;
    }
    std::vector<char> plate(N, 0);
    DirichletProblem prob;
    prob.graph = &G;
    prob.p = p;
    prob.tol = tol;
    prob.method = method;
    for (const Vertex v : A0) {
        if (v >= N || !inA2[v])
            throw std::invalid_argument("capacity: A0 not contained in A2");
        if (plate[v])
            continue;
        plate[v] = 1;
        prob.boundary.emplace_back(v, 0.0);
    }
    for (const Vertex v : A1) {
        if (v >= N || !inA2[v])
            throw std::invalid_argument("capacity: A1 not contained in A2");
        if (plate[v] == 1)
            throw std::invalid_argument("capacity: A0 and A1 intersect");
        if (plate[v])
            continue;
        plate[v] = 2;
        prob.boundary.emplace_back(v, 1.0);
    }
    for (std::size_t v = 0; v < N; ++v)
        if (inA2[v] && !plate[v])
            prob.domain.push_back(static_cast<Vertex>(v));

    CapacityResult res;
    res.potential = solvePHarmonic(prob);
    res.value = res.potential.energy;
    return res;
}

} // namespace carpet
