/*
 * emeasure.cpp
 */

#include <carpet/emeasure.hpp>
#include <carpet/function_io.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace carpet {

double EnergyMeasureTable::totalMass() const {
    double s = 0.0;
    for (const double m : masses)
        s += m;
    return s;
}

double EnergyMeasureTable::total() const { return totalMass() + crossingDefect; }

EnergyMeasureTable energyMeasureTable(const CellFunction& f, double p, double rho, Level n) {
    const Level m = f.level();
    if (n < 0 || n > m)
        throw std::invalid_argument("energyMeasureTable needs 0 <= n <= resolution");
    EnergyMeasureTable t;
    t.p = p;
    t.rho = rho;
    t.resolution = m;
    t.level = n;
    t.masses.assign(pow8(n), 0.0);
    if (m == 0)
        return t;
    const auto G = sharedGraph(m);
    const int shift = 3 * (m - n);
    double defect = 0.0;
    G->forEdges([&](Vertex u, Vertex v, bool) {
        const double e = powAbs(f[u] - f[v], p);
        if ((u >> shift) == (v >> shift))
            t.masses[u >> shift] += e;
        else
            defect += e;
    });
    const double scale = std::pow(rho, m);
    for (double& x : t.masses)
        x *= scale;
    t.crossingDefect = defect * scale;
    return t;
}

namespace {

double largest(std::span<const double> xs) {
    double s = 0.0;
    for (const double x : xs)
        s = std::max(s, std::fabs(x));
    return s;
}

double relative(double err, double scale) { return scale > 0.0 ? err / scale : err; }

} // namespace

ConsistencyReport consistencyCheck(const EnergyMeasureTable& coarse, const EnergyMeasureTable& fine,
                                   const CellFunction& f) {
    if (coarse.p != fine.p || coarse.rho != fine.rho || coarse.resolution != fine.resolution ||
        fine.level != coarse.level + 1 || f.level() != coarse.resolution)
        throw std::invalid_argument("consistencyCheck: tables do not match");
    const Level m = coarse.resolution, n = coarse.level;
    ConsistencyReport rep;
    rep.defects.assign(coarse.masses.size(), 0.0);
    rep.expected.assign(coarse.masses.size(), 0.0);
    for (std::size_t w = 0; w < coarse.masses.size(); ++w) {
        double children = 0.0;
        for (std::size_t k = 0; k < 8; ++k)
            children += fine.masses[8 * w + k];
        rep.defects[w] = coarse.masses[w] - children;
    }
    const auto G = sharedGraph(m);
    const int shift = 3 * (m - n);
    G->forEdges([&](Vertex u, Vertex v, bool) {
        if ((u >> shift) == (v >> shift) && (u >> (shift - 3)) != (v >> (shift - 3)))
            rep.expected[u >> shift] += powAbs(f[u] - f[v], coarse.p);
    });
    const double scale = std::pow(coarse.rho, m);
    for (double& x : rep.expected)
        x *= scale;
    const double ref = largest(coarse.masses);
    rep.minDefect = rep.defects.empty() ? 0.0 : rep.defects[0];
    for (std::size_t w = 0; w < rep.defects.size(); ++w) {
        rep.maxRelativeError = std::max(rep.maxRelativeError, relative(std::fabs(rep.defects[w] - rep.expected[w]), ref));
        rep.minDefect = std::min(rep.minDefect, rep.defects[w]);
    }
    return rep;
}

double affineChainRuleCheck(const CellFunction& f, double a, double b, double p, double rho, Level n) {
    CellFunction g = f;
    for (double& v : g.values())
        v = a * v + b;
    const EnergyMeasureTable tf = energyMeasureTable(f, p, rho, n);
    const EnergyMeasureTable tg = energyMeasureTable(g, p, rho, n);
    const double factor = powAbs(a, p);
    const double ref = std::max(factor * largest(tf.masses), factor * tf.crossingDefect);
    double err = relative(std::fabs(tg.crossingDefect - factor * tf.crossingDefect), ref);
    for (std::size_t w = 0; w < tf.masses.size(); ++w)
        err = std::max(err, relative(std::fabs(tg.masses[w] - factor * tf.masses[w]), ref));
    return err;
}

std::vector<ChainRulePoint> smoothChainRuleProbe(const std::function<double(double, double)>& sampler,
                                                 const std::function<double(double)>& psi,
                                                 const std::function<double(double)>& dpsi, double p, double rho,
                                                 Level n, const std::vector<Level>& sweep) {
    std::vector<ChainRulePoint> out;
    for (const Level m : sweep) {
        if (m < n || m < 1)
            throw std::invalid_argument("smoothChainRuleProbe needs m >= max(n, 1)");
        const CellFunction f = sampleCellCenters(m, sampler);
        CellFunction g(m);
        for (std::size_t i = 0; i < f.size(); ++i)
            g[i] = psi(f[i]);
        const EnergyMeasureTable tg = energyMeasureTable(g, p, rho, n);

        std::vector<double> predicted(tg.masses.size(), 0.0);
        const auto G = sharedGraph(m);
        const int shift = 3 * (m - n);
        G->forEdges([&](Vertex u, Vertex v, bool) {
            if ((u >> shift) != (v >> shift))
                return;
            const double w = 0.5 * (powAbs(dpsi(f[u]), p) + powAbs(dpsi(f[v]), p));
            predicted[u >> shift] += w * powAbs(f[u] - f[v], p);
        });
        const double scale = std::pow(rho, m);
        ChainRulePoint pt{m, 0.0};
        for (std::size_t w = 0; w < predicted.size(); ++w) {
            const double expect = predicted[w] * scale;
            const double diff = std::fabs(tg.masses[w] - expect);
            if (expect > 0.0)
                pt.maxRelativeError = std::max(pt.maxRelativeError, diff / expect);
            else if (diff > 0.0)
                pt.maxRelativeError = std::numeric_limits<double>::infinity();
        }
        out.push_back(pt);
    }
    return out;
}

double symmetryPushforwardCheck(const CellFunction& f, const SymmetryElement& phi, double p, double rho, Level n) {
    const EnergyMeasureTable tf = energyMeasureTable(f, p, rho, n);
    const EnergyMeasureTable tg = energyMeasureTable(composeWithSymmetry(f, phi), p, rho, n);
    const double ref = largest(tf.masses);
    double err = 0.0;
    for (std::size_t w = 0; w < tf.masses.size(); ++w)
        err = std::max(err, relative(std::fabs(tg.masses[w] - tf.masses[applySymmetryToCode(phi, n, w)]), ref));
    return err;
}

double triangleInequalityCheck(const CellFunction& f1, const CellFunction& f2, std::span<const double> g, double p,
                               double rho, Level n) {
    if (f1.level() != f2.level())
        throw std::invalid_argument("triangleInequalityCheck: resolutions differ");
    if (g.size() != pow8(n))
        throw std::invalid_argument("triangleInequalityCheck: weights must have one entry per level-n cell");
    for (const double x : g)
        if (!(x >= 0.0))
            throw std::invalid_argument("triangleInequalityCheck: weights must be nonnegative");
    CellFunction s = f1;
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] += f2[i];
    auto integral = [&](const CellFunction& f) {
        const EnergyMeasureTable t = energyMeasureTable(f, p, rho, n);
        double acc = 0.0;
        for (std::size_t w = 0; w < g.size(); ++w)
            acc += g[w] * t.masses[w];
        return std::pow(acc, 1.0 / p);
    };
    return integral(f1) + integral(f2) - integral(s);
}

LipschitzReport lipschitzContraction(const CellFunction& f, double lo, double hi, double p, double rho, Level n) {
    if (lo > hi)
        throw std::invalid_argument("lipschitzContraction needs lo <= hi");
    CellFunction c = f;
    for (double& v : c.values())
        v = std::clamp(v, lo, hi);
    const EnergyMeasureTable before = energyMeasureTable(f, p, rho, n);
    const EnergyMeasureTable after = energyMeasureTable(c, p, rho, n);
    LipschitzReport rep;
    rep.totalBefore = before.total();
    rep.totalAfter = after.total();
    for (std::size_t w = 0; w < before.masses.size(); ++w) {
        if (after.masses[w] > before.masses[w])
            ++rep.cellViolations;
        if (before.masses[w] > 0.0)
            rep.worstCellRatio = std::max(rep.worstCellRatio, after.masses[w] / before.masses[w]);
    }
    return rep;
}

void writeTableCsv(std::ostream& out, const EnergyMeasureTable& table) {
    out << "word,mass\n";
    for (std::size_t w = 0; w < table.masses.size(); ++w)
        out << Word(table.level, w).toString() << ',' << formatReal(table.masses[w]) << '\n';
}

} // namespace carpet
