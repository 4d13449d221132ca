/*
 * sobolev.hpp
 *
 * Cell functions on the carpet: averaging and restriction operators,
 * normalized energies, the seminorm proxy, weak monotonicity,
 * Korevaar-Schoen energies and discrete Poincare constants.
 */

#ifndef CARPET_SOBOLEV_HPP_
#define CARPET_SOBOLEV_HPP_

#include <carpet/level_graph.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace carpet {

/// M_n f: exact means over the level-n subtrees (n <= f.level()).
GraphFunction averageToLevel(const CellFunction& f, Level n);

/// f o F_w: the values under w, reindexed by stripping the prefix.
CellFunction restrictToCell(const CellFunction& f, const Word& w);

/// rho^n E_p^{G_n}(M_n f); zero at n = 0.
double normalizedEnergy(const CellFunction& f, Level n, double p, double rho);

struct SeminormReport {
    double p = 2.0;
    double rho = 1.0;
    Level resolution = 0;
    /// normalized energy at n = 1..resolution (index n - 1).
    std::vector<double> energies;
    double seminorm = 0.0;
    /// max over k < l of E^(k) / E^(l) with nonzero denominator, 1 if none.
    double weakMonotonicity = 1.0;
    Level wmLow = 0, wmHigh = 0;
};

SeminormReport seminormReport(const CellFunction& f, double p, double rho);

/**
 * Korevaar-Schoen energy at radius lambda (graph units of G_m, m = f.level()):
 * r^{-dw} 8^{-m} sum_x mean_{y in B[x, lambda]} |f(x) - f(y)|^p with r = lambda 3^{-m}
 * and closed graph balls.
 */
double ksEnergy(const CellFunction& f, double p, double lambda, double dw);

/// Sample a cell function from a closed form in the cell centers ([-1,1]^2).
CellFunction sampleCellCenters(Level m, const std::function<double(double, double)>& g);

struct SuiteMember {
    std::string name;
    CellFunction f;
};

struct SuiteOptions {
    std::uint64_t seed = 1;
    std::size_t randomCount = 3;
    bool withPotential = true;
    /// The face potential is solved at min(m, potentialLevel) and lifted.
    Level potentialLevel = 5;
};

/// x, y, xy, seeded uniform random functions and the left/right face potential.
std::vector<SuiteMember> defaultSuite(Level m, double p, const SuiteOptions& opts = {});

struct Ball {
    Vertex center = 0;
    double R = 1.0;
};

/// Centers drawn uniformly from W_n.
std::vector<Ball> sampleBalls(Level n, double R, std::size_t count, std::uint64_t seed);
/// Centers w 1...1 for every w in W_k: the same points of K at every n >= k.
std::vector<Ball> matchedBalls(Level n, Level k, double R);

struct PoincareReport {
    Level level = 0;
    double p = 2.0;
    double dw = 0.0;
    /// max ratio sum_B |f - f_B|^p / (R^dw E_{p, B(x, 2R)}(f)).
    double constant = 0.0;
    std::size_t suiteIndex = 0;
    Ball ball;
    std::vector<double> perFunction;
};

/// Functions finer than n are averaged to level n. Open balls.
PoincareReport poincareConstant(Level n, double p, double dw, const std::vector<CellFunction>& suite,
                                const std::vector<Ball>& balls, unsigned threads = 1);

} // namespace carpet

#endif // CARPET_SOBOLEV_HPP_
