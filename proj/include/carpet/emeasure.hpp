/*
 * emeasure.hpp
 *
 * Cell masses of the discrete p-energy measure of a cell function and
 * checks of their algebraic identities.
 */

#ifndef CARPET_EMEASURE_HPP_
#define CARPET_EMEASURE_HPP_

#include <carpet/sobolev.hpp>

#include <functional>
#include <ostream>
#include <vector>

namespace carpet {

/**
 * masses[w] = rho^m (energy of f on the G_m edges inside the subtree of w),
 * one entry per level-n word; crossingDefect = rho^m (energy on edges
 * joining distinct level-n subtrees).
 */
struct EnergyMeasureTable {
    double p = 2.0;
    double rho = 1.0;
    Level resolution = 0;
    Level level = 0;
    std::vector<double> masses;
    double crossingDefect = 0.0;

    double totalMass() const;
    /// totalMass() + crossingDefect.
    double total() const;
};

EnergyMeasureTable energyMeasureTable(const CellFunction& f, double p, double rho, Level n);

struct ConsistencyReport {
    /// mass_n(w) - sum of the child masses, per level-n word.
    std::vector<double> defects;
    /// rho^m times the energy on level-(n+1) crossing edges inside w.
    std::vector<double> expected;
    double maxRelativeError = 0.0;
    double minDefect = 0.0;
};

/// coarse at level n, fine at level n + 1, both built from f.
ConsistencyReport consistencyCheck(const EnergyMeasureTable& coarse, const EnergyMeasureTable& fine,
                                   const CellFunction& f);

/// Largest entry of |table(a f + b) - |a|^p table(f)|, relative to the largest entry.
double affineChainRuleCheck(const CellFunction& f, double a, double b, double p, double rho, Level n);

struct ChainRulePoint {
    Level m = 0;
    double maxRelativeError = 0.0;
};

/**
 * Compares table(Psi o f) with the prediction that weights every fine edge
 * by the mean of |Psi'(f)|^p at its ends, for f sampled at each m in sweep.
 */
std::vector<ChainRulePoint> smoothChainRuleProbe(const std::function<double(double, double)>& sampler,
                                                 const std::function<double(double)>& psi,
                                                 const std::function<double(double)>& dpsi, double p, double rho,
                                                 Level n, const std::vector<Level>& sweep);

/// max_w |table(f o tau)(w) - table(f)(tau w)|, relative to the largest mass.
double symmetryPushforwardCheck(const CellFunction& f, const SymmetryElement& phi, double p, double rho, Level n);

/// (sum g m(f1)) ^ 1/p + (sum g m(f2)) ^ 1/p - (sum g m(f1 + f2)) ^ 1/p for level-n weights g >= 0.
double triangleInequalityCheck(const CellFunction& f1, const CellFunction& f2, std::span<const double> g, double p,
                               double rho, Level n);

struct LipschitzReport {
    double totalBefore = 0.0;
    double totalAfter = 0.0;
    /// Cells where the clamped mass exceeds the original one.
    std::size_t cellViolations = 0;
    double worstCellRatio = 0.0;
};

/// Masses of clamp(f, lo, hi) against those of f.
LipschitzReport lipschitzContraction(const CellFunction& f, double lo, double hi, double p, double rho, Level n);

/// CSV rows "word,mass" with 17 significant digits.
void writeTableCsv(std::ostream& out, const EnergyMeasureTable& table);

} // namespace carpet

#endif // CARPET_EMEASURE_HPP_
