/*
 * scaling.hpp
 *
 * Face and annulus p-capacities of G_n, the p-scaling factor rho(p), the
 * p-walk dimension and ball modulus probes.
 */

#ifndef CARPET_SCALING_HPP_
#define CARPET_SCALING_HPP_

#include <carpet/dirichlet.hpp>
#include <carpet/modulus.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace carpet {

/// log 8 / log 3.
double fractalDimension();
/// log(8 rho) / log 3.
double walkDimension(double rho);

/// Cells touching faces a and b; a corner cell shared by adjacent faces is left off both.
std::pair<VertexSet, VertexSet> facePlates(Level n, Face a, Face b);

/// cap_p^{G_n}(W_n[face a], W_n[face b]) with A2 = all vertices.
CapacityResult faceCapacity(double p, Level n, Face a = Face::Left, Face b = Face::Right,
                            const SolverTolerances& tol = {}, SolverMethod method = SolverMethod::Newton);

/**
 * cap_p in G_{|w|+n} between the descendants of w and the complement of the
 * descendants of the open radius-2 ball B_{d_|w|}(w, 2).
 */
CapacityResult annulusCapacity(double p, const Word& w, Level n, const SolverTolerances& tol = {});

struct AnnulusSample {
    Word word;
    Level depth = 0;
    double value = 0.0;
};

struct ScalingOptions {
    SolverTolerances tol;
    unsigned threads = 1;
    /// Annulus capacities of all w in W_1 for depths 1..annulusMaxDepth (0 disables).
    Level annulusMaxDepth = 0;
};

struct ScalingReport {
    double p = 2.0;
    std::vector<Level> levels;
    /// Face capacity per level.
    std::vector<double> faceCaps;
    std::vector<double> faceResiduals;
    std::vector<std::size_t> faceIterations;
    std::vector<AnnulusSample> annulusCaps;
    /// faceCaps[n-1] / faceCaps[n] for consecutive levels.
    std::vector<double> rhoEstimates;
    double rho = 0.0;
    double dw = 0.0;
    double df = 0.0;
    bool converged = true;
};

/// Face capacities for n = 1..nMax and the consecutive-ratio estimate of rho(p).
ScalingReport estimateRho(double p, Level nMax, const ScalingOptions& opts = {});

struct BallPair {
    Vertex x = 0, y = 0;
    std::uint32_t distance = 0;
    double modulus = 0.0;
    double normalized = 0.0;
    double certificateGap = 0.0;
};

struct BallLoewnerReport {
    double p = 2.0;
    Level level = 0;
    double R = 1.0, kappa = 1.0, dw = 0.0;
    std::vector<BallPair> pairs;
    /// min over pairs of Mod * R^(dw - df).
    double normalizedMin = 0.0;
    std::size_t argmin = 0;
};

/**
 * Samples ball pairs B(x, R), B(y, R) with 2R - 1 <= d(x, y) <= kappa R
 * (disjoint open balls) and computes the vertex modulus of paths joining
 * them inside B(x, (kappa + 2) R).
 */
BallLoewnerReport ballLoewnerProbe(double p, Level n, double R, double kappa, std::size_t trials, std::uint64_t seed,
                                   double dw, const ModulusOptions& opts = {}, unsigned threads = 1);

} // namespace carpet

#endif // CARPET_SCALING_HPP_
