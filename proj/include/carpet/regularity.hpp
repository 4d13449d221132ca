/*
 * regularity.hpp
 *
 * Harnack ratios of p-harmonic functions on graph balls, the
 * log-Caccioppoli inequality and cutoff-function profiles.
 */

#ifndef CARPET_REGULARITY_HPP_
#define CARPET_REGULARITY_HPP_

#include <carpet/dirichlet.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace carpet {

enum class BoundarySampler {
    Uniform,  ///< seeded uniform values in [eps, 1]
    Spike,    ///< 1 at one seeded boundary vertex, eps elsewhere
    Ramp,     ///< linear in the x coordinate of the cell center, from eps to 1
    Constant, ///< 1 everywhere
};

BoundarySampler parseSampler(const std::string& name);
std::string samplerName(BoundarySampler s);

struct HarnackOptions {
    double deltaH = 0.25;
    double eps = 1e-3;
    SolverTolerances tol;
    unsigned threads = 1;
};

struct HarnackReport {
    Level level = 0;
    double p = 2.0;
    Vertex center = 0;
    double R = 0.0;
    double deltaH = 0.25;
    BoundarySampler sampler = BoundarySampler::Uniform;
    std::size_t trial = 0;
    double hMin = 0.0, hMax = 0.0;
    /// hMax / hMin on B(center, deltaH R); +inf when hMin <= 0.
    double ratio = 1.0;
    double residual = 0.0;
    bool converged = false;
    bool anomaly = false;
};

/**
 * Solves for h p-harmonic in B(center, R) with sampled nonnegative data on
 * its exterior boundary, once per trial, and records max/min of h over
 * B(center, deltaH R).
 */
std::vector<HarnackReport> harnackReport(Level n, double p, Vertex center, double R, BoundarySampler sampler,
                                         std::size_t trials, std::uint64_t seed, const HarnackOptions& opts = {});

/// Boundary values for one trial (vertices ascending).
std::vector<std::pair<Vertex, double>> sampleBoundary(const LevelGraph& G, std::span<const Vertex> boundary,
                                                      BoundarySampler sampler, double eps, std::uint64_t seed);

struct LogCaccioppoliReport {
    double p = 2.0;
    /// (1/2) sum over edges of E(closure A) of min(phi^p) |log h(x) - log h(y)|^p.
    double logEnergy = 0.0;
    /// (1/(2(p-1))) sum_x eta(x) phi(x)^p h(x)^(1-p) deg(x) with eta = -Laplacian_p h.
    double etaTerm = 0.0;
    /// 2^(p-1) / (p (p-1)) E_p(phi).
    double bound = 0.0;
    /// bound - logEnergy - etaTerm.
    double slack = 0.0;
};

/// phi must take values in [0, 1] and vanish off A; h must be positive wherever it is read.
LogCaccioppoliReport logCaccioppoliCheck(const LevelGraph& G, double p, const GraphFunction& h,
                                         const GraphFunction& phi, std::span<const Vertex> A);

struct HoelderPair {
    double distanceRatio = 0.0;
    double oscillation = 0.0;
};

struct CutoffProfile {
    Level level = 0;
    double p = 2.0;
    Vertex z = 0;
    double R = 0.0;
    double outerFactor = 2.0;
    double dw = 0.0;
    double energy = 0.0;
    std::size_t innerBallSize = 0;
    /// energy R^dw / #B(z, R).
    double energyBoundRatio = 0.0;
    std::vector<HoelderPair> pairs;
    /// Least squares slope of log oscillation against log(distance / R); NaN without pairs.
    double theta = 0.0;
    GraphFunction potential;
    double residual = 0.0;
    bool converged = false;
};

struct CutoffOptions {
    double outerFactor = 2.0;
    std::size_t maxPairs = 2000;
    std::uint64_t seed = 1;
    SolverTolerances tol;
};

/// Equilibrium potential of cap(B(z, R), complement of B(z, K R)) and its profile.
CutoffProfile cutoffProfile(Level n, double p, Vertex z, double R, double dw, const CutoffOptions& opts = {});

} // namespace carpet

#endif // CARPET_REGULARITY_HPP_
