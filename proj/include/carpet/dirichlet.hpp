/*
 * dirichlet.hpp
 *
 * p-harmonic Dirichlet problems on subsets of G_n and p-capacities.
 */

#ifndef CARPET_DIRICHLET_HPP_
#define CARPET_DIRICHLET_HPP_

#include <carpet/level_graph.hpp>

#include <optional>
#include <utility>
#include <vector>

namespace carpet {

inline constexpr double kMinExponent = 1.05;
inline constexpr double kMaxExponent = 16.0;

/// Clamps p into the supported range [1.05, 16].
double clampExponent(double p);

enum class SolverMethod {
    Newton,            ///< damped Newton with exact line search, PCG inner solves
    CoordinateDescent, ///< cyclic Gauss-Seidel sweeps of exact 1-D minimizations
};

struct SolverTolerances {
    /// Max |Delta_p| over the domain; negative selects 1e-10 * osc(boundary).
    double residualTol = -1.0;
    double energyRelTol = 1e-12;
    std::size_t maxIters = 100000;
    /// Max change of a domain value under exact local minimization;
    /// negative selects 1e-12 * osc(boundary).
    double stepTol = -1.0;
};

struct DirichletProblem {
    const LevelGraph* graph = nullptr;
    double p = 2.0;
    std::vector<std::pair<Vertex, double>> boundary;
    VertexSet domain;
    SolverTolerances tol;
    SolverMethod method = SolverMethod::Newton;
    /// Optional starting values (level must match the graph).
    std::optional<GraphFunction> initialGuess;
    bool recordHistory = false;
};

struct PotentialSolution {
    /// Solution on domain and boundary, 0 elsewhere.
    GraphFunction values;
    /// E_p over edges with both ends in domain and boundary.
    double energy = 0.0;
    /// max over the domain of |Delta_p|.
    double residual = 0.0;
    /// max over the domain of |u(x) - argmin of the local problem at x|.
    double localDisplacement = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double residualTol = 0.0;
    double stepTol = 0.0;
    /// Energy after every iteration when requested.
    std::vector<double> energyHistory;
};

PotentialSolution solvePHarmonic(const DirichletProblem& prob);

/// argmin_t sum_j |t - a_j|^p (safeguarded Newton with bisection fallback).
double localMinimizer(std::span<const double> a, double p);

struct CapacityResult {
    double value = 0.0;
    PotentialSolution potential;
};

/// cap_p(A0, A1; A2). An empty A2 stands for all vertices.
CapacityResult capacity(const LevelGraph& G, std::span<const Vertex> A0, std::span<const Vertex> A1,
                        std::span<const Vertex> A2, double p, const SolverTolerances& tol = {},
                        SolverMethod method = SolverMethod::Newton);

} // namespace carpet

#endif // CARPET_DIRICHLET_HPP_
