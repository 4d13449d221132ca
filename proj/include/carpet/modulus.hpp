/*
 * modulus.hpp
 *
 * Combinatorial vertex p-modulus of path families, computed by constraint
 * generation: a barrier Newton solve over the active paths, then a
 * rho-shortest path search for violated ones.
 */

#ifndef CARPET_MODULUS_HPP_
#define CARPET_MODULUS_HPP_

#include <carpet/level_graph.hpp>

#include <vector>

namespace carpet {

struct ModulusOptions {
    /// Stop once every path has rho-length >= 1 - epsPath.
    double epsPath = 1e-6;
    std::size_t maxRounds = 20000;
    /// Relative primal-dual gap of the inner solve.
    double innerTol = 1e-12;
};

struct ModulusResult {
    /// sum of rho^p for the returned admissible density (an upper bound).
    double value = 0.0;
    /// Dual objective of the final multipliers (a lower bound).
    double lowerBound = 0.0;
    /// Admissible density, 0 outside A2.
    GraphFunction rho;
    /// 1 - (shortest rho-length) before rescaling.
    double certificateGap = 1.0;
    std::vector<VertexSet> activePaths;
    std::size_t rounds = 0;
    bool converged = false;
};

/// Mod_p(Path(A0, A1; A2)). An empty A2 stands for all vertices.
ModulusResult vertexModulus(const LevelGraph& G, std::span<const Vertex> A0, std::span<const Vertex> A1,
                            std::span<const Vertex> A2, double p, const ModulusOptions& opts = {});

struct FamilyModulus {
    double value = 0.0;
    double lowerBound = 0.0;
    /// Density on the vertices of the family, indexed like vertices.
    std::vector<double> rho;
    VertexSet vertices;
    bool converged = false;
};

/// Mod_p of an explicit finite path family (no graph required).
FamilyModulus familyModulus(const std::vector<VertexSet>& paths, double p, const ModulusOptions& opts = {});

struct WeightedPath {
    VertexSet path;
    double length = 0.0;
};

/**
 * A path from A0 to A1 inside A2 minimizing the sum of rho over its
 * vertices, endpoints included. Ties go to the lexicographically smaller
 * word. rho is indexed by vertex code.
 */
WeightedPath shortestVertexWeightedPath(const LevelGraph& G, std::span<const double> rho, std::span<const Vertex> A0,
                                        std::span<const Vertex> A1, std::span<const Vertex> A2);

} // namespace carpet

#endif // CARPET_MODULUS_HPP_
