/*
 * level_graph.hpp
 *
 * The approximation graphs G_n = (W_n, E_n) of the carpet, functions on
 * their vertices, discrete p-energies and the p-Laplacian.
 */

#ifndef CARPET_LEVEL_GRAPH_HPP_
#define CARPET_LEVEL_GRAPH_HPP_

#include <carpet/word.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace carpet {

/// Vertex of G_n: the base-8 code of a level-n word.
using Vertex = std::uint32_t;
using VertexSet = std::vector<Vertex>;

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

enum class GraphFlavor {
    Touching,    ///< E_n: cells intersect
    EdgeSharing, ///< E_n^#: cells share a side
};

/// Default cap on graph levels; overridden by CARPET_ENERGY_MAX_LEVEL.
inline constexpr Level kDefaultMaxLevel = 7;
Level maxFeasibleLevel();

/**
 * Immutable CSR adjacency of G_n. Neighbor lists are sorted by code; each
 * entry carries whether the two cells share a side (corner-only
 * neighbors exist only in the Touching flavor).
 */
class LevelGraph {
public:
    static LevelGraph build(Level n, GraphFlavor flavor = GraphFlavor::Touching);

    Level level() const noexcept { return level_; }
    GraphFlavor flavor() const noexcept { return flavor_; }
    std::size_t numberOfVertices() const noexcept { return offsets_.size() - 1; }
    std::size_t numberOfEdges() const noexcept { return targets_.size() / 2; }
    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::size_t maxDegree() const noexcept { return maxDegree_; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {targets_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    /// Parallel to neighbors(v): 1 if the pair shares a side, 0 for corner-only.
    std::span<const std::uint8_t> sharesSide(Vertex v) const {
        return {sharing_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    /// Calls f(u, v, sharesSide) once per undirected edge, u < v, in ascending order.
    template <typename F>
    void forEdges(F&& f) const {
        const std::size_t n = numberOfVertices();
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t k = offsets_[u]; k < offsets_[u + 1]; ++k)
                if (targets_[k] > u)
                    f(static_cast<Vertex>(u), targets_[k], sharing_[k] != 0);
    }

    bool hasEdge(Vertex u, Vertex v) const;
    Word word(Vertex v) const { return Word(level_, v); }

private:
    Level level_ = 0;
    GraphFlavor flavor_ = GraphFlavor::Touching;
    std::vector<std::size_t> offsets_{0};
    std::vector<Vertex> targets_;
    std::vector<std::uint8_t> sharing_;
    std::size_t maxDegree_ = 0;
};

inline LevelGraph buildGraph(Level n, GraphFlavor flavor = GraphFlavor::Touching) {
    return LevelGraph::build(n, flavor);
}

/**
 * One real value per vertex of G_n, indexed by word code. Doubles as the
 * cell-function representation (one cell average per level-n cell).
 */
class GraphFunction {
public:
    GraphFunction() = default;
    explicit GraphFunction(Level level, double fill = 0.0);
    GraphFunction(Level level, std::vector<double> values);

    Level level() const noexcept { return level_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool allFinite() const;

private:
    Level level_ = 0;
    std::vector<double> values_{0.0};
};

using CellFunction = GraphFunction;

/// Dense membership mask of a vertex set.
std::vector<char> membershipMask(std::size_t vertexCount, std::span<const Vertex> set);

/// |t|^p with fast paths for the common exponents.
inline double powAbs(double t, double p) {
    const double a = std::fabs(t);
    if (p == 2.0)
        return a * a;
    if (p == 1.0)
        return a;
    if (a == 0.0)
        return 0.0;
    return std::pow(a, p);
}

/// sgn(t) |t|^q.
inline double signedPow(double t, double q) {
    if (t == 0.0)
        return 0.0;
    const double m = q == 1.0 ? std::fabs(t) : std::pow(std::fabs(t), q);
    return t > 0 ? m : -m;
}

/// Sum over edges of G of |f(x) - f(y)|^p.
double pEnergy(const LevelGraph& G, const GraphFunction& f, double p);
/// Sum over edges with both endpoints in A.
double pEnergy(const LevelGraph& G, const GraphFunction& f, double p, std::span<const Vertex> A);

/// E_p(f; g) = sum over edges of sgn(f(y)-f(x)) |f(y)-f(x)|^{p-1} (g(y)-g(x)).
double pEnergyPairing(const LevelGraph& G, const GraphFunction& f, const GraphFunction& g, double p);

/// (1/deg x) sum_{y ~ x} sgn(f(y)-f(x)) |f(y)-f(x)|^{p-1}.
double pLaplacian(const LevelGraph& G, const GraphFunction& f, double p, Vertex x);
GraphFunction pLaplacian(const LevelGraph& G, const GraphFunction& f, double p);

/// Conditional expectation onto level k <= f.level(): plain means over descendant blocks.
GraphFunction coarsen(const GraphFunction& f, Level k);

/// Piecewise-constant lift of f to level m >= f.level().
GraphFunction refine(const GraphFunction& f, Level m);

/// (f o tau_Phi)(v) = f(tau_Phi(v)).
GraphFunction composeWithSymmetry(const GraphFunction& f, const SymmetryElement& phi);

/// BFS distances from source (kUnreachable where not reachable).
std::vector<std::uint32_t> bfsDistances(const LevelGraph& G, Vertex source);
/// Multi-source BFS distance to the nearest element of sources.
std::vector<std::uint32_t> bfsDistances(const LevelGraph& G, std::span<const Vertex> sources);

/// Open ball {y : d(center, y) < R}, ascending.
VertexSet graphBall(const LevelGraph& G, Vertex center, double R);
/// Closed ball {y : d(center, y) <= R}, ascending.
VertexSet closedGraphBall(const LevelGraph& G, Vertex center, double R);

/**
 * Repeated truncated-BFS ball queries on one graph. Members come in BFS
 * order; the span is valid until the next scan.
 */
class BallScanner {
public:
    explicit BallScanner(const LevelGraph& G);

    std::span<const Vertex> scan(Vertex center, double R, bool closed);
    /// Distance from the last center, for members of the last ball.
    std::uint32_t distance(Vertex v) const { return dist_[v]; }

private:
    const LevelGraph* G_;
    std::vector<std::uint32_t> dist_;
    VertexSet members_;
};

/// Process-wide cache of touching-flavor graphs; thread-safe.
std::shared_ptr<const LevelGraph> sharedGraph(Level n);

/// Exterior boundary {x not in A : x ~ y for some y in A}, ascending.
VertexSet exteriorBoundary(const LevelGraph& G, std::span<const Vertex> A);

/// Whether the induced subgraph on A is connected (the empty set is not).
bool isConnected(const LevelGraph& G, std::span<const Vertex> A);

/// Exact graph diameter (bounding-eccentricities BFS scheme).
std::uint32_t diameter(const LevelGraph& G);

/**
 * BFS distances memoized for explicitly requested sources. Safe to share
 * between threads; results do not depend on request order.
 */
class DistanceCache {
public:
    explicit DistanceCache(const LevelGraph& G) : G_(&G) {}

    std::shared_ptr<const std::vector<std::uint32_t>> from(Vertex source) const;
    std::uint32_t distance(Vertex u, Vertex v) const { return (*from(u))[v]; }
    std::size_t cachedSources() const;

private:
    const LevelGraph* G_;
    mutable std::mutex mutex_;
    mutable std::map<Vertex, std::shared_ptr<const std::vector<std::uint32_t>>> cache_;
};

} // namespace carpet

#endif // CARPET_LEVEL_GRAPH_HPP_
