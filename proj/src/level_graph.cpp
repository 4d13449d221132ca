/*
 * level_graph.cpp
 */

#include <carpet/level_graph.hpp>

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <stdexcept>
#include <string>

namespace carpet {

Level maxFeasibleLevel() {
    if (const char* env = std::getenv("CARPET_ENERGY_MAX_LEVEL")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 10)
            return static_cast<Level>(v);
    }
    return kDefaultMaxLevel;
}

LevelGraph LevelGraph::build(Level n, GraphFlavor flavor) {
    const Level cap = maxFeasibleLevel();
    if (n < 1 || n > cap)
        throw std::out_of_range("graph level " + std::to_string(n) + " outside [1, " + std::to_string(cap) + "]");

    const std::size_t count = pow8(n);
    const std::int64_t side = static_cast<std::int64_t>(pow3(n));

    // Box of every word, and the inverse grid lookup.
    std::vector<std::int32_t> col(count), row(count);
    std::vector<std::int32_t> grid(static_cast<std::size_t>(side * side), -1);
    for (std::size_t code = 0; code < count; ++code) {
        std::int32_t c = 0, r = 0;
        for (Level k = n - 1; k >= 0; --k) {
            const auto o = digitOffset(static_cast<int>((code >> (3 * k)) & 7u) + 1);
            c = c * 3 + o.cx;
            r = r * 3 + o.cy;
        }
        col[code] = c;
        row[code] = r;
        grid[static_cast<std::size_t>(r) * static_cast<std::size_t>(side) + static_cast<std::size_t>(c)] =
            static_cast<std::int32_t>(code);
    }

    LevelGraph G;
    G.level_ = n;
    G.flavor_ = flavor;
    G.offsets_.assign(count + 1, 0);
    G.targets_.reserve(count * 8);
    G.sharing_.reserve(count * 8);

    std::vector<std::pair<Vertex, std::uint8_t>> nbrs;
    for (std::size_t v = 0; v < count; ++v) {
        nbrs.clear();
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0)
                    continue;
                const bool side_sharing = (dr == 0 || dc == 0);
                if (!side_sharing && flavor == GraphFlavor::EdgeSharing)
                    continue;
                const std::int64_t c = col[v] + dc, r = row[v] + dr;
                if (c < 0 || r < 0 || c >= side || r >= side)
                    continue;
                const std::int32_t w = grid[static_cast<std::size_t>(r * side + c)];
                if (w >= 0)
                    nbrs.emplace_back(static_cast<Vertex>(w), side_sharing ? 1 : 0);
            }
        std::sort(nbrs.begin(), nbrs.end());
        for (const auto& [w, s] : nbrs) {
            G.targets_.push_back(w);
            G.sharing_.push_back(s);
        }
        G.offsets_[v + 1] = G.targets_.size();
        G.maxDegree_ = std::max(G.maxDegree_, nbrs.size());
    }
    G.targets_.shrink_to_fit();
    G.sharing_.shrink_to_fit();
    return G;
}

bool LevelGraph::hasEdge(Vertex u, Vertex v) const {
    const auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

GraphFunction::GraphFunction(Level level, double fill) : level_(level), values_(pow8(level), fill) {}

GraphFunction::GraphFunction(Level level, std::vector<double> values) : level_(level), values_(std::move(values)) {
    if (values_.size() != pow8(level))
        throw std::invalid_argument("GraphFunction: expected " + std::to_string(pow8(level)) + " values, got " +
                                    std::to_string(values_.size()));
}

bool GraphFunction::allFinite() const {
    return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

std::vector<char> membershipMask(std::size_t vertexCount, std::span<const Vertex> set) {
    std::vector<char> mask(vertexCount, 0);
    for (Vertex v : set) {
        if (v >= vertexCount)
            throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
        mask[v] = 1;
    }
    return mask;
}

namespace {

void requireLevel(const LevelGraph& G, const GraphFunction& f) {
    if (G.level() != f.level())
        throw std::invalid_argument("function level " + std::to_string(f.level()) + " does not match graph level " +
                                    std::to_string(G.level()));
}

} // namespace

double pEnergy(const LevelGraph& G, const GraphFunction& f, double p) {
    requireLevel(G, f);
    double sum = 0.0;
    G.forEdges([&](Vertex u, Vertex v, bool) { sum += powAbs(f[u] - f[v], p); });
    return sum;
}

double pEnergy(const LevelGraph& G, const GraphFunction& f, double p, std::span<const Vertex> A) {
    requireLevel(G, f);
    const auto mask = membershipMask(G.numberOfVertices(), A);
    double sum = 0.0;
    G.forEdges([&](Vertex u, Vertex v, bool) {
        if (mask[u] && mask[v])
            sum += powAbs(f[u] - f[v], p);
    });
    return sum;
}

double pEnergyPairing(const LevelGraph& G, const GraphFunction& f, const GraphFunction& g, double p) {
    requireLevel(G, f);
    requireLevel(G, g);
    double sum = 0.0;
    G.forEdges([&](Vertex x, Vertex y, bool) { sum += signedPow(f[y] - f[x], p - 1.0) * (g[y] - g[x]); });
    return sum;
}

double pLaplacian(const LevelGraph& G, const GraphFunction& f, double p, Vertex x) {
    requireLevel(G, f);
    if (x >= G.numberOfVertices())
        throw std::out_of_range("pLaplacian: vertex out of range");
    double sum = 0.0;
    for (Vertex y : G.neighbors(x))
        sum += signedPow(f[y] - f[x], p - 1.0);
    return sum / static_cast<double>(G.degree(x));
}

GraphFunction pLaplacian(const LevelGraph& G, const GraphFunction& f, double p) {
    GraphFunction out(G.level());
    for (Vertex x = 0; x < G.numberOfVertices(); ++x)
        out[x] = pLaplacian(G, f, p, x);
    return out;
}

GraphFunction coarsen(const GraphFunction& f, Level k) {
    if (k < 0 || k > f.level())
        throw std::invalid_argument("coarsen: target level must lie in [0, " + std::to_string(f.level()) + "]");
    if (k == f.level())
        return f;
    const std::size_t block = pow8(f.level() - k);
    GraphFunction out(k);
    for (std::size_t w = 0; w < out.size(); ++w) {
        double s = 0.0;
        for (std::size_t i = w * block; i < (w + 1) * block; ++i)
            s += f[i];
        out[w] = s / static_cast<double>(block);
    }
    return out;
}

GraphFunction refine(const GraphFunction& f, Level m) {
    if (m < f.level())
        throw std::invalid_argument("refine: target level below function level");
    const std::size_t block = pow8(m - f.level());
    GraphFunction out(m);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = f[i / block];
    return out;
}

GraphFunction composeWithSymmetry(const GraphFunction& f, const SymmetryElement& phi) {
    GraphFunction out(f.level());
    for (std::size_t v = 0; v < f.size(); ++v)
        out[v] = f[applySymmetryToCode(phi, f.level(), v)];
    return out;
}

std::vector<std::uint32_t> bfsDistances(const LevelGraph& G, std::span<const Vertex> sources) {
    std::vector<std::uint32_t> dist(G.numberOfVertices(), kUnreachable);
    std::vector<Vertex> queue;
    queue.reserve(G.numberOfVertices());
    for (Vertex s : sources) {
        if (s >= G.numberOfVertices())
            throw std::out_of_range("bfs: source out of range");
        if (dist[s] != 0) {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const Vertex u = queue[head];
        for (Vertex w : G.neighbors(u))
            if (dist[w] == kUnreachable) {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
    }
    return dist;
}

std::vector<std::uint32_t> bfsDistances(const LevelGraph& G, Vertex source) {
    const Vertex s[1] = {source};
    return bfsDistances(G, std::span<const Vertex>(s, 1));
}

BallScanner::BallScanner(const LevelGraph& G) : G_(&G), dist_(G.numberOfVertices(), kUnreachable) {}

std::span<const Vertex> BallScanner::scan(Vertex center, double R, bool closed) {
    if (center >= G_->numberOfVertices())
        throw std::out_of_range("ball center out of range");
    for (const Vertex v : members_)
        dist_[v] = kUnreachable;
    members_.clear();
    if (!closed && R <= 0.0)
        return members_;
    // Truncated BFS: only explore up to the radius.
    members_.push_back(center);
    dist_[center] = 0;
    for (std::size_t head = 0; head < members_.size(); ++head) {
        const Vertex u = members_[head];
        const double next = static_cast<double>(dist_[u] + 1);
        if (closed ? next > R : next >= R)
            continue;
        for (const Vertex w : G_->neighbors(u))
            if (dist_[w] == kUnreachable) {
                dist_[w] = dist_[u] + 1;
                members_.push_back(w);
            }
    }
    return members_;
}

namespace {

VertexSet ballImpl(const LevelGraph& G, Vertex center, double R, bool closed) {
    BallScanner scanner(G);
    const auto members = scanner.scan(center, R, closed);
    VertexSet out(members.begin(), members.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

std::shared_ptr<const LevelGraph> sharedGraph(Level n) {
    static std::mutex mutex;
    static std::map<Level, std::shared_ptr<const LevelGraph>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    auto G = std::make_shared<const LevelGraph>(LevelGraph::build(n));
    cache.emplace(n, G);
    return G;
}

VertexSet graphBall(const LevelGraph& G, Vertex center, double R) {
    return ballImpl(G, center, R, false);
}

VertexSet closedGraphBall(const LevelGraph& G, Vertex center, double R) {
    return ballImpl(G, center, R, true);
}

VertexSet exteriorBoundary(const LevelGraph& G, std::span<const Vertex> A) {
    const auto mask = membershipMask(G.numberOfVertices(), A);
    std::vector<char> out(G.numberOfVertices(), 0);
    for (Vertex v : A)
        for (Vertex w : G.neighbors(v))
            if (!mask[w])
                out[w] = 1;
    VertexSet result;
    for (Vertex v = 0; v < G.numberOfVertices(); ++v)
        if (out[v])
            result.push_back(v);
    return result;
}

bool isConnected(const LevelGraph& G, std::span<const Vertex> A) {
    if (A.empty())
        return false;
    const auto mask = membershipMask(G.numberOfVertices(), A);
    std::vector<char> seen(G.numberOfVertices(), 0);
    std::vector<Vertex> stack{A.front()};
    seen[A.front()] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        const Vertex u = stack.back();
        stack.pop_back();
        for (Vertex w : G.neighbors(u))
            if (mask[w] && !seen[w]) {
                seen[w] = 1;
                ++reached;
                stack.push_back(w);
            }
    }
    std::size_t distinct = 0;
    for (char m : mask)
        distinct += m ? 1 : 0;
    return reached == distinct;
}

std::uint32_t diameter(const LevelGraph& G) {
    const std::size_t n = G.numberOfVertices();
    std::vector<std::uint32_t> lower(n, 0), upper(n, kUnreachable);
    std::vector<Vertex> candidates(n);
    for (std::size_t i = 0; i < n; ++i)
        candidates[i] = static_cast<Vertex>(i);

    std::uint32_t dlow = 0;
    bool pickHigh = true;
    while (!candidates.empty()) {
        std::uint32_t dup = dlow;
        for (Vertex w : candidates)
            dup = std::max(dup, upper[w]);
        if (dup == dlow)
            break;

        // Alternate between the largest upper and the smallest lower bound.
        Vertex v = candidates.front();
        for (Vertex w : candidates) {
            if (pickHigh ? upper[w] > upper[v] : lower[w] < lower[v])
                v = w;
        }
        pickHigh = !pickHigh;

        const auto dist = bfsDistances(G, v);
        std::uint32_t ecc = 0;
        for (std::uint32_t d : dist) {
            if (d == kUnreachable)
                throw std::logic_error("diameter: graph is disconnected");
            ecc = std::max(ecc, d);
        }
        dlow = std::max(dlow, ecc);
        lower[v] = upper[v] = ecc;

        std::vector<Vertex> keep;
        keep.reserve(candidates.size());
        for (Vertex w : candidates) {
            const std::uint32_t d = dist[w];
            lower[w] = std::max({lower[w], d, ecc >= d ? ecc - d : 0});
            upper[w] = std::min(upper[w], ecc + d);
            dlow = std::max(dlow, lower[w]);
            if (lower[w] == upper[w] || upper[w] <= dlow)
                continue;
            keep.push_back(w);
        }
        candidates.swap(keep);
    }
    return dlow;
}

std::shared_ptr<const std::vector<std::uint32_t>> DistanceCache::from(Vertex source) const {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(source);
        if (it != cache_.end())
            return it->second;
    }
    auto computed = std::make_shared<const std::vector<std::uint32_t>>(bfsDistances(*G_, source));
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(source, std::move(computed)).first->second;
}

std::size_t DistanceCache::cachedSources() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.size();
}

} // namespace carpet
