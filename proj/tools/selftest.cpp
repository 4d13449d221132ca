/*
 * selftest.cpp
 *
 * Exact small-instance checks behind `carpet_energy selftest`.
 */

#include "commands.hpp"

#include <carpet/emeasure.hpp>
#include <carpet/function_io.hpp>
#include <carpet/modulus.hpp>
#include <carpet/random.hpp>
#include <carpet/scaling.hpp>
#include <carpet/version.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>

namespace carpet::cli {

namespace {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::string shortNum(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

CellFunction randomFunction(Level m, Rng& rng) {
    CellFunction f(m);
    for (double& v : f.values())
        v = rng.uniform(-1.0, 1.0);
    return f;
}

} // namespace

int runSelftest(const RunConfig& cfg) {
    std::vector<Check> checks;
    auto run = [&](const std::string& name, const std::function<Check()>& body) {
        try {
            Check c = body();
            c.name = name;
            checks.push_back(c);
        } catch (const std::exception& e) {
            checks.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };

    run("letter tables", [] {
        validateTables();
        return Check{"", true, "D4 tables consistent"};
    });

    run("G1 counts", [] {
        const LevelGraph G = LevelGraph::build(1);
        std::size_t sharing = 0;
        G.forEdges([&](Vertex, Vertex, bool s) { sharing += s ? 1 : 0; });
        std::vector<std::size_t> deg;
        for (Vertex v = 0; v < 8; ++v)
            deg.push_back(G.degree(v));
        std::sort(deg.begin(), deg.end());
        const bool ok = G.numberOfVertices() == 8 && G.numberOfEdges() == 12 && sharing == 8 &&
                        deg == std::vector<std::size_t>{2, 2, 2, 2, 4, 4, 4, 4};
        return Check{"", ok, "edges " + std::to_string(G.numberOfEdges()) + ", sharing " + std::to_string(sharing)};
    });

    for (const double p : {1.5, 2.0, 2.5, 3.0}) {
        run("G1 face capacity p=" + shortNum(p), [p] {
            const CapacityResult c = faceCapacity(p, 1);
            const double expect = std::pow(2.0, 3.0 - p);
            const double e = rel(c.value, expect);
            const double mid = std::max(std::fabs(c.potential.values[1] - 0.5), std::fabs(c.potential.values[5] - 0.5));
            return Check{"", e <= 1e-8 && mid <= 1e-8, "rel err " + num(e) + ", midpoint err " + num(mid)};
        });
        run("single-edge modulus p=" + shortNum(p), [p] {
            const FamilyModulus m = familyModulus({{0, 1}}, p);
            const double e = rel(m.value, std::pow(2.0, 1.0 - p));
            return Check{"", e <= 1e-6, "rel err " + num(e)};
        });
    }

    run("G2 modulus vs shortest path", [] {
        const auto G = sharedGraph(2);
        const auto [A0, A1] = facePlates(2, Face::Left, Face::Right);
        const ModulusResult m = vertexModulus(*G, A0, A1, {}, 2.0);
        // shortest left-right path has 9 vertices
        return Check{"", m.converged && m.value >= 1.0 / 9.0, "Mod " + num(m.value)};
    });

    run("energy measure identities", [&cfg] {
        Rng rng(cfg.seed);
        const CellFunction f = randomFunction(3, rng), g = randomFunction(3, rng);
        const double rho = 1.25, p = 2.5;
        double worst = 0.0;
        for (Level n = 0; n <= 3; ++n) {
            const EnergyMeasureTable t = energyMeasureTable(f, p, rho, n);
            worst = std::max(worst, rel(t.total(), normalizedEnergy(f, 3, p, rho)));
            if (n < 3)
                worst = std::max(worst, consistencyCheck(t, energyMeasureTable(f, p, rho, n + 1), f).maxRelativeError);
            worst = std::max(worst, affineChainRuleCheck(f, -2.0, 0.5, p, rho, n));
            for (const SymmetryElement& phi : SymmetryElement::all())
                worst = std::max(worst, symmetryPushforwardCheck(f, phi, p, rho, n));
        }
        std::vector<double> w(pow8(1));
        for (double& x : w)
            x = rng.uniform();
        const double slack = triangleInequalityCheck(f, g, w, p, rho, 1);
        return Check{"", worst <= 1e-10 && slack >= -1e-10, "max rel err " + num(worst) + ", slack " + num(slack)};
    });

    run("D4 invariance", [&cfg] {
        Rng rng(cfg.seed + 1);
        const auto G = sharedGraph(3);
        const CellFunction f = randomFunction(3, rng);
        const double e0 = pEnergy(*G, f, 3.0);
        double worst = 0.0;
        for (const SymmetryElement& phi : SymmetryElement::all())
            worst = std::max(worst, rel(pEnergy(*G, composeWithSymmetry(f, phi), 3.0), e0));
        const double lr = faceCapacity(3.0, 2, Face::Left, Face::Right).value;
        const double tb = faceCapacity(3.0, 2, Face::Bottom, Face::Top).value;
        worst = std::max(worst, rel(tb, lr));
        return Check{"", worst <= 1e-10, "max rel err " + num(worst)};
    });

    run("tower property", [&cfg] {
        Rng rng(cfg.seed + 2);
        const CellFunction f = randomFunction(4, rng);
        double worst = 0.0;
        for (Level k = 0; k <= 4; ++k)
            for (Level l = k; l <= 4; ++l) {
                const GraphFunction a = averageToLevel(averageToLevel(f, l), k), b = averageToLevel(f, k);
                for (std::size_t i = 0; i < a.size(); ++i)
                    worst = std::max(worst, std::fabs(a[i] - b[i]));
            }
        return Check{"", worst <= 1e-14, "max abs err " + num(worst)};
    });

    bool allPass = true;
    for (const Check& c : checks)
        allPass = allPass && c.pass;

    if (cfg.format == "json") {
        nlohmann::ordered_json doc;
        doc["command"] = "selftest";
        doc["p"] = nullptr;
        doc["level"] = nullptr;
        doc["rho"] = nullptr;
        doc["seed"] = cfg.seed;
        doc["tool_version"] = kToolVersion;
        auto arr = nlohmann::ordered_json::array();
        for (const Check& c : checks)
            arr.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        doc["checks"] = arr;
        doc["all_pass"] = allPass;
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const Check& c : checks) {
            char line[256];
            std::snprintf(line, sizeof line, "%-4s  %-32s  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                          c.detail.c_str());
            std::cout << line;
        }
        std::cout << (allPass ? "all checks passed" : "some checks FAILED") << "\n";
    }
    return allPass ? kSuccess : kAnomaly;
}

} // namespace carpet::cli
