/*
 * carpet_energy.cpp
 *
 * Command-line front end: one subcommand per computation.
 */

#include "commands.hpp"

#include <carpet/version.hpp>

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

using namespace carpet::cli;

namespace {

void addCommon(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--p", cfg.p, "Energy exponent")->check(CLI::Range(1.05, 16.0));
    sub->add_option("--level", cfg.level, "Graph level n (resolution m for cell functions)");
    sub->add_option("--rho", cfg.rho, "Scaling factor rho(p); estimated at level 4 when absent");
    sub->add_option("--tol-residual", cfg.tolResidual, "Residual tolerance (negative: 1e-10 * oscillation)");
    sub->add_option("--tol-energy", cfg.tolEnergy, "Relative energy decrease tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-iters", cfg.maxIters, "Solver iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
}

void addFunction(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--function", cfg.function, "Built-in cell function: x, y, xy, random, potential");
    sub->add_option("--input", cfg.input, "Cell function file (text or binary)");
}

void addBall(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--center", cfg.center, "Center word (default 266...6)");
    sub->add_option("--radius", cfg.radius, "Ball radius in graph units");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete p-energies on the Sierpinski carpet approximation graphs"};
    app.set_version_flag("--version", std::string(carpet::kToolVersion));
    app.require_subcommand(1);
    RunConfig cfg;
    std::map<CLI::App*, std::function<int(const RunConfig&)>> handlers;

    auto* graph = app.add_subcommand("graph", "Vertex, edge and degree counts of G_n");
    addCommon(graph, cfg);
    graph->add_option("--flavor", cfg.flavor, "touching or sharing");
    graph->add_flag("--diameter", cfg.diameter, "Also compute the exact diameter");
    handlers[graph] = runGraph;

    auto* cap = app.add_subcommand("capacity", "p-capacity between two faces of G_n");
    addCommon(cap, cfg);
    cap->add_option("--faces", cfg.faces, "Two of L, R, B, T (default LR)");
    cap->add_option("--method", cfg.method, "newton or cd");
    cap->add_option("--save-potential", cfg.savePath, "Write the equilibrium potential");
    cap->add_flag("--binary", cfg.binary, "Binary potential file");
    handlers[cap] = runCapacity;

    auto* mod = app.add_subcommand("modulus", "Vertex p-modulus of face-to-face paths in G_n");
    addCommon(mod, cfg);
    mod->add_option("--faces", cfg.faces, "Two of L, R, B, T (default LR)");
    mod->add_option("--eps-path", cfg.epsPath, "Admissibility slack of the final density");
    handlers[mod] = runModulus;

    auto* rho = app.add_subcommand("rho", "Face capacities and the scaling factor rho(p)");
    addCommon(rho, cfg);
    rho->add_option("--max-level", cfg.maxLevel, "Largest level (default 4)");
    rho->add_option("--annulus-depth", cfg.annulusDepth, "Also annulus capacities up to this depth");
    handlers[rho] = runRho;

    auto* harm = app.add_subcommand("harmonic", "p-harmonic extension of sampled data into a ball");
    addCommon(harm, cfg);
    addBall(harm, cfg);
    harm->add_option("--sampler", cfg.sampler, "uniform, spike, ramp or constant");
    harm->add_option("--eps", cfg.eps, "Floor of the sampled boundary data");
    harm->add_option("--save", cfg.savePath, "Write the solution");
    harm->add_flag("--binary", cfg.binary, "Binary solution file");
    handlers[harm] = runHarmonic;

    auto* semi = app.add_subcommand("seminorm", "Normalized energies, seminorm and weak monotonicity");
    addCommon(semi, cfg);
    addFunction(semi, cfg);
    handlers[semi] = runSeminorm;

    auto* ks = app.add_subcommand("ks", "Korevaar-Schoen energies against the seminorm");
    addCommon(ks, cfg);
    addFunction(ks, cfg);
    ks->add_option("--lambda", cfg.lambdas, "Ball radii in graph units")->delimiter(',');
    handlers[ks] = runKs;

    auto* pi = app.add_subcommand("poincare", "Empirical Poincare constant over the default suite");
    addCommon(pi, cfg);
    pi->add_option("--radius", cfg.radius, "Ball radius (default 3^(n-2))");
    pi->add_option("--balls", cfg.balls, "Random ball count (0: one ball per level-2 cell)");
    handlers[pi] = runPoincare;

    auto* em = app.add_subcommand("emeasure", "Energy measure cell masses");
    addCommon(em, cfg);
    addFunction(em, cfg);
    em->add_option("--report-level", cfg.reportLevel, "Level of the reported cells");
    handlers[em] = runEmeasure;

    auto* har = app.add_subcommand("harnack", "Harnack ratios of p-harmonic functions on a ball");
    addCommon(har, cfg);
    addBall(har, cfg);
    har->add_option("--delta", cfg.deltaH, "Inner ball factor");
    har->add_option("--sampler", cfg.sampler, "uniform, spike, ramp or constant");
    har->add_option("--trials", cfg.trials, "Number of sampled boundary data");
    har->add_option("--eps", cfg.eps, "Floor of the sampled boundary data");
    handlers[har] = runHarnack;

    auto* cut = app.add_subcommand("cutoff", "Cutoff function profile and Hoelder fit");
    addCommon(cut, cfg);
    addBall(cut, cfg);
    cut->add_option("--outer-factor", cfg.outerFactor, "Outer ball factor K");
    cut->add_option("--max-pairs", cfg.maxPairs, "Sampled Hoelder pairs");
    cut->add_option("--pairs-csv", cfg.pairsPath, "Write the Hoelder pair cloud");
    handlers[cut] = runCutoff;

    auto* self = app.add_subcommand("selftest", "Exact small-instance checks");
    addCommon(self, cfg);
    handlers[self] = runSelftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen == self && chosen->count("--format") == 0)
        cfg.format = "table";
    if (chosen != self && cfg.format == "table")
        cfg.format = "json";
    try {
        return handlers.at(chosen)(cfg);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kAnomaly;
    }
}
