/*
 * commands.hpp
 *
 * Subcommands of carpet_energy. Each returns the process exit code.
 */

#ifndef CARPET_TOOLS_COMMANDS_HPP_
#define CARPET_TOOLS_COMMANDS_HPP_

#include <carpet/dirichlet.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace carpet::cli {

enum ExitCode : int { kSuccess = 0, kAnomaly = 1, kUsage = 2 };

/// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    double p = 2.0;
    int level = 0;
    int maxLevel = 4;
    std::optional<double> rho;
    double tolResidual = -1.0;
    double tolEnergy = 1e-12;
    std::size_t maxIters = 100000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string format = "json";
    std::string out;

    // Subcommand-specific settings.
    std::string faces = "LR";
    std::string method = "newton";
    std::string savePath;
    bool binary = false;
    bool diameter = false;
    std::string flavor = "touching";
    double epsPath = 1e-6;
    int annulusDepth = 0;
    std::string center;
    double radius = -1.0;
    std::string sampler = "uniform";
    double eps = 1e-3;
    double deltaH = 0.25;
    std::size_t trials = 3;
    std::string function = "x";
    std::string input;
    int reportLevel = 1;
    std::vector<double> lambdas{1.0, 2.0, 3.0};
    std::size_t balls = 0;
    double outerFactor = 2.0;
    std::size_t maxPairs = 2000;
    std::string pairsPath;

    SolverTolerances tolerances() const;
};

int runGraph(const RunConfig& cfg);
int runCapacity(const RunConfig& cfg);
int runModulus(const RunConfig& cfg);
int runRho(const RunConfig& cfg);
int runHarmonic(const RunConfig& cfg);
int runSeminorm(const RunConfig& cfg);
int runKs(const RunConfig& cfg);
int runPoincare(const RunConfig& cfg);
int runEmeasure(const RunConfig& cfg);
int runHarnack(const RunConfig& cfg);
int runCutoff(const RunConfig& cfg);
int runSelftest(const RunConfig& cfg);

} // namespace carpet::cli

#endif // CARPET_TOOLS_COMMANDS_HPP_
