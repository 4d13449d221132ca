/*
 * commands.cpp
 */

#include "commands.hpp"

#include <carpet/emeasure.hpp>
#include <carpet/function_io.hpp>
#include <carpet/modulus.hpp>
#include <carpet/random.hpp>
#include <carpet/regularity.hpp>
#include <carpet/scaling.hpp>
#include <carpet/sobolev.hpp>
#include <carpet/version.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace carpet::cli {

using json = nlohmann::ordered_json;

SolverTolerances RunConfig::tolerances() const {
    SolverTolerances t;
    t.residualTol = tolResidual;
    t.energyRelTol = tolEnergy;
    t.maxIters = maxIters;
    return t;
}

namespace {

void checkLevel(int n, const char* flag = "--level") {
    if (n < 1 || n > maxFeasibleLevel())
        throw UsageError(std::string(flag) + " " + std::to_string(n) + " outside [1, " +
                         std::to_string(maxFeasibleLevel()) + "]");
}

json provenance(const RunConfig& cfg, const char* command, int level, std::optional<double> rho) {
    json doc;
    doc["command"] = command;
    doc["p"] = clampExponent(cfg.p);
    doc["level"] = level;
    doc["rho"] = rho ? json(*rho) : json(nullptr);
    doc["seed"] = cfg.seed;
    doc["tool_version"] = kToolVersion;
    return doc;
}

std::string csvHeader(const json& doc) {
    std::ostringstream s;
    s << "# command=" << doc["command"].get<std::string>() << " p=" << formatReal(doc["p"].get<double>())
      << " level=" << doc["level"].get<int>()
      << " rho=" << (doc["rho"].is_null() ? std::string("none") : formatReal(doc["rho"].get<double>()))
      << " seed=" << doc["seed"].get<std::uint64_t>() << " tool_version=" << kToolVersion << '\n';
    return s.str();
}

void writeOutput(const RunConfig& cfg, const std::string& text) {
    if (cfg.out.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open " + cfg.out + " for writing");
    f << text;
    if (!f)
        throw std::runtime_error("failed writing " + cfg.out);
}

/// Emits the JSON document, or its CSV header followed by csv.
void emit(const RunConfig& cfg, const json& doc, const std::string& csv) {
    if (cfg.format == "csv")
        writeOutput(cfg, csvHeader(doc) + csv);
    else
        writeOutput(cfg, doc.dump(2) + "\n");
}

struct RhoChoice {
    double rho = 1.0;
    std::string source;
};

RhoChoice resolveRho(const RunConfig& cfg) {
    if (cfg.rho) {
        if (!(*cfg.rho > 0.0))
            throw UsageError("--rho must be positive");
        return {*cfg.rho, "flag"};
    }
    const Level depth = std::min<Level>(4, maxFeasibleLevel());
    ScalingOptions opts;
    opts.tol = cfg.tolerances();
    opts.threads = cfg.threads;
    const ScalingReport rep = estimateRho(cfg.p, depth, opts);
    return {rep.rho, "estimate:max_level=" + std::to_string(depth)};
}

Word parseCenter(const RunConfig& cfg, Level n) {
    if (cfg.center.empty())
        return Word::parse("2" + std::string(static_cast<std::size_t>(n - 1), '6'));
    Word w;
    try {
        w = Word::parse(cfg.center);
    } catch (const std::exception& e) {
        throw UsageError(std::string("--center: ") + e.what());
    }
    if (w.level() != n)
        throw UsageError("--center must be a word of length --level");
    return w;
}

CellFunction loadCellFunction(const RunConfig& cfg) {
    if (!cfg.input.empty()) {
        CellFunction f = loadFunction(cfg.input);
        if (cfg.level != 0 && f.level() != cfg.level)
            throw UsageError("--input has level " + std::to_string(f.level()) + " but --level is " +
                             std::to_string(cfg.level));
        return f;
    }
    checkLevel(cfg.level);
    const Level m = cfg.level;
    if (cfg.function == "x")
        return sampleCellCenters(m, [](double x, double) { return x; });
    if (cfg.function == "y")
        return sampleCellCenters(m, [](double, double y) { return y; });
    if (cfg.function == "xy")
        return sampleCellCenters(m, [](double x, double y) { return x * y; });
    if (cfg.function == "random") {
        Rng rng(cfg.seed);
        CellFunction f(m);
        for (double& v : f.values())
            v = rng.uniform();
        return f;
    }
    if (cfg.function == "potential") {
        const CapacityResult c = faceCapacity(cfg.p, std::min<Level>(m, 5), Face::Left, Face::Right, cfg.tolerances());
        return refine(c.potential.values, m);
    }
    throw UsageError("--function '" + cfg.function + "' is not one of x, y, xy, random, potential");
}

std::pair<Face, Face> parseFaces(const std::string& s) {
    if (s.size() != 2)
        throw UsageError("--faces expects two letters such as LR");
    try {
        const Face a = parseFace(s[0]), b = parseFace(s[1]);
        if (a == b)
            throw UsageError("--faces needs two distinct faces");
        return {a, b};
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--faces: ") + e.what());
    }
}

json solutionJson(const PotentialSolution& s) {
    json j;
    j["energy"] = s.energy;
    j["residual"] = s.residual;
    j["residual_tol"] = s.residualTol;
    j["local_displacement"] = s.localDisplacement;
    j["step_tol"] = s.stepTol;
    j["iterations"] = s.iterations;
    j["converged"] = s.converged;
    return j;
}

} // namespace

int runGraph(const RunConfig& cfg) {
    checkLevel(cfg.level);
    GraphFlavor flavor = GraphFlavor::Touching;
    if (cfg.flavor == "sharing")
        flavor = GraphFlavor::EdgeSharing;
    else if (cfg.flavor != "touching")
        throw UsageError("--flavor must be touching or sharing");
    const LevelGraph G = LevelGraph::build(cfg.level, flavor);
    std::map<std::size_t, std::size_t> degrees;
    for (std::size_t v = 0; v < G.numberOfVertices(); ++v)
        ++degrees[G.degree(static_cast<Vertex>(v))];
    std::size_t sharing = 0;
    G.forEdges([&](Vertex, Vertex, bool side) { sharing += side ? 1 : 0; });

    json doc = provenance(cfg, "graph", cfg.level, std::nullopt);
    doc["flavor"] = cfg.flavor;
    doc["vertices"] = G.numberOfVertices();
    doc["edges"] = G.numberOfEdges();
    doc["edge_sharing_edges"] = sharing;
    doc["max_degree"] = G.maxDegree();
    json hist = json::array();
    std::string csv = "degree,count\n";
    for (const auto& [d, c] : degrees) {
        hist.push_back({{"degree", d}, {"count", c}});
        csv += std::to_string(d) + "," + std::to_string(c) + "\n";
    }
    doc["degree_histogram"] = hist;
    if (cfg.diameter)
        doc["diameter"] = diameter(G);
    emit(cfg, doc, csv);
    return kSuccess;
}

int runCapacity(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const auto [a, b] = parseFaces(cfg.faces);
    SolverMethod method = SolverMethod::Newton;
    if (cfg.method == "cd")
        method = SolverMethod::CoordinateDescent;
    else if (cfg.method != "newton")
        throw UsageError("--method must be newton or cd");
    const CapacityResult c = faceCapacity(cfg.p, cfg.level, a, b, cfg.tolerances(), method);
    if (!cfg.savePath.empty())
        saveFunction(cfg.savePath, c.potential.values, cfg.binary);

    json doc = provenance(cfg, "capacity", cfg.level, std::nullopt);
    doc["faces"] = cfg.faces;
    doc["method"] = cfg.method;
    doc["capacity"] = c.value;
    doc["solver"] = solutionJson(c.potential);
    const std::string csv = "faces,capacity,residual,iterations,converged\n" + cfg.faces + "," + formatReal(c.value) +
                            "," + formatReal(c.potential.residual) + "," + std::to_string(c.potential.iterations) +
                            "," + (c.potential.converged ? "1" : "0") + "\n";
    emit(cfg, doc, csv);
    return c.potential.converged ? kSuccess : kAnomaly;
}

int runModulus(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const auto [a, b] = parseFaces(cfg.faces);
    if (!(cfg.epsPath > 0.0 && cfg.epsPath < 1.0))
        throw UsageError("--eps-path must lie in (0, 1)");
    const auto G = sharedGraph(cfg.level);
    const auto [A0, A1] = facePlates(cfg.level, a, b);
    ModulusOptions opts;
    opts.epsPath = cfg.epsPath;
    const ModulusResult m = vertexModulus(*G, A0, A1, {}, cfg.p, opts);

    json doc = provenance(cfg, "modulus", cfg.level, std::nullopt);
    doc["faces"] = cfg.faces;
    doc["modulus"] = m.value;
    doc["lower_bound"] = m.lowerBound;
    doc["certificate_gap"] = m.certificateGap;
    doc["active_paths"] = m.activePaths.size();
    doc["rounds"] = m.rounds;
    doc["converged"] = m.converged;
    const std::string csv = "faces,modulus,lower_bound,certificate_gap,converged\n" + cfg.faces + "," +
                            formatReal(m.value) + "," + formatReal(m.lowerBound) + "," +
                            formatReal(m.certificateGap) + "," + (m.converged ? "1" : "0") + "\n";
    emit(cfg, doc, csv);
    return m.converged ? kSuccess : kAnomaly;
}

int runRho(const RunConfig& cfg) {
    checkLevel(cfg.maxLevel, "--max-level");
    if (cfg.maxLevel < 2)
        throw UsageError("--max-level must be at least 2");
    if (cfg.annulusDepth < 0 || cfg.annulusDepth + 1 > maxFeasibleLevel())
        throw UsageError("--annulus-depth out of range");
    ScalingOptions opts;
    opts.tol = cfg.tolerances();
    opts.threads = cfg.threads;
    opts.annulusMaxDepth = cfg.annulusDepth;
    const ScalingReport rep = estimateRho(cfg.p, cfg.maxLevel, opts);

    json doc = provenance(cfg, "rho", cfg.maxLevel, rep.rho);
    json levels = json::array();
    std::string csv = "level,face_capacity,residual,iterations,rho_estimate\n";
    for (std::size_t i = 0; i < rep.levels.size(); ++i) {
        json l;
        l["level"] = rep.levels[i];
        l["face_capacity"] = rep.faceCaps[i];
        l["residual"] = rep.faceResiduals[i];
        l["iterations"] = rep.faceIterations[i];
        if (i > 0)
            l["rho_estimate"] = rep.rhoEstimates[i - 1];
        levels.push_back(l);
        csv += std::to_string(rep.levels[i]) + "," + formatReal(rep.faceCaps[i]) + "," +
               formatReal(rep.faceResiduals[i]) + "," + std::to_string(rep.faceIterations[i]) + "," +
               (i > 0 ? formatReal(rep.rhoEstimates[i - 1]) : std::string()) + "\n";
    }
    doc["levels"] = levels;
    doc["rho_estimates"] = rep.rhoEstimates;
    doc["dw"] = rep.dw;
    doc["df"] = rep.df;
    doc["critical_exponent"] = rep.dw / rep.p;
    json ann = json::array();
    for (const AnnulusSample& s : rep.annulusCaps)
        ann.push_back({{"word", s.word.toString()}, {"depth", s.depth}, {"capacity", s.value}});
    doc["annulus_capacities"] = ann;
    doc["converged"] = rep.converged;
    emit(cfg, doc, csv);
    return rep.converged ? kSuccess : kAnomaly;
}

int runHarmonic(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const Word c = parseCenter(cfg, cfg.level);
    const double R = cfg.radius > 0.0 ? cfg.radius : 9.0 * std::pow(3.0, cfg.level - 3);
    BoundarySampler sampler;
    try {
        sampler = parseSampler(cfg.sampler);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--sampler: ") + e.what());
    }
    const auto G = sharedGraph(cfg.level);
    const auto center = static_cast<Vertex>(c.code());
    const VertexSet ball = graphBall(*G, center, R);
    if (ball.size() == G->numberOfVertices())
        throw UsageError("--radius: the ball covers every vertex");
    const VertexSet boundary = exteriorBoundary(*G, ball);

    DirichletProblem prob;
    prob.graph = G.get();
    prob.p = cfg.p;
    prob.domain = ball;
    prob.tol = cfg.tolerances();
    prob.boundary = sampleBoundary(*G, boundary, sampler, cfg.eps, cfg.seed);
    const PotentialSolution sol = solvePHarmonic(prob);
    if (!cfg.savePath.empty())
        saveFunction(cfg.savePath, sol.values, cfg.binary);

    double dMin = INFINITY, dMax = -INFINITY, bMin = INFINITY, bMax = -INFINITY;
    for (const Vertex v : ball) {
        dMin = std::min(dMin, sol.values[v]);
        dMax = std::max(dMax, sol.values[v]);
    }
    for (const auto& [v, x] : prob.boundary) {
        bMin = std::min(bMin, x);
        bMax = std::max(bMax, x);
    }
    const double slack = 1e3 * std::max(sol.residual, 1e-15) * std::max(1.0, bMax - bMin);
    const bool maxPrinciple = dMin >= bMin - slack && dMax <= bMax + slack;

    json doc = provenance(cfg, "harmonic", cfg.level, std::nullopt);
    doc["center"] = c.toString();
    doc["radius"] = R;
    doc["sampler"] = cfg.sampler;
    doc["domain_size"] = ball.size();
    doc["boundary_size"] = boundary.size();
    doc["domain_min"] = dMin;
    doc["domain_max"] = dMax;
    doc["boundary_min"] = bMin;
    doc["boundary_max"] = bMax;
    doc["max_principle"] = maxPrinciple;
    doc["solver"] = solutionJson(sol);
    std::string csv = "word,value\n";
    for (const Vertex v : ball)
        csv += Word(cfg.level, v).toString() + "," + formatReal(sol.values[v]) + "\n";
    emit(cfg, doc, csv);
    return sol.converged && maxPrinciple ? kSuccess : kAnomaly;
}

int runSeminorm(const RunConfig& cfg) {
    const CellFunction f = loadCellFunction(cfg);
    const RhoChoice rho = resolveRho(cfg);
    const SeminormReport rep = seminormReport(f, clampExponent(cfg.p), rho.rho);

    json doc = provenance(cfg, "seminorm", f.level(), rho.rho);
    doc["rho_source"] = rho.source;
    doc["function"] = cfg.input.empty() ? cfg.function : cfg.input;
    doc["normalized_energies"] = rep.energies;
    doc["seminorm"] = rep.seminorm;
    doc["weak_monotonicity"] = rep.weakMonotonicity;
    doc["weak_monotonicity_levels"] = {rep.wmLow, rep.wmHigh};
    std::string csv = "level,normalized_energy\n";
    for (std::size_t i = 0; i < rep.energies.size(); ++i)
        csv += std::to_string(i + 1) + "," + formatReal(rep.energies[i]) + "\n";
    emit(cfg, doc, csv);
    return kSuccess;
}

int runKs(const RunConfig& cfg) {
    const CellFunction f = loadCellFunction(cfg);
    for (const double l : cfg.lambdas)
        if (!(l >= 1.0))
            throw UsageError("--lambda values must be >= 1");
    const RhoChoice rho = resolveRho(cfg);
    const double dw = walkDimension(rho.rho);
    const double p = clampExponent(cfg.p);
    const double semi = seminormReport(f, p, rho.rho).seminorm;

    json doc = provenance(cfg, "ks", f.level(), rho.rho);
    doc["rho_source"] = rho.source;
    doc["dw"] = dw;
    doc["seminorm"] = semi;
    json entries = json::array();
    std::string csv = "lambda,ks_energy,ratio\n";
    double lo = INFINITY, hi = 0.0;
    for (const double l : cfg.lambdas) {
        const double ks = ksEnergy(f, p, l, dw);
        const double ratio = semi > 0.0 ? ks / semi : 0.0;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        entries.push_back({{"lambda", l}, {"ks_energy", ks}, {"ratio", ratio}});
        csv += formatReal(l) + "," + formatReal(ks) + "," + formatReal(ratio) + "\n";
    }
    doc["entries"] = entries;
    doc["band"] = semi > 0.0 && lo > 0.0 ? json(std::max(hi, 1.0 / lo)) : json(nullptr);
    emit(cfg, doc, csv);
    return kSuccess;
}

int runPoincare(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const Level n = cfg.level;
    const double R = cfg.radius > 0.0 ? cfg.radius : std::pow(3.0, std::max(0, n - 2));
    const RhoChoice rho = resolveRho(cfg);
    const double dw = walkDimension(rho.rho);
    SuiteOptions so;
    so.seed = cfg.seed;
    const auto suite = defaultSuite(n, cfg.p, so);
    std::vector<CellFunction> fs;
    for (const auto& s : suite)
        fs.push_back(s.f);
    const std::vector<Ball> balls =
        cfg.balls > 0 ? sampleBalls(n, R, cfg.balls, cfg.seed) : matchedBalls(n, std::min(n, 2), R);
    PoincareReport rep;
    try {
        rep = poincareConstant(n, clampExponent(cfg.p), dw, fs, balls, cfg.threads);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--radius: ") + e.what());
    }

    json doc = provenance(cfg, "poincare", n, rho.rho);
    doc["rho_source"] = rho.source;
    doc["dw"] = dw;
    doc["radius"] = R;
    doc["balls"] = balls.size();
    doc["constant"] = rep.constant;
    doc["attained_by"] = suite[rep.suiteIndex].name;
    doc["attained_center"] = Word(n, rep.ball.center).toString();
    json per = json::object();
    std::string csv = "function,constant\n";
    for (std::size_t i = 0; i < suite.size(); ++i) {
        per[suite[i].name] = rep.perFunction[i];
        csv += suite[i].name + "," + formatReal(rep.perFunction[i]) + "\n";
    }
    doc["per_function"] = per;
    emit(cfg, doc, csv);
    return kSuccess;
}

int runEmeasure(const RunConfig& cfg) {
    const CellFunction f = loadCellFunction(cfg);
    if (cfg.reportLevel < 0 || cfg.reportLevel > f.level())
        throw UsageError("--report-level must lie in [0, level]");
    const RhoChoice rho = resolveRho(cfg);
    const double p = clampExponent(cfg.p);
    const EnergyMeasureTable t = energyMeasureTable(f, p, rho.rho, cfg.reportLevel);
    const double normalized = normalizedEnergy(f, f.level(), p, rho.rho);
    const double scale = std::max(std::fabs(normalized), 1e-300);

    json doc = provenance(cfg, "emeasure", f.level(), rho.rho);
    doc["rho_source"] = rho.source;
    doc["m"] = t.resolution;
    doc["n"] = t.level;
    doc["total"] = t.total();
    doc["crossing_defect"] = t.crossingDefect;
    doc["normalized_energy"] = normalized;
    doc["total_identity_error"] = std::fabs(t.total() - normalized) / scale;
    if (t.level < t.resolution) {
        const EnergyMeasureTable fine = energyMeasureTable(f, p, rho.rho, t.level + 1);
        doc["consistency_error"] = consistencyCheck(t, fine, f).maxRelativeError;
    }
    json masses = json::array();
    for (std::size_t w = 0; w < t.masses.size(); ++w)
        masses.push_back({{"word", Word(t.level, w).toString()}, {"mass", t.masses[w]}});
    doc["masses"] = masses;
    std::ostringstream csv;
    writeTableCsv(csv, t);
    emit(cfg, doc, csv.str());
    return kSuccess;
}

int runHarnack(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const Word c = parseCenter(cfg, cfg.level);
    const double R = cfg.radius > 0.0 ? cfg.radius : 9.0 * std::pow(3.0, cfg.level - 3);
    if (!(cfg.deltaH > 0.0 && cfg.deltaH < 1.0))
        throw UsageError("--delta must lie in (0, 1)");
    BoundarySampler sampler;
    try {
        sampler = parseSampler(cfg.sampler);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--sampler: ") + e.what());
    }
    HarnackOptions opts;
    opts.deltaH = cfg.deltaH;
    opts.eps = cfg.eps;
    opts.tol = cfg.tolerances();
    opts.threads = cfg.threads;
    std::vector<HarnackReport> reps;
    try {
        reps = harnackReport(cfg.level, cfg.p, static_cast<Vertex>(c.code()), R, sampler, cfg.trials, cfg.seed, opts);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--radius: ") + e.what());
    }

    json doc = provenance(cfg, "harnack", cfg.level, std::nullopt);
    doc["center"] = c.toString();
    doc["radius"] = R;
    doc["delta_h"] = cfg.deltaH;
    doc["sampler"] = cfg.sampler;
    json trials = json::array();
    std::string csv = "trial,h_min,h_max,ratio,residual,converged,anomaly\n";
    bool anomaly = false;
    double worst = 1.0;
    for (const HarnackReport& r : reps) {
        trials.push_back({{"trial", r.trial},
                          {"h_min", r.hMin},
                          {"h_max", r.hMax},
                          {"ratio", std::isfinite(r.ratio) ? json(r.ratio) : json("inf")},
                          {"residual", r.residual},
                          {"converged", r.converged},
                          {"anomaly", r.anomaly}});
        csv += std::to_string(r.trial) + "," + formatReal(r.hMin) + "," + formatReal(r.hMax) + "," +
               formatReal(r.ratio) + "," + formatReal(r.residual) + "," + (r.converged ? "1" : "0") + "," +
               (r.anomaly ? "1" : "0") + "\n";
        anomaly = anomaly || r.anomaly;
        worst = std::max(worst, r.ratio);
    }
    doc["trials"] = trials;
    doc["max_ratio"] = std::isfinite(worst) ? json(worst) : json("inf");
    doc["anomaly"] = anomaly;
    emit(cfg, doc, csv);
    return anomaly ? kAnomaly : kSuccess;
}

int runCutoff(const RunConfig& cfg) {
    checkLevel(cfg.level);
    const Word c = parseCenter(cfg, cfg.level);
    const double R = cfg.radius > 0.0 ? cfg.radius : std::pow(3.0, std::max(0, cfg.level - 2));
    const RhoChoice rho = resolveRho(cfg);
    const double dw = walkDimension(rho.rho);
    CutoffOptions opts;
    opts.outerFactor = cfg.outerFactor;
    opts.maxPairs = cfg.maxPairs;
    opts.seed = cfg.seed;
    opts.tol = cfg.tolerances();
    CutoffProfile prof;
    try {
        prof = cutoffProfile(cfg.level, cfg.p, static_cast<Vertex>(c.code()), R, dw, opts);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--radius: ") + e.what());
    }
    std::string pairs = "distance_ratio,oscillation\n";
    for (const HoelderPair& hp : prof.pairs)
        pairs += formatReal(hp.distanceRatio) + "," + formatReal(hp.oscillation) + "\n";
    if (!cfg.pairsPath.empty()) {
        std::ofstream f(cfg.pairsPath, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot open " + cfg.pairsPath);
        f << pairs;
    }

    json doc = provenance(cfg, "cutoff", cfg.level, rho.rho);
    doc["rho_source"] = rho.source;
    doc["dw"] = dw;
    doc["center"] = c.toString();
    doc["radius"] = R;
    doc["outer_factor"] = cfg.outerFactor;
    doc["energy"] = prof.energy;
    doc["inner_ball_size"] = prof.innerBallSize;
    doc["energy_bound_ratio"] = prof.energyBoundRatio;
    doc["hoelder_pairs"] = prof.pairs.size();
    doc["theta"] = std::isfinite(prof.theta) ? json(prof.theta) : json(nullptr);
    doc["residual"] = prof.residual;
    doc["converged"] = prof.converged;
    emit(cfg, doc, pairs);
    return prof.converged ? kSuccess : kAnomaly;
}

} // namespace carpet::cli
