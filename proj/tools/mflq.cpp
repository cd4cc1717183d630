// Command-line front end: solve, verify, simulate, epsilon-sweep.
//
// Exit codes: 0 success or certified, 2 computed but a condition failed,
// 1 usage or input error.

#include "mflq/error.hpp"
#include "mflq/monte_carlo.hpp"
#include "mflq/problem_io.hpp"
#include "mflq/recursion.hpp"
#include "mflq/report_io.hpp"
#include "mflq/scenario.hpp"
#include "mflq/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

using namespace mflq;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kViolated = 2;

using Clock = std::chrono::steady_clock;

struct Loaded {
    ProblemData problem;
    RunManifest manifest;
};

Loaded load(const std::string& command, const std::string& path) {
    Loaded l;
    const std::string bytes = read_text_file(path);
    LoadedProblem lp = load_problem(path);
    for (const auto& f : lp.findings) {
        std::cerr << "warning: " << f.path << ": " << f.message << "\n";
    }
    l.problem = std::move(lp.problem);
    l.manifest.command = command;
    l.manifest.input_path = path;
    l.manifest.input_hash = fnv1a_hex(bytes);
    return l;
}

Vector parse_vector(const std::string& text, int n) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw Error(ErrorKind::InvalidInput, "cannot parse \"" + item + "\" in --x");
        }
        values.push_back(v);
    }
    if (static_cast<int>(values.size()) != n) {
        throw Error(ErrorKind::InvalidInput,
                    "--x needs " + std::to_string(n) + " comma-separated values");
    }
    return Eigen::Map<Vector>(values.data(), n);
}

void write_json(const std::string& path, Json body, RunManifest& manifest, Clock::time_point start) {
    manifest.outputs.push_back(path);
    manifest.wall_time_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    body["manifest"] = manifest_to_json(manifest);
    write_text_file(path, to_canonical_json(body));
}

GainSchedule gains_for(const ProblemData& p, const std::string& gains_path, Solution& fresh) {
    fresh = solve(p);
    if (gains_path.empty()) {
        return fresh.gains;
    }
    const Json j = Json::parse(read_text_file(gains_path));
    const Json& g = j.contains("gains") ? j.at("gains") : j;
    return gains_from_json(g, p.n, p.m, p.N);
}

struct SolveArgs {
    std::string input, out;
    bool tables = false;
};

int cmd_solve(const SolveArgs& a) {
    const auto start = Clock::now();
    Loaded l = load("solve", a.input);
    const Solution s = solve(l.problem);
    l.manifest.tolerances = {{"range", s.report.range_tolerance}, {"convexity_scale", 1e-9}};
    Json body = solution_to_json(s, a.tables);
    body["problem"] = {{"n", l.problem.n}, {"m", l.problem.m}, {"N", l.problem.N}};
    write_json(a.out, std::move(body), l.manifest, start);
    for (std::size_t k = 0; k < s.report.convexity_margins.size(); ++k) {
        std::cout << "k=" << k << " convexity margin " << s.report.convexity_margins[k] << ", range residuals "
                  << s.report.rangeH_residuals[k] << " / " << s.report.rangeBeta_residuals[k] << "\n";
    }
    std::cout << "all-pairs verdict: " << (s.report.verdict_all_pairs ? "solvable" : "violated") << "\n";
    return s.report.verdict_all_pairs ? kOk : kViolated;
}

struct VerifyArgs {
    std::string input, out, gains, x;
    int t = 0;
    int tree_depth = kDefaultDepthCap;
    bool force = false;
    int deviations = 4;
    std::uint64_t seed = 20240611;
};

int cmd_verify(const VerifyArgs& a) {
    const auto start = Clock::now();
    Loaded l = load("verify", a.input);
    const ProblemData& p = l.problem;
    if (p.N > a.tree_depth && !a.force) {
        std::cerr << "error: horizon " << p.N << " exceeds the tree depth cap " << a.tree_depth
                  << " (use --force)\n";
        return kInputError;
    }
    const ScenarioTree tree(p.N, true);
    if (a.t < 0 || a.t >= p.N) {
        std::cerr << "error: --t must lie in 0.." << p.N - 1 << "\n";
        return kInputError;
    }
    const Vector x = a.x.empty() ? Vector::Zero(p.n) : parse_vector(a.x, p.n);
    const InitialPair init{a.t, LevelValues(ScenarioTree::width(a.t), x)};

    Solution fresh;
    const GainSchedule gains = gains_for(p, a.gains, fresh);
    const ClosedLoop eq = closed_loop(p, gains, init);

    CertificateOptions opt;
    opt.deviations = a.deviations;
    opt.seed = a.seed;
    const EquilibriumCertificate cert = certify_equilibrium(p, init, eq.u, opt);

    std::vector<double> representation, difference;
    std::mt19937_64 rng(a.seed);
    std::normal_distribution<double> normal;
    for (int k = a.t; k < p.N; ++k) {
        representation.push_back(representation_check(p, fresh.tables, gains.Psi, gains.alpha, init, k));
        LevelValues ubar(ScenarioTree::width(k));
        for (auto& v : ubar) {
            v = Vector::NullaryExpr(p.m, [&]() { return normal(rng); });
        }
        difference.push_back(difference_formula_check(p, k, eq.X.at(k), eq.u, ubar, 0.7));
    }

    Json body = {{"certificate", certificate_to_json(cert)},
                 {"representation_residuals", representation},
                 {"difference_formula_residuals", difference},
                 {"fixed_pair_residuals", solve_fixed_pair(p, fresh.gains, init).residuals},
                 {"tree_depth", tree.depth()},
                 {"x", vector_to_json(x)}};
    l.manifest.tolerances = {{"stationary", opt.stationary_tolerance},
                             {"convexity", opt.convexity_tolerance},
                             {"gap", opt.gap_tolerance}};
    l.manifest.seed = a.seed;
    if (!a.out.empty()) {
        write_json(a.out, std::move(body), l.manifest, start);
    }
    for (std::size_t i = 0; i < cert.stationary_residuals.size(); ++i) {
        std::cout << "k=" << a.t + static_cast<int>(i) << " stationary residual " << cert.stationary_residuals[i]
                  << ", convexity " << cert.convexity_values[i] << "\n";
    }
    std::cout << "certificate: " << (cert.verdict ? "equilibrium" : "not an equilibrium")
              << (cert.gaps_nonnegative ? "" : " (negative deviation gap found)") << "\n";
    return cert.verdict ? kOk : kViolated;
}

struct SimulateArgs {
    std::string input, out, csv, gains, x, law = "rademacher";
    int t = 0;
    std::size_t paths = 10000;
    std::uint64_t seed = 0;
    int threads = 0;
};

int cmd_simulate(const SimulateArgs& a) {
    const auto start = Clock::now();
    Loaded l = load("simulate", a.input);
    const ProblemData& p = l.problem;
    const Vector x = a.x.empty() ? Vector::Zero(p.n) : parse_vector(a.x, p.n);
    Solution fresh;
    const GainSchedule gains = gains_for(p, a.gains, fresh);
    SimConfig cfg;
    cfg.paths = a.paths;
    cfg.seed = a.seed;
    cfg.law = parse_noise_law(a.law);
    cfg.threads = a.threads;
    const SimResult r = simulate(p, a.t, x, gains, cfg);

    l.manifest.seed = a.seed;
    if (!a.csv.empty()) {
        l.manifest.outputs.push_back(a.csv);
        write_text_file(a.csv, "# input_fnv1a=" + l.manifest.input_hash + "\n" + moments_csv(r));
    }
    Json body = sim_to_json(r);
    body["law"] = to_string(cfg.law);
    if (!a.out.empty()) {
        write_json(a.out, std::move(body), l.manifest, start);
    }
    std::cout << "mean cost " << format_double(r.mean_cost) << " +/- "
              << (std::isfinite(r.std_error) ? format_double(r.std_error) : std::string("undefined")) << "\n";
    return kOk;
}

struct SweepArgs {
    std::string input, out;
    std::vector<double> eps;
};

int cmd_epsilon_sweep(const SweepArgs& a) {
    const auto start = Clock::now();
    for (double e : a.eps) {
        if (!(e > 0.0)) {
            std::cerr << "error: every epsilon must be positive\n";
            return kInputError;
        }
    }
    Loaded l = load("epsilon-sweep", a.input);
    const ProblemData& p = l.problem;
    const Solution base = solve(p);
    bool convex = true;
    for (std::size_t k = 0; k < base.report.convexity_margins.size(); ++k) {
        std::cout << "k=" << k << " convexity margin " << base.report.convexity_margins[k] << "\n";
        convex = convex && base.report.convexity_margins[k] >= -base.report.convexity_tolerances[k];
    }
    bool singular = false;
    for (const Matrix& W : base.gains.W) {
        Eigen::JacobiSVD<Matrix> svd(W);
        const auto& sv = svd.singularValues();
        singular = singular || sv(sv.size() - 1) <= static_cast<double>(W.rows()) * 0.5 * std::numeric_limits<double>::epsilon() * sv(0);
    }

    Json rows = Json::array();
    double previous_distance = std::numeric_limits<double>::infinity();
    double previous_norm = 0.0;
    bool monotone = true;
    bool growing = false;
    for (double e : a.eps) {
        const Solution s = solve_epsilon(p, e);
        const double dist = gain_distance(s.gains, base.gains);
        const double norm = gain_norm(s.gains);
        monotone = monotone && dist <= previous_distance;
        growing = growing || (rows.size() > 0 && norm > previous_norm);
        previous_distance = dist;
        previous_norm = norm;
        rows.push_back({{"epsilon", e}, {"gain_norm", norm}, {"distance", dist}, {"gains", gains_to_json(s.gains)}});
        std::cout << "eps " << format_double(e) << " gain norm " << norm << " distance " << dist << "\n";
    }
    if (singular) {
        std::cerr << "warning: some W_k is singular; distances need not converge\n";
    }
    Json body = {{"convexity_margins", base.report.convexity_margins},
                 {"rows", std::move(rows)},
                 {"distance_monotone", monotone},
                 {"gain_norm_growing", growing},
                 {"singular_W", singular},
                 {"unperturbed_gain_norm", gain_norm(base.gains)}};
    l.manifest.tolerances = {{"range", base.report.range_tolerance}};
    if (!a.out.empty()) {
        write_json(a.out, std::move(body), l.manifest, start);
    }
    return convex ? kOk : kViolated;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium solver and verifier for discrete-time mean-field LQ problems"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the recursions and write gains plus solvability report");
    solve_cmd->add_option("--input", solve_args.input, "problem JSON")->required();
    solve_cmd->add_option("--out", solve_args.out, "report JSON")->required();
    solve_cmd->add_flag("--tables", solve_args.tables, "include the full (k,l) tables");

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "Certify the solved control on the exact scenario tree");
    verify_cmd->add_option("--input", verify_args.input, "problem JSON")->required();
    verify_cmd->add_option("--t", verify_args.t, "initial time");
    verify_cmd->add_option("--x", verify_args.x, "initial state, comma-separated");
    verify_cmd->add_option("--tree-depth", verify_args.tree_depth, "largest horizon built as a tree");
    verify_cmd->add_flag("--force", verify_args.force, "build trees above the depth cap");
    verify_cmd->add_option("--gains", verify_args.gains, "report JSON whose gains replace the solved ones");
    verify_cmd->add_option("--out", verify_args.out, "certificate JSON");
    verify_cmd->add_option("--deviations", verify_args.deviations, "random perturbations per step")
        ->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--seed", verify_args.seed, "seed for sampled perturbations");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of the equilibrium cost");
    sim_cmd->add_option("--input", sim_args.input, "problem JSON")->required();
    sim_cmd->add_option("--paths", sim_args.paths, "number of paths")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--seed", sim_args.seed, "RNG seed");
    sim_cmd->add_option("--law", sim_args.law, "noise law")->check(CLI::IsMember({"rademacher", "gaussian"}));
    sim_cmd->add_option("--t", sim_args.t, "initial time");
    sim_cmd->add_option("--x", sim_args.x, "initial state, comma-separated");
    sim_cmd->add_option("--gains", sim_args.gains, "report JSON with gains to simulate");
    sim_cmd->add_option("--threads", sim_args.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    sim_cmd->add_option("--out", sim_args.out, "summary JSON");
    sim_cmd->add_option("--csv", sim_args.csv, "per-step moment table");

    SweepArgs sweep_args;
    auto* sweep_cmd = app.add_subcommand("epsilon-sweep", "Regularized gains for a list of epsilons");
    sweep_cmd->add_option("--input", sweep_args.input, "problem JSON")->required();
    sweep_cmd->add_option("--eps", sweep_args.eps, "comma-separated epsilons")->required()->delimiter(',');
    sweep_cmd->add_option("--out", sweep_args.out, "sweep table JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*solve_cmd) {
            return cmd_solve(solve_args);
        }
        if (*verify_cmd) {
            return cmd_verify(verify_args);
        }
        if (*sim_cmd) {
            return cmd_simulate(sim_args);
        }
        return cmd_epsilon_sweep(sweep_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const Json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
