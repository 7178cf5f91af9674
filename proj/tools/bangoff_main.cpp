// bangoff: optimal bang-off control of a driven two-qubit system.
//
// Subcommands map onto the library experiments: `optimize` solves one
// (objective, T, ns) instance, `sweep` produces duration-scan CSVs,
// `critical` locates one of the five critical times by bisection, and
// `trajectory` samples the evolution under a control read from file.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bangoff/experiments.hpp"
#include "bangoff/parallel.hpp"

namespace {

using namespace bangoff;

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitNotConverged = 3;

ObjectiveKind parse_objective(const std::string& s) {
    if (s == "fidelity") return ObjectiveKind::StatePrepInfidelity;
    if (s == "concurrence") return ObjectiveKind::Inconcurrence;
    throw CLI::ValidationError("--objective must be fidelity or concurrence");
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
    return os;
}

nlohmann::json optimum_json(const TypeOptimum& opt) {
    return nlohmann::json{{"type", opt.type.str()},
                          {"durations", opt.durations},
                          {"total_duration", opt.control().total_duration()},
                          {"cost", opt.cost},
                          {"converged", opt.converged},
                          {"starts_used", opt.starts_used}};
}

struct CommonOpts {
    int threads = default_thread_count();
    std::uint64_t seed = 0;
    bool seed_given = false;
};

std::uint64_t effective_seed(const CommonOpts& c) {
    if (c.seed_given) return c.seed;
    if (const char* env = std::getenv("BANGOFF_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw std::runtime_error("BANGOFF_SEED is not an integer: '" +
                                     std::string(env) + "'");
        }
    }
    return 0;
}

int cmd_optimize(ObjectiveKind kind, double T, int ns, const std::string& type_str,
                 int starts, const CommonOpts& common, const std::string& out_path) {
    OptimizationConfig config;
    config.n_starts = starts;
    config.rng_seed = effective_seed(common);

    nlohmann::json report;
    report["objective"] = kind == ObjectiveKind::StatePrepInfidelity ? "fidelity"
                                                                     : "concurrence";
    report["T"] = T;
    report["seed"] = config.rng_seed;
    report["starts"] = starts;

    TypeOptimum best;
    if (!type_str.empty()) {
        best = optimize_type(ControlType(type_str), T, kind, config);
        report["ns"] = best.type.switch_count();
    } else {
        SwitchCountResult r =
            optimize_switch_count(ns, T, kind, config, common.threads);
        best = r.best();
        report["ns"] = ns;
    }

    // the degenerate partner: flip image for state preparation, negation
    // image for entanglement creation
    const bool state_prep = kind == ObjectiveKind::StatePrepInfidelity;
    const BangOffControl partner =
        state_prep ? flip(best.control()) : negate(best.control());

    report["best"] = optimum_json(best);
    report["control"] = control_to_json(best.control());
    report["degenerate_partner"] = {{"relation", state_prep ? "flip" : "negation"},
                                    {"control", control_to_json(partner)}};

    auto os = open_output(out_path);
    os << report.dump(2) << "\n";

    std::cout << "best type " << best.type.str() << "  cost " << format_double(best.cost)
              << "  durations ";
    for (double d : best.durations) std::cout << format_double(d) << ' ';
    std::cout << (best.converged ? "" : " [NOT CONVERGED]") << "\n";
    return best.converged ? 0 : kExitNotConverged;
}

int cmd_sweep(ObjectiveKind kind, double t_min, double t_max, double t_step, int ns_max,
              bool gaps, int starts, const CommonOpts& common,
              const std::string& out_path) {
    if (!(t_step > 0.0)) throw std::runtime_error("--t-step must be > 0");
    std::vector<double> grid;
    for (int j = 0;; ++j) {
        const double T = t_min + j * t_step;
        if (T > t_max + 1e-12) break;
        if (T > 0.0) grid.push_back(T);
    }
    if (grid.empty()) throw std::runtime_error("empty duration grid (t-min > t-max?)");

    OptimizationConfig config;
    config.n_starts = starts;
    config.rng_seed = effective_seed(common);

    std::vector<SweepRow> rows = sweep(kind, grid, ns_max, config, common.threads);
    auto os = open_output(out_path);
    write_sweep_csv(os, rows, gaps);
    std::cout << rows.size() << " rows -> " << out_path << "\n";
    for (const SweepRow& row : rows)
        if (row.cost > 1.0) return kExitRuntime; // defensive; costs live in [0, 1]
    return 0;
}

int cmd_critical(const std::string& which, std::vector<double> bracket, double precision,
                 double threshold, int ns, bool symmetric, int starts,
                 const CommonOpts& common, const std::string& out_path) {
    CriticalTargetSpec spec = critical_defaults(which, symmetric);
    if (!bracket.empty()) {
        spec.bracket_low = bracket[0];
        spec.bracket_high = bracket[1];
    }
    if (precision > 0.0) spec.precision = precision;
    if (threshold > 0.0) spec.threshold = threshold;
    if (ns >= 0) spec.ns = ns;

    OptimizationConfig config;
    config.n_starts = starts;
    config.rng_seed = effective_seed(common);

    CriticalTimeEstimate est = run_critical_target(spec, config, common.threads, symmetric);

    if (!out_path.empty()) {
        auto os = open_output(out_path);
        write_critical_json(os, est, config.rng_seed);
    }
    write_critical_json(std::cout, est, config.rng_seed);
    return est.optimum.converged ? 0 : kExitNotConverged;
}

int cmd_trajectory(const std::string& control_path, const std::string& initial,
                   double step, const std::string& out_path) {
    std::ifstream is(control_path);
    if (!is) throw std::runtime_error("cannot open control file '" + control_path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("control file '" + control_path +
                                 "' is not valid JSON: " + e.what());
    }
    // accept either a bare control object or an optimize report embedding one
    const nlohmann::json& cj = j.contains("control") ? j.at("control") : j;
    BangOffControl control;
    try {
        control = control_from_json(cj);
    } catch (const std::exception& e) {
        throw std::runtime_error("control file '" + control_path + "': " + e.what());
    }

    TwoQubitState psi0;
    if (initial == "prep")
        psi0 = objective_initial_state(ObjectiveKind::StatePrepInfidelity);
    else if (initial == "00")
        psi0 = objective_initial_state(ObjectiveKind::Inconcurrence);
    else
        throw std::runtime_error("--initial must be prep or 00");

    const auto samples = sample_trajectory(psi0, control, step);
    auto os = open_output(out_path);
    write_trajectory_csv(os, samples);
    const auto& last = samples.back();
    std::cout << samples.size() << " samples -> " << out_path << "  (final concurrence "
              << format_double(last.concurrence) << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal bang-off control of a driven two-qubit system"};
    app.require_subcommand(1);
    app.fallthrough(); // global --threads/--seed may follow the subcommand

    CommonOpts common;
    app.add_option("--threads", common.threads, "worker threads (default: all cores)");
    auto* seed_opt = app.add_option("--seed", common.seed,
                                    "RNG seed (default: BANGOFF_SEED or 0)");

    std::string objective = "fidelity", type_str, out_path = "out.json";
    double T = 0.0;
    int ns = -1, starts = 100;

    CLI::App* opt = app.add_subcommand("optimize", "optimize one (objective, T, ns)");
    opt->add_option("--objective", objective, "fidelity | concurrence")->required();
    opt->add_option("--T", T, "total duration")->required()
        ->check(CLI::PositiveNumber);
    opt->add_option("--ns", ns, "switch count")->check(CLI::NonNegativeNumber);
    opt->add_option("--type", type_str, "restrict to one type, e.g. P0N");
    opt->add_option("--starts", starts, "random starts per type");
    opt->add_option("--out", out_path, "report path (JSON)");

    double t_min = 0.0, t_max = 0.0, t_step = 0.0;
    int ns_max = 0;
    bool gaps = false;
    std::string sweep_out = "sweep.csv";
    CLI::App* sw = app.add_subcommand("sweep", "best cost over a duration grid");
    sw->add_option("--objective", objective, "fidelity | concurrence")->required();
    sw->add_option("--t-min", t_min)->required();
    sw->add_option("--t-max", t_max)->required();
    sw->add_option("--t-step", t_step)->required();
    sw->add_option("--ns-max", ns_max)->required()->check(CLI::NonNegativeNumber);
    sw->add_flag("--gaps", gaps, "append the delta_cost column");
    sw->add_option("--starts", starts, "random starts per type");
    sw->add_option("--out", sweep_out, "CSV path");

    std::string which;
    std::vector<double> bracket;
    double precision = 0.0, threshold = 0.0;
    bool symmetric = false;
    std::string crit_out;
    CLI::App* cr = app.add_subcommand("critical", "bisect one critical time");
    cr->add_option("--which", which, "tc | tsb | qsl | tauc | taumin")->required();
    cr->add_option("--bracket", bracket, "override bracket: lo hi")->expected(2);
    cr->add_option("--precision", precision, "bisection precision in T");
    cr->add_option("--threshold", threshold, "gap threshold / reachability eps");
    cr->add_option("--ns", ns, "switch count override");
    cr->add_flag("--symmetric", symmetric,
                 "restrict qsl to the time-symmetric pulse ansatz");
    cr->add_option("--starts", starts, "random starts per type");
    cr->add_option("--out", crit_out, "record path (JSON)");

    std::string control_path, initial = "00", traj_out = "trajectory.csv";
    double step = 0.0;
    CLI::App* tr = app.add_subcommand("trajectory", "sample evolution under a control");
    tr->add_option("--control", control_path, "control file (JSON)")->required();
    tr->add_option("--initial", initial, "prep | 00");
    tr->add_option("--step", step, "sample step")->required()->check(CLI::PositiveNumber);
    tr->add_option("--out", traj_out, "CSV path");

    CLI11_PARSE(app, argc, argv);
    common.seed_given = seed_opt->count() > 0;

    try {
        const ObjectiveKind kind = (opt->parsed() || sw->parsed())
                                       ? parse_objective(objective)
                                       : ObjectiveKind::StatePrepInfidelity;
        if (opt->parsed()) {
            if (ns < 0 && type_str.empty())
                throw std::runtime_error("optimize needs --ns or --type");
            return cmd_optimize(kind, T, ns, type_str, starts, common, out_path);
        }
        if (sw->parsed())
            return cmd_sweep(kind, t_min, t_max, t_step, ns_max, gaps, starts, common,
                             sweep_out);
        if (cr->parsed())
            return cmd_critical(which, bracket, precision, threshold, ns, symmetric,
                                starts, common, crit_out);
        if (tr->parsed()) return cmd_trajectory(control_path, initial, step, traj_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
