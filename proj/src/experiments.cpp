#include "bangoff/experiments.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bangoff {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// best(ns = i) and best(ns = i + 1), the latter seeded by padding the former
struct GapEval {
    SwitchCountResult lower, upper;
    double gap() const { return lower.best().cost - upper.best().cost; }
};

GapEval eval_gap(ObjectiveKind kind, int i, double T, const OptimizationConfig& config,
                 int n_threads) {
    GapEval g;
    g.lower = optimize_switch_count(i, T, kind, config, n_threads);
    g.upper = optimize_switch_count(i + 1, T, kind, config, n_threads,
                                    zero_padded_embeddings(g.lower.best().control()));
    return g;
}

} // namespace

std::vector<SweepRow> sweep(ObjectiveKind kind, const std::vector<double>& t_grid,
                            int ns_max, const OptimizationConfig& config,
                            int n_threads) {
    if (t_grid.empty()) throw std::invalid_argument("sweep: empty T grid");
    for (std::size_t j = 0; j + 1 < t_grid.size(); ++j)
        if (!(t_grid[j] < t_grid[j + 1]))
            throw std::invalid_argument("sweep: T grid must be strictly increasing");

    std::vector<SweepRow> rows;
    rows.reserve(t_grid.size() * std::size_t(ns_max + 1));
    for (double T : t_grid) {
        std::vector<BangOffControl> seeds;
        for (int ns = 0; ns <= ns_max; ++ns) {
            const auto t0 = std::chrono::steady_clock::now();
            SwitchCountResult r =
                optimize_switch_count(ns, T, kind, config, n_threads, seeds);
            SweepRow row;
            row.T = T;
            row.ns = ns;
            row.cost = r.best().cost;
            row.best_type = r.best().type.str();
            row.best_durations = r.best().durations;
            row.wall_time_s = seconds_since(t0);
            seeds = zero_padded_embeddings(r.best().control());
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<GapPoint> gap_curve(ObjectiveKind kind, const std::vector<double>& t_grid,
                                int i, const OptimizationConfig& config, int n_threads) {
    if (t_grid.empty()) throw std::invalid_argument("gap_curve: empty T grid");
    std::vector<GapPoint> out;
    out.reserve(t_grid.size());
    for (double T : t_grid)
        out.push_back({T, eval_gap(kind, i, T, config, n_threads).gap()});
    return out;
}

CriticalTimeEstimate find_gap_onset(ObjectiveKind kind, int i, double bracket_low,
                                    double bracket_high, double threshold,
                                    double precision, const OptimizationConfig& config,
                                    int n_threads) {
    if (!(bracket_low < bracket_high))
        throw std::invalid_argument("find_gap_onset: bracket must satisfy low < high");

    GapEval low_eval = eval_gap(kind, i, bracket_low, config, n_threads);
    GapEval high_eval = eval_gap(kind, i, bracket_high, config, n_threads);
    if (!(low_eval.gap() < threshold))
        throw std::runtime_error(
            "find_gap_onset: bracket does not straddle the onset (gap at low end is " +
            format_double(low_eval.gap()) + ", threshold " + format_double(threshold) + ")");
    if (!(high_eval.gap() >= threshold))
        throw std::runtime_error(
            "find_gap_onset: bracket does not straddle the onset (gap at high end is " +
            format_double(high_eval.gap()) + ", threshold " + format_double(threshold) + ")");

    double lo = bracket_low, hi = bracket_high;
    TypeOptimum above = high_eval.upper.best();
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        GapEval ev = eval_gap(kind, i, mid, config, n_threads);
        if (ev.gap() > threshold) {
            hi = mid;
            above = ev.upper.best();
        } else {
            lo = mid;
        }
    }

    CriticalTimeEstimate est;
    est.name = kind == ObjectiveKind::StatePrepInfidelity ? "Tc" : "tau_c";
    est.value = 0.5 * (lo + hi);
    est.bracket_low = lo;
    est.bracket_high = hi;
    est.detector_threshold = threshold;
    est.precision = precision;
    est.optimum = above;
    return est;
}

CriticalTimeEstimate find_tsb(double bracket_low, double bracket_high, double precision,
                              const OptimizationConfig& config, int n_threads) {
    if (!(bracket_low < bracket_high))
        throw std::invalid_argument("find_tsb: bracket must satisfy low < high");
    (void)n_threads; // single type, nothing to fan out

    const ControlType p0n("P0N");
    auto first_duration = [&](double T) {
        // the pure singular control is offered as a seed so the boundary
        // branch is always evaluated exactly
        const std::vector<DurationVector> seeds = {{0.0, T, 0.0}};
        return optimize_type(p0n, T, ObjectiveKind::StatePrepInfidelity, config, seeds);
    };

    TypeOptimum low_opt = first_duration(bracket_low);
    TypeOptimum high_opt = first_duration(bracket_high);
    const double floor = config.simplex_floor;
    if (!(low_opt.durations[0] > floor))
        throw std::runtime_error("find_tsb: t1 already vanishes at the low end (t1 = " +
                                 format_double(low_opt.durations[0]) + ")");
    if (!(high_opt.durations[0] <= floor))
        throw std::runtime_error("find_tsb: t1 does not vanish at the high end (t1 = " +
                                 format_double(high_opt.durations[0]) + ")");

    double lo = bracket_low, hi = bracket_high;
    TypeOptimum vanished = high_opt;
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        TypeOptimum opt = first_duration(mid);
        if (opt.durations[0] <= floor) {
            hi = mid;
            vanished = opt;
        } else {
            lo = mid;
        }
    }

    CriticalTimeEstimate est;
    est.name = "Tsb";
    est.value = 0.5 * (lo + hi);
    est.bracket_low = lo;
    est.bracket_high = hi;
    est.detector_threshold = floor;
    est.precision = precision;
    est.optimum = vanished;
    return est;
}

namespace {

// shared reachability bisection: smallest T where best cost <= eps
CriticalTimeEstimate reach_bisect(const std::string& name, ObjectiveKind kind, int ns,
                                  double eps, double bracket_low, double bracket_high,
                                  double precision, const OptimizationConfig& config,
                                  int n_threads, bool symmetric) {
    if (!(bracket_low < bracket_high))
        throw std::invalid_argument(name + ": bracket must satisfy low < high");

    const TiedType sym = symmetric_ansatz();

    struct Solved {
        double T = 0.0;
        SwitchCountResult full;   // free family
        TypeOptimum tied;         // symmetric ansatz
        double best_cost = 1.0;
    };

    auto solve = [&](double T, const Solved* warm_a, const Solved* warm_b) {
        Solved s;
        s.T = T;
        // warm starts: every type's previous optimum, rescaled onto the new simplex
        if (symmetric) {
            std::vector<DurationVector> seeds;
            for (const Solved* w : {warm_a, warm_b}) {
                if (!w) continue;
                DurationVector params(4);
                const auto& d = w->tied.durations; // [t1,t2,t3,t4,t3,t2,t1]
                for (int p = 0; p < 4; ++p) params[p] = d[p] * (T / w->T);
                seeds.push_back(std::move(params));
            }
            s.tied = optimize_tied(sym, T, kind, config, seeds);
            s.best_cost = s.tied.cost;
        } else {
            std::vector<BangOffControl> seeds;
            for (const Solved* w : {warm_a, warm_b}) {
                if (!w) continue;
                for (const TypeOptimum& t : w->full.per_type) {
                    BangOffControl c = t.control();
                    for (double& x : c.durations) x *= T / w->T;
                    seeds.push_back(std::move(c));
                }
            }
            s.full = optimize_switch_count(ns, T, kind, config, n_threads, seeds);
            s.best_cost = s.full.best().cost;
        }
        return s;
    };

    Solved low_s = solve(bracket_low, nullptr, nullptr);
    Solved high_s = solve(bracket_high, &low_s, nullptr);
    if (!(low_s.best_cost > eps))
        throw std::runtime_error(name + ": cost at the low end is already below eps (" +
                                 format_double(low_s.best_cost) + " <= " +
                                 format_double(eps) + ")");
    if (!(high_s.best_cost <= eps))
        throw std::runtime_error(name + ": cost at the high end stays above eps (" +
                                 format_double(high_s.best_cost) + " > " +
                                 format_double(eps) + ")");

    while (high_s.T - low_s.T > precision) {
        const double mid = 0.5 * (low_s.T + high_s.T);
        // warm-start from the nearest solved endpoint
        const Solved* nearest =
            (mid - low_s.T <= high_s.T - mid) ? &low_s : &high_s;
        Solved mid_s = solve(mid, nearest, nullptr);
        if (mid_s.best_cost <= eps)
            high_s = std::move(mid_s);
        else
            low_s = std::move(mid_s);
    }

    CriticalTimeEstimate est;
    est.name = name;
    est.value = 0.5 * (low_s.T + high_s.T);
    est.bracket_low = low_s.T;
    est.bracket_high = high_s.T;
    est.detector_threshold = eps;
    est.precision = precision;
    est.optimum = symmetric ? high_s.tied : high_s.full.best();
    return est;
}

} // namespace

CriticalTimeEstimate estimate_qsl(int ns, double infidelity_eps, double bracket_low,
                                  double bracket_high, double precision,
                                  const OptimizationConfig& config, int n_threads,
                                  bool symmetric_ansatz) {
    return reach_bisect("Tqsl", ObjectiveKind::StatePrepInfidelity, ns, infidelity_eps,
                        bracket_low, bracket_high, precision, config, n_threads,
                        symmetric_ansatz);
}

CriticalTimeEstimate estimate_tau_min(int ns, double inconcurrence_eps,
                                      double bracket_low, double bracket_high,
                                      double precision, const OptimizationConfig& config,
                                      int n_threads) {
    return reach_bisect("tau_min", ObjectiveKind::Inconcurrence, ns, inconcurrence_eps,
                        bracket_low, bracket_high, precision, config, n_threads, false);
}

CriticalTargetSpec critical_defaults(const std::string& which, bool symmetric) {
    if (which == "tc") return {"tc", 0.3, 0.45, 1e-5, 1e-7, 1};
    if (which == "tauc") return {"tauc", 0.3, 0.45, 1e-5, 1e-9, 0};
    if (which == "tsb") return {"tsb", 1.4, 1.7, 1e-5, 0.0, 2};
    if (which == "qsl") {
        if (symmetric) return {"qsl", 2.8, 3.0, 5e-4, 1e-10, 6};
        return {"qsl", 2.6, 2.9, 2e-3, 1e-10, 9};
    }
    if (which == "taumin") return {"taumin", 1.6, 1.9, 1e-5, 1e-8, 3};
    throw std::invalid_argument("unknown critical target '" + which +
                                "' (expected tc, tsb, qsl, tauc or taumin)");
}

CriticalTimeEstimate run_critical_target(const CriticalTargetSpec& spec,
                                         const OptimizationConfig& config, int n_threads,
                                         bool symmetric) {
    if (spec.which == "tc")
        return find_gap_onset(ObjectiveKind::StatePrepInfidelity, spec.ns,
                              spec.bracket_low, spec.bracket_high, spec.threshold,
                              spec.precision, config, n_threads);
    if (spec.which == "tauc")
        return find_gap_onset(ObjectiveKind::Inconcurrence, spec.ns, spec.bracket_low,
                              spec.bracket_high, spec.threshold, spec.precision, config,
                              n_threads);
    if (spec.which == "tsb")
        return find_tsb(spec.bracket_low, spec.bracket_high, spec.precision, config,
                        n_threads);
    if (spec.which == "qsl")
        return estimate_qsl(spec.ns, spec.threshold, spec.bracket_low, spec.bracket_high,
                            spec.precision, config, n_threads, symmetric);
    if (spec.which == "taumin")
        return estimate_tau_min(spec.ns, spec.threshold, spec.bracket_low,
                                spec.bracket_high, spec.precision, config, n_threads);
    throw std::invalid_argument("unknown critical target '" + spec.which + "'");
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, ptr);
}

namespace {

std::string durations_json(const DurationVector& d) {
    return nlohmann::json(d).dump();
}

} // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     bool with_gaps) {
    os << "T,ns,cost,best_type,durations_json,wall_time_s";
    if (with_gaps) os << ",delta_cost";
    os << "\n";
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const SweepRow& row = rows[r];
        os << format_double(row.T) << ',' << row.ns << ',' << format_double(row.cost)
           << ',' << row.best_type << ",\"" << durations_json(row.best_durations)
           << "\"," << format_double(row.wall_time_s);
        if (with_gaps) {
            os << ',';
            // gap to the next switch count at the same T, when present
            if (r + 1 < rows.size() && rows[r + 1].T == row.T &&
                rows[r + 1].ns == row.ns + 1)
                os << format_double(row.cost - rows[r + 1].cost);
        }
        os << "\n";
    }
}

void write_critical_json(std::ostream& os, const CriticalTimeEstimate& est,
                         std::uint64_t seed) {
    nlohmann::json j{
        {"name", est.name},
        {"value", est.value},
        {"bracket", {est.bracket_low, est.bracket_high}},
        {"detector_threshold", est.detector_threshold},
        {"precision", est.precision},
        {"seed", seed},
        {"optimum",
         {{"type", est.optimum.type.str()},
          {"durations", est.optimum.durations},
          {"total_duration", est.optimum.control().total_duration()},
          {"cost", est.optimum.cost},
          {"converged", est.optimum.converged}}},
    };
    os << j.dump(2) << "\n";
}

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples) {
    os << "t,re_a,im_a,re_b,im_b,re_c,im_c,re_d,im_d,x,y,z,"
          "C1_sq,C2_sq,C3_sq,concurrence\n";
    for (const TrajectorySample& s : samples) {
        os << format_double(s.t);
        for (const cplx& a : s.state.amp)
            os << ',' << format_double(a.real()) << ',' << format_double(a.imag());
        os << ',' << format_double(s.bloch.x) << ',' << format_double(s.bloch.y) << ','
           << format_double(s.bloch.z) << ',' << format_double(std::norm(s.bell.c1))
           << ',' << format_double(std::norm(s.bell.c2)) << ','
           << format_double(std::norm(s.bell.c3)) << ','
           << format_double(s.concurrence) << "\n";
    }
}

} // namespace bangoff
