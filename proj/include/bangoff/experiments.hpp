#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bangoff/optimize.hpp"

namespace bangoff {

struct SweepRow {
    double T = 0.0;
    int ns = 0;
    double cost = 1.0;
    std::string best_type;
    DurationVector best_durations;
    double wall_time_s = 0.0;
};

// One row per (T, ns) for ns = 0..ns_max, each level seeded with the padded
// previous optimum so the cost is nonincreasing in ns.
std::vector<SweepRow> sweep(ObjectiveKind kind, const std::vector<double>& t_grid,
                            int ns_max, const OptimizationConfig& config,
                            int n_threads = 1);

struct GapPoint {
    double T = 0.0;
    double gap = 0.0; // best cost at ns = i minus best cost at ns = i + 1
};

// Delta cost_i(T) = best(ns = i) - best(ns = i + 1). The i + 1 run is seeded
// with the padded i-optimum, which keeps the gap nonnegative.
std::vector<GapPoint> gap_curve(ObjectiveKind kind, const std::vector<double>& t_grid,
                                int i, const OptimizationConfig& config,
                                int n_threads = 1);

struct CriticalTimeEstimate {
    std::string name; // Tc, Tsb, Tqsl, tau_c, tau_min
    double value = 0.0;
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    double detector_threshold = 0.0;
    double precision = 0.0;
    TypeOptimum optimum; // optimum at the detected side of the boundary
};

// Bisection on the indicator Delta cost_i(T) > threshold. Requires
// Delta cost_i(low) < threshold <= Delta cost_i(high).
CriticalTimeEstimate find_gap_onset(ObjectiveKind kind, int i, double bracket_low,
                                    double bracket_high, double threshold,
                                    double precision, const OptimizationConfig& config,
                                    int n_threads = 1);

// Bisection on the first duration of the optimal P0N state-preparation
// control dropping to zero (below the simplex floor).
CriticalTimeEstimate find_tsb(double bracket_low, double bracket_high,
                              double precision, const OptimizationConfig& config,
                              int n_threads = 1);

// Bisection on the best state-preparation infidelity at switch count `ns`
// crossing infidelity_eps. Midpoints are warm-started from the nearest solved
// endpoint. With `symmetric_ansatz` the search is restricted to the tied
// time-symmetric pulse family instead of the free ns-type family.
CriticalTimeEstimate estimate_qsl(int ns, double infidelity_eps, double bracket_low,
                                  double bracket_high, double precision,
                                  const OptimizationConfig& config, int n_threads = 1,
                                  bool symmetric_ansatz = false);

// Same bisection for the best inconcurrence from |00>.
CriticalTimeEstimate estimate_tau_min(int ns, double inconcurrence_eps,
                                      double bracket_low, double bracket_high,
                                      double precision, const OptimizationConfig& config,
                                      int n_threads = 1);

// Baked-in defaults reproducing the study's five critical times.
struct CriticalTargetSpec {
    std::string which;   // tc, tsb, qsl, tauc, taumin
    double bracket_low = 0.0;
    double bracket_high = 0.0;
    double precision = 0.0;
    double threshold = 0.0; // gap threshold or infidelity/inconcurrence eps
    int ns = 0;             // switch count (gap index for onset targets)
};
CriticalTargetSpec critical_defaults(const std::string& which, bool symmetric = false);

CriticalTimeEstimate run_critical_target(const CriticalTargetSpec& spec,
                                         const OptimizationConfig& config,
                                         int n_threads = 1, bool symmetric = false);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// CSV with header T,ns,cost,best_type,durations_json,wall_time_s; the
// durations column is a quoted JSON array. With gaps, a delta_cost column is
// appended holding cost(T, ns) - cost(T, ns + 1).
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     bool with_gaps = false);

// Structured record with name, value, bracket, threshold and the optimum.
void write_critical_json(std::ostream& os, const CriticalTimeEstimate& estimate,
                         std::uint64_t seed);

// CSV of a sampled trajectory, one row per sample.
void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& samples);

} // namespace bangoff
