#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bangoff/control.hpp"
#include "bangoff/quantum.hpp"

namespace bangoff {

// The two cost functionals. State preparation drives the ground state of
// H(-2) toward the ground state of H(+2) and minimizes 1 - F; entanglement
// creation starts from |00> and minimizes 1 - C.
enum class ObjectiveKind { StatePrepInfidelity, Inconcurrence };

const TwoQubitState& objective_initial_state(ObjectiveKind kind);
const TwoQubitState& state_prep_target(); // ground state of H(+2)

struct OptimizationConfig {
    int n_starts = 100;
    std::uint64_t rng_seed = 0;
    double gradient_tolerance = 1e-12; // infinity norm, in the unconstrained variables
    int max_iterations = 500;
    double simplex_floor = 1e-6;        // durations below this clamp to exact 0
    double cost_change_tolerance = 1e-15;
};

struct TypeOptimum {
    ControlType type;
    DurationVector durations;
    double cost = 1.0;
    bool converged = false;
    int starts_used = 0;

    BangOffControl control() const { return BangOffControl{type, durations}; }
};

// Cost and its per-segment-duration gradient, assembled from
// evolve_with_segment_gradients by the chain rule. At the concurrence
// nonsmooth point ad - bc = 0 the zero subgradient is returned.
std::pair<double, std::vector<double>>
objective_and_gradient(ObjectiveKind kind, const BangOffControl& control);

// Multistart BFGS over the duration simplex {t_k >= 0, sum t_k = T} for one
// type. The simplex is handled by the smooth reparameterization
// t_k = T u_k^2 / sum u_j^2; starts are drawn uniformly on the simplex via
// normalized exponentials. Durations below simplex_floor are clamped to
// exact zero and the point is re-polished once. `seeds` are additional
// deterministic starts (used for warm starts and family nesting).
TypeOptimum optimize_type(const ControlType& type, double total_duration,
                          ObjectiveKind kind, const OptimizationConfig& config,
                          const std::vector<DurationVector>& seeds = {});

// A type whose segment durations are tied together: segment k takes the
// value of free parameter param_of_segment[k]. Used for constrained ansatz
// families (for example the time-symmetric pulse ansatz).
struct TiedType {
    ControlType type;
    std::vector<int> param_of_segment;
    int n_params = 0;
};

TiedType symmetric_ansatz(); // P0P0N0N with durations [t1,t2,t3,t4,t3,t2,t1]

TypeOptimum optimize_tied(const TiedType& tied, double total_duration,
                          ObjectiveKind kind, const OptimizationConfig& config,
                          const std::vector<DurationVector>& param_seeds = {});

struct SwitchCountResult {
    int ns = 0;
    std::vector<TypeOptimum> per_type; // in enumerate_types order
    std::size_t best_index = 0;
    bool all_converged = true;

    const TypeOptimum& best() const { return per_type[best_index]; }
};

// Optimizes every type with `ns` switches and returns the best (minimal
// cost, ties broken by enumeration order). Exploits the flip symmetry of the
// state-preparation cost and the negation symmetry of the concurrence cost:
// one of each symmetry pair is optimized and the partner's result is
// mirrored. `seed_controls` are offered as extra starts to types they match.
SwitchCountResult optimize_switch_count(int ns, double total_duration,
                                        ObjectiveKind kind,
                                        const OptimizationConfig& config,
                                        int n_threads = 1,
                                        const std::vector<BangOffControl>& seed_controls = {});

// All ns + 1 segment controls that evaluate identically to `control`:
// every insertion of one zero-duration segment that keeps neighbours
// distinct.
std::vector<BangOffControl> zero_padded_embeddings(const BangOffControl& control);

// Best result per switch count for ns = 0..ns_max. Each level is seeded with
// the zero-padded previous optimum, which makes the best cost nonincreasing
// in ns.
std::vector<SwitchCountResult> best_over_ns_range(int ns_max, double total_duration,
                                                  ObjectiveKind kind,
                                                  const OptimizationConfig& config,
                                                  int n_threads = 1);

} // namespace bangoff
