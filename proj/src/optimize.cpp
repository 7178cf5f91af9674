#include "bangoff/optimize.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "bangoff/parallel.hpp"

namespace bangoff {

const TwoQubitState& objective_initial_state(ObjectiveKind kind) {
    static const TwoQubitState prep_initial = ground_state(-2.0);
    static const TwoQubitState zero_zero = [] {
        TwoQubitState s;
        s.amp[0] = 1.0;
        return s;
    }();
    return kind == ObjectiveKind::StatePrepInfidelity ? prep_initial : zero_zero;
}

const TwoQubitState& state_prep_target() {
    static const TwoQubitState target = ground_state(2.0);
    return target;
}

std::pair<double, std::vector<double>>
objective_and_gradient(ObjectiveKind kind, const BangOffControl& control) {
    const TwoQubitState& initial = objective_initial_state(kind);
    const EvolveGradients ev = evolve_with_segment_gradients(initial, control);
    const std::size_t n = control.segments();
    std::vector<double> grad(n);

    if (kind == ObjectiveKind::StatePrepInfidelity) {
        const cplx z = inner(state_prep_target().amp, ev.final_state.amp);
        for (std::size_t k = 0; k < n; ++k) {
            const cplx dz = inner(state_prep_target().amp, ev.d_dt[k]);
            grad[k] = -2.0 * std::real(std::conj(z) * dz);
        }
        return {std::max(0.0, 1.0 - std::norm(z)), std::move(grad)};
    }

    const Vec4& f = ev.final_state.amp;
    const cplx q = f[0] * f[3] - f[1] * f[2];
    const double aq = std::abs(q);
    for (std::size_t k = 0; k < n; ++k) {
        if (aq == 0.0) {
            grad[k] = 0.0; // subgradient at the nonsmooth point
            continue;
        }
        const Vec4& g = ev.d_dt[k];
        const cplx dq = f[3] * g[0] + f[0] * g[3] - f[2] * g[1] - f[1] * g[2];
        grad[k] = -2.0 * std::real(std::conj(q) * dq) / aq;
    }
    return {std::max(0.0, 1.0 - 2.0 * aq), std::move(grad)};
}

namespace {

// ---------------------------------------------------------------------------
// deterministic seeding
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// Small deterministic generator (fixed output sequence on every platform).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    double uniform01() { // in [0, 1)
        return double(splitmix64(state) >> 11) * 0x1.0p-53;
    }
    double exponential() { return -std::log1p(-uniform01()); }
};

// ---------------------------------------------------------------------------
// fused objective in the unconstrained variables
// ---------------------------------------------------------------------------

// Segment durations are generated from free parameters u by
//   s_p = T u_p^2 / sum_q w_q u_q^2,   t_seg = s_{param_of_segment[seg]},
// where w_p counts the segments tied to parameter p. The map is smooth,
// lands exactly on the simplex, and reaches zero durations.
struct FusedObjective {
    ObjectiveKind kind;
    double total_duration;
    std::vector<ControlLevel> levels;
    std::vector<int> pmap;
    int n_params;
    std::vector<double> weights;

    Vec4 psi0;
    Vec4 target; // state-prep only

    // workspace
    std::vector<Vec4> phi;
    std::vector<double> s, t, gseg, gpar;
    std::vector<const SpectralDecomposition*> decomp;
    std::vector<const Mat4r*> hmat;

    FusedObjective(ObjectiveKind k, double T, const ControlType& type,
                   const std::vector<int>& param_of_segment, int np)
        : kind(k), total_duration(T), levels(type.seq), pmap(param_of_segment),
          n_params(np) {
        const std::size_t n = levels.size();
        weights.assign(n_params, 0.0);
        for (int p : pmap) weights[p] += 1.0;
        psi0 = objective_initial_state(kind).amp;
        if (kind == ObjectiveKind::StatePrepInfidelity) target = state_prep_target().amp;
        phi.resize(n + 1);
        s.resize(n_params);
        t.resize(n);
        gseg.resize(n);
        gpar.resize(n_params);
        decomp.reserve(n);
        hmat.reserve(n);
        for (ControlLevel lev : levels) {
            decomp.push_back(&level_decomposition(lev));
            hmat.push_back(&level_hamiltonian(lev));
        }
    }

    int dim() const { return n_params; }

    // cost and gradient with respect to u
    double eval(const std::vector<double>& u, std::vector<double>& grad) {
        const std::size_t n = levels.size();
        double sw = 0.0;
        for (int p = 0; p < n_params; ++p) sw += weights[p] * u[p] * u[p];
        for (int p = 0; p < n_params; ++p) s[p] = total_duration * u[p] * u[p] / sw;
        for (std::size_t k = 0; k < n; ++k) t[k] = s[pmap[k]];

        phi[0] = psi0;
        for (std::size_t k = 0; k < n; ++k)
            phi[k + 1] = apply_spectral(*decomp[k], t[k], phi[k]);

        double cost;
        const cplx mi(0.0, -1.0);
        if (kind == ObjectiveKind::StatePrepInfidelity) {
            const cplx z = inner(target, phi[n]);
            cost = 1.0 - std::norm(z);
            Vec4 mu = target; // B_{k+1}^dag |psi_t>
            for (std::size_t k = n; k-- > 0;) {
                const Vec4 v = matvec(*hmat[k], phi[k + 1]);
                const cplx dz = mi * inner(mu, v);
                gseg[k] = -2.0 * std::real(std::conj(z) * dz);
                if (k > 0) mu = apply_spectral(*decomp[k], -t[k], mu);
            }
        } else {
            const Vec4& f = phi[n];
            const cplx q = f[0] * f[3] - f[1] * f[2];
            const double aq = std::abs(q);
            cost = 1.0 - 2.0 * aq;
            Vec4 om = {f[3], -f[2], -f[1], f[0]}; // B^T of the concurrence covector
            for (std::size_t k = n; k-- > 0;) {
                if (aq == 0.0) {
                    gseg[k] = 0.0;
                } else {
                    const Vec4 v = matvec(*hmat[k], phi[k + 1]);
                    cplx dot = 0.0;
                    for (int j = 0; j < 4; ++j) dot += om[j] * v[j];
                    gseg[k] = -2.0 * std::real(std::conj(q) * (mi * dot)) / aq;
                }
                if (k > 0) om = apply_spectral(*decomp[k], t[k], om);
            }
        }

        std::fill(gpar.begin(), gpar.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) gpar[pmap[k]] += gseg[k];
        double gdots = 0.0;
        for (int p = 0; p < n_params; ++p) gdots += gpar[p] * s[p];
        for (int p = 0; p < n_params; ++p)
            grad[p] = (2.0 * u[p] / sw) * (gpar[p] * total_duration - weights[p] * gdots);

        return std::max(0.0, cost);
    }

    // durations for the current parameter point
    DurationVector durations(const std::vector<double>& u) const {
        double sw = 0.0;
        for (int p = 0; p < n_params; ++p) sw += weights[p] * u[p] * u[p];
        DurationVector d(levels.size());
        for (std::size_t k = 0; k < levels.size(); ++k)
            d[k] = total_duration * u[pmap[k]] * u[pmap[k]] / sw;
        return d;
    }
};

// ---------------------------------------------------------------------------
// BFGS with backtracking line search
// ---------------------------------------------------------------------------

struct DescentResult {
    std::vector<double> x;
    double f = 1.0;
    bool converged = false;
};

DescentResult bfgs(FusedObjective& obj, std::vector<double> x,
                   const OptimizationConfig& cfg) {
    const int n = obj.dim();
    std::vector<double> g(n), gn(n), d(n), xn(n), hg(n), sv(n), yv(n), hy(n);
    std::vector<double> h(std::size_t(n) * n, 0.0);
    auto reset_h = [&] {
        std::fill(h.begin(), h.end(), 0.0);
        for (int i = 0; i < n; ++i) h[std::size_t(i) * n + i] = 1.0;
    };
    reset_h();

    double f = obj.eval(x, g);
    DescentResult best{x, f, false};

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        double gmax = 0.0;
        for (double v : g) gmax = std::max(gmax, std::abs(v));
        if (gmax < cfg.gradient_tolerance) {
            best.converged = true;
            break;
        }

        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += h[std::size_t(i) * n + j] * g[j];
            d[i] = -s;
        }
        double dg = std::inner_product(d.begin(), d.end(), g.begin(), 0.0);
        if (!(dg < 0.0)) { // not a descent direction: restart from steepest descent
            reset_h();
            for (int i = 0; i < n; ++i) d[i] = -g[i];
            dg = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
            if (dg == 0.0) {
                best.converged = true;
                break;
            }
        }

        double alpha = 1.0;
        double fn = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < n; ++i) xn[i] = x[i] + alpha * d[i];
            fn = obj.eval(xn, gn);
            if (fn <= f + 1e-4 * alpha * dg) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            best.converged = true; // no representable improvement along d
            break;
        }

        for (int i = 0; i < n; ++i) {
            sv[i] = xn[i] - x[i];
            yv[i] = gn[i] - g[i];
        }
        const double df = f - fn;
        x = xn;
        f = fn;
        g = gn;
        if (f < best.f) {
            best.x = x;
            best.f = f;
        }
        if (df < cfg.cost_change_tolerance) {
            best.converged = true;
            break;
        }

        const double sy = std::inner_product(sv.begin(), sv.end(), yv.begin(), 0.0);
        double snorm = 0.0, ynorm = 0.0;
        for (int i = 0; i < n; ++i) {
            snorm += sv[i] * sv[i];
            ynorm += yv[i] * yv[i];
        }
        if (sy > 1e-12 * std::sqrt(snorm * ynorm)) {
            const double rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += h[std::size_t(i) * n + j] * yv[j];
                hy[i] = s;
            }
            const double yhy = std::inner_product(yv.begin(), yv.end(), hy.begin(), 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = h[std::size_t(i) * n + j];
                    v -= rho * (sv[i] * hy[j] + hy[i] * sv[j]);
                    v += rho * rho * yhy * sv[i] * sv[j];
                    v += rho * sv[i] * sv[j];
                    h[std::size_t(i) * n + j] = v;
                }
        } else {
            reset_h();
        }
    }
    return best;
}

void normalize(std::vector<double>& u) {
    double s = 0.0;
    for (double v : u) s += v * v;
    s = std::sqrt(s);
    if (s > 0.0)
        for (double& v : u) v /= s;
}

// One multistart optimization over a (possibly tied) parameterization.
TypeOptimum run_multistart(FusedObjective& obj, const ControlType& type,
                           const OptimizationConfig& cfg,
                           const std::vector<std::vector<double>>& param_seeds,
                           std::uint64_t stream_seed) {
    if (cfg.n_starts < 1) throw std::invalid_argument("n_starts must be >= 1");
    const int n = obj.dim();

    TypeOptimum out;
    out.type = type;
    out.cost = std::numeric_limits<double>::infinity();
    out.starts_used = 0;

    auto run_from = [&](std::vector<double> u) {
        if (std::all_of(u.begin(), u.end(), [](double v) { return v == 0.0; }))
            std::fill(u.begin(), u.end(), 1.0);
        normalize(u);
        DescentResult r = bfgs(obj, std::move(u), cfg);

        // clamp durations below the floor to exact zero and re-polish once
        DurationVector t = obj.durations(r.x);
        bool clamped = false;
        std::vector<double> uc = r.x;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t[k] > 0.0 && t[k] < cfg.simplex_floor) {
                uc[obj.pmap[k]] = 0.0;
                clamped = true;
            }
        }
        if (clamped) {
            normalize(uc);
            DescentResult rp = bfgs(obj, std::move(uc), cfg);
            r = std::move(rp);
        }

        ++out.starts_used;
        if (r.f < out.cost) {
            out.cost = r.f;
            out.durations = obj.durations(r.x);
            out.converged = r.converged;
        }
    };

    for (const auto& seed : param_seeds) run_from(seed);

    Rng rng(stream_seed);
    for (int start = 0; start < cfg.n_starts; ++start) {
        std::vector<double> u(n);
        for (int p = 0; p < n; ++p) u[p] = std::sqrt(rng.exponential());
        run_from(std::move(u));
    }
    return out;
}

std::uint64_t stream_seed_for(const OptimizationConfig& cfg, const ControlType& type,
                              double total_duration, int n_params) {
    std::uint64_t s = cfg.rng_seed;
    s ^= fnv1a(type.str());
    std::uint64_t tbits = std::bit_cast<std::uint64_t>(total_duration);
    s ^= tbits + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    s ^= std::uint64_t(n_params) * 0xd1342543de82ef95ULL;
    std::uint64_t st = s;
    return splitmix64(st);
}

std::vector<double> params_from_durations(const DurationVector& d,
                                          const std::vector<int>& pmap, int n_params,
                                          double total_duration) {
    std::vector<double> u(n_params, 0.0);
    for (std::size_t k = 0; k < d.size(); ++k)
        u[pmap[k]] = std::sqrt(std::max(0.0, d[k]) / total_duration);
    return u;
}

} // namespace

TypeOptimum optimize_type(const ControlType& type, double total_duration,
                          ObjectiveKind kind, const OptimizationConfig& config,
                          const std::vector<DurationVector>& seeds) {
    if (!(total_duration > 0.0))
        throw std::invalid_argument("optimize_type: total duration must be > 0");
    const int n = static_cast<int>(type.size());
    std::vector<int> pmap(n);
    std::iota(pmap.begin(), pmap.end(), 0);
    FusedObjective obj(kind, total_duration, type, pmap, n);

    std::vector<std::vector<double>> param_seeds;
    param_seeds.reserve(seeds.size());
    for (const auto& d : seeds) {
        if (d.size() != std::size_t(n))
            throw std::invalid_argument("seed durations have wrong segment count");
        param_seeds.push_back(params_from_durations(d, pmap, n, total_duration));
    }
    return run_multistart(obj, type, config, param_seeds,
                          stream_seed_for(config, type, total_duration, n));
}

TiedType symmetric_ansatz() {
    TiedType t;
    t.type = ControlType("P0P0N0N");
    t.param_of_segment = {0, 1, 2, 3, 2, 1, 0};
    t.n_params = 4;
    return t;
}

TypeOptimum optimize_tied(const TiedType& tied, double total_duration,
                          ObjectiveKind kind, const OptimizationConfig& config,
                          const std::vector<DurationVector>& param_seeds) {
    if (!(total_duration > 0.0))
        throw std::invalid_argument("optimize_tied: total duration must be > 0");
    if (tied.param_of_segment.size() != tied.type.size())
        throw std::invalid_argument("tied parameter map has wrong length");
    FusedObjective obj(kind, total_duration, tied.type, tied.param_of_segment,
                       tied.n_params);

    std::vector<std::vector<double>> seeds;
    seeds.reserve(param_seeds.size());
    for (const auto& s : param_seeds) {
        if (s.size() != std::size_t(tied.n_params))
            throw std::invalid_argument("tied seed has wrong parameter count");
        std::vector<double> u(tied.n_params);
        for (int p = 0; p < tied.n_params; ++p)
            u[p] = std::sqrt(std::max(0.0, s[p]) / total_duration);
        seeds.push_back(std::move(u));
    }
    return run_multistart(obj, tied.type, config, seeds,
                          stream_seed_for(config, tied.type, total_duration,
                                          tied.n_params));
}

std::vector<BangOffControl> zero_padded_embeddings(const BangOffControl& control) {
    static constexpr ControlLevel order[3] = {ControlLevel::P, ControlLevel::Off,
                                              ControlLevel::N};
    std::vector<BangOffControl> out;
    const std::size_t n = control.type.size();
    for (std::size_t pos = 0; pos <= n; ++pos) {
        for (ControlLevel lev : order) {
            if (pos > 0 && control.type.seq[pos - 1] == lev) continue;
            if (pos < n && control.type.seq[pos] == lev) continue;
            BangOffControl padded = control;
            padded.type.seq.insert(padded.type.seq.begin() + pos, lev);
            padded.durations.insert(padded.durations.begin() + pos, 0.0);
            out.push_back(std::move(padded));
        }
    }
    return out;
}

SwitchCountResult optimize_switch_count(int ns, double total_duration,
                                        ObjectiveKind kind,
                                        const OptimizationConfig& config,
                                        int n_threads,
                                        const std::vector<BangOffControl>& seed_controls) {
    const std::vector<ControlType> types = enumerate_types(ns);
    const std::size_t n_types = types.size();

    std::unordered_map<std::string, std::size_t> index_of;
    index_of.reserve(n_types);
    for (std::size_t i = 0; i < n_types; ++i) index_of.emplace(types[i].str(), i);

    std::vector<std::vector<DurationVector>> seeds(n_types);
    for (const auto& c : seed_controls) {
        auto it = index_of.find(c.type.str());
        if (it != index_of.end()) seeds[it->second].push_back(c.durations);
    }

    const bool state_prep = kind == ObjectiveKind::StatePrepInfidelity;
    auto partner_type = [&](const ControlType& t) {
        return state_prep ? flip_type(t) : negate_type(t);
    };

    // one representative per symmetry pair: the lexicographically smaller type
    std::vector<std::size_t> partner(n_types);
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < n_types; ++i) {
        partner[i] = index_of.at(partner_type(types[i]).str());
        if (partner[i] >= i) reps.push_back(i);
    }

    // the representative also absorbs the partner's seeds (transformed)
    for (std::size_t i : reps) {
        const std::size_t p = partner[i];
        if (p == i) continue;
        for (const auto& d : seeds[p]) {
            if (state_prep)
                seeds[i].emplace_back(d.rbegin(), d.rend());
            else
                seeds[i].push_back(d);
        }
    }

    std::vector<TypeOptimum> results(n_types);
    parallel_for(reps.size(), n_threads, [&](std::size_t r) {
        const std::size_t i = reps[r];
        results[i] = optimize_type(types[i], total_duration, kind, config, seeds[i]);
    });

    // mirror onto the partners
    for (std::size_t i : reps) {
        const std::size_t p = partner[i];
        if (p == i) continue;
        TypeOptimum m = results[i];
        m.type = types[p];
        if (state_prep) std::reverse(m.durations.begin(), m.durations.end());
        results[p] = std::move(m);
    }

    SwitchCountResult out;
    out.ns = ns;
    out.per_type = std::move(results);
    out.best_index = 0;
    out.all_converged = true;
    for (std::size_t i = 0; i < n_types; ++i) {
        if (out.per_type[i].cost < out.per_type[out.best_index].cost) out.best_index = i;
        if (!out.per_type[i].converged) out.all_converged = false;
    }
    return out;
}

std::vector<SwitchCountResult> best_over_ns_range(int ns_max, double total_duration,
                                                  ObjectiveKind kind,
                                                  const OptimizationConfig& config,
                                                  int n_threads) {
    std::vector<SwitchCountResult> out;
    out.reserve(std::size_t(ns_max) + 1);
    std::vector<BangOffControl> seeds;
    for (int ns = 0; ns <= ns_max; ++ns) {
        out.push_back(
            optimize_switch_count(ns, total_duration, kind, config, n_threads, seeds));
        seeds = zero_padded_embeddings(out.back().best().control());
    }
    return out;
}

} // namespace bangoff
