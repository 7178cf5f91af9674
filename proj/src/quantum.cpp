#include "bangoff/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bangoff {

HamiltonianMatrix build_hamiltonian(double hx) {
    if (!std::isfinite(hx))
        throw std::invalid_argument("build_hamiltonian: hx must be finite");
    HamiltonianMatrix h;
    h.hx = hx;
    // -2g S1z S2z - hz (S1z + S2z) on the diagonal
    h.m[0][0] = -1.5;
    h.m[1][1] = 0.5;
    h.m[2][2] = 0.5;
    h.m[3][3] = 0.5;
    // -hx (S1x + S2x): couples every single-flip pair with -hx/2
    const double s = -0.5 * hx;
    h.m[0][1] = h.m[1][0] = s;
    h.m[0][2] = h.m[2][0] = s;
    h.m[1][3] = h.m[3][1] = s;
    h.m[2][3] = h.m[3][2] = s;
    return h;
}

SpectralDecomposition spectral_decompose(const Mat4r& m, double offdiag_tol) {
    Mat4r a = m;
    Mat4r v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

    auto max_offdiag = [&]() {
        double mx = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) mx = std::max(mx, std::abs(a[p][q]));
        return mx;
    };

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && max_offdiag() > offdiag_tol; ++sweep) {
        for (int p = 0; p < 4; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                const double apq = a[p][q];
                if (apq == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0) t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = a[q][p] = 0.0;
                for (int k = 0; k < 4; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = a[p][k] = akp - s * (akq + tau * akp);
                    a[k][q] = a[q][k] = akq + s * (akp - tau * akq);
                }
                for (int k = 0; k < 4; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = vkp - s * (vkq + tau * vkp);
                    v[k][q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }

    SpectralDecomposition d;
    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return a[i][i] < a[j][j]; });
    for (int c = 0; c < 4; ++c) {
        d.eigenvalues[c] = a[order[c]][order[c]];
        for (int r = 0; r < 4; ++r) d.eigenvectors[r][c] = v[r][order[c]];
    }
    return d;
}

Vec4 lowest_eigenvector(const Mat4r& m, double gap_tol) {
    const SpectralDecomposition d = spectral_decompose(m);
    if (d.eigenvalues[1] - d.eigenvalues[0] < gap_tol)
        throw std::runtime_error("ground level is degenerate (gap below tolerance)");
    std::array<double, 4> g;
    for (int r = 0; r < 4; ++r) g[r] = d.eigenvectors[r][0];
    int imax = 0;
    for (int r = 1; r < 4; ++r)
        if (std::abs(g[r]) > std::abs(g[imax])) imax = r;
    const double sign = g[imax] >= 0.0 ? 1.0 : -1.0;
    Vec4 out;
    for (int r = 0; r < 4; ++r) out[r] = sign * g[r];
    return out;
}

TwoQubitState ground_state(double hx) {
    return TwoQubitState{lowest_eigenvector(build_hamiltonian(hx).m)};
}

namespace {

struct LevelData {
    SpectralDecomposition decomp;
    Mat4r hmat;
};

const LevelData& level_data(ControlLevel level) {
    static const std::array<LevelData, 3> cache = [] {
        std::array<LevelData, 3> c;
        for (int i = 0; i < 3; ++i) {
            const auto lev = static_cast<ControlLevel>(i);
            c[i].hmat = build_hamiltonian(level_value(lev)).m;
            c[i].decomp = spectral_decompose(c[i].hmat);
        }
        return c;
    }();
    return cache[static_cast<int>(level)];
}

Vec4 apply_decomp(const SpectralDecomposition& d, double dt, const Vec4& in) {
    if (dt == 0.0) return in;
    const Mat4r& v = d.eigenvectors;
    Vec4 y{};
    for (int m = 0; m < 4; ++m) {
        cplx s = 0.0;
        for (int k = 0; k < 4; ++k) s += v[k][m] * in[k];
        y[m] = s * std::polar(1.0, -d.eigenvalues[m] * dt);
    }
    Vec4 out{};
    for (int j = 0; j < 4; ++j) {
        cplx s = 0.0;
        for (int m = 0; m < 4; ++m) s += v[j][m] * y[m];
        out[j] = s;
    }
    return out;
}

Mat4 propagator_matrix(const SpectralDecomposition& d, double dt) {
    if (dt == 0.0) return mat4_identity();
    const Mat4r& v = d.eigenvectors;
    std::array<cplx, 4> w;
    for (int m = 0; m < 4; ++m) w[m] = std::polar(1.0, -d.eigenvalues[m] * dt);
    Mat4 u{};
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            cplx s = 0.0;
            for (int m = 0; m < 4; ++m) s += v[j][m] * w[m] * v[k][m];
            u[j][k] = s;
        }
    return u;
}

} // namespace

const SpectralDecomposition& level_decomposition(ControlLevel level) {
    return level_data(level).decomp;
}

const Mat4r& level_hamiltonian(ControlLevel level) {
    return level_data(level).hmat;
}

Vec4 apply_segment(ControlLevel level, double dt, const Vec4& in) {
    return apply_decomp(level_decomposition(level), dt, in);
}

Vec4 apply_spectral(const SpectralDecomposition& d, double dt, const Vec4& in) {
    return apply_decomp(d, dt, in);
}

Propagator propagator(double hx, double dt) {
    if (!(dt >= 0.0)) throw std::invalid_argument("propagator: dt must be >= 0");
    Propagator p;
    p.hx = hx;
    p.dt = dt;
    if (hx == level_value(ControlLevel::P))
        p.u = propagator_matrix(level_decomposition(ControlLevel::P), dt);
    else if (hx == 0.0)
        p.u = propagator_matrix(level_decomposition(ControlLevel::Off), dt);
    else if (hx == level_value(ControlLevel::N))
        p.u = propagator_matrix(level_decomposition(ControlLevel::N), dt);
    else
        p.u = propagator_matrix(spectral_decompose(build_hamiltonian(hx).m), dt);
    return p;
}

TwoQubitState evolve(const TwoQubitState& state, const BangOffControl& control) {
    validate(control, control.total_duration());
    Vec4 psi = state.amp;
    for (std::size_t k = 0; k < control.segments(); ++k)
        psi = apply_segment(control.type.seq[k], control.durations[k], psi);
    return TwoQubitState{psi};
}

EvolveGradients evolve_with_segment_gradients(const TwoQubitState& state,
                                              const BangOffControl& control) {
    validate(control, control.total_duration());
    const std::size_t n = control.segments();

    // forward: phi[k] = U_k ... U_1 |psi>
    std::vector<Vec4> phi(n + 1);
    phi[0] = state.amp;
    for (std::size_t k = 0; k < n; ++k)
        phi[k + 1] = apply_segment(control.type.seq[k], control.durations[k], phi[k]);

    // backward: B = U_n ... U_{k+2}, gradient_k = B_{k+1} (-i H_k) phi[k+1]
    EvolveGradients out;
    out.final_state = TwoQubitState{phi[n]};
    out.d_dt.resize(n);
    Mat4 b = mat4_identity();
    const cplx mi(0.0, -1.0);
    for (std::size_t k = n; k-- > 0;) {
        Vec4 v = matvec(level_hamiltonian(control.type.seq[k]), phi[k + 1]);
        for (cplx& x : v) x *= mi;
        out.d_dt[k] = matvec(b, v);
        if (k > 0) {
            const Mat4 uk = propagator_matrix(level_decomposition(control.type.seq[k]),
                                              control.durations[k]);
            b = matmul(b, uk);
        }
    }
    return out;
}

double fidelity(const TwoQubitState& final_state, const TwoQubitState& target) {
    return std::norm(inner(target.amp, final_state.amp));
}

double concurrence(const TwoQubitState& s) {
    return 2.0 * std::abs(s.a() * s.d() - s.b() * s.c());
}

BlochVector reduced_bloch(const TwoQubitState& s) {
    // rho^(1) = Tr_2 |psi><psi|
    const cplx r01 = s.a() * std::conj(s.c()) + s.b() * std::conj(s.d());
    const double r00 = std::norm(s.a()) + std::norm(s.b());
    const double r11 = std::norm(s.c()) + std::norm(s.d());
    return BlochVector{2.0 * r01.real(), -2.0 * r01.imag(), r00 - r11};
}

BellCoefficients bell_coefficients(const TwoQubitState& s) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    BellCoefficients b;
    b.c1 = (s.a() + s.d()) * inv_sqrt2;
    b.c2 = (s.a() - s.d()) * inv_sqrt2;
    b.c3 = (s.b() + s.c()) * inv_sqrt2;
    b.singlet_residual = (s.b() - s.c()) * inv_sqrt2;
    return b;
}

std::vector<TrajectorySample> sample_trajectory(const TwoQubitState& initial,
                                                const BangOffControl& control,
                                                double sample_step) {
    if (!(sample_step > 0.0))
        throw std::invalid_argument("sample_trajectory: sample_step must be > 0");
    validate(control, control.total_duration());
    const double T = control.total_duration();

    std::vector<double> times;
    for (std::size_t j = 0;; ++j) {
        const double t = double(j) * sample_step;
        if (t > T) break;
        times.push_back(t);
    }
    if (times.empty() || T - times.back() > 1e-12 * std::max(1.0, T))
        times.push_back(T);

    std::vector<TrajectorySample> out;
    out.reserve(times.size());

    // walk segments, keeping the exact boundary state of the current segment
    Vec4 boundary = initial.amp;
    std::size_t seg = 0;
    double seg_start = 0.0;
    for (double t : times) {
        while (seg < control.segments() &&
               t > seg_start + control.durations[seg]) {
            boundary = apply_segment(control.type.seq[seg], control.durations[seg],
                                     boundary);
            seg_start += control.durations[seg];
            ++seg;
        }
        Vec4 psi = boundary;
        if (seg < control.segments())
            psi = apply_segment(control.type.seq[seg], t - seg_start, boundary);
        TrajectorySample s;
        s.t = t;
        s.state = TwoQubitState{psi};
        s.bloch = reduced_bloch(s.state);
        s.bell = bell_coefficients(s.state);
        s.concurrence = concurrence(s.state);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace bangoff
