#pragma once

#include <vector>

#include "bangoff/control.hpp"
#include "bangoff/linalg.hpp"

namespace bangoff {

// Pure two-qubit state, amplitudes on |00>, |01>, |10>, |11>.
struct TwoQubitState {
    Vec4 amp{};

    cplx a() const { return amp[0]; }
    cplx b() const { return amp[1]; }
    cplx c() const { return amp[2]; }
    cplx d() const { return amp[3]; }
    double norm() const { return bangoff::norm(amp); }
};

// H = -2g S1z S2z - h_z (S1z + S2z) - h_x (S1x + S2x), g = h_z = 1, S = sigma/2.
// Real symmetric in the computational basis.
struct HamiltonianMatrix {
    Mat4r m{};
    double g = 1.0;
    double hz = 1.0;
    double hx = 0.0;
};

// Eigensystem of a real symmetric 4x4 matrix: eigenvalues ascending,
// eigenvectors as columns of an orthogonal matrix.
struct SpectralDecomposition {
    std::array<double, 4> eigenvalues{};
    Mat4r eigenvectors{}; // eigenvectors[row][col], column = eigenvector
};

// One constant-field segment propagator U = V exp(-i Lambda dt) V^T.
struct Propagator {
    Mat4 u = mat4_identity();
    double hx = 0.0;
    double dt = 0.0;
};

struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;
};

// Coefficients on |Phi+>, |Phi->, |Psi+> plus the singlet residual
// (coefficient on (|01> - |10>)/sqrt2, zero throughout the triplet sector).
struct BellCoefficients {
    cplx c1, c2, c3, singlet_residual;
};

HamiltonianMatrix build_hamiltonian(double hx);

// Cyclic Jacobi on the 4x4 real symmetric matrix; sweeps until every
// off-diagonal entry is below offdiag_tol.
SpectralDecomposition spectral_decompose(const Mat4r& m, double offdiag_tol = 1e-15);

// Normalized minimal eigenvector of `m`, phase fixed so the largest-magnitude
// amplitude is real positive. Throws std::runtime_error when the ground level
// is degenerate (gap below gap_tol).
Vec4 lowest_eigenvector(const Mat4r& m, double gap_tol = 1e-10);

TwoQubitState ground_state(double hx);

// Spectral-form propagator; exact identity at dt = 0. Decompositions for
// hx in {+M, 0, -M} are cached.
Propagator propagator(double hx, double dt);

// Apply exp(-i H(level) dt) to a state using the cached level decomposition.
Vec4 apply_segment(ControlLevel level, double dt, const Vec4& in);

// Apply exp(-i H dt) for an arbitrary decomposition (dt may be negative,
// giving the adjoint of the forward propagator).
Vec4 apply_spectral(const SpectralDecomposition& d, double dt, const Vec4& in);

const SpectralDecomposition& level_decomposition(ControlLevel level);
const Mat4r& level_hamiltonian(ControlLevel level);

TwoQubitState evolve(const TwoQubitState& state, const BangOffControl& control);

struct EvolveGradients {
    TwoQubitState final_state;
    std::vector<Vec4> d_dt; // d|psi_f>/dt_k, one per segment
};

// Final state plus all segment-duration derivative states, computed with one
// forward and one backward sweep (linear in the segment count).
EvolveGradients evolve_with_segment_gradients(const TwoQubitState& state,
                                              const BangOffControl& control);

double fidelity(const TwoQubitState& final_state, const TwoQubitState& target);

double concurrence(const TwoQubitState& state); // 2|ad - bc|

// Bloch vector of the reduced density matrix after tracing out qubit 2.
BlochVector reduced_bloch(const TwoQubitState& state);

BellCoefficients bell_coefficients(const TwoQubitState& state);

struct TrajectorySample {
    double t;
    TwoQubitState state;
    BlochVector bloch;
    BellCoefficients bell;
    double concurrence;
};

// States at t = 0, step, 2 step, ..., T (T always included). Each sample is
// reached by exact sub-segment propagation from the preceding segment
// boundary.
std::vector<TrajectorySample> sample_trajectory(const TwoQubitState& initial,
                                                const BangOffControl& control,
                                                double sample_step);

} // namespace bangoff
