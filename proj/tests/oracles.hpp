// Independent reference computations for the test suite. Everything here
// deliberately avoids the library's spectral/adjoint code paths.
#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "bangoff/control.hpp"
#include "bangoff/linalg.hpp"

namespace oracles {

using bangoff::cplx;
using bangoff::Mat4;
using bangoff::Mat4r;
using bangoff::Vec4;

// exp(A) by scaling and squaring with a Taylor series.
inline Mat4 expm_taylor(const Mat4& a) {
    double anorm = 0.0;
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += std::abs(a[i][j]);
        anorm = std::max(anorm, row);
    }
    int s = 0;
    while (anorm > 0.25) {
        anorm *= 0.5;
        ++s;
    }
    Mat4 b = a;
    const double scale = std::ldexp(1.0, -s);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) b[i][j] *= scale;

    Mat4 result = bangoff::mat4_identity();
    Mat4 term = bangoff::mat4_identity();
    for (int k = 1; k <= 40; ++k) {
        term = bangoff::matmul(term, b);
        const double inv = 1.0 / k;
        double tnorm = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                term[i][j] *= inv;
                result[i][j] += term[i][j];
                tnorm = std::max(tnorm, std::abs(term[i][j]));
            }
        if (tnorm < 1e-20) break;
    }
    for (int k = 0; k < s; ++k) result = bangoff::matmul(result, result);
    return result;
}

// det(M) with partial-pivoting LU, real 4x4.
inline double det4(Mat4r m) {
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int piv = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0.0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double f = m[r][c] / m[c][c];
            for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

// Smallest root of the characteristic polynomial det(M - x I), located by a
// sign scan from the Gershgorin lower bound and refined by bisection.
inline double char_poly_min_eigenvalue(const Mat4r& m) {
    auto p = [&](double x) {
        Mat4r shifted = m;
        for (int i = 0; i < 4; ++i) shifted[i][i] -= x;
        return det4(shifted);
    };
    double lo = m[0][0], hi = m[0][0];
    for (int i = 0; i < 4; ++i) {
        double radius = 0.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) radius += std::abs(m[i][j]);
        lo = std::min(lo, m[i][i] - radius);
        hi = std::max(hi, m[i][i] + radius);
    }
    const int n_scan = 4000;
    const double step = (hi - lo) / n_scan;
    double a = lo, fa = p(a);
    double b = 0.0;
    bool found = false;
    for (int k = 1; k <= n_scan; ++k) {
        b = lo + k * step;
        const double fb = p(b);
        if (fa == 0.0) return a;
        if ((fa < 0.0) != (fb < 0.0)) {
            found = true;
            break;
        }
        a = b;
        fa = fb;
    }
    if (!found) throw std::runtime_error("char_poly_min_eigenvalue: no sign change");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = p(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

// Central finite differences through an arbitrary scalar functional of the
// duration vector.
inline std::vector<double>
finite_difference_gradient(const std::function<double(const bangoff::DurationVector&)>& f,
                           const bangoff::DurationVector& t, double h = 1e-6) {
    std::vector<double> g(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        bangoff::DurationVector tp = t, tm = t;
        tp[k] += h;
        tm[k] = std::max(0.0, tm[k] - h);
        const double used = tp[k] - tm[k];
        g[k] = (f(tp) - f(tm)) / used;
    }
    return g;
}

// Random bang-off control with ns <= ns_max and durations uniform on the
// simplex of a random total duration in [t_lo, t_hi].
inline bangoff::BangOffControl random_control(std::mt19937_64& rng, int ns_max,
                                              double t_lo = 0.1, double t_hi = 3.0) {
    std::uniform_int_distribution<int> ns_dist(0, ns_max);
    const int ns = ns_dist(rng);
    const auto types = bangoff::enumerate_types(ns);
    std::uniform_int_distribution<std::size_t> type_dist(0, types.size() - 1);
    bangoff::BangOffControl c;
    c.type = types[type_dist(rng)];
    std::uniform_real_distribution<double> t_dist(t_lo, t_hi);
    std::exponential_distribution<double> e_dist(1.0);
    const double T = t_dist(rng);
    double sum = 0.0;
    c.durations.resize(c.type.size());
    for (double& d : c.durations) {
        d = e_dist(rng);
        sum += d;
    }
    for (double& d : c.durations) d *= T / sum;
    return c;
}

// Exhaustive search over the 3-segment simplex grid {i h, j h, T - (i+j) h}.
inline double grid_min_cost(const std::function<double(const bangoff::DurationVector&)>& f,
                            double T, int divisions) {
    const double h = T / divisions;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= divisions; ++i)
        for (int j = 0; i + j <= divisions; ++j) {
            const double t3 = T - (i + j) * h;
            best = std::min(best, f({i * h, j * h, std::max(0.0, t3)}));
        }
    return best;
}

} // namespace oracles
