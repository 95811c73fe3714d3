#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

/// L_m(x) by the three-term (Bonnet) recurrence.
inline double legendre_eval(std::size_t m, double x) {
    if (m == 0) return 1.0;
    double prev = 1.0, cur = x;
    for (std::size_t k = 1; k < m; ++k) {
        const double next = ((2.0 * double(k) + 1.0) * x * cur - double(k) * prev) / double(k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

/// Legendre-Gauss-Lobatto rule with N nodes on [-1, 1].
struct LglRule {
    std::size_t order = 0; ///< number of nodes N
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes are the zeros of (1 - x^2) L'_{N-1}(x), found by Newton iteration from
/// Chebyshev-Gauss-Lobatto guesses; weights are 2 / (N (N-1) L_{N-1}(x_k)^2).
inline LglRule lgl_rule(std::size_t n) {
    if (n < 2) throw ShapeError("LGL rule needs at least 2 nodes");
    const std::size_t p = n - 1; // polynomial degree
    LglRule rule;
    rule.order = n;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double x = -std::cos(std::numbers::pi * double(k) / double(p));
        bool converged = false;
        for (int it = 0; it < 100; ++it) {
            // Newton step on x L_p(x) - L_{p-1}(x), whose zeros are the LGL nodes.
            const double lp = legendre_eval(p, x);
            const double lpm = legendre_eval(p - 1, x);
            const double dx = (x * lp - lpm) / (double(n) * lp);
            x -= dx;
            if (x > 1.0) x = 1.0;
            if (x < -1.0) x = -1.0;
            if (std::abs(dx) < 1e-15) {
                converged = true;
                break;
            }
        }
        if (!converged) throw NumericalError("LGL Newton iteration did not converge for N=" + std::to_string(n));
        rule.nodes[k] = x;
    }
    rule.nodes.front() = -1.0;
    rule.nodes.back() = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double l = legendre_eval(p, rule.nodes[k]);
        rule.weights[k] = 2.0 / (double(n) * double(p) * l * l);
    }
    return rule;
}

/// Normalised Legendre decomposition (phi) and reconstruction (psi) kernels for
/// an N-point window and M retained modes per axis. Rows are modes; in 2-D
/// mode m = p*M + q pairs 1-D mode p along axis 0 with mode q along axis 1.
struct SpectralKernels {
    std::size_t window = 0; ///< N
    std::size_t modes = 0;  ///< M per axis
    std::size_t rank = 1;
    std::vector<double> phi; ///< [M^rank][N^rank]
    std::vector<double> psi; ///< [M^rank][N^rank]

    std::size_t mode_count() const noexcept { return rank == 1 ? modes : modes * modes; }
    std::size_t window_points() const noexcept { return rank == 1 ? window : window * window; }
    Plane window_plane() const noexcept { return rank == 1 ? Plane{1, window} : Plane{window, window}; }

    double phi_at(std::size_t m, std::size_t i) const { return phi[m * window_points() + i]; }
    double psi_at(std::size_t m, std::size_t i) const { return psi[m * window_points() + i]; }
};

/// Equidistant window points including both ends of [-1, 1].
inline std::vector<double> window_points(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * double(i) / double(n - 1);
    return x;
}

/// Linear interpolation weights a[k][i] from the equidistant points onto the LGL nodes.
inline std::vector<double> lgl_interpolation_matrix(const LglRule& rule) {
    const std::size_t n = rule.order;
    const double h = 2.0 / double(n - 1);
    std::vector<double> a(n * n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = (rule.nodes[k] + 1.0) / h;
        std::size_t j = std::size_t(std::floor(s));
        if (j > n - 2) j = n - 2;
        const double t = s - double(j);
        a[k * n + j] += 1.0 - t;
        a[k * n + j + 1] += t;
    }
    return a;
}

inline SpectralKernels make_kernels_1d(std::size_t n, std::size_t m) {
    if (n < 2) throw ShapeError("spectral window needs at least 2 points");
    if (m < 1 || m > n)
        throw ShapeError("retained modes M=" + std::to_string(m) + " must lie in [1, N=" +
                         std::to_string(n) + "]");
    const LglRule rule = lgl_rule(n);
    const std::vector<double> a = lgl_interpolation_matrix(rule);
    const std::vector<double> xt = window_points(n);
    SpectralKernels k;
    k.window = n;
    k.modes = m;
    k.rank = 1;
    k.phi.assign(m * n, 0.0);
    k.psi.assign(m * n, 0.0);
    for (std::size_t mode = 0; mode < m; ++mode) {
        double norm = 0.0;
        std::vector<double> wl(n);
        for (std::size_t q = 0; q < n; ++q) {
            const double l = legendre_eval(mode, rule.nodes[q]);
            wl[q] = rule.weights[q] * l;
            norm += rule.weights[q] * l * l;
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t q = 0; q < n; ++q) s += wl[q] * a[q * n + i];
            k.phi[mode * n + i] = s / norm;
            k.psi[mode * n + i] = legendre_eval(mode, xt[i]);
        }
    }
    return k;
}

inline SpectralKernels make_kernels_2d(std::size_t n, std::size_t m) {
    const SpectralKernels k1 = make_kernels_1d(n, m);
    SpectralKernels k;
    k.window = n;
    k.modes = m;
    k.rank = 2;
    k.phi.assign(m * m * n * n, 0.0);
    k.psi.assign(m * m * n * n, 0.0);
    for (std::size_t p = 0; p < m; ++p)
        for (std::size_t q = 0; q < m; ++q) {
            const std::size_t mode = p * m + q;
            for (std::size_t i1 = 0; i1 < n; ++i1)
                for (std::size_t i2 = 0; i2 < n; ++i2) {
                    const std::size_t idx = (mode * n + i1) * n + i2;
                    k.phi[idx] = k1.phi[p * n + i1] * k1.phi[q * n + i2];
                    k.psi[idx] = k1.psi[p * n + i1] * k1.psi[q * n + i2];
                }
        }
    return k;
}

inline SpectralKernels make_kernels(std::size_t rank, std::size_t n, std::size_t m) {
    if (rank == 1) return make_kernels_1d(n, m);
    if (rank == 2) return make_kernels_2d(n, m);
    throw ShapeError("spectral kernels support rank 1 or 2");
}

} // namespace lno
