#pragma once

// Linear wave equation p_tt = a0^2 lap(p) on a periodic grid. The 5-point (3-point
// in 1-D) Laplacian is diagonal in the discrete Fourier basis, so each Newmark
// step (beta = 1/4, gamma = 1/2) reduces to a scalar update per mode.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lno/errors.hpp"
#include "lno/fft.hpp"
#include "lno/grid_field.hpp"
#include "lno/trajectory.hpp"

namespace lno {

/// Eigenvalue of the periodic second-difference Laplacian for the given mode.
inline double laplacian_symbol(const std::vector<std::size_t>& mode, const std::vector<std::size_t>& dims,
                               double dx) {
    double lam = 0.0;
    for (std::size_t a = 0; a < dims.size(); ++a) {
        const double s = std::sin(std::numbers::pi * double(mode[a]) / double(dims[a]));
        lam -= 4.0 * s * s / (dx * dx);
    }
    return lam;
}

/// Frames hold (p, dp/dt); the initial velocity is zero.
inline Trajectory solve_wave(const GridField& ic_p, double a0, double dt, std::size_t steps) {
    if (ic_p.channels() != 1) throw ShapeError("wave initial condition must be a single scalar channel");
    if (!(dt > 0.0)) throw ShapeError("wave dt must be positive");
    const auto& dims = ic_p.dims();
    RealFft fft(dims);
    const std::size_t ns = fft.spectrum_size();
    const std::size_t half = fft.half_cols();

    std::vector<double> omega2(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        std::vector<std::size_t> mode;
        if (dims.size() == 1) mode = {s};
        else mode = {s / half, s % half};
        omega2[s] = -a0 * a0 * laplacian_symbol(mode, dims, ic_p.dx());
    }

    using C = std::complex<double>;
    std::vector<C> p(ns), v(ns, C{}), acc(ns);
    fft.forward(ic_p.values().data(), p.data());
    for (std::size_t s = 0; s < ns; ++s) acc[s] = -omega2[s] * p[s];

    Trajectory t;
    t.dt = dt;
    t.equation = "wave";
    t.parameter = a0;
    auto emit = [&] {
        GridField f(2, dims, ic_p.dx());
        fft.inverse(p.data(), f.channel(0).data());
        fft.inverse(v.data(), f.channel(1).data());
        t.frames.push_back(std::move(f));
    };
    emit();
    const double b = dt * dt / 4.0;
    for (std::size_t k = 0; k < steps; ++k) {
        for (std::size_t s = 0; s < ns; ++s) {
            const C pred = p[s] + dt * v[s] + b * acc[s];
            const C p_new = pred / (1.0 + b * omega2[s]);
            const C a_new = -omega2[s] * p_new;
            v[s] += 0.5 * dt * (acc[s] + a_new);
            p[s] = p_new;
            acc[s] = a_new;
        }
        emit();
    }
    return t;
}

/// 0.5 |q|^2 + 0.5 a0^2 |grad_h p|^2 with forward differences, summed times dx^d.
inline double wave_energy(const GridField& frame, double a0) {
    if (frame.channels() != 2) throw ShapeError("wave energy needs (p, dp/dt) frames");
    const double dx = frame.dx();
    const Plane pl = frame.plane();
    double kin = 0.0, pot = 0.0;
    for (std::size_t r = 0; r < pl.rows; ++r)
        for (std::size_t c = 0; c < pl.cols; ++c) {
            const std::size_t i = r * pl.cols + c;
            const double q = frame.at(1, i);
            kin += q * q;
            const double p = frame.at(0, i);
            const double gx = frame.at(0, r * pl.cols + (c + 1) % pl.cols) - p;
            pot += gx * gx;
            if (frame.rank() == 2) {
                const double gy = frame.at(0, ((r + 1) % pl.rows) * pl.cols + c) - p;
                pot += gy * gy;
            }
        }
    const double cell = std::pow(dx, double(frame.rank()));
    return 0.5 * cell * (kin + a0 * a0 * pot / (dx * dx));
}

} // namespace lno
