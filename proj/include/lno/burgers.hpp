#pragma once

// Viscous Burgers on a periodic grid: implicit Euler in time, second-order
// central differences in space, damped Newton iteration with a sparse LU solve.

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"
#include "lno/trajectory.hpp"

namespace lno {

struct NewtonSettings {
    double tolerance = 1e-7; ///< max |increment|
    int max_iterations = 50;
};

namespace detail {

using SpMat = Eigen::SparseMatrix<double>;
using Triplets = std::vector<Eigen::Triplet<double>>;

inline std::size_t wrap(long i, std::size_t n) { return std::size_t(((i % long(n)) + long(n)) % long(n)); }

// Conservative form: (u^2/2)_x -> (u_{i+1}^2 - u_{i-1}^2) / (4 dx)
inline void burgers1d_system(const std::vector<double>& v, const std::vector<double>& un, double mu, double dt,
                             double dx, Eigen::VectorXd& f, Triplets& jac) {
    const std::size_t n = v.size();
    const double a = 1.0 / (4.0 * dx), d = mu / (dx * dx);
    jac.clear();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = wrap(long(i) + 1, n), im = wrap(long(i) - 1, n);
        f[long(i)] = (v[i] - un[i]) / dt + a * (v[ip] * v[ip] - v[im] * v[im]) - d * (v[ip] - 2 * v[i] + v[im]);
        jac.emplace_back(int(i), int(i), 1.0 / dt + 2 * d);
        jac.emplace_back(int(i), int(ip), 2 * a * v[ip] - d);
        jac.emplace_back(int(i), int(im), -2 * a * v[im] - d);
    }
}

// Advective form on two channels (u, v), axis 0 = x, axis 1 = y.
inline void burgers2d_system(const std::vector<double>& w, const std::vector<double>& wn, std::size_t n0,
                             std::size_t n1, double mu, double dt, double dx, Eigen::VectorXd& f,
                             Triplets& jac) {
    const std::size_t pts = n0 * n1;
    const double h = 1.0 / (2.0 * dx), d = mu / (dx * dx);
    auto id = [&](std::size_t c, std::size_t i, std::size_t j) { return c * pts + i * n1 + j; };
    jac.clear();
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) {
            const std::size_t ip = wrap(long(i) + 1, n0), im = wrap(long(i) - 1, n0);
            const std::size_t jp = wrap(long(j) + 1, n1), jm = wrap(long(j) - 1, n1);
            const double u = w[id(0, i, j)], v = w[id(1, i, j)];
            for (std::size_t c = 0; c < 2; ++c) {
                const double q = w[id(c, i, j)];
                const double qx = (w[id(c, ip, j)] - w[id(c, im, j)]) * h;
                const double qy = (w[id(c, i, jp)] - w[id(c, i, jm)]) * h;
                const double lap = w[id(c, ip, j)] + w[id(c, im, j)] + w[id(c, i, jp)] + w[id(c, i, jm)] - 4 * q;
                const std::size_t row = id(c, i, j);
                f[long(row)] = (q - wn[row]) / dt + u * qx + v * qy - d * lap;
                double diag = 1.0 / dt + 4 * d;
                // derivative of the advecting component (u for c=0 multiplies qx, v for c=1 multiplies qy)
                if (c == 0) {
                    diag += qx;
                    jac.emplace_back(int(row), int(id(1, i, j)), qy);
                } else {
                    diag += qy;
                    jac.emplace_back(int(row), int(id(0, i, j)), qx);
                }
                jac.emplace_back(int(row), int(row), diag);
                jac.emplace_back(int(row), int(id(c, ip, j)), u * h - d);
                jac.emplace_back(int(row), int(id(c, im, j)), -u * h - d);
                jac.emplace_back(int(row), int(id(c, i, jp)), v * h - d);
                jac.emplace_back(int(row), int(id(c, i, jm)), -v * h - d);
            }
        }
}

} // namespace detail

/// One implicit-Euler step from `state`. 1-D fields need one channel, 2-D fields two.
inline GridField burgers_step(const GridField& state, double mu, double dt, const NewtonSettings& newton = {}) {
    const std::size_t rank = state.rank();
    if (rank == 1 && state.channels() != 1)
        throw ShapeError("1-D Burgers needs a single channel, got " + state.shape_string());
    if (rank == 2 && state.channels() != 2)
        throw ShapeError("2-D Burgers needs two velocity channels, got " + state.shape_string());
    for (std::size_t a = 0; a < rank; ++a)
        if (state.dims()[a] < 3) throw ShapeError("Burgers grid needs at least 3 points per axis");
    const std::size_t n = state.size();
    const std::vector<double> un(state.values().begin(), state.values().end());
    std::vector<double> v = un;
    Eigen::VectorXd f = Eigen::VectorXd::Zero(Eigen::Index(n)), delta;
    detail::Triplets trip;
    detail::SpMat jac{Eigen::Index(n), Eigen::Index(n)};
    Eigen::SparseLU<detail::SpMat, Eigen::COLAMDOrdering<int>> lu;
    auto assemble = [&](const std::vector<double>& w, Eigen::VectorXd& res) {
        if (rank == 1)
            detail::burgers1d_system(w, un, mu, dt, state.dx(), res, trip);
        else
            detail::burgers2d_system(w, un, state.dims()[0], state.dims()[1], mu, dt, state.dx(), res, trip);
    };
    bool analysed = false;
    std::vector<double> trial(n);
    Eigen::VectorXd f_trial = f;
    assemble(v, f);
    for (int it = 0; it < newton.max_iterations; ++it) {
        jac.setFromTriplets(trip.begin(), trip.end());
        if (!analysed) {
            lu.analyzePattern(jac);
            analysed = true;
        }
        lu.factorize(jac);
        if (lu.info() != Eigen::Success) throw NumericalError("Burgers Newton: singular Jacobian");
        delta = lu.solve(-f);
        // Backtrack on the residual norm so large steps cannot run away; a
        // full step is taken whenever it reduces the residual.
        const double r0 = f.norm();
        double lambda = 1.0;
        for (int half = 0; half < 20; ++half) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = v[i] + lambda * delta[long(i)];
            assemble(trial, f_trial);
            if (f_trial.norm() < r0 || !std::isfinite(r0)) break;
            lambda *= 0.5;
        }
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(trial[i] - v[i]));
        v.swap(trial);
        f.swap(f_trial);
        if (!std::isfinite(worst)) break;
        if (worst < newton.tolerance) return GridField(state.channels(), state.dims(), state.dx(), std::move(v));
    }
    throw NumericalError("Burgers Newton iteration did not converge within " +
                         std::to_string(newton.max_iterations) + " iterations");
}

/// `substeps` implicit-Euler steps of dt/substeps are taken between recorded
/// frames; 1 reproduces the plain scheme at the frame interval.
inline Trajectory solve_burgers(const GridField& ic, double mu, double dt, std::size_t steps,
                                const NewtonSettings& newton = {}, std::size_t substeps = 1) {
    if (!(mu > 0.0)) throw ShapeError("Burgers viscosity must be positive");
    if (!(dt > 0.0)) throw ShapeError("Burgers dt must be positive");
    if (substeps == 0) throw ShapeError("Burgers substeps must be at least 1");
    Trajectory t;
    t.dt = dt;
    t.equation = "burgers";
    t.parameter = mu;
    t.frames.reserve(steps + 1);
    t.frames.push_back(ic);
    const double h = dt / double(substeps);
    for (std::size_t s = 0; s < steps; ++s) {
        GridField u = t.frames.back();
        for (std::size_t k = 0; k < substeps; ++k) u = burgers_step(u, mu, h, newton);
        t.frames.push_back(std::move(u));
    }
    return t;
}

} // namespace lno
