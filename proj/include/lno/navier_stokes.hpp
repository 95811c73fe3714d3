#pragma once

// Incompressible Navier-Stokes on the doubly periodic square [-1,1)^2 in
// vorticity-streamfunction form, pseudo-spectral with 2/3 dealiasing and an
// integrating-factor RK4 integrator that sub-steps to respect a CFL limit.
//   w = v_x - u_y,  lap(psi) = -w,  u = psi_y,  v = -psi_x

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "lno/errors.hpp"
#include "lno/fft.hpp"
#include "lno/grid_field.hpp"
#include "lno/trajectory.hpp"

namespace lno {

struct NsSettings {
    double cfl = 0.5;
    std::size_t max_substeps = 1000000;
};

class NsSpectral {
  public:
    using C = std::complex<double>;

    NsSpectral(std::size_t n0, std::size_t n1, double dx, double mu)
        : n0_(n0), n1_(n1), dx_(dx), mu_(mu), fft_({n0, n1}) {
        if (n0 < 4 || n1 < 4) throw ShapeError("Navier-Stokes grid needs at least 4 points per axis");
        const std::size_t half = fft_.half_cols();
        const std::size_t ns = fft_.spectrum_size();
        kx_.resize(ns);
        ky_.resize(ns);
        k2_.resize(ns);
        mask_.resize(ns);
        // Physical period is n*dx along each axis.
        const double s0 = 2.0 * std::numbers::pi / (double(n0) * dx);
        const double s1 = 2.0 * std::numbers::pi / (double(n1) * dx);
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < half; ++j) {
                const std::size_t s = i * half + j;
                const long mi = fft_frequency(i, n0), mj = long(j);
                k2_[s] = s0 * s0 * double(mi * mi) + s1 * s1 * double(mj * mj);
                // derivatives drop the Nyquist entry
                kx_[s] = (2 * std::size_t(std::abs(mi)) == n0) ? 0.0 : s0 * double(mi);
                ky_[s] = (2 * std::size_t(mj) == n1) ? 0.0 : s1 * double(mj);
                mask_[s] = (3 * std::size_t(std::abs(mi)) < n0 && 3 * std::size_t(mj) < n1) ? 1.0 : 0.0;
            }
    }

    std::size_t spectrum_size() const { return fft_.spectrum_size(); }

    /// Vorticity spectrum and mean velocity of a 2-channel field.
    void load(const GridField& uv, std::vector<C>& w_hat, double mean[2]) {
        std::vector<C> uh(spectrum_size()), vh(spectrum_size());
        fft_.forward(uv.channel(0).data(), uh.data());
        fft_.forward(uv.channel(1).data(), vh.data());
        w_hat.resize(spectrum_size());
        const C I(0.0, 1.0);
        for (std::size_t s = 0; s < w_hat.size(); ++s) w_hat[s] = I * kx_[s] * vh[s] - I * ky_[s] * uh[s];
        const double pts = double(n0_ * n1_);
        mean[0] = uh[0].real() / pts;
        mean[1] = vh[0].real() / pts;
    }

    /// Curl of a 2-channel forcing field, in spectral space.
    std::vector<C> curl(const GridField& f) {
        double unused[2];
        std::vector<C> out;
        load(f, out, unused);
        return out;
    }

    GridField velocity(const std::vector<C>& w_hat, const double mean[2]) {
        std::vector<C> uh(spectrum_size()), vh(spectrum_size());
        velocity_hat(w_hat, mean, uh, vh);
        GridField out(2, {n0_, n1_}, dx_);
        fft_.inverse(uh.data(), out.channel(0).data());
        fft_.inverse(vh.data(), out.channel(1).data());
        return out;
    }

    double max_speed(const std::vector<C>& w_hat, const double mean[2]) {
        return velocity(w_hat, mean).max_abs();
    }

    /// Advances w_hat by `h` with integrating-factor RK4.
    void rk4(std::vector<C>& w, const double mean[2], double h, const std::vector<C>* forcing) {
        const std::size_t ns = w.size();
        std::vector<C> a(ns), b(ns), c(ns), d(ns), tmp(ns);
        std::vector<double> e(ns), e2(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            e[s] = std::exp(-mu_ * k2_[s] * h);
            e2[s] = std::exp(-mu_ * k2_[s] * h / 2);
        }
        rhs(w, mean, forcing, a);
        for (std::size_t s = 0; s < ns; ++s) tmp[s] = e2[s] * (w[s] + 0.5 * h * a[s]);
        rhs(tmp, mean, forcing, b);
        for (std::size_t s = 0; s < ns; ++s) tmp[s] = e2[s] * w[s] + 0.5 * h * b[s];
        rhs(tmp, mean, forcing, c);
        for (std::size_t s = 0; s < ns; ++s) tmp[s] = e[s] * w[s] + h * e2[s] * c[s];
        rhs(tmp, mean, forcing, d);
        for (std::size_t s = 0; s < ns; ++s)
            w[s] = e[s] * w[s] + h / 6.0 * (e[s] * a[s] + 2.0 * e2[s] * (b[s] + c[s]) + d[s]);
    }

    /// Integrates over `duration` with CFL-limited sub-steps.
    void advance(std::vector<C>& w, const double mean[2], double duration, const std::vector<C>* forcing,
                 const NsSettings& cfg) {
        const double speed = max_speed(w, mean);
        std::size_t sub = 1;
        if (speed > 0.0) sub = std::size_t(std::ceil(duration * speed / (cfg.cfl * dx_)));
        sub = std::max<std::size_t>(sub, 1);
        if (sub > cfg.max_substeps)
            throw NumericalError("Navier-Stokes CFL sub-step underflow: " + std::to_string(sub) +
                                 " sub-steps needed (max |u| = " + std::to_string(speed) + ")");
        const double h = duration / double(sub);
        for (std::size_t k = 0; k < sub; ++k) rk4(w, mean, h, forcing);
        for (const C& v : w)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw NumericalError("Navier-Stokes integration produced non-finite vorticity");
    }

    /// Spectral divergence u_x + v_y of a velocity field.
    GridField divergence(const GridField& uv) {
        std::vector<C> uh(spectrum_size()), vh(spectrum_size()), dh(spectrum_size());
        fft_.forward(uv.channel(0).data(), uh.data());
        fft_.forward(uv.channel(1).data(), vh.data());
        const C I(0.0, 1.0);
        for (std::size_t s = 0; s < dh.size(); ++s) dh[s] = I * (kx_[s] * uh[s] + ky_[s] * vh[s]);
        GridField out(1, {n0_, n1_}, dx_);
        fft_.inverse(dh.data(), out.channel(0).data());
        return out;
    }

  private:
    void velocity_hat(const std::vector<C>& w, const double mean[2], std::vector<C>& uh, std::vector<C>& vh) const {
        const C I(0.0, 1.0);
        const double pts = double(n0_ * n1_);
        for (std::size_t s = 0; s < w.size(); ++s) {
            const C psi = k2_[s] > 0.0 ? w[s] / k2_[s] : C{};
            uh[s] = I * ky_[s] * psi;
            vh[s] = -I * kx_[s] * psi;
        }
        uh[0] = mean[0] * pts;
        vh[0] = mean[1] * pts;
    }

    // -(u w_x + v w_y) dealiased, plus the forcing curl.
    void rhs(const std::vector<C>& w, const double mean[2], const std::vector<C>* forcing, std::vector<C>& out) {
        const std::size_t ns = w.size(), np = n0_ * n1_;
        const C I(0.0, 1.0);
        std::vector<C> uh(ns), vh(ns), wx(ns), wy(ns);
        velocity_hat(w, mean, uh, vh);
        for (std::size_t s = 0; s < ns; ++s) {
            wx[s] = I * kx_[s] * w[s];
            wy[s] = I * ky_[s] * w[s];
        }
        std::vector<double> u(np), v(np), gx(np), gy(np), adv(np);
        fft_.inverse(uh.data(), u.data());
        fft_.inverse(vh.data(), v.data());
        fft_.inverse(wx.data(), gx.data());
        fft_.inverse(wy.data(), gy.data());
        for (std::size_t i = 0; i < np; ++i) adv[i] = u[i] * gx[i] + v[i] * gy[i];
        fft_.forward(adv.data(), out.data());
        for (std::size_t s = 0; s < ns; ++s) {
            out[s] = -mask_[s] * out[s];
            if (forcing) out[s] += (*forcing)[s];
        }
    }

    std::size_t n0_, n1_;
    double dx_, mu_;
    RealFft fft_;
    std::vector<double> kx_, ky_, k2_, mask_;
};

/// Records steps+1 frames of (u, v) spaced dt apart. With a forcing field, the
/// force acts for `force_duration` first and recording starts once it is removed.
inline Trajectory solve_ns_periodic(const GridField& ic, double mu, double dt, std::size_t steps,
                                    const std::optional<GridField>& force = std::nullopt,
                                    double force_duration = 0.05, const NsSettings& cfg = {}) {
    if (ic.rank() != 2 || ic.channels() != 2)
        throw ShapeError("Navier-Stokes needs a 2-channel 2-D velocity field, got " + ic.shape_string());
    if (!(mu > 0.0) || !(dt > 0.0)) throw ShapeError("Navier-Stokes mu and dt must be positive");
    NsSpectral ns(ic.dims()[0], ic.dims()[1], ic.dx(), mu);
    std::vector<std::complex<double>> w;
    double mean[2];
    ns.load(ic, w, mean);
    if (force) {
        if (!force->same_shape(ic)) throw ShapeError("forcing shape must match the velocity field");
        const auto fc = ns.curl(*force);
        if (force_duration > 0.0) ns.advance(w, mean, force_duration, &fc, cfg);
    }
    Trajectory t;
    t.dt = dt;
    t.equation = "navier-stokes";
    t.parameter = mu;
    t.frames.push_back(ns.velocity(w, mean));
    for (std::size_t k = 0; k < steps; ++k) {
        ns.advance(w, mean, dt, nullptr, cfg);
        t.frames.push_back(ns.velocity(w, mean));
    }
    return t;
}

} // namespace lno
