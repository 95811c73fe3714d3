#include <gtest/gtest.h>

#include <complex>
#include <numbers>

#include "test_util.hpp"

using namespace lno;
using std::numbers::pi;

TEST(RandomFields, CoefficientCases) {
    const std::size_t n = 16;
    const double dx = 2.0 / n;
    const GridField z = force_from_coefficients({Coeff4x4{}}, n, n, dx);
    EXPECT_EQ(z.max_abs(), 0.0);
    Coeff4x4 one{};
    one[0][0] = 1.0;
    const GridField s = force_from_coefficients({one}, n, n, dx);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            EXPECT_NEAR(s.at(0, i, j), std::sin(pi * (-1 + i * dx)) * std::sin(pi * (-1 + j * dx)), 1e-14);
    const GridField s1 = ic_from_coefficients_1d({Coeff4{1, 0, 0, 0}}, n, dx);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(s1.at(0, i), std::sin(pi * (-1 + i * dx)), 1e-14);
    EXPECT_EQ(ic_from_coefficients_1d({Coeff4{}}, n, dx).max_abs(), 0.0);
}

TEST(RandomFields, BoundedAndPeriodic) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        double bound = 0.0;
        for (int k = 0; k < 16; ++k) bound += std::abs(normal(rng));
        const GridField f = random_force_2d(seed, 20, 20, 0.1, 1);
        EXPECT_LE(f.max_abs(), bound + 1e-12);
        std::mt19937_64 rng1(seed);
        Coeff4 l;
        for (double& v : l) v = normal(rng1);
        auto u0 = [&](double x) {
            const Coeff4 b = trig_basis(x);
            return l[0] * b[0] + l[1] * b[1] + l[2] * b[2] + l[3] * b[3];
        };
        EXPECT_NEAR(u0(-1.0), u0(1.0), 1e-12);
        const GridField g = random_ic_1d(seed, 32, 2.0 / 32);
        for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(g.at(0, i), u0(grid_coord(i, 2.0 / 32)), 1e-12);
    }
}

TEST(Burgers, ConstantIsSteady) {
    GridField c(1, {32}, 2.0 / 32);
    c.fill(0.7);
    const auto t = solve_burgers(c, 0.01, 0.05, 5);
    for (const auto& f : t.frames)
        for (double v : f.values()) EXPECT_NEAR(v, 0.7, 1e-12);
    GridField c2(2, {8, 8}, 0.25);
    c2.fill(-0.3);
    for (double v : solve_burgers(c2, 0.01, 0.05, 3)[3].values()) EXPECT_NEAR(v, -0.3, 1e-12);
}

TEST(Burgers, DiffusionDominatedDecay) {
    const std::size_t n = 64;
    const GridField ic = ic_from_coefficients_1d({Coeff4{1, 0, 0, 0}}, n, 2.0 / n);
    const auto t = solve_burgers(ic, 1.0, 0.01, 20);
    for (std::size_t k = 1; k < t.size(); ++k) EXPECT_LT(t[k].max_abs(), t[k - 1].max_abs());
}

TEST(Burgers, ConservativeSchemeKeepsMean) {
    const std::size_t n = 64;
    GridField ic = random_ic_1d(3, n, 2.0 / n);
    for (double& v : ic.values()) v += 0.4;
    const auto t = solve_burgers(ic, 0.01, 0.05, 20);
    auto mean = [](const GridField& f) {
        double s = 0.0;
        for (double v : f.values()) s += v;
        return s / double(f.size());
    };
    for (const auto& f : t.frames) EXPECT_NEAR(mean(f), mean(ic), 1e-9);
}

TEST(Burgers, NewtonMeetsIncrementTolerance) {
    // one implicit step satisfies the discrete equations to the Newton tolerance scale
    const std::size_t n = 32;
    const double dx = 2.0 / n, dt = 0.05, mu = 0.02;
    const GridField u0 = random_ic_1d(4, n, dx);
    const GridField u1 = burgers_step(u0, mu, dt);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ip = (i + 1) % n, im = (i + n - 1) % n;
        const double r = (u1.at(0, i) - u0.at(0, i)) / dt +
                         (u1.at(0, ip) * u1.at(0, ip) - u1.at(0, im) * u1.at(0, im)) / (4 * dx) -
                         mu * (u1.at(0, ip) - 2 * u1.at(0, i) + u1.at(0, im)) / (dx * dx);
        EXPECT_LT(std::abs(r), 1e-5);
    }
}

TEST(Burgers, FineGridSelfConvergence) {
    const std::size_t n = 64;
    const GridField coarse_ic = ic_from_coefficients_1d({Coeff4{1, 0, 0, 0}}, n, 2.0 / n);
    const GridField fine_ic = ic_from_coefficients_1d({Coeff4{1, 0, 0, 0}}, 4 * n, 2.0 / (4 * n));
    const GridField a = solve_burgers(coarse_ic, 0.01, 0.05, 20).frames.back();
    const GridField b = solve_burgers(fine_ic, 0.01, 0.05 / 4, 80).frames.back();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a.at(0, i) - b.at(0, 4 * i);
        num += d * d;
        den += b.at(0, 4 * i) * b.at(0, 4 * i);
    }
    const double rel = std::sqrt(num / den);
    RecordProperty("relative_l2", std::to_string(rel));
    // implicit Euler is first order in time; see the decisions notes
    EXPECT_LT(rel, 2e-3);
}

TEST(Burgers, Rot180Equivariance) {
    const std::size_t n = 12;
    const double dx = 2.0 / n;
    GridField ic = random_force_2d(7, n, n, dx, 2);
    for (double& v : ic.values()) v *= 0.1;
    const auto fwd = solve_burgers(ic, 0.05, 0.02, 5);
    const auto rot = solve_burgers(augment(ic, Symmetry::Rot180, true), 0.05, 0.02, 5);
    for (std::size_t k = 0; k < fwd.size(); ++k)
        EXPECT_LT(testutil::max_diff(rot[k], augment(fwd[k], Symmetry::Rot180, true)), 1e-8);
    // flips and diagonal transposes too
    for (Symmetry s : {Symmetry::FlipX, Symmetry::Rot90, Symmetry::FlipDiag}) {
        const auto r = solve_burgers(augment(ic, s, true), 0.05, 0.02, 2);
        EXPECT_LT(testutil::max_diff(r[2], augment(fwd[2], s, true)), 1e-8) << to_string(s);
    }
}

TEST(Burgers, BadInputs) {
    EXPECT_THROW(solve_burgers(GridField(2, {8}, 0.1), 0.01, 0.05, 1), ShapeError);
    EXPECT_THROW(solve_burgers(GridField(1, {8}, 0.1), 0.0, 0.05, 1), ShapeError);
    GridField wild = random_force_2d(1, 16, 16, 2.0 / 16, 2);
    for (double& v : wild.values()) v *= 50.0;
    EXPECT_THROW(burgers_step(wild, 1e-4, 1.0, NewtonSettings{1e-7, 3}), NumericalError);
}

TEST(Wave, ZeroStaysZero) {
    const auto t = solve_wave(GridField(1, {8, 8}, 0.25), 1.0, 0.1, 5);
    for (const auto& f : t.frames) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(Wave, EnergyConserved) {
    const std::size_t n = 32;
    const GridField p0 = random_force_2d(1, n, n, 2.0 / n, 1);
    const auto t = solve_wave(p0, 1.0, 0.1, 100);
    const double e0 = wave_energy(t[0], 1.0);
    for (const auto& f : t.frames) EXPECT_LT(std::abs(wave_energy(f, 1.0) - e0) / e0, 1e-8);
}

TEST(Wave, SingleModeRecurrence) {
    const std::size_t n = 16;
    const double dx = 2.0 / n, dt = 0.1, a0 = 0.8;
    GridField p0(1, {n, n}, dx);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p0.at(0, i, j) = std::cos(pi * (-1 + i * dx)) * std::cos(pi * (-1 + j * dx));
    // 5-point Laplacian eigenvalue of this mode; average-acceleration Newmark is a
    // pure rotation by theta with cos(theta) = (1 - b w2) / (1 + b w2)
    const double lam = -2.0 * (2.0 - 2.0 * std::cos(pi * dx)) / (dx * dx);
    const double w2 = -a0 * a0 * lam, b = dt * dt / 4;
    const double theta = std::acos((1 - b * w2) / (1 + b * w2));
    const auto t = solve_wave(p0, a0, dt, 40);
    for (std::size_t k = 0; k < t.size(); ++k)
        for (std::size_t i = 0; i < n * n; i += 7)
            EXPECT_NEAR(t[k].at(0, i), p0.at(0, i) * std::cos(double(k) * theta), 1e-10) << k;
}

TEST(Wave, OneDimensional) {
    const std::size_t n = 32;
    const auto t = solve_wave(random_ic_1d(2, n, 2.0 / n), 1.0, 0.1, 50);
    const double e0 = wave_energy(t[0], 1.0);
    EXPECT_LT(std::abs(wave_energy(t[50], 1.0) - e0) / e0, 1e-8);
}

namespace {

GridField taylor_green(std::size_t n) {
    const double dx = 2.0 / n;
    GridField f(2, {n, n}, dx);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double x = -1 + i * dx, y = -1 + j * dx;
            f.at(0, i, j) = std::cos(pi * x) * std::sin(pi * y);
            f.at(1, i, j) = -std::sin(pi * x) * std::cos(pi * y);
        }
    return f;
}

// Spectral divergence by a direct O(n^4) DFT; Nyquist modes dropped.
double naive_divergence_max(const GridField& uv) {
    const std::size_t n = uv.dims()[0];
    using C = std::complex<double>;
    const double L = 2.0;
    double worst = 0.0;
    std::vector<C> dh(n * n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            const long kp = p <= n / 2 ? long(p) : long(p) - long(n);
            const long kq = q <= n / 2 ? long(q) : long(q) - long(n);
            if (std::size_t(std::abs(kp)) * 2 == n || std::size_t(std::abs(kq)) * 2 == n) continue;
            C uh{}, vh{};
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    const C e = std::polar(1.0, -2 * pi * (double(p * i) + double(q * j)) / double(n));
                    uh += uv.at(0, i, j) * e;
                    vh += uv.at(1, i, j) * e;
                }
            dh[p * n + q] = C(0, 1) * (2 * pi / L) * (double(kp) * uh + double(kq) * vh);
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            C s{};
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = 0; q < n; ++q)
                    s += dh[p * n + q] * std::polar(1.0, 2 * pi * (double(p * i) + double(q * j)) / double(n));
            worst = std::max(worst, std::abs(s) / double(n * n));
        }
    return worst;
}

} // namespace

TEST(NavierStokes, TaylorGreenDecay) {
    const GridField ic = taylor_green(32);
    const auto t = solve_ns_periodic(ic, 0.01, 0.1, 10);
    const double expect = std::exp(-2 * 0.01 * pi * pi);
    for (std::size_t i = 0; i < ic.size(); i += 5)
        EXPECT_NEAR(t[10].values()[i], expect * ic.values()[i], 1e-3 * expect);
}

TEST(NavierStokes, ZeroStaysZero) {
    const auto t = solve_ns_periodic(GridField(2, {16, 16}, 0.125), 0.01, 0.05, 4);
    for (const auto& f : t.frames) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(NavierStokes, ForcedFramesDivergenceFree) {
    const std::size_t n = 16;
    const GridField force = random_force_2d(3, n, n, 2.0 / n, 2);
    const auto t = solve_ns_periodic(GridField(2, {n, n}, 2.0 / n), 0.01, 0.05, 6, force, 0.05);
    EXPECT_GT(t[0].max_abs(), 1e-3);
    for (const auto& f : t.frames) EXPECT_LT(naive_divergence_max(f), 1e-10);
    NsSpectral ns(n, n, 2.0 / n, 0.01);
    EXPECT_LT(ns.divergence(t[6]).max_abs(), 1e-10);
}
