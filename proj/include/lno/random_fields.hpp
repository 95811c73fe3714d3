#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

using Coeff4 = std::array<double, 4>;
using Coeff4x4 = std::array<Coeff4, 4>;

/// [sin pi x, sin 2 pi x, cos pi x, cos 2 pi x]
inline Coeff4 trig_basis(double x) {
    const double pi = std::numbers::pi;
    return {std::sin(pi * x), std::sin(2 * pi * x), std::cos(pi * x), std::cos(2 * pi * x)};
}

/// Grid coordinate of index i on the periodic domain starting at -1.
inline double grid_coord(std::size_t i, double dx) { return -1.0 + double(i) * dx; }

/// a(x)^T L b(y) per channel, one 4x4 matrix per channel.
inline GridField force_from_coefficients(const std::vector<Coeff4x4>& lambda, std::size_t n0, std::size_t n1,
                                         double dx) {
    if (lambda.empty()) throw ShapeError("forcing needs at least one channel");
    GridField f(lambda.size(), {n0, n1}, dx);
    std::vector<Coeff4> bx(n0), by(n1);
    for (std::size_t i = 0; i < n0; ++i) bx[i] = trig_basis(grid_coord(i, dx));
    for (std::size_t j = 0; j < n1; ++j) by[j] = trig_basis(grid_coord(j, dx));
    for (std::size_t c = 0; c < lambda.size(); ++c)
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) {
                double v = 0.0;
                for (std::size_t p = 0; p < 4; ++p)
                    for (std::size_t q = 0; q < 4; ++q) v += bx[i][p] * lambda[c][p][q] * by[j][q];
                f.at(c, i, j) = v;
            }
    return f;
}

inline GridField ic_from_coefficients_1d(const std::vector<Coeff4>& lambda, std::size_t n, double dx) {
    if (lambda.empty()) throw ShapeError("initial condition needs at least one channel");
    GridField f(lambda.size(), {n}, dx);
    for (std::size_t i = 0; i < n; ++i) {
        const Coeff4 b = trig_basis(grid_coord(i, dx));
        for (std::size_t c = 0; c < lambda.size(); ++c) {
            double v = 0.0;
            for (std::size_t p = 0; p < 4; ++p) v += lambda[c][p] * b[p];
            f.at(c, i) = v;
        }
    }
    return f;
}

/// Independent standard-normal 4x4 matrix per channel, drawn row by row.
inline GridField random_force_2d(std::uint64_t seed, std::size_t n0, std::size_t n1, double dx,
                                 std::size_t channels = 2) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Coeff4x4> lambda(channels);
    for (auto& m : lambda)
        for (auto& row : m)
            for (double& v : row) v = normal(rng);
    return force_from_coefficients(lambda, n0, n1, dx);
}

inline GridField random_ic_1d(std::uint64_t seed, std::size_t n, double dx, std::size_t channels = 1) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Coeff4> lambda(channels);
    for (auto& c : lambda)
        for (double& v : c) v = normal(rng);
    return ic_from_coefficients_1d(lambda, n, dx);
}

} // namespace lno
