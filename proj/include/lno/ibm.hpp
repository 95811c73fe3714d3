#pragma once

// Direct-forcing immersed boundary correction with the 4-point Peskin kernel.
// Grid node (i, j) sits at (origin[0] + i*dx, origin[1] + j*dx).

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

struct IbmGeometry {
    std::vector<std::array<double, 2>> points; ///< Lagrange points
    std::vector<std::array<double, 2>> wall_velocity; ///< prescribed (u, v) per point
    double ds = 0.0;
    std::array<double, 2> origin{-1.0, -1.0};

    std::size_t size() const noexcept { return points.size(); }
};

/// One-axis factor of the 4-point kernel; r is in grid units.
inline double ibm_delta(double r) {
    const double a = std::abs(r);
    if (a < 1.0) return (3.0 - 2.0 * a + std::sqrt(1.0 + 4.0 * a - 4.0 * a * a)) / 8.0;
    if (a < 2.0) return (5.0 - 2.0 * a - std::sqrt(-7.0 + 12.0 * a - 4.0 * a * a)) / 8.0;
    return 0.0;
}

namespace detail {

struct Support {
    long i0, j0;          ///< first node index per axis
    double wx[4], wy[4];  ///< kernel factors for nodes i0..i0+3, j0..j0+3
};

inline Support ibm_support(const std::array<double, 2>& p, const IbmGeometry& g, double dx,
                           const std::vector<std::size_t>& dims, std::size_t index) {
    const double gx = (p[0] - g.origin[0]) / dx;
    const double gy = (p[1] - g.origin[1]) / dx;
    Support s{long(std::floor(gx)) - 1, long(std::floor(gy)) - 1, {}, {}};
    if (s.i0 < 0 || s.j0 < 0 || s.i0 + 3 >= long(dims[0]) || s.j0 + 3 >= long(dims[1]))
        throw ShapeError("IBM: Lagrange point " + std::to_string(index) + " at (" + std::to_string(p[0]) +
                         ", " + std::to_string(p[1]) + ") has kernel support outside the grid");
    for (int a = 0; a < 4; ++a) {
        s.wx[a] = ibm_delta(double(s.i0 + a) - gx);
        s.wy[a] = ibm_delta(double(s.j0 + a) - gy);
    }
    return s;
}

} // namespace detail

/// Interpolates u* to the Lagrange points, forms F = (U_BC - U*)/dt, spreads it
/// back with weight dx*ds and adds dt*f. The dt factors cancel; it is kept to
/// mirror the forcing formulation.
inline GridField ibm_correct(const GridField& u_star, const IbmGeometry& g, double dt) {
    if (u_star.rank() != 2 || u_star.channels() != 2)
        throw ShapeError("IBM correction needs a 2-channel 2-D velocity field, got " + u_star.shape_string());
    if (g.wall_velocity.size() != g.points.size())
        throw ShapeError("IBM geometry has " + std::to_string(g.points.size()) + " points but " +
                         std::to_string(g.wall_velocity.size()) + " wall velocities");
    if (!(g.ds > 0.0)) throw ShapeError("IBM geometry spacing ds must be positive");
    if (!(dt > 0.0)) throw ShapeError("IBM correction needs dt > 0");
    const double dx = u_star.dx();
    std::vector<detail::Support> sup;
    sup.reserve(g.size());
    for (std::size_t j = 0; j < g.size(); ++j)
        sup.push_back(detail::ibm_support(g.points[j], g, dx, u_star.dims(), j));

    // delta_h = wx*wy/dx^2, so interpolation weights are wx*wy and spreading
    // weights are wx*wy*ds/dx.
    std::vector<std::array<double, 2>> force(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
        const auto& s = sup[j];
        for (std::size_t c = 0; c < 2; ++c) {
            double interp = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    interp += u_star.at(c, std::size_t(s.i0 + a), std::size_t(s.j0 + b)) * s.wx[a] * s.wy[b];
            force[j][c] = (g.wall_velocity[j][c] - interp) / dt;
        }
    }
    GridField out = u_star;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const auto& s = sup[j];
        for (std::size_t c = 0; c < 2; ++c)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double f = force[j][c] * s.wx[a] * s.wy[b] * g.ds / dx;
                    out.at(c, std::size_t(s.i0 + a), std::size_t(s.j0 + b)) += dt * f;
                }
    }
    return out;
}

/// Rows of x, y, u_bc, v_bc; a non-numeric first line is treated as a header.
/// `ds` <= 0 infers the spacing as the mean distance between consecutive rows.
inline IbmGeometry load_ibm_csv(const std::string& path, double ds = 0.0,
                                std::array<double, 2> origin = {-1.0, -1.0}) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open IBM geometry '" + path + "'");
    IbmGeometry g;
    g.origin = origin;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        try {
            while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        } catch (const std::exception&) {
            if (lineno == 1) continue;
            throw FormatError("IBM geometry '" + path + "' line " + std::to_string(lineno) +
                              ": non-numeric value");
        }
        if (row.size() != 4)
            throw FormatError("IBM geometry '" + path + "' line " + std::to_string(lineno) +
                              ": expected 4 columns (x, y, u_bc, v_bc), got " + std::to_string(row.size()));
        g.points.push_back({row[0], row[1]});
        g.wall_velocity.push_back({row[2], row[3]});
    }
    if (g.points.empty()) throw FormatError("IBM geometry '" + path + "' has no points");
    if (ds > 0.0) {
        g.ds = ds;
    } else {
        if (g.points.size() < 2)
            throw FormatError("IBM geometry '" + path + "': ds cannot be inferred from one point");
        double total = 0.0;
        for (std::size_t j = 1; j < g.points.size(); ++j)
            total += std::hypot(g.points[j][0] - g.points[j - 1][0], g.points[j][1] - g.points[j - 1][1]);
        g.ds = total / double(g.points.size() - 1);
    }
    return g;
}

} // namespace lno
