#pragma once

// Square-symmetry group acting on 2-D frames. Each element is a signed 2x2
// permutation matrix M acting on cell-centred index coordinates; a frame maps
// as F'(X) = M F(M^T X) for vector channels and F'(X) = F(M^T X) for scalars.

#include <array>
#include <string>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"

namespace lno {

enum class Symmetry { Identity, Rot90, Rot180, Rot270, FlipX, FlipY, FlipDiag, FlipAntiDiag };

inline constexpr std::array<Symmetry, 8> kAllSymmetries = {
    Symmetry::Identity, Symmetry::Rot90, Symmetry::Rot180, Symmetry::Rot270,
    Symmetry::FlipX,    Symmetry::FlipY, Symmetry::FlipDiag, Symmetry::FlipAntiDiag};

using SymMatrix = std::array<std::array<int, 2>, 2>;

inline SymMatrix matrix_of(Symmetry s) {
    switch (s) {
    case Symmetry::Identity: return {{{1, 0}, {0, 1}}};
    case Symmetry::Rot90: return {{{0, -1}, {1, 0}}};
    case Symmetry::Rot180: return {{{-1, 0}, {0, -1}}};
    case Symmetry::Rot270: return {{{0, 1}, {-1, 0}}};
    case Symmetry::FlipX: return {{{-1, 0}, {0, 1}}};  // mirror in the line x = 0
    case Symmetry::FlipY: return {{{1, 0}, {0, -1}}};  // mirror in y = 0
    case Symmetry::FlipDiag: return {{{0, 1}, {1, 0}}};
    case Symmetry::FlipAntiDiag: return {{{0, -1}, {-1, 0}}};
    }
    return {{{1, 0}, {0, 1}}};
}

inline Symmetry symmetry_of(const SymMatrix& m) {
    for (Symmetry s : kAllSymmetries)
        if (matrix_of(s) == m) return s;
    throw ShapeError("matrix is not a square symmetry");
}

/// compose(a, b) applies b first, then a.
inline Symmetry compose(Symmetry a, Symmetry b) {
    const SymMatrix x = matrix_of(a), y = matrix_of(b);
    SymMatrix r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return symmetry_of(r);
}

inline Symmetry inverse(Symmetry s) {
    const SymMatrix m = matrix_of(s);
    return symmetry_of({{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}});
}

inline std::string to_string(Symmetry s) {
    static const char* names[] = {"identity", "rot90", "rot180", "rot270", "flip-x", "flip-y", "flip-diag", "flip-antidiag"};
    return names[int(s)];
}

/// `vector_channels`: channels 0 and 1 are the (u, v) components of a vector.
inline GridField augment(const GridField& f, Symmetry s, bool vector_channels) {
    if (s == Symmetry::Identity) return f;
    if (f.rank() != 2) throw ShapeError("augmentation needs a 2-D frame, got " + f.shape_string());
    const SymMatrix m = matrix_of(s);
    const long n0 = long(f.dims()[0]), n1 = long(f.dims()[1]);
    if (m[0][0] == 0 && n0 != n1)
        throw ShapeError("rotation or diagonal flip needs a square grid, got " + f.shape_string());
    if (vector_channels && f.channels() < 2) throw ShapeError("vector augmentation needs two channels");
    GridField out(f.channels(), f.dims(), f.dx());
    for (long i = 0; i < n0; ++i)
        for (long j = 0; j < n1; ++j) {
            // doubled centred coordinates stay integral
            const long x0 = 2 * i - (n0 - 1), x1 = 2 * j - (n1 - 1);
            const long y0 = m[0][0] * x0 + m[1][0] * x1;
            const long y1 = m[0][1] * x0 + m[1][1] * x1;
            const std::size_t si = std::size_t((y0 + n0 - 1) / 2), sj = std::size_t((y1 + n1 - 1) / 2);
            for (std::size_t c = 0; c < f.channels(); ++c)
                out.at(c, std::size_t(i), std::size_t(j)) = f.at(c, si, sj);
            if (vector_channels) {
                const double u = f.at(0, si, sj), v = f.at(1, si, sj);
                out.at(0, std::size_t(i), std::size_t(j)) = m[0][0] * u + m[0][1] * v;
                out.at(1, std::size_t(i), std::size_t(j)) = m[1][0] * u + m[1][1] * v;
            }
        }
    return out;
}

} // namespace lno
