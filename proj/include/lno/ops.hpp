#pragma once

// Differentiable field operations. Each op evaluates eagerly and, when the tape
// is recording, registers an adjoint. Weight tensors and basis spans captured by
// an op must outlive the tape's backward pass.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "lno/errors.hpp"
#include "lno/grid_field.hpp"
#include "lno/kernels.hpp"
#include "lno/tape.hpp"

namespace lno {

enum class DeconvExtent {
    Full,            ///< every position touched by at least one window
    CoveredInterior, ///< only positions covered by all K^d overlapping windows
};

enum class PadMode { None, Periodic, Constant };

struct PadSide {
    PadMode mode = PadMode::None;
    std::size_t width = 0;
    std::vector<double> values; ///< one per channel for Constant
};

using PadAxis = std::array<PadSide, 2>; ///< {low side, high side}

namespace detail {

inline Plane kernel_plane(const std::vector<std::size_t>& shape, std::size_t rank) {
    if (shape.size() != rank + 2)
        throw ShapeError("kernel rank " + std::to_string(shape.size() - 2) +
                         " does not match field rank " + std::to_string(rank));
    if (rank == 1) return {1, shape[2]};
    return {shape[2], shape[3]};
}

inline Plane stride_plane(std::size_t stride, std::size_t rank) {
    if (stride == 0) throw ShapeError("stride must be positive");
    return rank == 1 ? Plane{1, stride} : Plane{stride, stride};
}

inline void check_valid_window(Plane in, Plane k, Plane s, std::size_t rank, const char* what) {
    const std::size_t n_in[2] = {in.rows, in.cols};
    const std::size_t n_k[2] = {k.rows, k.cols};
    const std::size_t n_s[2] = {s.rows, s.cols};
    for (std::size_t a = (rank == 1 ? 1 : 0); a < 2; ++a) {
        const std::size_t axis = rank == 1 ? 0 : a;
        if (n_k[a] > n_in[a])
            throw ShapeError(std::string(what) + ": axis " + axis_name(rank, axis) + " extent " +
                             std::to_string(n_in[a]) + " is smaller than the kernel extent " +
                             std::to_string(n_k[a]));
        if ((n_in[a] - n_k[a]) % n_s[a] != 0)
            throw ShapeError(std::string(what) + ": axis " + axis_name(rank, axis) + " extent " +
                             std::to_string(n_in[a]) + " minus kernel " + std::to_string(n_k[a]) +
                             " is not divisible by stride " + std::to_string(n_s[a]));
    }
}

inline void accumulate(GridField& dst, std::span<const double> src) {
    auto d = dst.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += src[i];
}

} // namespace detail

/// Valid (unpadded) multi-channel convolution. Kernel shape [cout][cin][k...].
inline Var conv(Tape& tape, const Var& x, const WeightTensor& w, std::size_t stride = 1) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    const Plane k = detail::kernel_plane(w.shape, rank);
    const Plane s = detail::stride_plane(stride, rank);
    if (w.shape[1] != in.channels())
        throw ShapeError("conv '" + w.name + "': kernel expects " + std::to_string(w.shape[1]) +
                         " input channels, field has " + std::to_string(in.channels()));
    detail::check_valid_window(in.plane(), k, s, rank, "conv");
    kernels::ConvGeometry g{in.channels(), w.shape[0], in.plane(), k, s, {}};
    g.out = kernels::valid_extent(g.in, k, s);
    GridField out(g.cout, dims_of(g.out, rank), in.dx() * double(stride));
    kernels::conv_forward(in.values().data(), w.values.data(), g, out.values().data());
    return tape.record(std::move(out), [x, &w, g](const Node& self) {
        const double* go = self.grad.values().data();
        kernels::conv_backward_input(go, w.values.data(), g, x->grad_buffer().values().data());
        if (w.requires_grad)
            kernels::conv_backward_weight(go, x->value.values().data(), g, w.grad.data());
    });
}

/// Transposed (fractionally strided) convolution scaled by 1/K^d, where
/// K = window / stride is the per-axis overlap count. Kernel shape
/// [cin][cout][window...].
inline Var deconv(Tape& tape, const Var& x, const WeightTensor& w, std::size_t stride,
                  std::size_t overlap, DeconvExtent extent = DeconvExtent::CoveredInterior) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    const Plane k = detail::kernel_plane(w.shape, rank);
    const Plane s = detail::stride_plane(stride, rank);
    if (overlap == 0 || k.cols % overlap != 0 || k.cols / overlap != stride ||
        (rank == 2 && (k.rows % overlap != 0 || k.rows / overlap != stride)))
        throw ShapeError("deconv: overlap count " + std::to_string(overlap) +
                         " must divide the window and equal window/stride");
    if (w.shape[0] != in.channels())
        throw ShapeError("deconv '" + w.name + "': kernel expects " + std::to_string(w.shape[0]) +
                         " coefficient channels, field has " + std::to_string(in.channels()));
    kernels::ConvGeometry g{in.channels(), w.shape[1], in.plane(), k, s, {}};
    g.out = {(g.in.rows - 1) * s.rows + k.rows, (g.in.cols - 1) * s.cols + k.cols};
    const double scale = 1.0 / std::pow(double(overlap), double(rank));
    const double dx = in.dx() / double(stride);
    GridField full(g.cout, dims_of(g.out, rank), dx);
    kernels::deconv_forward(in.values().data(), w.values.data(), scale, g, full.values().data());

    if (extent == DeconvExtent::Full) {
        return tape.record(std::move(full), [x, &w, g, scale](const Node& self) {
            const double* go = self.grad.values().data();
            kernels::deconv_backward_input(go, w.values.data(), scale, g,
                                           x->grad_buffer().values().data());
            if (w.requires_grad)
                kernels::deconv_backward_weight(go, x->value.values().data(), scale, g, w.grad.data());
        });
    }

    const std::size_t trim = (overlap - 1) * stride;
    const Plane lo = rank == 1 ? Plane{0, trim} : Plane{trim, trim};
    if (g.out.rows <= 2 * lo.rows || g.out.cols <= 2 * lo.cols)
        throw ShapeError("deconv: " + std::to_string(g.in.cols) +
                         " windows leave no fully covered interior for overlap " +
                         std::to_string(overlap));
    const Plane inner{g.out.rows - 2 * lo.rows, g.out.cols - 2 * lo.cols};
    GridField out(g.cout, dims_of(inner, rank), dx);
    for (std::size_t o = 0; o < g.cout; ++o)
        for (std::size_t r = 0; r < inner.rows; ++r)
            for (std::size_t c = 0; c < inner.cols; ++c)
                out.values()[(o * inner.rows + r) * inner.cols + c] =
                    full.values()[(o * g.out.rows + r + lo.rows) * g.out.cols + c + lo.cols];
    return tape.record(std::move(out), [x, &w, g, scale, lo, inner](const Node& self) {
        std::vector<double> gfull(g.cout * g.out.size(), 0.0);
        for (std::size_t o = 0; o < g.cout; ++o)
            for (std::size_t r = 0; r < inner.rows; ++r)
                for (std::size_t c = 0; c < inner.cols; ++c)
                    gfull[(o * g.out.rows + r + lo.rows) * g.out.cols + c + lo.cols] =
                        self.grad.values()[(o * inner.rows + r) * inner.cols + c];
        kernels::deconv_backward_input(gfull.data(), w.values.data(), scale, g,
                                       x->grad_buffer().values().data());
        if (w.requires_grad)
            kernels::deconv_backward_weight(gfull.data(), x->value.values().data(), scale, g,
                                            w.grad.data());
    });
}

/// Projects every channel onto `modes` fixed window kernels with the given
/// stride. Output channel c*modes + m holds coefficient m of input channel c.
/// `basis` is laid out [mode][window] and is not differentiated.
inline Var basis_conv(Tape& tape, const Var& x, std::span<const double> basis, std::size_t modes,
                      Plane window, std::size_t stride) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    const Plane s = detail::stride_plane(stride, rank);
    detail::check_valid_window(in.plane(), window, s, rank, "spectral transform");
    kernels::ConvGeometry g{1, modes, in.plane(), window, s, {}};
    g.out = kernels::valid_extent(g.in, window, s);
    const std::size_t channels = in.channels();
    GridField out(channels * modes, dims_of(g.out, rank), in.dx() * double(stride));
    for (std::size_t c = 0; c < channels; ++c)
        kernels::conv_forward(in.values().data() + c * g.in.size(), basis.data(), g,
                              out.values().data() + c * modes * g.out.size());
    return tape.record(std::move(out), [x, basis, g, channels](const Node& self) {
        double* gin = x->grad_buffer().values().data();
        for (std::size_t c = 0; c < channels; ++c)
            kernels::conv_backward_input(self.grad.values().data() + c * g.cout * g.out.size(),
                                         basis.data(), g, gin + c * g.in.size());
    });
}

/// Inverse of basis_conv: every coefficient window is scattered back through the
/// reconstruction kernels, overlapping windows are averaged (1/K^d) and the
/// result is restricted to the fully covered interior.
inline Var basis_deconv(Tape& tape, const Var& x, std::span<const double> basis, std::size_t modes,
                        Plane window, std::size_t stride, std::size_t overlap) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    if (in.channels() % modes != 0)
        throw ShapeError("spectral reconstruction: channel count is not a multiple of the modes");
    const std::size_t channels = in.channels() / modes;
    const Plane s = detail::stride_plane(stride, rank);
    kernels::ConvGeometry g{modes, 1, in.plane(), window, s, {}};
    g.out = {(g.in.rows - 1) * s.rows + window.rows, (g.in.cols - 1) * s.cols + window.cols};
    const double scale = 1.0 / std::pow(double(overlap), double(rank));
    const std::size_t trim = (overlap - 1) * stride;
    const Plane lo = rank == 1 ? Plane{0, trim} : Plane{trim, trim};
    if (g.out.rows <= 2 * lo.rows || g.out.cols <= 2 * lo.cols)
        throw ShapeError("spectral reconstruction: too few windows for a covered interior");
    const Plane inner{g.out.rows - 2 * lo.rows, g.out.cols - 2 * lo.cols};

    std::vector<double> full(g.out.size());
    GridField out(channels, dims_of(inner, rank), in.dx() / double(stride));
    for (std::size_t c = 0; c < channels; ++c) {
        std::fill(full.begin(), full.end(), 0.0);
        kernels::deconv_forward(in.values().data() + c * modes * g.in.size(), basis.data(), scale, g,
                                full.data());
        for (std::size_t r = 0; r < inner.rows; ++r)
            for (std::size_t q = 0; q < inner.cols; ++q)
                out.values()[(c * inner.rows + r) * inner.cols + q] =
                    full[(r + lo.rows) * g.out.cols + q + lo.cols];
    }
    return tape.record(std::move(out), [x, basis, g, scale, lo, inner, channels, modes](const Node& self) {
        std::vector<double> gfull(g.out.size());
        double* gin = x->grad_buffer().values().data();
        for (std::size_t c = 0; c < channels; ++c) {
            std::fill(gfull.begin(), gfull.end(), 0.0);
            for (std::size_t r = 0; r < inner.rows; ++r)
                for (std::size_t q = 0; q < inner.cols; ++q)
                    gfull[(r + lo.rows) * g.out.cols + q + lo.cols] =
                        self.grad.values()[(c * inner.rows + r) * inner.cols + q];
            kernels::deconv_backward_input(gfull.data(), basis.data(), scale, g,
                                           gin + c * modes * g.in.size());
        }
    });
}

/// Per-channel linear map on spectral coefficients:
/// out[c][m'] = sum_m W[c][m][m'] * in[c][m], at every window position.
inline Var spectral_mix(Tape& tape, const Var& x, const WeightTensor& w) {
    const GridField& in = x->value;
    if (w.shape.size() != 3 || w.shape[1] != w.shape[2])
        throw ShapeError("spectral mix '" + w.name + "' must have shape [channel][modes][modes]");
    const std::size_t channels = w.shape[0];
    const std::size_t modes = w.shape[1];
    if (in.channels() != channels * modes)
        throw ShapeError("spectral mix '" + w.name + "': expected " +
                         std::to_string(channels * modes) + " coefficient channels, got " +
                         std::to_string(in.channels()));
    const std::size_t pts = in.points();
    GridField out(in.channels(), in.dims(), in.dx());
    const double* src = in.values().data();
    double* dst = out.values().data();
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t m = 0; m < modes; ++m)
            for (std::size_t mp = 0; mp < modes; ++mp) {
                const double wv = w.values[(c * modes + m) * modes + mp];
                const double* s = src + (c * modes + m) * pts;
                double* d = dst + (c * modes + mp) * pts;
                for (std::size_t p = 0; p < pts; ++p) d[p] += wv * s[p];
            }
    return tape.record(std::move(out), [x, &w, channels, modes, pts](const Node& self) {
        const double* go = self.grad.values().data();
        const double* in_v = x->value.values().data();
        double* gin = x->grad_buffer().values().data();
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t m = 0; m < modes; ++m)
                for (std::size_t mp = 0; mp < modes; ++mp) {
                    const std::size_t wi = (c * modes + m) * modes + mp;
                    const double* g = go + (c * modes + mp) * pts;
                    const double* s = in_v + (c * modes + m) * pts;
                    double* gi = gin + (c * modes + m) * pts;
                    const double wv = w.values[wi];
                    double acc = 0.0;
                    for (std::size_t p = 0; p < pts; ++p) {
                        gi[p] += wv * g[p];
                        acc += g[p] * s[p];
                    }
                    if (w.requires_grad) w.grad[wi] += acc;
                }
    });
}

inline Var gelu(Tape& tape, const Var& x) {
    GridField out = x->value;
    for (double& v : out.values()) v = kernels::gelu(v);
    return tape.record(std::move(out), [x](const Node& self) {
        auto gin = x->grad_buffer().values();
        auto in = x->value.values();
        auto go = self.grad.values();
        for (std::size_t i = 0; i < gin.size(); ++i) gin[i] += kernels::gelu_derivative(in[i]) * go[i];
    });
}

inline Var add(Tape& tape, const Var& a, const Var& b) {
    if (!a->value.same_shape(b->value))
        throw ShapeError("add: shapes " + a->value.shape_string() + " and " +
                         b->value.shape_string() + " differ");
    GridField out = a->value;
    auto o = out.values();
    auto bv = b->value.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += bv[i];
    return tape.record(std::move(out), [a, b](const Node& self) {
        detail::accumulate(a->grad_buffer(), self.grad.values());
        detail::accumulate(b->grad_buffer(), self.grad.values());
    });
}

/// Removes lo[a] points from the low side and hi[a] from the high side of axis a.
inline Var crop(Tape& tape, const Var& x, const std::vector<std::size_t>& lo,
                const std::vector<std::size_t>& hi) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    if (lo.size() != rank || hi.size() != rank) throw ShapeError("crop: one amount per axis required");
    for (std::size_t a = 0; a < rank; ++a)
        if (lo[a] + hi[a] >= in.dims()[a])
            throw ShapeError(std::string("crop: axis ") + axis_name(rank, a) + " of extent " +
                             std::to_string(in.dims()[a]) + " cannot lose " +
                             std::to_string(lo[a] + hi[a]) + " points");
    if (std::all_of(lo.begin(), lo.end(), [](auto v) { return v == 0; }) &&
        std::all_of(hi.begin(), hi.end(), [](auto v) { return v == 0; }))
        return x;
    const Plane ip = in.plane();
    const Plane off = rank == 1 ? Plane{0, lo[0]} : Plane{lo[0], lo[1]};
    const Plane op = rank == 1 ? Plane{1, ip.cols - lo[0] - hi[0]}
                               : Plane{ip.rows - lo[0] - hi[0], ip.cols - lo[1] - hi[1]};
    GridField out(in.channels(), dims_of(op, rank), in.dx());
    for (std::size_t c = 0; c < in.channels(); ++c)
        for (std::size_t r = 0; r < op.rows; ++r)
            for (std::size_t q = 0; q < op.cols; ++q)
                out.values()[(c * op.rows + r) * op.cols + q] =
                    in.values()[(c * ip.rows + r + off.rows) * ip.cols + q + off.cols];
    return tape.record(std::move(out), [x, ip, op, off](const Node& self) {
        auto gin = x->grad_buffer().values();
        const std::size_t channels = x->value.channels();
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t r = 0; r < op.rows; ++r)
                for (std::size_t q = 0; q < op.cols; ++q)
                    gin[(c * ip.rows + r + off.rows) * ip.cols + q + off.cols] +=
                        self.grad.values()[(c * op.rows + r) * op.cols + q];
    });
}

namespace detail {

// Source index per output position along one axis; -1 marks a constant fill.
inline std::vector<long> pad_index_map(std::size_t n, const PadAxis& axis, std::size_t rank,
                                       std::size_t a) {
    for (const PadSide& side : axis)
        if (side.mode == PadMode::None && side.width != 0)
            throw ShapeError(std::string("pad: axis ") + axis_name(rank, a) +
                             " has a nonzero width with no padding rule");
    const std::size_t lo = axis[0].width, hi = axis[1].width;
    std::vector<long> map(n + lo + hi);
    for (std::size_t j = 0; j < map.size(); ++j) {
        const long rel = long(j) - long(lo);
        if (rel >= 0 && rel < long(n)) {
            map[j] = rel;
            continue;
        }
        const PadSide& side = rel < 0 ? axis[0] : axis[1];
        if (side.mode == PadMode::Periodic)
            map[j] = ((rel % long(n)) + long(n)) % long(n);
        else
            map[j] = -1;
    }
    return map;
}

} // namespace detail

/// Extends each axis by the per-side widths: circular wrap for Periodic, a
/// per-channel fill for Constant. Where two constant regions meet at a corner,
/// the axis-0 rule wins.
inline Var pad(Tape& tape, const Var& x, const std::vector<PadAxis>& axes) {
    const GridField& in = x->value;
    const std::size_t rank = in.rank();
    if (axes.size() != rank) throw ShapeError("pad: one rule pair per axis required");
    for (std::size_t a = 0; a < rank; ++a)
        for (const PadSide& side : axes[a])
            if (side.mode == PadMode::Constant && side.width > 0 &&
                side.values.size() != in.channels())
                throw ShapeError(std::string("pad: constant rule on axis ") + axis_name(rank, a) +
                                 " needs " + std::to_string(in.channels()) +
                                 " per-channel values, got " + std::to_string(side.values.size()));
    const Plane ip = in.plane();
    std::vector<long> rows_map = rank == 1 ? std::vector<long>{0}
                                           : detail::pad_index_map(ip.rows, axes[0], rank, 0);
    std::vector<long> cols_map = detail::pad_index_map(ip.cols, axes[rank - 1], rank, rank - 1);
    const Plane op{rows_map.size(), cols_map.size()};
    auto fill_value = [&](std::size_t c, std::size_t r, std::size_t q) {
        if (rank == 2 && rows_map[r] < 0) {
            const PadSide& side = r < axes[0][0].width ? axes[0][0] : axes[0][1];
            return side.values[c];
        }
        const PadSide& side = q < axes[rank - 1][0].width ? axes[rank - 1][0] : axes[rank - 1][1];
        return side.values[c];
    };
    GridField out(in.channels(), dims_of(op, rank), in.dx());
    for (std::size_t c = 0; c < in.channels(); ++c)
        for (std::size_t r = 0; r < op.rows; ++r)
            for (std::size_t q = 0; q < op.cols; ++q) {
                double& dst = out.values()[(c * op.rows + r) * op.cols + q];
                if (rows_map[r] < 0 || cols_map[q] < 0)
                    dst = fill_value(c, r, q);
                else
                    dst = in.values()[(c * ip.rows + std::size_t(rows_map[r])) * ip.cols +
                                      std::size_t(cols_map[q])];
            }
    return tape.record(std::move(out), [x, ip, op, rows_map = std::move(rows_map),
                                        cols_map = std::move(cols_map)](const Node& self) {
        auto gin = x->grad_buffer().values();
        const std::size_t channels = x->value.channels();
        for (std::size_t c = 0; c < channels; ++c)
            for (std::size_t r = 0; r < op.rows; ++r) {
                if (rows_map[r] < 0) continue;
                for (std::size_t q = 0; q < op.cols; ++q) {
                    if (cols_map[q] < 0) continue;
                    gin[(c * ip.rows + std::size_t(rows_map[r])) * ip.cols + std::size_t(cols_map[q])] +=
                        self.grad.values()[(c * op.rows + r) * op.cols + q];
                }
            }
    });
}

/// Mean over grid points of the Euclidean norm across channels of pred - target.
inline Var mean_l2(Tape& tape, const Var& pred, const GridField& target) {
    const GridField& p = pred->value;
    if (!p.same_shape(target))
        throw ShapeError("mean_l2: prediction " + p.shape_string() + " vs target " +
                         target.shape_string());
    const std::size_t pts = p.points();
    const std::size_t ch = p.channels();
    std::vector<double> norms(pts, 0.0);
    for (std::size_t c = 0; c < ch; ++c)
        for (std::size_t i = 0; i < pts; ++i) {
            const double d = p.at(c, i) - target.at(c, i);
            norms[i] += d * d;
        }
    double total = 0.0;
    for (double& n : norms) {
        n = std::sqrt(n);
        total += n;
    }
    GridField out(1, {1}, p.dx(), {total / double(pts)});
    return tape.record(std::move(out), [pred, target, norms = std::move(norms)](const Node& self) {
        const double seed = self.grad.values()[0];
        GridField& g = pred->grad_buffer();
        const std::size_t pts = norms.size();
        for (std::size_t c = 0; c < g.channels(); ++c)
            for (std::size_t i = 0; i < pts; ++i) {
                if (norms[i] == 0.0) continue;
                g.at(c, i) += seed * (pred->value.at(c, i) - target.at(c, i)) / (norms[i] * double(pts));
            }
    });
}

/// scale * sum of scalar nodes.
inline Var scaled_sum(Tape& tape, const std::vector<Var>& terms, double scale) {
    double total = 0.0;
    for (const Var& t : terms) {
        if (t->value.size() != 1) throw ShapeError("scaled_sum expects scalar terms");
        total += t->value.values()[0];
    }
    GridField out(1, {1}, 1.0, {scale * total});
    return tape.record(std::move(out), [terms, scale](const Node& self) {
        for (const Var& t : terms) t->grad_buffer().values()[0] += scale * self.grad.values()[0];
    });
}

} // namespace lno
